#pragma once

// Cole-Hopf solution of the viscous Burgers equation
//     d_t w + w d_x w = nu d_xx w,   w = c alpha (1 - rho),
// for the periodic cosine initial condition rho = rho_b + rho_a cos(beta x).
// psi is a modified-Bessel series; see ColeHopfSolution.

#include <memory>
#include <span>
#include <vector>

namespace qlg {

struct AnalyticConfig {
    double lx = 0.0;
    double rho_a = 0.0;
    double rho_b = 1.0;
    double c = 1.0;     // dx/dt
    double alpha = 0.0; // c alpha is the advection speed
    double nu = 0.0;
    int l_trunc = 80;
};

void validate(const AnalyticConfig& cfg);

/// I_l(a) / I_0(a) for a > 0 by normalized backward recurrence, so unscaled
/// I_l is never formed. Relative error below 1e-10 for l <= 400.
double bessel_ratio(int l, double a);

/// Ratios for l = 0..l_max in one recurrence pass.
std::vector<double> bessel_ratios(int l_max, double a);

/// psi(x, t) = I_0(A) + 2 sum_l I_l(A) e^{-nu l^2 beta^2 t} cos(l (beta x' - pi/2))
/// with A = c alpha rho_a / (2 nu beta) and x' = x - w_bar t, w_bar = c alpha (1 - rho_b).
/// The shift is the Galilean boost that takes the rho_b = 1 solution to
/// general rho_b. Sums run in quad precision: psi spans e^{-2A}..1 and the
/// log derivative cancels badly in double once A exceeds ~10.
class ColeHopfSolution {
public:
    explicit ColeHopfSolution(const AnalyticConfig& cfg);
    ~ColeHopfSolution();
    ColeHopfSolution(const ColeHopfSolution&);
    ColeHopfSolution& operator=(const ColeHopfSolution&);
    ColeHopfSolution(ColeHopfSolution&&) noexcept;
    ColeHopfSolution& operator=(ColeHopfSolution&&) noexcept;

    const AnalyticConfig& config() const noexcept;
    double bessel_argument() const noexcept;

    double density(double x, double t) const;
    // w = c alpha (1 - rho), computed directly rather than from density().
    double velocity(double x, double t) const;

    std::vector<double> density(std::span<const double> xs, double t) const;
    std::vector<double> velocity(std::span<const double> xs, double t) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

double cole_hopf_density(double x, double t, const AnalyticConfig& cfg);

/// Max |w_t + w w_x - nu w_xx| over n_points x-samples of [0, L) and the given
/// times, with centred differences of step h in both x and t.
double residual_check(const AnalyticConfig& cfg, double h, std::span<const double> times, int n_points);

} // namespace qlg
