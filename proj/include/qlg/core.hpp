#pragma once

// Single-site kernel of the two-qubit quantum lattice gas: the mass-conserving
// collision unitary, cell-state preparation and measurement, the closed-form
// collision term and its equilibrium, and the transport coefficients predicted
// by the Chapman-Enskog expansion.
//
// Basis ordering is |q0 q1> with amplitude index 2*q0 + q1, so the number
// operators are n0 = diag(0,0,1,1) and n1 = diag(0,1,0,1).
//
// Everything here is a pure function of its arguments.

#include <array>
#include <cmath>
#include <complex>

namespace qlg {

using Complex = std::complex<double>;

// Tolerance for population ranges and state normalization.
inline constexpr double kStateTolerance = 1e-12;

// Below this |alpha| the equilibrium switches to its symmetric limit.
inline constexpr double kAlphaZero = 1e-8;

/// Euler angles of the collision unitary. Construction validates
/// theta in (0, pi/2]; alpha = cot(theta) cos(zeta - xi) is then finite.
class CollisionParams {
public:
    explicit CollisionParams(double theta, double zeta = 0.0, double xi = 0.0);

    double theta() const noexcept { return theta_; }
    double zeta() const noexcept { return zeta_; }
    double xi() const noexcept { return xi_; }
    double alpha() const noexcept { return alpha_; }

    // sin^2(theta) and sin(2 theta) cos(zeta - xi), cached for the hot loop.
    double sin2_theta() const noexcept { return sin2_theta_; }
    double mixing() const noexcept { return mixing_; }

private:
    double theta_;
    double zeta_;
    double xi_;
    double alpha_;
    double sin2_theta_;
    double mixing_;
};

/// Occupation probabilities of the two populations at one site.
struct PopulationPair {
    double f0 = 0.0;
    double f1 = 0.0;

    double rho() const noexcept { return f0 + f1; }
    double u() const noexcept { return f1 - f0; }

    friend bool operator==(const PopulationPair&, const PopulationPair&) = default;
};

// Throws InvalidArgument unless 0 <= f_i <= 1 within kStateTolerance.
void validate(const PopulationPair& pair);

struct CellState {
    std::array<Complex, 4> amplitudes{};

    double norm_squared() const noexcept;
};

struct Unitary4 {
    std::array<std::array<Complex, 4>, 4> m{};

    const Complex& operator()(int row, int col) const { return m[row][col]; }
    Complex& operator()(int row, int col) { return m[row][col]; }

    Unitary4 adjoint() const;
    Unitary4 operator*(const Unitary4& rhs) const;
    CellState operator*(const CellState& state) const;
};

Unitary4 build_collision_unitary(const CollisionParams& params);

/// Product state of two qubits sqrt(1-f)|0> + sqrt(f)|1>.
CellState prepare_cell(const PopulationPair& pair);

/// Expectation values of n0 and n1. Rejects states that are not normalized.
PopulationPair measure_populations(const CellState& state);

/// Prepare, apply the collision unitary, measure.
PopulationPair collide_quantum(const PopulationPair& pair, const CollisionParams& params);

/// Collision term: f0 loses omega, f1 gains it.
double omega(const PopulationPair& pair, const CollisionParams& params);

/// (f0 - omega, f1 + omega). A result outside [0,1] beyond kStateTolerance
/// raises CollisionRange rather than being clamped.
PopulationPair collide_closed_form(const PopulationPair& pair, const CollisionParams& params);

/// Root of omega = 0 at fixed density rho in [0,2]. For |alpha| < kAlphaZero
/// this is (rho/2, rho/2).
PopulationPair equilibrium(double rho, const CollisionParams& params);

/// u = f1_eq - f0_eq as a function of rho.
double momentum_eq(double rho, const CollisionParams& params);

/// d(omega)/d(f1) - d(omega)/d(f0) evaluated at equilibrium(rho):
/// -2 sin^2(theta) sqrt(1 + alpha^2) sqrt(1 + alpha^2 (rho - 1)^2).
double jacobian_gap(double rho, const CollisionParams& params);

struct PdeCoefficients1D {
    double c_s = 0.0;      // advection speed
    double nu = 0.0;       // corrected viscosity
    double nu_yepez = 0.0; // cot^2(theta)/2 scaled by dx^2/dt
};

PdeCoefficients1D predicted_coefficients_1d(const CollisionParams& params, double dx, double dt);

namespace detail {

// Unchecked collision term used inside the lattice loops.
inline double omega_unchecked(double f0, double f1, const CollisionParams& params)
{
    double g = f0 * (1.0 - f0) * f1 * (1.0 - f1);
    double root = g > 0.0 ? std::sqrt(g) : 0.0;
    return (f0 - f1) * params.sin2_theta() + params.mixing() * root;
}

} // namespace detail

} // namespace qlg
