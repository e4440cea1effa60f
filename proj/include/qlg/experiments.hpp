#pragma once

// Post-processing of density traces and the sweep drivers built on them:
// experimental viscosity with 1-sigma filtering, shock steepness, comparison
// against the Cole-Hopf solution and QLG-vs-FDM distances in 2D.

#include "qlg/analytic.hpp"
#include "qlg/core.hpp"
#include "qlg/lattice.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qlg {

/// Density snapshots at a uniform step stride.
struct DensityTrace {
    int nx = 0;
    int ny = 1;
    double dx = 1.0;
    double dt = 1.0;
    std::vector<long> steps;
    std::vector<std::vector<double>> rho;

    DensityTrace() = default;
    DensityTrace(int nx, int ny, double dx, double dt);

    std::size_t size() const noexcept { return steps.size(); }
    double time(std::size_t k) const { return static_cast<double>(steps[k]) * dt; }
    // Steps between snapshots; 0 until two snapshots exist.
    long stride() const noexcept { return steps.size() < 2 ? 0 : steps[1] - steps[0]; }

    // Rejects wrong field sizes and non-uniform strides.
    void append(long step, std::vector<double> field);
};

enum class ViscosityVariant {
    // + alpha (rho - 1) (rho(x+1) - rho(x)) in the numerator
    AsPrinted,
    // - alpha (rho - 1) (rho(x+1) - rho(x)), the sign implied by the PDE
    PdeConsistent,
};

const char* to_string(ViscosityVariant v);

// Sites whose |rho(x-1) - 2 rho(x) + rho(x+1)| falls below this are skipped.
inline constexpr double kCurvatureGuard = 1e-12;

/// Pointwise estimate at snapshot k, using snapshot k + 1 for the time
/// difference. Evaluated in lattice units, returned times dx^2/dt. nullopt
/// where the curvature guard applies.
std::vector<std::optional<double>> pointwise_viscosity(const DensityTrace& trace, std::size_t k,
                                                       const CollisionParams& params, ViscosityVariant variant);

struct SigmaFilter {
    double mean = 0.0;   // of the kept points
    double stddev = 0.0; // population standard deviation of all points
    std::vector<bool> kept;
    int n_kept = 0;
};

/// Keeps values within one population standard deviation of their mean.
SigmaFilter one_sigma_filter(std::span<const double> values);

struct ViscosityStep {
    long step = 0;
    int n_valid = 0;
    int n_kept = 0;
    std::optional<double> nu;
};

struct ViscosityEstimate {
    std::vector<ViscosityStep> per_step;
    std::optional<double> nu; // time average of the per-step means
    double kept_fraction = 0.0; // kept / valid over all steps
    int skipped_steps = 0;
};

/// Spatial mean after the 1-sigma filter at each snapshot pair, then the mean
/// over time. Throws InvalidArgument for traces that are not 1D or have fewer
/// than two snapshots. A trace with no usable point yields nu = nullopt.
ViscosityEstimate experimental_viscosity(const DensityTrace& trace, const CollisionParams& params,
                                         ViscosityVariant variant);

/// max over snapshots and x of c |rho(x+1) - rho(x)|, c = dx/dt, periodic.
double shock_steepness(const DensityTrace& trace);

/// Snapshot index maximizing the largest forward difference |rho(x + e) - rho(x)| / dx,
/// over both axes for 2D traces.
std::size_t shock_formation_index(const DensityTrace& trace);

struct TimeMetric {
    double t = 0.0;
    std::optional<double> value;
};

enum class NuVariant {
    Corrected,
    Yepez,
};

AnalyticConfig analytic_config_for(const DensityTrace& trace, double rho_b, double rho_a,
                                   const CollisionParams& params, NuVariant nu_variant, int l_trunc = 80);

/// Per-snapshot mean squared error against the analytic density at the sites.
std::vector<TimeMetric> mse_compare(const DensityTrace& trace, const AnalyticConfig& cfg);

/// ||rho_qlg - rho_fdm|| / ||rho_qlg - rho_b|| per common snapshot, stopping
/// before the FDM divergence step when given. Undefined (nullopt) when the
/// denominator vanishes.
std::vector<TimeMetric> l2_compare_2d(const DensityTrace& qlg, const DensityTrace& fdm, double rho_b,
                                      std::optional<long> fdm_diverged_at = std::nullopt);

struct CalibrationCase {
    ViscosityVariant variant;
    double nu_true = 0.0;
    std::optional<double> nu_est;
    double rel_error = 0.0;
    double kept_fraction = 0.0;
};

struct CalibrationResult {
    std::vector<CalibrationCase> cases;
    // Variant recovering nu within 2% on every case where >= 50% of points
    // survive the filter, with at least one such case; nullopt if neither
    // does. PdeConsistent wins a tie.
    std::optional<ViscosityVariant> selected;
};

/// Runs the 1D FDM (lattice units) with the predicted (c_s, nu) for each
/// theta and applies both estimator variants to its trace.
CalibrationResult calibrate_viscosity_estimator(std::span<const double> thetas, int nx, double rho_b,
                                                double rho_a, int steps);

struct ViscositySweepConfig {
    std::vector<double> thetas;
    int nx = 64;
    double lx = 64.0;
    double rho_b = 1.0;
    double rho_a = 0.005;
    double zeta = 0.0;
    double xi = 0.0;
    int steps = 200;
    ViscosityVariant variant = ViscosityVariant::PdeConsistent;
    StepOptions step_options{};
    InitMode init = InitMode::Equilibrium;
};

struct SweepRow {
    double theta = 0.0;
    double nu_pred = 0.0;
    double nu_yepez = 0.0;
    std::optional<double> nu_exp;
    double kept_fraction = 0.0;
    int steps = 0;
    std::string error; // empty on success
};

/// One independent lattice run per theta, spread over `threads` workers.
/// Rows come back in theta order and do not depend on the thread count.
std::vector<SweepRow> viscosity_sweep(const ViscositySweepConfig& cfg, int threads = 1);

struct SteepnessSweepConfig {
    std::vector<double> thetas;
    std::vector<int> nxs{64};
    std::vector<int> horizons{200, 2000};
    // lx <= 0 means lattice units, lx = nx.
    double lx = 0.0;
    double rho_b = 1.0;
    double rho_a = 0.035;
    double zeta = 0.0;
    double xi = 0.0;
    StepOptions step_options{};
    InitMode init = InitMode::Equilibrium;
};

struct SteepnessRow {
    double theta = 0.0;
    int nx = 0;
    int steps = 0;
    double delta = 0.0;
    std::string error;
};

/// Delta over [0, T] for each (theta, nx, T); rows ordered by nx, theta, T.
std::vector<SteepnessRow> steepness_sweep(const SteepnessSweepConfig& cfg, int threads = 1);

} // namespace qlg
