#pragma once

// Explicit finite-difference reference solver for
//     d_t rho = -a.grad rho - (1 - rho) b.grad rho + div(D grad rho)
// on a periodic index grid: forward Euler in time, centred differences in
// space, 4-point corner stencil for d_xy. The 1D equation
//     d_t rho + c_s (1 - rho) d_x rho = nu d_xx rho
// is the ny = 1 case with a = 0, b = (c_s, 0), D = diag(nu, 0).

#include "qlg/lattice.hpp"

#include <optional>
#include <span>
#include <vector>

namespace qlg {

/// One forward-Euler update of the 1D equation, no sub-stepping.
std::vector<double> fdm_step_1d(std::span<const double> rho, double c_s, double nu, double ds, double dt);

/// One forward-Euler update of the 2D equation on an nx x ny row-major field.
std::vector<double> fdm_euler_2d(std::span<const double> rho, int nx, int ny, const PdeCoefficients2D& coeffs,
                                 double ds, double dt);

/// Number of Euler sub-steps per dt. The larger of
///  - the count that keeps max|a + (1 - rho) b| dt/ds + 2 max eig(D) dt/ds^2 <= 0.5,
///  - the count that keeps every discrete Fourier mode of the frozen-coefficient
///    scheme non-growing (|g| <= 1) with a 0.8 margin, for rho at both ends of
///    [rho_min, rho_max].
/// Throws Numerical if some mode grows for every dt.
int required_substeps(const PdeCoefficients2D& coeffs, int nx, int ny, double ds, double dt, double rho_min,
                      double rho_max);

struct FdmState2D {
    int nx = 0;
    int ny = 1;
    double ds = 1.0;
    double dt = 1.0; // one outer step; split into `substeps` Euler updates
    int substeps = 1;
    PdeCoefficients2D coeffs{};
    double rho_b = 1.0;
    double rho_a = 0.0;
    long step = 0;
    std::vector<double> rho;
    // First outer step after which the field was non-finite or had
    // |rho - rho_b| > 10 rho_a.
    std::optional<long> diverged_at;

    double time() const noexcept { return static_cast<double>(step) * dt; }
};

/// Validates inputs and picks substeps from the initial density range unless
/// `substeps` > 0 is given.
FdmState2D make_fdm_state(int nx, int ny, double ds, double dt, const PdeCoefficients2D& coeffs,
                          std::vector<double> rho0, double rho_b, double rho_a, int substeps = 0);

/// ny = 1 state for the 1D equation.
FdmState2D make_fdm_state_1d(int nx, double ds, double dt, double c_s, double nu, std::vector<double> rho0,
                             double rho_b, double rho_a, int substeps = 0);

/// Advances one outer step. Returns false and records diverged_at when the
/// field diverges; advancing a diverged state throws Diverged.
bool advance(FdmState2D& state);

FdmState2D fdm_step_2d(FdmState2D state);

} // namespace qlg
