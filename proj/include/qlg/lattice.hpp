#pragma once

// Time stepping for the one- and two-dimensional two-population lattice gas:
// per-site collision and measurement, then classical streaming with periodic
// wraparound.
//
// Fields store f0 and f1 as two row-major arrays, index = y * nx + x. A 1D
// field is a 2D field with ny = 1.

#include "qlg/core.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qlg {

struct Grid1D {
    int nx = 0;
    double lx = 0.0;

    double dx() const noexcept { return lx / nx; }
    // Diffusive scaling.
    double dt() const noexcept { return dx() * dx(); }
};

struct Grid2D {
    int nx = 0;
    int ny = 0;
    double ds = 1.0;

    double dt() const noexcept { return ds * ds; }
};

void validate(const Grid1D& grid);
void validate(const Grid2D& grid);

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Shift {
    int n = 0;
    int m = 0;
};

/// Two streaming velocities on a Bravais lattice. Streaming only ever uses the
/// integer shifts; the basis vectors enter through the Cartesian velocities
/// used for coefficient prediction.
class VelocitySet2D {
public:
    VelocitySet2D(Vec2 e1, Vec2 e2, Shift s0, Shift s1, std::string name = "custom");

    // c0 = (-1,0), c1 = (1,0); rows reduce to the 1D lattice.
    static VelocitySet2D axis_symmetric();
    // c0 = (-1,-1), c1 = (1,1). Symmetric like axis_symmetric; the fourth
    // 2D figure set is not given in closed form, this is our stand-in.
    static VelocitySet2D diagonal_symmetric();
    // c0 = (1,0), c1 = (0,-1).
    static VelocitySet2D orthogonal();
    // Triangular lattice, e2 = (1/2, sqrt(3)/2); c0 = (-1/2, sqrt(3)/2),
    // c1 = (1/2, sqrt(3)/2).
    static VelocitySet2D triangular();

    // Accepts the four names above. Throws InvalidArgument otherwise.
    static VelocitySet2D by_name(std::string_view name);

    Vec2 basis(int k) const { return k == 0 ? e1_ : e2_; }
    Shift shift(int i) const { return i == 0 ? s0_ : s1_; }
    Vec2 cartesian(int i) const;
    const std::string& name() const noexcept { return name_; }

    // Same shifts on the unit square basis: the velocity set seen in index
    // coordinates.
    VelocitySet2D index_space() const;

private:
    Vec2 e1_;
    Vec2 e2_;
    Shift s0_;
    Shift s1_;
    std::string name_;
};

enum class Streaming {
    // f_i(x + c_i, t + 1) = f_i'(x, t)
    AlongVelocity,
    // f_i(x - c_i, t + 1) = f_i'(x, t)
    AgainstVelocity,
};

enum class CollisionPath {
    ClosedForm,
    Quantum,
};

enum class InitMode {
    Equilibrium,
    Symmetric, // (rho/2, rho/2)
};

struct StepOptions {
    Streaming streaming = Streaming::AlongVelocity;
    CollisionPath path = CollisionPath::ClosedForm;
};

struct PopulationField {
    int nx = 0;
    int ny = 1;
    double dx = 1.0;
    double dt = 1.0;
    long step = 0;
    std::vector<double> f0;
    std::vector<double> f1;

    std::size_t size() const noexcept { return f0.size(); }
    std::size_t index(int x, int y = 0) const noexcept
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(x);
    }
    PopulationPair at(int x, int y = 0) const { return {f0[index(x, y)], f1[index(x, y)]}; }
    double time() const noexcept { return static_cast<double>(step) * dt; }
    double total_mass() const;

    friend bool operator==(const PopulationField&, const PopulationField&) = default;
};

/// Builds a field from a density array (row-major, nx * ny values).
PopulationField init_from_density(int nx, int ny, double dx, double dt, std::span<const double> rho,
                                  const CollisionParams& params, InitMode mode = InitMode::Equilibrium);

/// rho(x, 0) = rho_b + rho_a cos(2 pi x / L_x).
PopulationField init_cosine_1d(const Grid1D& grid, double rho_b, double rho_a, const CollisionParams& params,
                               InitMode mode = InitMode::Equilibrium);

/// rho(i, j, 0) = rho_b + rho_a [cos(2 pi i / N_x) + cos(2 pi j / N_y)].
PopulationField init_cosine_2d(const Grid2D& grid, double rho_b, double rho_a, const CollisionParams& params,
                               InitMode mode = InitMode::Equilibrium);

// Collision and measurement at every site, in place. Range violations are
// rethrown with the site coordinates attached.
void collide(PopulationField& field, const CollisionParams& params, CollisionPath path);

void stream_1d(PopulationField& field, Streaming streaming);
void stream_2d(PopulationField& field, const VelocitySet2D& vset, Streaming streaming);

void step_inplace(PopulationField& field, const CollisionParams& params, const StepOptions& options = {});
void step_inplace(PopulationField& field, const CollisionParams& params, const VelocitySet2D& vset,
                  const StepOptions& options = {});

PopulationField step_1d(PopulationField field, const CollisionParams& params, const StepOptions& options = {});
PopulationField step_2d(PopulationField field, const CollisionParams& params, const VelocitySet2D& vset,
                        const StepOptions& options = {});

std::vector<double> density(const PopulationField& field);
std::vector<double> momentum_u(const PopulationField& field);

using Matrix2 = std::array<std::array<double, 2>, 2>;

struct PdeCoefficients2D {
    Vec2 a;    // constant advection
    Vec2 b;    // multiplies (1 - rho) grad rho
    Matrix2 D; // symmetric diffusion tensor
};

/// Coefficients of  d_t rho + a.grad rho + b.[(1 - rho) grad rho] = div(D grad rho)
/// with a = (c/2)(c0 + c1), b = (c_s/2)(c1 - c0), D = (nu/2)(c0 c0^T + c1 c1^T),
/// c = ds/dt, and c_s, nu from the 1D prediction.
PdeCoefficients2D predicted_coefficients_2d(const VelocitySet2D& vset, const CollisionParams& params, double ds,
                                            double dt);

} // namespace qlg
