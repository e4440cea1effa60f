#include "qlg/lattice.hpp"

#include "qlg/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qlg {

void validate(const Grid1D& grid)
{
    if (grid.nx < 2)
        fail(ErrorCode::InvalidArgument, "grid.nx must be at least 2");
    if (!(grid.lx > 0.0) || !std::isfinite(grid.lx))
        fail(ErrorCode::InvalidArgument, "grid.lx must be positive");
}

void validate(const Grid2D& grid)
{
    if (grid.nx < 2 || grid.ny < 2)
        fail(ErrorCode::InvalidArgument, "grid.nx and grid.ny must be at least 2");
    if (!(grid.ds > 0.0) || !std::isfinite(grid.ds))
        fail(ErrorCode::InvalidArgument, "grid.ds must be positive");
}

VelocitySet2D::VelocitySet2D(Vec2 e1, Vec2 e2, Shift s0, Shift s1, std::string name)
    : e1_(e1), e2_(e2), s0_(s0), s1_(s1), name_(std::move(name))
{
    double det = e1.x * e2.y - e1.y * e2.x;
    if (!std::isfinite(det) || std::abs(det) < 1e-12)
        fail(ErrorCode::InvalidArgument, "velocity set basis vectors are linearly dependent");
}

VelocitySet2D VelocitySet2D::axis_symmetric()
{
    return {{1, 0}, {0, 1}, {-1, 0}, {1, 0}, "axis_symmetric"};
}

VelocitySet2D VelocitySet2D::diagonal_symmetric()
{
    return {{1, 0}, {0, 1}, {-1, -1}, {1, 1}, "diagonal_symmetric"};
}

VelocitySet2D VelocitySet2D::orthogonal()
{
    return {{1, 0}, {0, 1}, {1, 0}, {0, -1}, "orthogonal"};
}

VelocitySet2D VelocitySet2D::triangular()
{
    // c0 = -e1 + e2, c1 = e2.
    return {{1, 0}, {0.5, std::numbers::sqrt3 / 2.0}, {-1, 1}, {0, 1}, "triangular"};
}

VelocitySet2D VelocitySet2D::by_name(std::string_view name)
{
    if (name == "axis_symmetric")
        return axis_symmetric();
    if (name == "diagonal_symmetric")
        return diagonal_symmetric();
    if (name == "orthogonal")
        return orthogonal();
    if (name == "triangular")
        return triangular();
    fail(ErrorCode::InvalidArgument,
         "unknown velocity set '" + std::string(name) +
             "' (expected axis_symmetric, diagonal_symmetric, orthogonal or triangular)");
}

Vec2 VelocitySet2D::cartesian(int i) const
{
    Shift s = shift(i);
    return {s.n * e1_.x + s.m * e2_.x, s.n * e1_.y + s.m * e2_.y};
}

VelocitySet2D VelocitySet2D::index_space() const
{
    return {{1, 0}, {0, 1}, s0_, s1_, name_};
}

double PopulationField::total_mass() const
{
    double m = 0.0;
    for (std::size_t k = 0; k < f0.size(); ++k)
        m += f0[k] + f1[k];
    return m;
}

PopulationField init_from_density(int nx, int ny, double dx, double dt, std::span<const double> rho,
                                  const CollisionParams& params, InitMode mode)
{
    if (nx < 1 || ny < 1)
        fail(ErrorCode::InvalidArgument, "field dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
    if (rho.size() != n)
        fail(ErrorCode::InvalidArgument, "density array size does not match nx * ny");

    PopulationField field;
    field.nx = nx;
    field.ny = ny;
    field.dx = dx;
    field.dt = dt;
    field.f0.resize(n);
    field.f1.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        double r = rho[k];
        if (!std::isfinite(r) || r < 0.0 || r > 2.0) {
            std::ostringstream os;
            os.precision(17);
            os << "initial density " << r << " at site (" << k % nx << ", " << k / nx
               << ") outside [0,2]; reduce rho_a or move rho_b";
            fail(ErrorCode::InvalidArgument, os.str());
        }
        PopulationPair p = mode == InitMode::Equilibrium ? equilibrium(r, params) : PopulationPair{0.5 * r, 0.5 * r};
        field.f0[k] = p.f0;
        field.f1[k] = p.f1;
    }
    return field;
}

PopulationField init_cosine_1d(const Grid1D& grid, double rho_b, double rho_a, const CollisionParams& params,
                               InitMode mode)
{
    validate(grid);
    const double beta = 2.0 * std::numbers::pi / grid.lx;
    const double dx = grid.dx();
    std::vector<double> rho(grid.nx);
    for (int i = 0; i < grid.nx; ++i)
        rho[i] = rho_b + rho_a * std::cos(beta * (i * dx));
    return init_from_density(grid.nx, 1, dx, grid.dt(), rho, params, mode);
}

PopulationField init_cosine_2d(const Grid2D& grid, double rho_b, double rho_a, const CollisionParams& params,
                               InitMode mode)
{
    validate(grid);
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> rho(static_cast<std::size_t>(grid.nx) * grid.ny);
    for (int j = 0; j < grid.ny; ++j) {
        double cy = std::cos(two_pi * j / grid.ny);
        for (int i = 0; i < grid.nx; ++i)
            rho[static_cast<std::size_t>(j) * grid.nx + i] = rho_b + rho_a * (std::cos(two_pi * i / grid.nx) + cy);
    }
    return init_from_density(grid.nx, grid.ny, grid.ds, grid.dt(), rho, params, mode);
}

namespace {

[[noreturn]] void rethrow_at_site(const Error& e, const PopulationField& field, std::size_t k)
{
    std::ostringstream os;
    os << "at site (" << k % field.nx << ", " << k / field.nx << "), step " << field.step << ": " << e.what();
    throw Error(e.code(), os.str());
}

} // namespace

void collide(PopulationField& field, const CollisionParams& params, CollisionPath path)
{
    const std::size_t n = field.size();
    double* f0 = field.f0.data();
    double* f1 = field.f1.data();

    if (path == CollisionPath::Quantum) {
        for (std::size_t k = 0; k < n; ++k) {
            try {
                PopulationPair out = collide_quantum({f0[k], f1[k]}, params);
                f0[k] = out.f0;
                f1[k] = out.f1;
            } catch (const Error& e) {
                rethrow_at_site(e, field, k);
            }
        }
        return;
    }

    constexpr double lo = -kStateTolerance;
    constexpr double hi = 1.0 + kStateTolerance;
    for (std::size_t k = 0; k < n; ++k) {
        double a = f0[k];
        double b = f1[k];
        double w = detail::omega_unchecked(a, b, params);
        double a2 = a - w;
        double b2 = b + w;
        if (!(a2 >= lo && a2 <= hi && b2 >= lo && b2 <= hi)) {
            try {
                // Same arithmetic as above, so this throws with the full message.
                collide_closed_form({a, b}, params);
                fail(ErrorCode::CollisionRange, "post-collision populations left [0,1]");
            } catch (const Error& e) {
                rethrow_at_site(e, field, k);
            }
        }
        f0[k] = a2;
        f1[k] = b2;
    }
}

namespace {

int wrap(long v, int n)
{
    long r = v % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

// dst(x + dx, y + dy) = src(x, y), periodic.
void shift_plane(const std::vector<double>& src, std::vector<double>& dst, int nx, int ny, int dx, int dy)
{
    for (int y = 0; y < ny; ++y) {
        const int ty = wrap(static_cast<long>(y) + dy, ny);
        const double* row = src.data() + static_cast<std::size_t>(y) * nx;
        double* out = dst.data() + static_cast<std::size_t>(ty) * nx;
        for (int x = 0; x < nx; ++x)
            out[wrap(static_cast<long>(x) + dx, nx)] = row[x];
    }
}

void stream_plane(std::vector<double>& f, int nx, int ny, Shift s, Streaming streaming)
{
    if (s.n == 0 && s.m == 0)
        return;
    const int sign = streaming == Streaming::AlongVelocity ? 1 : -1;
    std::vector<double> out(f.size());
    shift_plane(f, out, nx, ny, sign * s.n, sign * s.m);
    f.swap(out);
}

} // namespace

void stream_1d(PopulationField& field, Streaming streaming)
{
    if (field.ny != 1)
        fail(ErrorCode::InvalidArgument, "stream_1d requires a field with ny = 1");
    stream_plane(field.f0, field.nx, 1, {-1, 0}, streaming);
    stream_plane(field.f1, field.nx, 1, {1, 0}, streaming);
}

void stream_2d(PopulationField& field, const VelocitySet2D& vset, Streaming streaming)
{
    stream_plane(field.f0, field.nx, field.ny, vset.shift(0), streaming);
    stream_plane(field.f1, field.nx, field.ny, vset.shift(1), streaming);
}

void step_inplace(PopulationField& field, const CollisionParams& params, const StepOptions& options)
{
    collide(field, params, options.path);
    stream_1d(field, options.streaming);
    ++field.step;
}

void step_inplace(PopulationField& field, const CollisionParams& params, const VelocitySet2D& vset,
                  const StepOptions& options)
{
    collide(field, params, options.path);
    stream_2d(field, vset, options.streaming);
    ++field.step;
}

PopulationField step_1d(PopulationField field, const CollisionParams& params, const StepOptions& options)
{
    step_inplace(field, params, options);
    return field;
}

PopulationField step_2d(PopulationField field, const CollisionParams& params, const VelocitySet2D& vset,
                        const StepOptions& options)
{
    step_inplace(field, params, vset, options);
    return field;
}

std::vector<double> density(const PopulationField& field)
{
    std::vector<double> rho(field.size());
    for (std::size_t k = 0; k < rho.size(); ++k)
        rho[k] = field.f0[k] + field.f1[k];
    return rho;
}

std::vector<double> momentum_u(const PopulationField& field)
{
    std::vector<double> u(field.size());
    for (std::size_t k = 0; k < u.size(); ++k)
        u[k] = field.f1[k] - field.f0[k];
    return u;
}

PdeCoefficients2D predicted_coefficients_2d(const VelocitySet2D& vset, const CollisionParams& params, double ds,
                                            double dt)
{
    const PdeCoefficients1D one = predicted_coefficients_1d(params, ds, dt);
    const double c = ds / dt;
    const Vec2 c0 = vset.cartesian(0);
    const Vec2 c1 = vset.cartesian(1);

    PdeCoefficients2D out;
    out.a = {0.5 * c * (c0.x + c1.x), 0.5 * c * (c0.y + c1.y)};
    out.b = {0.5 * one.c_s * (c1.x - c0.x), 0.5 * one.c_s * (c1.y - c0.y)};
    const double h = 0.5 * one.nu;
    out.D[0][0] = h * (c0.x * c0.x + c1.x * c1.x);
    out.D[0][1] = h * (c0.x * c0.y + c1.x * c1.y);
    out.D[1][0] = out.D[0][1];
    out.D[1][1] = h * (c0.y * c0.y + c1.y * c1.y);
    return out;
}

} // namespace qlg
