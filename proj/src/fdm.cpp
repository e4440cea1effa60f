#include "qlg/fdm.hpp"

#include "qlg/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qlg {

namespace {

void check_steps(double ds, double dt)
{
    if (!(ds > 0.0) || !std::isfinite(ds) || !(dt > 0.0) || !std::isfinite(dt))
        fail(ErrorCode::InvalidArgument, "fdm ds and dt must be positive");
}

} // namespace

std::vector<double> fdm_step_1d(std::span<const double> rho, double c_s, double nu, double ds, double dt)
{
    check_steps(ds, dt);
    const int n = static_cast<int>(rho.size());
    if (n < 2)
        fail(ErrorCode::InvalidArgument, "fdm field needs at least 2 sites");
    const double inv2 = 1.0 / (2.0 * ds);
    const double inv_sq = 1.0 / (ds * ds);
    std::vector<double> out(rho.size());
    for (int i = 0; i < n; ++i) {
        const double rm = rho[(i + n - 1) % n];
        const double r0 = rho[i];
        const double rp = rho[(i + 1) % n];
        const double rx = (rp - rm) * inv2;
        const double rxx = (rp - 2.0 * r0 + rm) * inv_sq;
        const double rhs = -(1.0 - r0) * (c_s * rx) + nu * rxx;
        out[i] = r0 + dt * rhs;
    }
    return out;
}

std::vector<double> fdm_euler_2d(std::span<const double> rho, int nx, int ny, const PdeCoefficients2D& k,
                                 double ds, double dt)
{
    check_steps(ds, dt);
    if (nx < 1 || ny < 1 || rho.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
        fail(ErrorCode::InvalidArgument, "fdm field size does not match nx * ny");
    const double inv2 = 1.0 / (2.0 * ds);
    const double inv_sq = 1.0 / (ds * ds);
    const double inv_xy = 1.0 / (4.0 * ds * ds);
    auto at = [&](int x, int y) { return rho[static_cast<std::size_t>(y) * nx + x]; };

    std::vector<double> out(rho.size());
    for (int y = 0; y < ny; ++y) {
        const int ym = (y + ny - 1) % ny;
        const int yp = (y + 1) % ny;
        for (int x = 0; x < nx; ++x) {
            const int xm = (x + nx - 1) % nx;
            const int xp = (x + 1) % nx;
            const double r0 = at(x, y);
            const double rx = (at(xp, y) - at(xm, y)) * inv2;
            const double ry = (at(x, yp) - at(x, ym)) * inv2;
            const double rxx = (at(xp, y) - 2.0 * r0 + at(xm, y)) * inv_sq;
            const double ryy = (at(x, yp) - 2.0 * r0 + at(x, ym)) * inv_sq;
            const double rxy = ((at(xp, yp) - at(xp, ym)) - (at(xm, yp) - at(xm, ym))) * inv_xy;
            const double rhs = -(k.a.x * rx + k.a.y * ry) - (1.0 - r0) * (k.b.x * rx + k.b.y * ry) +
                               (k.D[0][0] * rxx + 2.0 * k.D[0][1] * rxy + k.D[1][1] * ryy);
            out[static_cast<std::size_t>(y) * nx + x] = r0 + dt * rhs;
        }
    }
    return out;
}

int required_substeps(const PdeCoefficients2D& k, int nx, int ny, double ds, double dt, double rho_min,
                      double rho_max)
{
    check_steps(ds, dt);
    const double d00 = k.D[0][0];
    const double d01 = k.D[0][1];
    const double d11 = k.D[1][1];
    const double lam = 0.5 * (d00 + d11) + std::sqrt(0.25 * (d00 - d11) * (d00 - d11) + d01 * d01);

    double h_max = std::numeric_limits<double>::infinity();
    double cfl = 0.0;
    for (double r : {rho_min, rho_max}) {
        const double dx = k.a.x + (1.0 - r) * k.b.x;
        const double dy = k.a.y + (1.0 - r) * k.b.y;
        cfl = std::max(cfl, std::hypot(dx, dy) * dt / ds + 2.0 * lam * dt / (ds * ds));

        // Symbol of the semi-discrete operator is -(P + iQ).
        for (int p = 0; p < nx; ++p) {
            const double tx = 2.0 * std::numbers::pi * p / nx;
            const double sx = std::sin(0.5 * tx);
            for (int q = 0; q < ny; ++q) {
                const double ty = 2.0 * std::numbers::pi * q / ny;
                const double sy = std::sin(0.5 * ty);
                const double P = (4.0 * d00 * sx * sx + 2.0 * d01 * std::sin(tx) * std::sin(ty) +
                                  4.0 * d11 * sy * sy) / (ds * ds);
                const double Q = (dx * std::sin(tx) + dy * std::sin(ty)) / ds;
                const double mag = P * P + Q * Q;
                if (mag < 1e-300)
                    continue;
                if (P <= 1e-14 * std::sqrt(mag)) {
                    std::ostringstream os;
                    os << "explicit scheme is unstable for every dt: mode (" << p << ", " << q
                       << ") has no damping but nonzero advection";
                    fail(ErrorCode::Numerical, os.str());
                }
                h_max = std::min(h_max, 2.0 * P / mag);
            }
        }
    }
    const int n_cfl = std::max(1, static_cast<int>(std::ceil(cfl / 0.5 - 1e-12)));
    int n_vn = 1;
    if (std::isfinite(h_max))
        n_vn = std::max(1, static_cast<int>(std::ceil(dt / (0.8 * h_max))));
    return std::max(n_cfl, n_vn);
}

FdmState2D make_fdm_state(int nx, int ny, double ds, double dt, const PdeCoefficients2D& coeffs,
                          std::vector<double> rho0, double rho_b, double rho_a, int substeps)
{
    check_steps(ds, dt);
    if (nx < 2 || ny < 1)
        fail(ErrorCode::InvalidArgument, "fdm grid needs nx >= 2 and ny >= 1");
    if (rho0.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
        fail(ErrorCode::InvalidArgument, "fdm initial field size does not match nx * ny");
    if (!(rho_a >= 0.0) || !std::isfinite(rho_b))
        fail(ErrorCode::InvalidArgument, "fdm rho_a must be non-negative and rho_b finite");
    for (double r : rho0)
        if (!std::isfinite(r))
            fail(ErrorCode::InvalidArgument, "fdm initial field must be finite");

    FdmState2D s;
    s.nx = nx;
    s.ny = ny;
    s.ds = ds;
    s.dt = dt;
    s.coeffs = coeffs;
    s.rho_b = rho_b;
    s.rho_a = rho_a;
    auto [lo, hi] = std::minmax_element(rho0.begin(), rho0.end());
    s.substeps = substeps > 0 ? substeps : required_substeps(coeffs, nx, ny, ds, dt, *lo, *hi);
    s.rho = std::move(rho0);
    return s;
}

FdmState2D make_fdm_state_1d(int nx, double ds, double dt, double c_s, double nu, std::vector<double> rho0,
                             double rho_b, double rho_a, int substeps)
{
    PdeCoefficients2D k{};
    k.b = {c_s, 0.0};
    k.D[0][0] = nu;
    return make_fdm_state(nx, 1, ds, dt, k, std::move(rho0), rho_b, rho_a, substeps);
}

namespace {

bool is_1d_form(const FdmState2D& s)
{
    const auto& k = s.coeffs;
    return s.ny == 1 && k.a.x == 0.0 && k.a.y == 0.0 && k.b.y == 0.0 && k.D[0][1] == 0.0 && k.D[1][0] == 0.0 &&
           k.D[1][1] == 0.0;
}

} // namespace

bool advance(FdmState2D& s)
{
    if (s.diverged_at) {
        std::ostringstream os;
        os << "fdm state diverged at step " << *s.diverged_at << " and cannot be advanced";
        fail(ErrorCode::Diverged, os.str());
    }
    const double h = s.dt / s.substeps;
    const bool one_d = is_1d_form(s);
    for (int k = 0; k < s.substeps; ++k) {
        if (one_d)
            s.rho = fdm_step_1d(s.rho, s.coeffs.b.x, s.coeffs.D[0][0], s.ds, h);
        else
            s.rho = fdm_euler_2d(s.rho, s.nx, s.ny, s.coeffs, s.ds, h);
    }
    ++s.step;

    const double limit = 10.0 * s.rho_a;
    for (double r : s.rho) {
        if (!std::isfinite(r) || std::abs(r - s.rho_b) > limit) {
            s.diverged_at = s.step;
            return false;
        }
    }
    return true;
}

FdmState2D fdm_step_2d(FdmState2D state)
{
    advance(state);
    return state;
}

} // namespace qlg
