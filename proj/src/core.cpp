#include "qlg/core.hpp"

#include "qlg/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qlg {

CollisionParams::CollisionParams(double theta, double zeta, double xi)
    : theta_(theta), zeta_(zeta), xi_(xi)
{
    if (!std::isfinite(theta) || !(theta > 0.0) || theta > std::numbers::pi / 2.0) {
        std::ostringstream os;
        os << "theta must lie in (0, pi/2], got " << theta
           << " (alpha = cot(theta) cos(zeta - xi) diverges at theta = 0)";
        fail(ErrorCode::InvalidArgument, os.str());
    }
    if (!std::isfinite(zeta) || !std::isfinite(xi))
        fail(ErrorCode::InvalidArgument, "zeta and xi must be finite");

    double phase = std::cos(zeta - xi);
    alpha_ = phase / std::tan(theta);
    double s = std::sin(theta);
    sin2_theta_ = s * s;
    mixing_ = std::sin(2.0 * theta) * phase;
}

void validate(const PopulationPair& pair)
{
    auto ok = [](double f) {
        return std::isfinite(f) && f >= -kStateTolerance && f <= 1.0 + kStateTolerance;
    };
    if (!ok(pair.f0) || !ok(pair.f1)) {
        std::ostringstream os;
        os.precision(17);
        os << "populations must lie in [0,1], got (" << pair.f0 << ", " << pair.f1 << ")";
        fail(ErrorCode::InvalidArgument, os.str());
    }
}

double CellState::norm_squared() const noexcept
{
    double n = 0.0;
    for (const auto& a : amplitudes)
        n += std::norm(a);
    return n;
}

Unitary4 Unitary4::adjoint() const
{
    Unitary4 out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            out.m[r][c] = std::conj(m[c][r]);
    return out;
}

Unitary4 Unitary4::operator*(const Unitary4& rhs) const
{
    Unitary4 out;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            Complex acc{};
            for (int k = 0; k < 4; ++k)
                acc += m[r][k] * rhs.m[k][c];
            out.m[r][c] = acc;
        }
    return out;
}

CellState Unitary4::operator*(const CellState& state) const
{
    CellState out;
    for (int r = 0; r < 4; ++r) {
        Complex acc{};
        for (int k = 0; k < 4; ++k)
            acc += m[r][k] * state.amplitudes[k];
        out.amplitudes[r] = acc;
    }
    return out;
}

Unitary4 build_collision_unitary(const CollisionParams& params)
{
    const double c = std::cos(params.theta());
    const double s = std::sin(params.theta());
    const Complex i{0.0, 1.0};

    Unitary4 u;
    u(0, 0) = 1.0;
    u(3, 3) = 1.0;
    u(1, 1) = std::exp(i * params.xi()) * c;
    u(1, 2) = std::exp(i * params.zeta()) * s;
    u(2, 1) = -std::exp(-i * params.zeta()) * s;
    u(2, 2) = std::exp(-i * params.xi()) * c;
    return u;
}

namespace {

double clamped_sqrt(double x) { return x > 0.0 ? std::sqrt(x) : 0.0; }

} // namespace

CellState prepare_cell(const PopulationPair& pair)
{
    validate(pair);
    const double f0 = pair.f0;
    const double f1 = pair.f1;
    CellState s;
    s.amplitudes[0] = clamped_sqrt((1.0 - f0) * (1.0 - f1));
    s.amplitudes[1] = clamped_sqrt((1.0 - f0) * f1);
    s.amplitudes[2] = clamped_sqrt(f0 * (1.0 - f1));
    s.amplitudes[3] = clamped_sqrt(f0 * f1);
    return s;
}

PopulationPair measure_populations(const CellState& state)
{
    double n = state.norm_squared();
    if (!(std::abs(n - 1.0) <= kStateTolerance)) {
        std::ostringstream os;
        os.precision(17);
        os << "cell state is not normalized: |psi|^2 = " << n;
        fail(ErrorCode::InvalidArgument, os.str());
    }
    const auto& a = state.amplitudes;
    return {std::norm(a[2]) + std::norm(a[3]), std::norm(a[1]) + std::norm(a[3])};
}

PopulationPair collide_quantum(const PopulationPair& pair, const CollisionParams& params)
{
    return measure_populations(build_collision_unitary(params) * prepare_cell(pair));
}

double omega(const PopulationPair& pair, const CollisionParams& params)
{
    validate(pair);
    return detail::omega_unchecked(pair.f0, pair.f1, params);
}

PopulationPair collide_closed_form(const PopulationPair& pair, const CollisionParams& params)
{
    double w = omega(pair, params);
    PopulationPair out{pair.f0 - w, pair.f1 + w};
    auto ok = [](double f) { return f >= -kStateTolerance && f <= 1.0 + kStateTolerance; };
    if (!ok(out.f0) || !ok(out.f1)) {
        std::ostringstream os;
        os.precision(17);
        os << "post-collision populations (" << out.f0 << ", " << out.f1
           << ") left [0,1] for input (" << pair.f0 << ", " << pair.f1
           << ") and theta = " << params.theta();
        fail(ErrorCode::CollisionRange, os.str());
    }
    return out;
}

namespace {

void check_density(double rho)
{
    if (!std::isfinite(rho) || rho < 0.0 || rho > 2.0) {
        std::ostringstream os;
        os.precision(17);
        os << "density must lie in [0,2], got " << rho;
        fail(ErrorCode::InvalidArgument, os.str());
    }
}

} // namespace

double momentum_eq(double rho, const CollisionParams& params)
{
    check_density(rho);
    const double a = params.alpha();
    if (std::abs(a) < kAlphaZero)
        return 0.0;
    // (1/a)(sqrt(1+a^2) - sqrt(1+a^2(rho-1)^2)), rationalized so that small
    // alpha does not cancel.
    const double d = rho - 1.0;
    return a * rho * (2.0 - rho) / (std::sqrt(1.0 + a * a) + std::sqrt(1.0 + a * a * d * d));
}

PopulationPair equilibrium(double rho, const CollisionParams& params)
{
    check_density(rho);
    if (std::abs(params.alpha()) < kAlphaZero)
        return {0.5 * rho, 0.5 * rho};
    const double u = momentum_eq(rho, params);
    const double f0 = 0.5 * (rho - u);
    return {f0, rho - f0};
}

double jacobian_gap(double rho, const CollisionParams& params)
{
    check_density(rho);
    const double a2 = params.alpha() * params.alpha();
    const double d = rho - 1.0;
    return -2.0 * params.sin2_theta() * std::sqrt(1.0 + a2) * std::sqrt(1.0 + a2 * d * d);
}

PdeCoefficients1D predicted_coefficients_1d(const CollisionParams& params, double dx, double dt)
{
    if (!(dx > 0.0) || !(dt > 0.0) || !std::isfinite(dx) || !std::isfinite(dt))
        fail(ErrorCode::InvalidArgument, "dx and dt must be positive");
    const double a = params.alpha();
    const double scale = dx * dx / dt;
    const double cot = 1.0 / std::tan(params.theta());

    PdeCoefficients1D out;
    out.c_s = (dx / dt) * a;
    out.nu = -scale * 0.5 * (1.0 - 1.0 / (params.sin2_theta() * std::sqrt(a * a + 1.0)));
    out.nu_yepez = scale * cot * cot / 2.0;
    return out;
}

} // namespace qlg
