#include "qlg/analytic.hpp"

#include "qlg/error.hpp"

#include <cmath>
#include <sstream>

extern "C" {
#include <quadmath.h>
}

namespace qlg {

using quad = __float128;

void validate(const AnalyticConfig& cfg)
{
    auto finite = [](double v) { return std::isfinite(v); };
    if (!(cfg.lx > 0.0) || !finite(cfg.lx))
        fail(ErrorCode::InvalidArgument, "analytic lx must be positive");
    if (!(cfg.nu > 0.0) || !finite(cfg.nu))
        fail(ErrorCode::InvalidArgument, "analytic nu must be positive (nu = 0 has no Cole-Hopf solution)");
    if (!finite(cfg.rho_a) || !finite(cfg.rho_b) || !finite(cfg.c) || !finite(cfg.alpha))
        fail(ErrorCode::InvalidArgument, "analytic parameters must be finite");
    if (cfg.c * cfg.alpha == 0.0 && cfg.rho_a != 0.0)
        fail(ErrorCode::InvalidArgument, "analytic c * alpha must be nonzero");
    if (cfg.l_trunc < 1)
        fail(ErrorCode::InvalidArgument, "analytic l_trunc must be at least 1");
}

namespace {

// I_l(a)/I_0(a), l = 0..l_max, by Miller's algorithm from start index n.
std::vector<quad> miller_ratios(int l_max, quad a, int n)
{
    std::vector<quad> out(static_cast<std::size_t>(l_max) + 1, 0);
    const quad big = 1e300Q * 1e300Q * 1e300Q;
    quad next = 0; // I_{k+1}
    quad cur = 1e-300Q; // I_k
    for (int k = n; k >= 1; --k) {
        quad prev = next + (2 * k / a) * cur; // I_{k-1}
        next = cur;
        cur = prev;
        if (k - 1 <= l_max)
            out[k - 1] = cur;
        if (fabsq(cur) > big) {
            cur /= big;
            next /= big;
            for (int j = k - 1; j <= l_max; ++j)
                out[j] /= big;
        }
    }
    const quad i0 = out[0];
    for (auto& v : out)
        v /= i0;
    return out;
}

std::vector<quad> quad_ratios(int l_max, quad a)
{
    if (!(a > 0))
        fail(ErrorCode::InvalidArgument, "bessel argument must be positive");
    if (l_max < 0)
        fail(ErrorCode::InvalidArgument, "bessel order must be non-negative");
    const double ad = static_cast<double>(a);
    int n = l_max + 32 + static_cast<int>(ad + 10.0 * std::sqrt(ad + 1.0));
    std::vector<quad> r = miller_ratios(l_max, a, n);
    // Double the start index until the ratios stop moving.
    for (int iter = 0; iter < 30; ++iter) {
        n *= 2;
        std::vector<quad> r2 = miller_ratios(l_max, a, n);
        quad worst = 0;
        for (int l = 0; l <= l_max; ++l) {
            if (r2[l] == 0)
                continue;
            quad d = fabsq((r2[l] - r[l]) / r2[l]);
            if (d > worst)
                worst = d;
        }
        r.swap(r2);
        if (worst < 1e-30Q)
            return r;
    }
    fail(ErrorCode::Numerical, "bessel backward recurrence did not converge");
}

} // namespace

std::vector<double> bessel_ratios(int l_max, double a)
{
    if (!(a > 0.0) || !std::isfinite(a))
        fail(ErrorCode::InvalidArgument, "bessel_ratio requires A > 0");
    std::vector<quad> q = quad_ratios(l_max, a);
    return {q.begin(), q.end()};
}

double bessel_ratio(int l, double a)
{
    if (l < 0)
        fail(ErrorCode::InvalidArgument, "bessel_ratio requires l >= 0");
    return bessel_ratios(l, a)[l];
}

struct ColeHopfSolution::Impl {
    AnalyticConfig cfg;
    quad beta = 0;
    quad a = 0;      // Bessel argument A, may be negative
    quad w_bar = 0;
    quad scale = 0;  // 2 nu / (c alpha)
    std::vector<quad> ratios; // signed I_l(A)/I_0(A)

    // I_l(A)/I_0(A) e^{-nu l^2 beta^2 t}, truncated at the first zero.
    std::vector<quad> weights(double t) const
    {
        std::vector<quad> d;
        if (a == 0)
            return d;
        const quad nb2t = static_cast<quad>(cfg.nu) * beta * beta * static_cast<quad>(t);
        d.reserve(cfg.l_trunc);
        for (int l = 1; l <= cfg.l_trunc; ++l) {
            const quad v = ratios[l] * expq(-nb2t * l * l);
            if (v == 0)
                break;
            d.push_back(v);
        }
        return d;
    }

    // Returns psi'/psi at (x, t) in quad.
    quad log_derivative(double x, double t, const std::vector<quad>& d) const
    {
        if (a == 0)
            return 0;
        const quad xs = static_cast<quad>(x) - w_bar * static_cast<quad>(t);
        const quad phi = beta * xs - M_PIq / 2;
        const quad cp = cosq(phi);
        const quad sp = sinq(phi);

        quad psi = 1;
        quad dpsi = 0;
        quad cl = 1; // cos(l phi)
        quad sl = 0; // sin(l phi)
        for (std::size_t k = 0; k < d.size(); ++k) {
            const quad c2 = cl * cp - sl * sp;
            sl = sl * cp + cl * sp;
            cl = c2;
            psi += 2 * d[k] * cl;
            dpsi -= 2 * d[k] * static_cast<quad>(k + 1) * beta * sl;
        }
        if (!(psi > 0)) {
            std::ostringstream os;
            os.precision(17);
            os << "cole-hopf psi <= 0 at x = " << x << ", t = " << t << "; the series cancels below quad precision for large A at early t, or l_trunc is too small";
            fail(ErrorCode::Numerical, os.str());
        }
        return dpsi / psi;
    }
};

ColeHopfSolution::ColeHopfSolution(const AnalyticConfig& cfg) : impl_(std::make_unique<Impl>())
{
    validate(cfg);
    Impl& s = *impl_;
    s.cfg = cfg;
    s.beta = 2 * M_PIq / static_cast<quad>(cfg.lx);
    const quad ca = static_cast<quad>(cfg.c) * static_cast<quad>(cfg.alpha);
    s.w_bar = ca * (1 - static_cast<quad>(cfg.rho_b));
    if (cfg.rho_a == 0.0)
        return;
    s.scale = 2 * static_cast<quad>(cfg.nu) / ca;
    s.a = ca * static_cast<quad>(cfg.rho_a) / (2 * static_cast<quad>(cfg.nu) * s.beta);
    s.ratios = quad_ratios(cfg.l_trunc, fabsq(s.a));
    // I_l(-A) = (-1)^l I_l(A)
    if (s.a < 0)
        for (int l = 1; l <= cfg.l_trunc; l += 2)
            s.ratios[l] = -s.ratios[l];
}

ColeHopfSolution::~ColeHopfSolution() = default;
ColeHopfSolution::ColeHopfSolution(const ColeHopfSolution& o) : impl_(std::make_unique<Impl>(*o.impl_)) {}
ColeHopfSolution& ColeHopfSolution::operator=(const ColeHopfSolution& o)
{
    if (this != &o)
        impl_ = std::make_unique<Impl>(*o.impl_);
    return *this;
}
ColeHopfSolution::ColeHopfSolution(ColeHopfSolution&&) noexcept = default;
ColeHopfSolution& ColeHopfSolution::operator=(ColeHopfSolution&&) noexcept = default;

const AnalyticConfig& ColeHopfSolution::config() const noexcept { return impl_->cfg; }

double ColeHopfSolution::bessel_argument() const noexcept { return static_cast<double>(impl_->a); }

namespace {

void check_time(double t)
{
    if (!(t >= 0.0) || !std::isfinite(t))
        fail(ErrorCode::InvalidArgument, "analytic time must be finite and non-negative");
}

} // namespace

double ColeHopfSolution::density(double x, double t) const
{
    check_time(t);
    const Impl& s = *impl_;
    return static_cast<double>(static_cast<quad>(s.cfg.rho_b) + s.scale * s.log_derivative(x, t, s.weights(t)));
}

double ColeHopfSolution::velocity(double x, double t) const
{
    check_time(t);
    const Impl& s = *impl_;
    return static_cast<double>(s.w_bar - 2 * static_cast<quad>(s.cfg.nu) * s.log_derivative(x, t, s.weights(t)));
}

std::vector<double> ColeHopfSolution::density(std::span<const double> xs, double t) const
{
    check_time(t);
    const Impl& s = *impl_;
    const std::vector<quad> d = s.weights(t);
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs)
        out.push_back(static_cast<double>(static_cast<quad>(s.cfg.rho_b) + s.scale * s.log_derivative(x, t, d)));
    return out;
}

std::vector<double> ColeHopfSolution::velocity(std::span<const double> xs, double t) const
{
    check_time(t);
    const Impl& s = *impl_;
    const std::vector<quad> d = s.weights(t);
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs)
        out.push_back(static_cast<double>(s.w_bar - 2 * static_cast<quad>(s.cfg.nu) * s.log_derivative(x, t, d)));
    return out;
}

double cole_hopf_density(double x, double t, const AnalyticConfig& cfg)
{
    return ColeHopfSolution(cfg).density(x, t);
}

double residual_check(const AnalyticConfig& cfg, double h, std::span<const double> times, int n_points)
{
    if (!(h > 0.0) || n_points < 1)
        fail(ErrorCode::InvalidArgument, "residual_check needs h > 0 and at least one point");
    ColeHopfSolution sol(cfg);
    const double nu = cfg.nu;
    double worst = 0.0;
    for (double t : times) {
        if (t < h)
            fail(ErrorCode::InvalidArgument, "residual_check times must be >= h");
        for (int k = 0; k < n_points; ++k) {
            const double x = cfg.lx * k / n_points;
            const double w = sol.velocity(x, t);
            const double wxp = sol.velocity(x + h, t);
            const double wxm = sol.velocity(x - h, t);
            const double wtp = sol.velocity(x, t + h);
            const double wtm = sol.velocity(x, t - h);
            const double r = (wtp - wtm) / (2 * h) + w * (wxp - wxm) / (2 * h) - nu * (wxp - 2 * w + wxm) / (h * h);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

} // namespace qlg
