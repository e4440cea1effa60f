#include "qlg/analytic.hpp"
#include "qlg/core.hpp"
#include "qlg/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace qlg;

namespace {

constexpr double kPi = std::numbers::pi;

// Power series of I_l(a), summed in long double; oracle for small arguments.
long double bessel_i_series(int l, double a)
{
    long double sum = 0, term = std::pow(static_cast<long double>(a) / 2, l) / std::tgamma(static_cast<long double>(l + 1));
    for (int m = 0; m < 200; ++m) {
        sum += term;
        term *= static_cast<long double>(a) * a / 4 / ((m + 1.0L) * (m + 1.0L + l));
    }
    return sum;
}

// N_x = 64, L_x = 2, rho_a = 0.4, rho_b = 1, theta = pi/3.
AnalyticConfig fig4_config(int l_trunc = 80)
{
    const double dx = 2.0 / 64, dt = dx * dx;
    CollisionParams p(kPi / 3);
    AnalyticConfig cfg;
    cfg.lx = 2.0;
    cfg.rho_a = 0.4;
    cfg.rho_b = 1.0;
    cfg.c = dx / dt;
    cfg.alpha = p.alpha();
    cfg.nu = predicted_coefficients_1d(p, dx, dt).nu;
    cfg.l_trunc = l_trunc;
    return cfg;
}

} // namespace

TEST(BesselRatio, Examples)
{
    EXPECT_EQ(bessel_ratio(0, 1.0), 1.0);
    EXPECT_EQ(bessel_ratio(0, 1e4), 1.0);
    EXPECT_NEAR(bessel_ratio(1, 1.0), 0.44639, 1e-5);
    const double oracle = static_cast<double>(bessel_i_series(1, 1.0) / bessel_i_series(0, 1.0));
    EXPECT_NEAR(bessel_ratio(1, 1.0), oracle, 1e-15);
    EXPECT_THROW(bessel_ratio(1, 0.0), Error);
    EXPECT_THROW(bessel_ratio(1, -2.0), Error);
    EXPECT_THROW(bessel_ratio(-1, 1.0), Error);
}

TEST(BesselRatio, MatchesSeriesAndStdLibrary)
{
    for (double a : {0.1, 0.5, 2.0, 7.5, 15.2, 40.0}) {
        std::vector<double> r = bessel_ratios(60, a);
        for (int l = 0; l <= 60; ++l) {
            const double s = static_cast<double>(bessel_i_series(l, a) / bessel_i_series(0, a));
            if (s < 1e-280)
                break;
            ASSERT_NEAR(r[l], s, 1e-10 * s) << "l " << l << " a " << a;
            const double lib = std::cyl_bessel_i(l, a) / std::cyl_bessel_i(0, a);
            ASSERT_NEAR(r[l], lib, 1e-10 * lib + 1e-300) << "l " << l << " a " << a;
        }
    }
}

TEST(BesselRatio, MonotoneAndStableForLargeArguments)
{
    for (double a : {0.3, 15.2, 1e3, 1e6}) {
        std::vector<double> r = bessel_ratios(400, a);
        for (int l = 0; l < 400 && r[l + 1] > 0; ++l)
            ASSERT_LT(r[l + 1], r[l]) << "l " << l << " a " << a;
        for (double v : r)
            ASSERT_TRUE(std::isfinite(v));
    }
    // I_1/I_0 ~ 1 - 1/(2a) - 1/(8a^2) for large a.
    const double a = 1e6;
    EXPECT_NEAR(bessel_ratio(1, a), 1 - 1 / (2 * a) - 1 / (8 * a * a), 1e-15);
}

TEST(ColeHopf, Validation)
{
    AnalyticConfig cfg = fig4_config();
    cfg.nu = 0.0;
    EXPECT_THROW(ColeHopfSolution{cfg}, Error);
    cfg = fig4_config();
    cfg.alpha = 0.0;
    EXPECT_THROW(ColeHopfSolution{cfg}, Error);
    cfg = fig4_config();
    cfg.lx = 0.0;
    EXPECT_THROW(ColeHopfSolution{cfg}, Error);
    ColeHopfSolution sol(fig4_config());
    EXPECT_THROW(sol.density(0.1, -1e-3), Error);
}

TEST(ColeHopf, BesselArgumentOfFig4Setup)
{
    ColeHopfSolution sol(fig4_config());
    const AnalyticConfig& cfg = sol.config();
    EXPECT_NEAR(sol.bessel_argument(), cfg.c * cfg.alpha * cfg.rho_a / (2 * cfg.nu * kPi), 1e-12);
    EXPECT_NEAR(sol.bessel_argument(), 15.2, 0.1);
}

TEST(ColeHopf, ZeroAmplitudeIsUniform)
{
    AnalyticConfig cfg = fig4_config();
    cfg.rho_a = 0.0;
    cfg.rho_b = 0.7;
    ColeHopfSolution sol(cfg);
    for (double t : {0.0, 0.1, 3.0})
        for (double x = 0; x < 2.0; x += 0.125)
            ASSERT_EQ(sol.density(x, t), 0.7);
    std::vector<double> times{0.01, 0.1};
    EXPECT_LT(residual_check(cfg, 1e-3, times, 32), 1e-9);
}

TEST(ColeHopf, InitialConditionIsCosine)
{
    AnalyticConfig cfg = fig4_config();
    ColeHopfSolution sol(cfg);
    const double beta = 2 * kPi / cfg.lx;
    for (int i = 0; i < 64; ++i) {
        const double x = i * cfg.lx / 64;
        ASSERT_NEAR(sol.density(x, 0.0), 1.0 + 0.4 * std::cos(beta * x), 1e-6) << "x " << x;
    }
    // Same check away from rho_b = 1, where the Galilean shift is active.
    cfg.rho_b = 0.8;
    cfg.rho_a = 0.3;
    ColeHopfSolution shifted(cfg);
    for (int i = 0; i < 64; ++i) {
        const double x = i * cfg.lx / 64;
        ASSERT_NEAR(shifted.density(x, 0.0), 0.8 + 0.3 * std::cos(beta * x), 1e-6) << "x " << x;
    }
}

TEST(ColeHopf, DecaysToBackground)
{
    AnalyticConfig cfg = fig4_config();
    cfg.rho_b = 0.9;
    ColeHopfSolution sol(cfg);
    for (double x = 0; x < 2.0; x += 0.05)
        ASSERT_NEAR(sol.density(x, 60.0), 0.9, 1e-12);
}

TEST(ColeHopf, VelocityIsAffineInDensity)
{
    AnalyticConfig cfg = fig4_config();
    cfg.rho_b = 0.85;
    ColeHopfSolution sol(cfg);
    for (double t : {0.0, 0.02, 0.2})
        for (double x = 0; x < 2.0; x += 0.1)
            ASSERT_NEAR(sol.velocity(x, t), cfg.c * cfg.alpha * (1 - sol.density(x, t)), 1e-12);
    std::vector<double> xs{0.1, 0.7, 1.9};
    std::vector<double> batch = sol.density(xs, 0.05);
    for (std::size_t i = 0; i < xs.size(); ++i)
        EXPECT_EQ(batch[i], sol.density(xs[i], 0.05));
}

TEST(ColeHopf, ResidualIsSecondOrder)
{
    AnalyticConfig cfg = fig4_config();
    std::vector<double> times{0.01, 0.02, 0.03};
    const double r1 = residual_check(cfg, 4e-3, times, 200);
    const double r2 = residual_check(cfg, 2e-3, times, 200);
    const double ratio = r1 / r2;
    EXPECT_GT(ratio, 3.5) << r1 << " " << r2;
    EXPECT_LT(ratio, 4.5) << r1 << " " << r2;
}

TEST(ColeHopf, TruncationConverged)
{
    ColeHopfSolution a(fig4_config(80)), b(fig4_config(160));
    double worst = 0;
    for (double t : {0.0, 0.005, 0.02, 0.05, 0.1, 0.5, 2.0})
        for (int i = 0; i < 256; ++i) {
            const double x = 2.0 * i / 256;
            worst = std::max(worst, std::abs(a.density(x, t) - b.density(x, t)));
        }
    EXPECT_LT(worst, 1e-8);
}

TEST(ColeHopf, MeanIsPreserved)
{
    for (double rho_b : {1.0, 0.8}) {
        AnalyticConfig cfg = fig4_config();
        cfg.rho_b = rho_b;
        cfg.rho_a = 0.15;
        ColeHopfSolution sol(cfg);
        const int n = 2048;
        std::vector<double> xs(n);
        for (int i = 0; i < n; ++i)
            xs[i] = cfg.lx * i / n;
        for (double t : {0.0, 0.01, 0.05, 0.2, 1.0}) {
            std::vector<double> rho = sol.density(xs, t);
            double mean = 0;
            for (double v : rho)
                mean += v;
            ASSERT_NEAR(mean / n, rho_b, 1e-8) << "t " << t;
        }
    }
}

TEST(ColeHopf, OddAboutMovingQuarterPoint)
{
    for (double rho_b : {1.0, 0.8}) {
        AnalyticConfig cfg = fig4_config();
        cfg.rho_b = rho_b;
        cfg.rho_a = 0.2;
        ColeHopfSolution sol(cfg);
        const double w_bar = cfg.c * cfg.alpha * (1 - rho_b);
        for (double t : {0.0, 0.01, 0.04, 0.3}) {
            const double x0 = cfg.lx / 4 + w_bar * t;
            for (double s = 0.0; s < 1.0; s += 0.0625) {
                const double up = sol.density(std::fmod(x0 + s, cfg.lx), t) - rho_b;
                const double dn = sol.density(std::fmod(x0 - s + 4 * cfg.lx, cfg.lx), t) - rho_b;
                ASSERT_NEAR(up, -dn, 1e-12) << "t " << t << " s " << s;
            }
        }
    }
}
