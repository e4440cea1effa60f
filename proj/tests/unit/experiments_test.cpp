#include "qlg/error.hpp"
#include "qlg/experiments.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace qlg;

namespace {

constexpr double kPi = std::numbers::pi;

DensityTrace uniform_trace(int nx, int snapshots, double rho)
{
    DensityTrace t(nx, 1, 1.0, 1.0);
    for (int k = 0; k < snapshots; ++k)
        t.append(k, std::vector<double>(nx, rho));
    return t;
}

} // namespace

TEST(DensityTrace, RejectsBadAppends)
{
    DensityTrace t(4, 1, 1.0, 1.0);
    EXPECT_THROW(t.append(0, std::vector<double>(3, 1.0)), Error);
    t.append(0, std::vector<double>(4, 1.0));
    EXPECT_EQ(t.stride(), 0);
    t.append(5, std::vector<double>(4, 1.0));
    EXPECT_EQ(t.stride(), 5);
    EXPECT_THROW(t.append(9, std::vector<double>(4, 1.0)), Error);
    EXPECT_THROW(t.append(5, std::vector<double>(4, 1.0)), Error);
    t.append(10, std::vector<double>(4, 1.0));
    EXPECT_DOUBLE_EQ(t.time(2), 10.0);
    EXPECT_THROW(DensityTrace(0, 1, 1.0, 1.0), Error);
    EXPECT_THROW(DensityTrace(4, 1, 1.0, 0.0), Error);
}

TEST(Viscosity, PointwiseMatchesHandEvaluation)
{
    DensityTrace t(5, 1, 0.5, 0.125); // dx^2/dt = 2
    std::vector<double> r0{1.0, 1.2, 0.9, 1.1, 0.85};
    std::vector<double> r1{1.05, 1.1, 0.95, 1.0, 0.9};
    t.append(0, r0);
    t.append(2, r1);
    CollisionParams p(1.0);
    const double a = p.alpha();
    for (auto v : {ViscosityVariant::AsPrinted, ViscosityVariant::PdeConsistent}) {
        const double sign = v == ViscosityVariant::AsPrinted ? 1.0 : -1.0;
        auto got = pointwise_viscosity(t, 0, p, v);
        ASSERT_EQ(got.size(), 5u);
        for (int x = 0; x < 5; ++x) {
            const double rm = r0[(x + 4) % 5], rc = r0[x], rp = r0[(x + 1) % 5];
            const double want = 2.0 * ((r1[x] - rc) / 2.0 + sign * a * (rc - 1.0) * (rp - rc)) / (rm - 2 * rc + rp);
            ASSERT_TRUE(got[x].has_value());
            EXPECT_NEAR(*got[x], want, 1e-13) << x;
        }
    }
    EXPECT_THROW(pointwise_viscosity(t, 1, p, ViscosityVariant::AsPrinted), Error);
}

TEST(Viscosity, UniformTraceHasNoEstimate)
{
    ViscosityEstimate e = experimental_viscosity(uniform_trace(16, 5, 1.0), CollisionParams(1.0),
                                                 ViscosityVariant::PdeConsistent);
    EXPECT_FALSE(e.nu.has_value());
    EXPECT_EQ(e.skipped_steps, 4);
    EXPECT_EQ(e.kept_fraction, 0.0);
    for (const auto& s : e.per_step)
        EXPECT_EQ(s.n_valid, 0);
    EXPECT_THROW(experimental_viscosity(uniform_trace(16, 1, 1.0), CollisionParams(1.0),
                                        ViscosityVariant::PdeConsistent),
                 Error);
    DensityTrace two_d(4, 4, 1.0, 1.0);
    two_d.append(0, std::vector<double>(16, 1.0));
    two_d.append(1, std::vector<double>(16, 1.0));
    EXPECT_THROW(experimental_viscosity(two_d, CollisionParams(1.0), ViscosityVariant::AsPrinted), Error);
}

TEST(SigmaFilter, PopulationStdAndIdempotence)
{
    std::vector<double> v{1, 2, 3, 4, 5};
    SigmaFilter f = one_sigma_filter(v);
    EXPECT_DOUBLE_EQ(f.stddev, std::sqrt(2.0));
    EXPECT_EQ(f.n_kept, 3);
    EXPECT_EQ(f.kept, (std::vector<bool>{false, true, true, true, false}));
    EXPECT_DOUBLE_EQ(f.mean, 3.0);

    std::vector<double> w{0.1, 0.12, 0.09, 5.0, 0.11, -3.0, 0.1};
    const std::vector<double> copy = w;
    SigmaFilter a = one_sigma_filter(w), b = one_sigma_filter(w);
    EXPECT_EQ(a.kept, b.kept);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(w, copy);
    EXPECT_EQ(a.n_kept, 5);

    EXPECT_EQ(one_sigma_filter(std::vector<double>{}).n_kept, 0);
    SigmaFilter c = one_sigma_filter(std::vector<double>{2.5, 2.5});
    EXPECT_EQ(c.n_kept, 2);
    EXPECT_EQ(c.mean, 2.5);
}

TEST(Viscosity, CalibrationOracleSelectsPdeConsistentSign)
{
    std::vector<double> thetas{0.9, 1.2, 1.4};
    CalibrationResult r = calibrate_viscosity_estimator(thetas, 64, 1.0, 0.005, 200);
    ASSERT_EQ(r.cases.size(), 6u);
    ASSERT_TRUE(r.selected.has_value());
    EXPECT_EQ(*r.selected, ViscosityVariant::PdeConsistent);
    for (const auto& c : r.cases) {
        if (c.variant == ViscosityVariant::PdeConsistent) {
            EXPECT_LT(c.rel_error, 0.02) << c.nu_true;
        } else if (c.kept_fraction >= 0.5) {
            EXPECT_GT(c.rel_error, 0.01) << c.nu_true; // the printed sign is biased
        }
    }
    EXPECT_THROW(calibrate_viscosity_estimator({}, 64, 1.0, 0.005, 10), Error);
}

TEST(Steepness, Examples)
{
    EXPECT_EQ(shock_steepness(uniform_trace(8, 3, 1.3)), 0.0);
    const double eps = 0.01;
    DensityTrace t(8, 1, 0.5, 0.25); // c = 2
    std::vector<double> r(8, 1.0);
    r[3] = 1 + eps;
    r[4] = 1 - eps;
    t.append(0, r);
    EXPECT_NEAR(shock_steepness(t), 2 * 2 * eps, 1e-15);
    // The wraparound pair counts too.
    std::vector<double> w(8, 1.0);
    w[7] = 1 + 3 * eps;
    t.append(1, w);
    EXPECT_NEAR(shock_steepness(t), 2 * 3 * eps, 1e-15);
}

TEST(Steepness, FormationIndexPicksSteepestSnapshot)
{
    DensityTrace t(16, 1, 1.0, 1.0);
    for (int k = 0; k < 6; ++k) {
        std::vector<double> r(16, 1.0);
        r[5] = 1.0 + 0.01 * (k == 3 ? 9 : k);
        t.append(k, r);
    }
    EXPECT_EQ(shock_formation_index(t), 3u);
    EXPECT_EQ(shock_formation_index(uniform_trace(4, 3, 1.0)), 0u);
}

TEST(Steepness, FormationIndexSeesBothAxesIn2D)
{
    DensityTrace t(4, 3, 0.5, 0.25);
    std::vector<double> r(12, 1.0);
    t.append(0, r);
    r[1 * 4 + 2] = 1.02; // steps of 0.02 along x and y
    t.append(1, r);
    r[1 * 4 + 2] = 1.0;
    r[2 * 4 + 0] = 1.05; // y-neighbour across the periodic edge sees it too
    t.append(2, r);
    EXPECT_EQ(shock_formation_index(t), 2u);
    std::vector<double> col(12, 1.0);
    for (int x = 0; x < 4; ++x)
        col[2 * 4 + x] = 0.9; // a row: only y-differences are non-zero
    t.append(3, col);
    EXPECT_EQ(shock_formation_index(t), 3u);
}

TEST(Comparison, MseOfAnalyticSamplesIsZero)
{
    CollisionParams p(kPi / 3);
    DensityTrace t(64, 1, 2.0 / 64, (2.0 / 64) * (2.0 / 64));
    AnalyticConfig cfg = analytic_config_for(t, 1.0, 0.4, p, NuVariant::Corrected);
    EXPECT_DOUBLE_EQ(cfg.lx, 2.0);
    EXPECT_DOUBLE_EQ(cfg.c, 32.0);
    EXPECT_DOUBLE_EQ(cfg.nu, predicted_coefficients_1d(p, t.dx, t.dt).nu);
    EXPECT_DOUBLE_EQ(analytic_config_for(t, 1.0, 0.4, p, NuVariant::Yepez).nu, 1.0 / 6.0);

    ColeHopfSolution sol(cfg);
    std::vector<double> xs(64);
    for (int i = 0; i < 64; ++i)
        xs[i] = i * t.dx;
    for (long s = 0; s < 50; s += 10)
        t.append(s, sol.density(xs, s * t.dt));
    for (const auto& m : mse_compare(t, cfg))
        EXPECT_EQ(m.value, 0.0);

    AnalyticConfig wrong = cfg;
    wrong.lx = 3.0;
    EXPECT_THROW(mse_compare(t, wrong), Error);
}

TEST(Comparison, L2OfIdenticalTracesIsZero)
{
    DensityTrace a(4, 4, 1.0, 1.0);
    for (int k = 0; k < 3; ++k) {
        std::vector<double> r(16);
        for (int i = 0; i < 16; ++i)
            r[i] = 1.0 + 0.01 * std::sin(i + k);
        a.append(k, r);
    }
    for (const auto& m : l2_compare_2d(a, a, 1.0)) {
        ASSERT_TRUE(m.value.has_value());
        EXPECT_EQ(*m.value, 0.0);
    }
    // Uniform at rho_b: undefined.
    DensityTrace u(4, 4, 1.0, 1.0);
    u.append(0, std::vector<double>(16, 1.0));
    EXPECT_FALSE(l2_compare_2d(u, u, 1.0)[0].value.has_value());
}

TEST(Comparison, L2StopsAtDivergenceAndChecksGrids)
{
    DensityTrace a(2, 2, 1.0, 1.0), b(2, 2, 1.0, 1.0);
    for (int k = 0; k < 5; ++k) {
        a.append(2 * k, {1.1, 0.9, 1.0, 1.0});
        b.append(2 * k, {1.0, 1.0, 1.0, 1.0});
    }
    auto m = l2_compare_2d(a, b, 1.0, 5);
    ASSERT_EQ(m.size(), 3u); // steps 0, 2, 4
    EXPECT_DOUBLE_EQ(*m[0].value, 1.0);
    DensityTrace c(4, 1, 1.0, 1.0);
    c.append(0, {1, 1, 1, 1});
    EXPECT_THROW(l2_compare_2d(a, c, 1.0), Error);
    DensityTrace d(2, 2, 1.0, 1.0);
    d.append(1, {1, 1, 1, 1});
    EXPECT_THROW(l2_compare_2d(a, d, 1.0), Error);
}

TEST(Comparison, L2OfEmbeddedRowsEqualsOneDimensional)
{
    const int nx = 16, ny = 3;
    DensityTrace q1(nx, 1, 1.0, 1.0), f1(nx, 1, 1.0, 1.0), q2(nx, ny, 1.0, 1.0), f2(nx, ny, 1.0, 1.0);
    for (int k = 0; k < 4; ++k) {
        std::vector<double> rq(nx), rf(nx);
        for (int x = 0; x < nx; ++x) {
            rq[x] = 1.0 + 0.1 * std::cos(2 * kPi * x / nx + 0.3 * k);
            rf[x] = rq[x] + 1e-3 * std::sin(x * 0.7 + k);
        }
        std::vector<double> Rq, Rf;
        for (int y = 0; y < ny; ++y) {
            Rq.insert(Rq.end(), rq.begin(), rq.end());
            Rf.insert(Rf.end(), rf.begin(), rf.end());
        }
        q1.append(k, rq);
        f1.append(k, rf);
        q2.append(k, Rq);
        f2.append(k, Rf);
    }
    auto one = l2_compare_2d(q1, f1, 1.0), two = l2_compare_2d(q2, f2, 1.0);
    ASSERT_EQ(one.size(), two.size());
    for (std::size_t k = 0; k < one.size(); ++k)
        EXPECT_NEAR(*two[k].value, *one[k].value, 1e-14 * *one[k].value);
}

TEST(Sweeps, ViscositySweepRowsAndThreadIndependence)
{
    ViscositySweepConfig cfg;
    cfg.thetas = {0.3, 0.8, 1.2, kPi / 2};
    cfg.nx = 32;
    cfg.lx = 32;
    cfg.steps = 30;
    auto a = viscosity_sweep(cfg, 1);
    auto b = viscosity_sweep(cfg, 3);
    ASSERT_EQ(a.size(), 4u);
    EXPECT_EQ(a.front().theta, 0.3);
    EXPECT_EQ(a.back().theta, kPi / 2);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].theta, b[i].theta);
        EXPECT_EQ(a[i].nu_exp, b[i].nu_exp);
        EXPECT_EQ(a[i].kept_fraction, b[i].kept_fraction);
        EXPECT_EQ(a[i].error, b[i].error);
        PdeCoefficients1D k = predicted_coefficients_1d(CollisionParams(a[i].theta), 1.0, 1.0);
        EXPECT_EQ(a[i].nu_pred, k.nu);
        EXPECT_EQ(a[i].nu_yepez, k.nu_yepez);
        EXPECT_EQ(a[i].steps, 30);
    }
    // A bad theta fails its own row only.
    cfg.thetas = {0.0, 1.0};
    auto c = viscosity_sweep(cfg, 2);
    EXPECT_FALSE(c[0].error.empty());
    EXPECT_TRUE(c[1].error.empty());
}

TEST(Sweeps, SteepnessSweepOrderingAndMonotoneHorizon)
{
    SteepnessSweepConfig cfg;
    cfg.thetas = {0.5, 1.0};
    cfg.nxs = {32, 64};
    cfg.horizons = {40, 10};
    auto a = steepness_sweep(cfg, 1);
    auto b = steepness_sweep(cfg, 4);
    ASSERT_EQ(a.size(), 8u);
    EXPECT_EQ(a[0].nx, 32);
    EXPECT_EQ(a[0].theta, 0.5);
    EXPECT_EQ(a[0].steps, 40);
    EXPECT_EQ(a[1].steps, 10);
    EXPECT_EQ(a[2].theta, 1.0);
    EXPECT_EQ(a[4].nx, 64);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].delta, b[i].delta);
        EXPECT_TRUE(a[i].error.empty());
    }
    // Running maximum: a longer horizon never lowers Delta.
    for (std::size_t i = 0; i < a.size(); i += 2)
        EXPECT_GE(a[i].delta, a[i + 1].delta);
}
