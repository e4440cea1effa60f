#include "qlg/core.hpp"
#include "qlg/error.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qlg;

namespace {

constexpr double kPi = std::numbers::pi;

// Collision term written out directly from the unitary's inner block acting
// on the prepared amplitudes: test-side oracle for the quantum path.
PopulationPair collide_by_hand(double f0, double f1, double theta, double zeta, double xi)
{
    using C = std::complex<double>;
    const C i{0, 1};
    C a01 = std::sqrt((1 - f0) * f1);
    C a10 = std::sqrt(f0 * (1 - f1));
    C b01 = std::exp(i * xi) * std::cos(theta) * a01 + std::exp(i * zeta) * std::sin(theta) * a10;
    C b10 = -std::exp(-i * zeta) * std::sin(theta) * a01 + std::exp(-i * xi) * std::cos(theta) * a10;
    double a11 = f0 * f1;
    return {std::norm(b10) + a11, std::norm(b01) + a11};
}

} // namespace

TEST(CollisionParams, RejectsThetaOutsideDomain)
{
    EXPECT_THROW(CollisionParams(0.0), Error);
    EXPECT_THROW(CollisionParams(-0.1), Error);
    EXPECT_THROW(CollisionParams(kPi / 2 + 1e-9), Error);
    EXPECT_THROW(CollisionParams(std::nan("")), Error);
    EXPECT_NO_THROW(CollisionParams(kPi / 2));
    try {
        CollisionParams p(0.0);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
        EXPECT_NE(std::string(e.what()).find("(0, pi/2]"), std::string::npos);
    }
}

TEST(CollisionParams, AlphaIsCotTimesPhase)
{
    CollisionParams p(kPi / 3, 0.4, 0.1);
    EXPECT_NEAR(p.alpha(), std::cos(0.3) / std::tan(kPi / 3), 1e-15);
}

TEST(Unitary, InnerBlockAtPiOverThree)
{
    Unitary4 u = build_collision_unitary(CollisionParams(kPi / 3));
    EXPECT_NEAR(u(1, 1).real(), 0.5, 1e-15);
    EXPECT_NEAR(u(1, 2).real(), std::sqrt(3.0) / 2, 1e-15);
    EXPECT_NEAR(u(2, 1).real(), -std::sqrt(3.0) / 2, 1e-15);
    EXPECT_NEAR(u(2, 2).real(), 0.5, 1e-15);
    EXPECT_EQ(u(0, 0), Complex(1.0));
    EXPECT_EQ(u(3, 3), Complex(1.0));
}

TEST(Unitary, SwapAtPiOverTwo)
{
    Unitary4 u = build_collision_unitary(CollisionParams(kPi / 2));
    EXPECT_NEAR(std::abs(u(1, 1)), 0.0, 1e-15);
    EXPECT_NEAR(u(1, 2).real(), 1.0, 1e-15);
    EXPECT_NEAR(u(2, 1).real(), -1.0, 1e-15);
}

TEST(Unitary, UnitaryAndBlockStructure)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> th(1e-3, kPi / 2), ph(-kPi, kPi);
    for (int n = 0; n < 500; ++n) {
        Unitary4 u = build_collision_unitary(CollisionParams(th(rng), ph(rng), ph(rng)));
        Unitary4 p = u.adjoint() * u;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                ASSERT_LT(std::abs(p(r, c) - Complex(r == c ? 1.0 : 0.0)), 1e-12);
        for (int k = 1; k < 4; ++k) {
            ASSERT_EQ(u(0, k), Complex(0.0));
            ASSERT_EQ(u(k, 0), Complex(0.0));
            ASSERT_EQ(u(3, k - 1), Complex(0.0));
            ASSERT_EQ(u(k - 1, 3), Complex(0.0));
        }
    }
}

TEST(Cell, PrepareExamples)
{
    auto a = prepare_cell({0, 0}).amplitudes;
    EXPECT_EQ(a[0], Complex(1.0));
    EXPECT_EQ(a[3], Complex(0.0));
    a = prepare_cell({1, 1}).amplitudes;
    EXPECT_EQ(a[3], Complex(1.0));
    EXPECT_EQ(a[0], Complex(0.0));
    a = prepare_cell({0.5, 0.5}).amplitudes;
    for (auto v : a)
        EXPECT_DOUBLE_EQ(v.real(), 0.5);
    EXPECT_THROW(prepare_cell({1.1, 0.0}), Error);
    EXPECT_THROW(prepare_cell({0.2, -0.01}), Error);
}

TEST(Cell, MeasureExamplesAndRoundTrip)
{
    CellState vac;
    vac.amplitudes = {1, 0, 0, 0};
    EXPECT_EQ(measure_populations(vac), (PopulationPair{0, 0}));
    CellState full;
    full.amplitudes = {0, 0, 0, 1};
    EXPECT_EQ(measure_populations(full), (PopulationPair{1, 1}));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int n = 0; n < 1000; ++n) {
        PopulationPair p{u(rng), u(rng)};
        PopulationPair q = measure_populations(prepare_cell(p));
        ASSERT_NEAR(q.f0, p.f0, 1e-14);
        ASSERT_NEAR(q.f1, p.f1, 1e-14);
    }
    CellState bad;
    bad.amplitudes = {1, 1, 0, 0};
    EXPECT_THROW(measure_populations(bad), Error);
}

TEST(Omega, Examples)
{
    EXPECT_NEAR(omega({0.3, 0.3}, CollisionParams(kPi / 2)), 0.0, 1e-15);
    EXPECT_NEAR(omega({1, 0}, CollisionParams(kPi / 3)), 0.75, 1e-15);
    // Root of the collision term at rho = 1, alpha = 1.
    const double f0 = 0.5 - (std::sqrt(2.0) - 1) / 2;
    EXPECT_NEAR(omega({f0, 1 - f0}, CollisionParams(kPi / 4)), 0.0, 1e-12);
}

TEST(Collide, Examples)
{
    PopulationPair out = collide_closed_form({0.6, 0.4}, CollisionParams(kPi / 2));
    EXPECT_NEAR(out.f0, 0.4, 1e-15);
    EXPECT_NEAR(out.f1, 0.6, 1e-15);
    out = collide_quantum({1, 0}, CollisionParams(kPi / 2));
    EXPECT_NEAR(out.f0, 0.0, 1e-15);
    EXPECT_NEAR(out.f1, 1.0, 1e-15);
}

TEST(Collide, QuantumMatchesHandOracle)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1), th(1e-3, kPi / 2), ph(-kPi, kPi);
    for (int n = 0; n < 2000; ++n) {
        double f0 = u(rng), f1 = u(rng), t = th(rng), z = ph(rng), x = ph(rng);
        PopulationPair q = collide_quantum({f0, f1}, CollisionParams(t, z, x));
        PopulationPair h = collide_by_hand(f0, f1, t, z, x);
        ASSERT_NEAR(q.f0, h.f0, 1e-13);
        ASSERT_NEAR(q.f1, h.f1, 1e-13);
    }
}

TEST(Collide, QuantumEqualsClosedFormOn10kSamples)
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0, 1), th(1e-3, kPi / 2), ph(-kPi, kPi);
    int compared = 0;
    for (int n = 0; n < 10000; ++n) {
        PopulationPair p{u(rng), u(rng)};
        CollisionParams c(th(rng), ph(rng), ph(rng));
        PopulationPair q = collide_quantum(p, c);
        PopulationPair f = collide_closed_form(p, c);
        ASSERT_NEAR(q.f0, f.f0, 1e-12);
        ASSERT_NEAR(q.f1, f.f1, 1e-12);
        ASSERT_NEAR(q.rho(), p.rho(), 1e-12);
        ASSERT_NEAR(f.rho(), p.rho(), 1e-12);
        ++compared;
    }
    EXPECT_EQ(compared, 10000);
}

TEST(Equilibrium, Examples)
{
    CollisionParams a1(kPi / 4);
    PopulationPair e = equilibrium(1.0, a1);
    EXPECT_NEAR(e.f0, 0.2929, 1e-4);
    EXPECT_NEAR(e.f1, 0.7071, 1e-4);
    e = equilibrium(2.0, a1);
    EXPECT_NEAR(e.f0, 1.0, 1e-15);
    EXPECT_NEAR(e.f1, 1.0, 1e-15);
    e = equilibrium(1.0, CollisionParams(kPi / 2));
    EXPECT_NEAR(e.f0, 0.5, 1e-15);
    EXPECT_NEAR(e.f1, 0.5, 1e-15);
    EXPECT_THROW(equilibrium(2.5, a1), Error);
    EXPECT_THROW(equilibrium(-0.1, a1), Error);
}

TEST(Equilibrium, IsRootOfOmegaAndFixedPoint)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> th(0.02, kPi / 2), ph(-kPi, kPi);
    for (int n = 0; n < 200; ++n) {
        CollisionParams p(th(rng), ph(rng), ph(rng));
        for (int k = 0; k <= 8; ++k) {
            double rho = 0.25 * k;
            PopulationPair e = equilibrium(rho, p);
            ASSERT_EQ(e.f0 + e.f1, rho);
            ASSERT_NEAR(omega(e, p), 0.0, 1e-10);
            PopulationPair c = collide_closed_form(e, p);
            ASSERT_NEAR(c.f0, e.f0, 1e-10);
            ASSERT_NEAR(c.f1, e.f1, 1e-10);
            PopulationPair q = collide_quantum(e, p);
            ASSERT_NEAR(q.f0, e.f0, 1e-10);
            ASSERT_NEAR(q.f1, e.f1, 1e-10);
        }
    }
}

TEST(Equilibrium, MomentumConsistency)
{
    for (double theta : {0.1, 0.5, kPi / 3, 1.4}) {
        CollisionParams p(theta);
        const double a = p.alpha();
        EXPECT_NEAR(momentum_eq(1.0, p), (std::sqrt(1 + a * a) - 1) / a, 1e-14);
        for (double rho = 0; rho <= 2.0; rho += 0.125) {
            PopulationPair e = equilibrium(rho, p);
            ASSERT_NEAR(e.f1 - e.f0, momentum_eq(rho, p), 1e-12);
        }
    }
    EXPECT_EQ(momentum_eq(1.3, CollisionParams(kPi / 2)), 0.0);
}

TEST(Jacobian, Examples)
{
    EXPECT_NEAR(jacobian_gap(1.0, CollisionParams(kPi / 4)), -std::sqrt(2.0), 1e-12);
    for (double rho : {0.0, 0.5, 1.0, 1.7})
        EXPECT_NEAR(jacobian_gap(rho, CollisionParams(kPi / 2)), -2.0, 1e-12);
}

TEST(Jacobian, MatchesCentralDifferenceOracle)
{
    const double h = 1e-6;
    for (double theta : {0.3, 0.6, kPi / 4, 1.0, 1.3, 1.5}) {
        CollisionParams p(theta);
        for (double rho : {0.3, 0.6, 0.9, 1.0, 1.2, 1.5}) {
            PopulationPair e = equilibrium(rho, p);
            auto om = [&](double a, double b) { return detail::omega_unchecked(a, b, p); };
            double d0 = (om(e.f0 + h, e.f1) - om(e.f0 - h, e.f1)) / (2 * h);
            double d1 = (om(e.f0, e.f1 + h) - om(e.f0, e.f1 - h)) / (2 * h);
            double fd = d1 - d0;
            double cf = jacobian_gap(rho, p);
            ASSERT_LT(std::abs(fd - cf) / std::abs(cf), 1e-5) << "theta " << theta << " rho " << rho;
        }
    }
}

TEST(Relaxation, ConvergesFromRandomPairs)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    for (double theta : {0.1, 0.4, 0.8, 1.2, 1.4}) {
        CollisionParams p(theta);
        for (int n = 0; n < 50; ++n) {
            PopulationPair f{u(rng), u(rng)};
            PopulationPair e = equilibrium(f.rho(), p);
            int it = 0;
            for (; it < 100000 && std::abs(f.f0 - e.f0) > 1e-8; ++it)
                f = collide_closed_form(f, p);
            ASSERT_LE(std::abs(f.f0 - e.f0), 1e-8) << "theta " << theta << " rho " << f.rho();
            ASSERT_NEAR(f.f1, e.f1, 1e-8);
        }
    }
}

TEST(Relaxation, MonotoneNearEquilibrium)
{
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> r(0.2, 1.8), kick(-1e-3, 1e-3);
    for (double theta : {0.1, 0.4, 0.8, 1.2, 1.4}) {
        CollisionParams p(theta);
        for (int n = 0; n < 200; ++n) {
            const double rho = r(rng);
            PopulationPair e = equilibrium(rho, p);
            // Small relative to the distance from the f = 0, 1 walls, where
            // the square root in omega is singular.
            const double room = std::min({e.f0, e.f1, 1 - e.f0, 1 - e.f1});
            const double d0 = kick(rng) * room;
            PopulationPair f{e.f0 + d0, e.f1 - d0};
            double prev = std::abs(d0);
            for (int it = 0; it < 100000 && prev > 1e-12; ++it) {
                f = collide_closed_form(f, p);
                double d = std::abs(f.f0 - e.f0);
                ASSERT_LE(d, prev + 1e-15) << "theta " << theta << " rho " << rho;
                prev = d;
            }
            ASSERT_LE(prev, 1e-12);
        }
    }
}

// Far from equilibrium the distance can grow for a few iterations.
TEST(Relaxation, TransientGrowthExists)
{
    CollisionParams p(0.4);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    bool grew = false;
    for (int n = 0; n < 200 && !grew; ++n) {
        PopulationPair f{u(rng), u(rng)};
        PopulationPair e = equilibrium(f.rho(), p);
        double prev = std::abs(f.f0 - e.f0);
        for (int it = 0; it < 50; ++it) {
            f = collide_closed_form(f, p);
            double d = std::abs(f.f0 - e.f0);
            grew = grew || d > prev * (1 + 1e-9);
            prev = d;
        }
    }
    EXPECT_TRUE(grew);
}

TEST(PhaseInvariance, CommonShiftOfZetaXi)
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0, 1), th(0.05, kPi / 2), ph(-kPi, kPi);
    for (int n = 0; n < 1000; ++n) {
        PopulationPair f{u(rng), u(rng)};
        double t = th(rng), z = ph(rng), x = ph(rng), c = ph(rng);
        CollisionParams a(t, z, x), b(t, z + c, x + c);
        ASSERT_NEAR(omega(f, a), omega(f, b), 1e-12);
        PopulationPair qa = collide_quantum(f, a), qb = collide_quantum(f, b);
        ASSERT_NEAR(qa.f0, qb.f0, 1e-12);
        ASSERT_NEAR(qa.f1, qb.f1, 1e-12);
    }
}

TEST(Coefficients, PiOverThree)
{
    PdeCoefficients1D k = predicted_coefficients_1d(CollisionParams(kPi / 3), 1.0, 1.0);
    EXPECT_NEAR(k.nu, 0.077351, 1e-6);
    EXPECT_NEAR(k.nu_yepez, 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(k.c_s, 1.0 / std::sqrt(3.0), 1e-15);
    // With zeta = xi: nu = (1/sin(theta) - 1)/2.
    EXPECT_NEAR(k.nu, (2 / std::sqrt(3.0) - 1) / 2, 1e-15);
}

TEST(Coefficients, OtherExamples)
{
    PdeCoefficients1D k = predicted_coefficients_1d(CollisionParams(kPi / 2), 1.0, 1.0);
    EXPECT_NEAR(k.nu, 0.0, 1e-15);
    EXPECT_NEAR(k.nu_yepez, 0.0, 1e-15);
    k = predicted_coefficients_1d(CollisionParams(kPi / 4), 1.0, 1.0);
    EXPECT_NEAR(k.nu, (std::sqrt(2.0) - 1) / 2, 1e-12);
    // Physical scaling.
    k = predicted_coefficients_1d(CollisionParams(kPi / 3), 0.5, 0.25);
    EXPECT_NEAR(k.c_s, 2.0 / std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(k.nu_yepez, 1.0 / 6.0, 1e-14);
    EXPECT_THROW(predicted_coefficients_1d(CollisionParams(1.0), 0.0, 1.0), Error);
}

TEST(Coefficients, CorrectedBelowYepezAndNonNegative)
{
    for (int i = 1; i < 100; ++i) {
        double theta = (kPi / 2) * i / 100.0;
        PdeCoefficients1D k = predicted_coefficients_1d(CollisionParams(theta), 1.0, 1.0);
        ASSERT_LT(k.nu, k.nu_yepez) << theta;
        ASSERT_GE(k.nu, 0.0) << theta;
    }
}
