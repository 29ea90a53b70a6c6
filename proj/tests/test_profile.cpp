#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bubble_tower/profile.hpp"
#include "fixtures.hpp"

using namespace bubble_tower;

TEST(GroundState, OneDimensionalCubic)
{
    const auto& prof = fixtures::profile(1, 3.0);
    EXPECT_NEAR(prof.U.front(), std::numbers::sqrt2, 1e-6);
    EXPECT_NEAR(decay_constant(prof) / (2.0 * std::numbers::sqrt2), 1.0, 1e-5);
}

TEST(GroundState, OneDimensionalQuadratic)
{
    const auto& prof = fixtures::profile(1, 2.0);
    EXPECT_NEAR(prof.U.front(), 1.5, 1e-6);
    EXPECT_NEAR(decay_constant(prof) / 6.0, 1.0, 1e-5);
}

TEST(GroundState, MatchesSolitonPointwise)
{
    for (double p : {2.0, 3.0}) {
        const auto& prof = fixtures::profile(1, p);
        for (double x = 0.0; x <= 10.0; x += 0.013) EXPECT_NEAR(prof.value(x), soliton_1d(p, x), 1e-6) << x;
    }
}

TEST(GroundState, ThreeDimensionalGolden)
{
    const auto& prof = fixtures::cubic3();
    EXPECT_NEAR(prof.U.front(), fixtures::golden_U0, 1e-9);
}

TEST(GroundState, OtherDimensions)
{
    EXPECT_NEAR(fixtures::profile(2, 3.0).U.front(), 2.206200864650738, 1e-9);
    EXPECT_NEAR(fixtures::profile(4, 2.0).U.front(), 8.67193429998683, 1e-8);
}

TEST(GroundState, PositiveAndDecreasing)
{
    for (auto [N, p] : {std::pair{3, 3.0}, std::pair{2, 3.0}, std::pair{4, 2.0}, std::pair{1, 2.0}}) {
        const auto& prof = fixtures::profile(N, p);
        EXPECT_EQ(prof.U1.front(), 0.0);
        for (std::size_t i = 1; i < prof.grid.size(); ++i) {
            ASSERT_GT(prof.U[i], 0.0);
            ASSERT_LT(prof.U[i], prof.U[i - 1]);
            ASSERT_LT(prof.U1[i], 0.0);
        }
    }
}

TEST(GroundState, OdeResidual)
{
    const auto& prof = fixtures::cubic3();
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < prof.grid.size(); ++i) {
        const double r = prof.grid[i], u = prof.U[i];
        worst = std::max(worst, std::abs(prof.U2[i] + (prof.N - 1) / r * prof.U1[i] - u + std::pow(u, prof.p)));
    }
    EXPECT_LE(worst, 1e-8);
}

TEST(GroundState, TabulatedDerivativesAgreeWithFinerSolve)
{
    const auto& a = fixtures::cubic3();
    ProfileOptions fine;
    fine.dr = 0.005;
    fine.ode.max_step = 0.01;
    const auto b = solve_ground_state(3, 3.0, 1e-13, fine);
    for (std::size_t i = 1; i < a.grid.size(); ++i) {
        ASSERT_NEAR(a.U[i], b.U[2 * i], 1e-11) << a.grid[i];
        ASSERT_NEAR(a.U1[i], b.U1[2 * i], 1e-10) << a.grid[i];
        ASSERT_NEAR(a.U2[i], b.U2[2 * i], 1e-9) << a.grid[i];
    }
}

TEST(GroundState, StepHalving)
{
    const double tol = 1e-13;
    ProfileOptions fine;
    fine.dr = 0.005;
    fine.ode.max_step = 0.025;
    const auto a = solve_ground_state(3, 3.0, tol);
    const auto b = solve_ground_state(3, 3.0, tol, fine);
    EXPECT_LE(std::abs(a.U.front() - b.U.front()), 10 * tol);
}

TEST(GroundState, DecayPlateau)
{
    const auto& prof = fixtures::cubic3();
    EXPECT_LE(prof.plateau_variation(), 5e-3);
    const double C0 = decay_constant(prof);
    EXPECT_GT(C0, 0.0);
    for (std::size_t i = prof.first_index(prof.r_match); i < prof.grid.size(); ++i) {
        EXPECT_NEAR(prof.plateau(i) / C0, 1.0, 5e-3);
    }
}

TEST(GroundState, InvalidInputs)
{
    EXPECT_THROW(solve_ground_state(3, 1.0), Error);
    EXPECT_THROW(solve_ground_state(3, 5.5), Error);
    EXPECT_THROW(solve_ground_state(0, 3.0), Error);
}

TEST(GroundState, BracketTooNarrow)
{
    ProfileOptions narrow;
    narrow.s_hi = 2.0;
    try {
        solve_ground_state(3, 3.0, 1e-13, narrow);
        FAIL() << "expected no_ground_state";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::no_ground_state);
    }
}

TEST(GroundState, WideBracketForFlatNonlinearity)
{
    ProfileOptions wide;
    wide.s_hi = 100.0;
    const auto prof = solve_ground_state(6, 1.5, 1e-13, wide);
    EXPECT_NEAR(prof.U.front(), 31.7327465305044, 1e-6);
}

TEST(Eval, RegularAtOrigin)
{
    const auto& prof = fixtures::cubic3();
    const auto s = prof.eval(0.0);
    EXPECT_EQ(s.U1, 0.0);
    EXPECT_DOUBLE_EQ(s.U, prof.U.front());
}

TEST(Eval, ContinuousAcrossSwitches)
{
    const auto& prof = fixtures::cubic3();
    for (double r : {prof.r_match, 2e-3, prof.r_max()}) {
        const auto a = prof.eval(r - 1e-9), b = prof.eval(r + 1e-9);
        EXPECT_NEAR(a.U / b.U, 1.0, 5e-3);
        EXPECT_NEAR(a.U1 / b.U1, 1.0, 5e-3);
    }
}

TEST(Eval, LogDerivativeLaw)
{
    for (auto [N, p] : {std::pair{3, 3.0}, std::pair{2, 3.0}, std::pair{4, 2.0}}) {
        const auto& prof = fixtures::profile(N, p);
        const double r = std::max(2.0 * prof.r_match, 4.0);
        const auto s = prof.eval(r);
        EXPECT_NEAR(s.U1 / s.U, -1.0 - (N - 1) / (2.0 * r), 2.0 / (r * r)) << N;
    }
}

TEST(Eval, InterpolationBetweenNodes)
{
    // Quintic Hermite on h = 0.01 against the profile solved on a grid that
    // has the midpoints as nodes.
    ProfileOptions fine;
    fine.dr = 0.005;
    const auto b = solve_ground_state(3, 3.0, 1e-13, fine);
    const auto& a = fixtures::cubic3();
    for (std::size_t i = 1; i < b.grid.size(); i += 2) {
        EXPECT_NEAR(a.value(b.grid[i]), b.U[i], 1e-10 * std::max(1.0, b.U[i]) + 1e-14);
    }
}

TEST(Soliton, ClosedForm)
{
    EXPECT_DOUBLE_EQ(soliton_1d(3.0, 0.0), std::numbers::sqrt2);
    EXPECT_NEAR(soliton_1d(3.0, 30.0) / (2.0 * std::numbers::sqrt2 * std::exp(-30.0)), 1.0, 1e-12);
    for (double p : {1.5, 2.0, 3.0, 4.0}) {
        for (double x : {0.3, 1.7, 9.0}) {
            EXPECT_EQ(soliton_1d(p, x), soliton_1d(p, -x));
            const double s = 1e-5;
            const double fd = (soliton_1d(p, x + s) - soliton_1d(p, x - s)) / (2 * s);
            EXPECT_NEAR(soliton_1d_derivative(p, x), fd, 1e-8 * std::max(1.0, std::abs(fd)));
        }
    }
}

TEST(DecayConstant, ShortDomainIsRejected)
{
    ProfileOptions shortr;
    shortr.r_max = 3.0;
    try {
        const auto prof = solve_ground_state(3, 3.0, 1e-13, shortr);
        decay_constant(prof);
        FAIL() << "expected an error for a truncated domain";
    } catch (const Error& e) {
        EXPECT_TRUE(e.code() == Errc::non_converged_tail || e.code() == Errc::invalid_parameter) << e.what();
    }
}
