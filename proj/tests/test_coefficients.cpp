#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bubble_tower/checks.hpp"
#include "bubble_tower/coefficients.hpp"
#include "bubble_tower/quadrature.hpp"
#include "fixtures.hpp"

using namespace bubble_tower;

TEST(Coefficients, OneDimensionalClosedForms)
{
    const auto& prof = fixtures::profile(1, 3.0);
    const auto c = compute_coefficients(prof, 1.0);
    EXPECT_NEAR(c.A1, 4.0, 1e-6);
    EXPECT_NEAR(c.A2, 8.0 / 3.0, 1e-6);
    // ∫ sech³x e^{-x} dx = ∫ sech²x dx = 2, and C0 = 2√2.
    EXPECT_NEAR(c.B1 / 16.0, 1.0, 1e-5);
}

TEST(Coefficients, SeparateEntryPointsAgree)
{
    const auto& prof = fixtures::cubic3();
    const auto c = compute_coefficients(prof, 1.0);
    EXPECT_DOUBLE_EQ(compute_A1(prof, 1.0), c.A1);
    EXPECT_DOUBLE_EQ(compute_A2(prof), c.A2);
    EXPECT_DOUBLE_EQ(compute_B1(prof), c.B1);
    EXPECT_EQ(c.N, 3);
    EXPECT_EQ(c.p, 3.0);
}

TEST(Coefficients, LinearInA1)
{
    const auto& prof = fixtures::cubic3();
    EXPECT_EQ(compute_A1(prof, 2.0), 2.0 * compute_A1(prof, 1.0));
    EXPECT_THROW(compute_A1(prof, 0.0), Error);
}

TEST(Coefficients, GoldenThreeDimensional)
{
    const auto& c = fixtures::coeffs3();
    EXPECT_NEAR(c.A1 / fixtures::golden_A1, 1.0, 1e-5);
    EXPECT_NEAR(c.A2 / fixtures::golden_A2, 1.0, 1e-5);
    EXPECT_NEAR(c.B1 / fixtures::golden_B1, 1.0, 1e-5);
    EXPECT_LT(c.err, 1e-8);
}

TEST(Coefficients, PositiveForSeveralProfiles)
{
    for (auto [N, p] : {std::pair{1, 2.0}, std::pair{2, 3.0}, std::pair{3, 2.0}, std::pair{4, 2.0}}) {
        const auto c = compute_coefficients(fixtures::profile(N, p), 0.7);
        EXPECT_GT(c.A1, 0.0);
        EXPECT_GT(c.A2, 0.0);
        EXPECT_GT(c.B1, 0.0);
    }
}

TEST(Coefficients, RefinementChange)
{
    EXPECT_LT(coefficient_refinement_change(fixtures::cubic3(), 1.0), 1e-5);
    EXPECT_LT(coefficient_refinement_change(fixtures::profile(4, 2.0), 1.0), 1e-5);
}

TEST(Coefficients, PolarAgainstCartesian)
{
    const auto& prof = fixtures::profile(2, 3.0);
    EXPECT_NEAR(compute_B1(prof) / cartesian_B1(prof), 1.0, 1e-3);
}

TEST(Coefficients, ReflectedExponential)
{
    // In one dimension the weight e^{+y} gives the same integral by symmetry.
    const auto& prof = fixtures::profile(1, 3.0);
    const GaussLegendre rule(10);
    auto f = [&](double s) { return [&, s](double x) { return std::pow(prof.value(std::abs(x)), prof.p) * std::exp(s * x); }; };
    const double minus = composite_gl(f(-1.0), -28.0, 28.0, 400, rule);
    const double plus = composite_gl(f(1.0), -28.0, 28.0, 400, rule);
    EXPECT_NEAR(plus / minus, 1.0, 1e-12);
    EXPECT_NEAR(prof.C0 * minus / compute_B1(prof), 1.0, 1e-5);
}

TEST(AngularFactor, MatchesBessel)
{
    for (int N : {2, 3, 4, 5}) {
        for (double r : {0.5, 3.0, 20.0, 150.0}) {
            const double scaled = scaled_angular_factor(N, r);
            const double exact = std::exp(-r) * angular_factor_bessel(N, r);
            EXPECT_NEAR(scaled / exact, 1.0, 1e-10) << N << " " << r;
        }
    }
}

TEST(SphereArea, KnownValues)
{
    EXPECT_DOUBLE_EQ(sphere_area(1), 2.0);
    EXPECT_NEAR(sphere_area(2), 2.0 * std::numbers::pi, 1e-14);
    EXPECT_NEAR(sphere_area(3), 4.0 * std::numbers::pi, 1e-14);
}

TEST(Coefficients, QuadratureErrorIsReported)
{
    CoefficientOptions coarse;
    coarse.panels = 1;
    coarse.order = 2;
    coarse.tail_panels = 1;
    coarse.angular_panels = 1;
    try {
        compute_coefficients(fixtures::cubic3(), 1.0, coarse);
        FAIL() << "expected a quadrature error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::quadrature);
    }
}
