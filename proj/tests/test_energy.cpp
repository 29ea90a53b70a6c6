#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "bubble_tower/checks.hpp"
#include "fixtures.hpp"

using namespace bubble_tower;

namespace {

ModelParams cubic()
{
    return ModelParams{};
}

double g(double x, double a) { return std::exp(-x) * std::pow(x, -a); }

} // namespace

TEST(ReducedEnergy, FarRadiusLimit)
{
    const auto& c = fixtures::coeffs3();
    const auto rep = reduced_energy(c, cubic(), 12, 1e6, 0.3);
    EXPECT_NEAR(rep.value / (12 * c.A2), 1.0, 1e-12);
}

TEST(ReducedEnergy, NegligibleExponentials)
{
    const auto& c = fixtures::coeffs3();
    const auto mp = cubic();
    const int k = 20;
    const double r = 2000.0, h = 0.4;
    const auto rep = reduced_energy(c, mp, k, r, h);
    EXPECT_NEAR(rep.value, k * (c.A1 / std::pow(r, mp.m) + c.A2), 1e-12 * rep.value);
}

TEST(ReducedEnergy, IndependentReevaluation)
{
    const auto& c = fixtures::coeffs3();
    const auto mp = cubic();
    const double a = 1.0;
    for (auto [k, r, h] : {std::tuple{10, 4.0, 0.3}, std::tuple{1000, 5500.0, 0.0022}, std::tuple{64, 200.0, 0.02}}) {
        const auto rep = reduced_energy(c, mp, k, r, h);
        const double d = 2 * std::numbers::pi * std::sqrt(1 - h * h) * r / k;
        const double s = 2 * r * h;
        const double F = k * (c.A1 / std::pow(r, 5.0) + c.A2 - 2 * c.B1 * g(d, a) - c.B1 * g(s, a));
        EXPECT_NEAR(rep.value, F, 1e-13 * std::abs(F));
        EXPECT_NEAR(rep.self + rep.constant + rep.neighbor + rep.layer, rep.value, 1e-13 * std::abs(F));
        EXPECT_EQ(rep.offset, 0.0);
    }
}

TEST(ReducedEnergy, DegenerateLayer)
{
    try {
        reduced_energy(fixtures::coeffs3(), cubic(), 10, 1.0, 1e-17);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::degenerate_layer);
    }
    EXPECT_THROW(reduced_energy(fixtures::coeffs3(), cubic(), 10, 1.0, 0.0), Error);
}

TEST(ReducedEnergy, TowerParameterChecks)
{
    auto mp = cubic();
    mp.m = 3.0;
    EXPECT_THROW(reduced_energy(fixtures::coeffs3(), mp, 10, 5.0, 0.1), Error);
    mp = cubic();
    mp.N = 2;
    mp.p = 3.0;
    try {
        reduced_energy(fixtures::coeffs3(), mp, 10, 5.0, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::dimension);
    }
}

TEST(ReducedGradient, FiniteDifferenceOracle)
{
    const auto chk = gradient_fd_check(fixtures::coeffs3(), cubic(), 100);
    EXPECT_EQ(chk.samples, 100);
    EXPECT_LE(chk.worst(), 1e-6);
}

TEST(ReducedGradient, PairMatchesReport)
{
    const auto rep = reduced_energy(fixtures::coeffs3(), cubic(), 100, 300.0, 0.05);
    const auto [gr, gh] = reduced_gradient(fixtures::coeffs3(), cubic(), 100, 300.0, 0.05);
    EXPECT_EQ(gr, rep.dF_dr);
    EXPECT_EQ(gh, rep.dF_dh);
    EXPECT_GT(rep.dropped_term_ratio, 0.0);
    EXPECT_LT(rep.dropped_term_ratio, 1.0);
}

TEST(ReducedGradient, LayerTermDominatesAsHVanishes)
{
    for (double h : {1e-3, 1e-4, 1e-6}) {
        EXPECT_GT(reduced_energy(fixtures::coeffs3(), cubic(), 1000, 5000.0, h).dF_dh, 0.0) << h;
    }
}

TEST(ReducedGradient, RadialSignChange)
{
    const auto& c = fixtures::coeffs3();
    const int k = 1000;
    const auto cp = find_critical_point(c, cubic(), k);
    int changes = 0;
    double prev = reduced_energy(c, cubic(), k, cp.rect.r_lo, cp.h_star).dF_dr;
    EXPECT_GT(prev, 0.0);
    for (int i = 1; i <= 200; ++i) {
        const double r = cp.rect.r_lo + (cp.rect.r_hi - cp.rect.r_lo) * i / 200.0;
        const double v = reduced_energy(c, cubic(), k, r, cp.h_star).dF_dr;
        changes += (v > 0) != (prev > 0);
        prev = v;
    }
    EXPECT_LT(prev, 0.0);
    EXPECT_EQ(changes, 1);
}

TEST(CriticalPoint, SweepApproachesCenter)
{
    const auto sweep = tower_sweep(fixtures::cubic3(), fixtures::coeffs3(), cubic(), {1000, 10000, 100000, 1000000});
    EXPECT_TRUE(sweep.monotone_approach());
    EXPECT_LE(sweep.max_grad_residual(), 1e-8);
    EXPECT_TRUE(sweep.signs_ok());
    for (const auto& row : sweep.rows) {
        EXPECT_TRUE(row.critical.in_interior);
        EXPECT_TRUE(row.critical.max_in_h);
        const auto rep = reduced_energy(fixtures::coeffs3(), cubic(), row.k, row.critical.r_star, row.critical.h_star);
        EXPECT_LE(rep.residual_norm, 1e-8);
    }
}

TEST(CriticalPoint, InvariantUnderCoefficientRescaling)
{
    const auto& c = fixtures::coeffs3();
    for (int k : {1000, 100000}) {
        const auto a = find_critical_point(c, cubic(), k);
        for (double s : {0.25, 3.0}) {
            CoefficientSet cs = c;
            cs.A1 *= s;
            cs.B1 *= s;
            const auto b = find_critical_point(cs, cubic(), k);
            EXPECT_NEAR(b.r_star / a.r_star, 1.0, 1e-10);
            EXPECT_NEAR(b.h_star / a.h_star, 1.0, 1e-10);
            const auto ra = reduced_energy(c, cubic(), k, a.r_star, a.h_star);
            const auto rb = reduced_energy(cs, cubic(), k, b.r_star, b.h_star);
            EXPECT_NEAR(rb.value - rb.constant, s * (ra.value - ra.constant), 1e-9 * std::abs(ra.value - ra.constant));
        }
    }
}

TEST(CriticalPoint, SearchFailureOutsideRectangle)
{
    // A rectangle far to the right of the critical radius has no interior zero.
    const auto& c = fixtures::coeffs3();
    const int k = 1000;
    const auto cp = find_critical_point(c, cubic(), k);
    Rectangle far{3 * cp.r_star, 4 * cp.r_star, cp.rect.h_lo, cp.rect.h_hi};
    try {
        find_critical_point(c, cubic(), k, far);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::search_failure);
    }
}

TEST(Balance, OrderOneAlongSweep)
{
    const auto sweep = tower_sweep(fixtures::cubic3(), fixtures::coeffs3(), cubic(), {1000, 10000, 100000, 1000000});
    EXPECT_TRUE(sweep.balance_order_one());
    EXPECT_LT(sweep.balance_variation(), 0.5);
    for (const auto& row : sweep.rows) {
        // The two prefactors differ by exactly (m+1)/(2m).
        EXPECT_NEAR(row.balance_half.neighbor / row.balance_m.neighbor, 0.6, 1e-12);
    }
}

TEST(Balance, FlatLayerIsFlagged)
{
    const auto b = balance_residuals(fixtures::cubic3(), fixtures::coeffs3(), cubic(), TowerConfig{100, 400.0, 0.0, 3});
    EXPECT_FALSE(b.layer_defined);
    EXPECT_TRUE(std::isnan(b.layer));
    EXPECT_TRUE(std::isfinite(b.neighbor));
}

TEST(Balance, PotentialPullScalesWithRadius)
{
    // At fixed (k, h) the potential pull falls by 2^{m+1} when r doubles; the
    // attraction side changes only through U at the new distances.
    const auto& prof = fixtures::cubic3();
    const TowerConfig ca{100, 300.0, 0.01, 3}, cb{100, 600.0, 0.01, 3};
    const auto a = balance_residuals(prof, fixtures::coeffs3(), cubic(), ca);
    const auto b = balance_residuals(prof, fixtures::coeffs3(), cubic(), cb);
    const auto da = nearest_distances(ca), db = nearest_distances(cb);
    const double pull = std::pow(2.0, 6.0);
    EXPECT_NEAR(a.neighbor / b.neighbor, pull * prof.value(db.neighbor) / prof.value(da.neighbor),
                1e-12 * a.neighbor / b.neighbor);
    EXPECT_NEAR(a.layer / b.layer, pull * prof.value(db.layer) / prof.value(da.layer), 1e-12 * a.layer / b.layer);
}

TEST(Scaling, BandAndGrowth)
{
    const auto sweep = tower_sweep(fixtures::cubic3(), fixtures::coeffs3(), cubic(), {1000, 10000, 100000, 1000000});
    EXPECT_TRUE(sweep.scaling_in_band());
    EXPECT_TRUE(sweep.growth_increasing());
}

TEST(Scaling, DoubledRadiusLeavesBand)
{
    const auto cp = find_critical_point(fixtures::coeffs3(), cubic(), 10000);
    const TowerConfig off{10000, 2.0 * cp.r_star, cp.h_star, 3};
    EXPECT_FALSE(scaling_relations(fixtures::cubic3(), cubic(), off).in_band());
}

TEST(InteractionDerivative, ApproachesAsymptote)
{
    const auto sweep = tower_sweep(fixtures::cubic3(), fixtures::coeffs3(), cubic(), {50, 100, 1000, 10000, 100000});
    EXPECT_NEAR(sweep.rows.front().derivative.ratio, 1.0, 0.25);
    EXPECT_TRUE(sweep.derivative_tightening());
    EXPECT_LE(sweep.max_companion(), 1e-12);
    for (const auto& row : sweep.rows) {
        EXPECT_NEAR(row.derivative.exact_counter, row.derivative.exact, 1e-12 * std::abs(row.derivative.exact));
    }
}

TEST(InteractionDerivative, NeedsEnoughPoints)
{
    EXPECT_THROW(interaction_derivative_check(fixtures::cubic3(), TowerConfig{4, 10.0, 0.1, 3}), Error);
}

namespace {

ModelParams nested_model()
{
    ModelParams mp;
    mp.N = 6;
    mp.p = 1.5;
    mp.m = 9.0;
    return mp;
}

} // namespace

TEST(NestedEnergy, OffsetIsAdditive)
{
    const auto c = compute_coefficients(fixtures::flat6(), 1.0);
    const auto mp = nested_model();
    const auto a = nested_energy(c, mp, 1000, 1500.0, 0.003);
    const auto b = nested_energy(c, mp, 1000, 1500.0, 0.003, 12.5);
    EXPECT_DOUBLE_EQ(b.report.value - a.report.value, 12.5);
    EXPECT_EQ(a.critical.r_star, b.critical.r_star);
    EXPECT_EQ(a.critical.h_star, b.critical.h_star);
}

TEST(NestedEnergy, SweepApproachesCenter)
{
    const auto c = compute_coefficients(fixtures::flat6(), 1.0);
    const auto mp = nested_model();
    const double t_lim = mp.m / (2 * std::numbers::pi), l_lim = std::numbers::pi * (mp.m + 2) / mp.m;
    double prev_t = INFINITY, prev_l = INFINITY;
    for (int n : {1000, 10000, 100000, 1000000}) {
        const auto res = nested_energy(c, mp, n, 1.0, 0.5);
        const double dt = std::abs(res.critical.r_star / (n * std::log(double(n))) - t_lim);
        const double dl = std::abs(res.critical.h_star * n - l_lim);
        EXPECT_LT(dt, prev_t) << n;
        EXPECT_LT(dl, prev_l) << n;
        EXPECT_LE(res.critical.grad_residual, 1e-8);
        prev_t = dt;
        prev_l = dl;
    }
}

TEST(NestedEnergy, NeedsSixDimensions)
{
    try {
        nested_energy(fixtures::coeffs3(), cubic(), 100, 10.0, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::dimension);
    }
}
