#ifndef BUBBLE_TOWER_CHECKS_HPP
#define BUBBLE_TOWER_CHECKS_HPP

// Verification oracles shared by the CLI report and the acceptance suite.
// Needs Boost.Multiprecision (header only).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "coefficients.hpp"
#include "energy.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "model.hpp"
#include "profile.hpp"
#include "quadrature.hpp"

namespace bubble_tower {

struct GradientCheck
{
    int samples = 0;
    double max_rel_error_r = 0.0;
    double max_rel_error_h = 0.0;

    double worst() const { return std::max(max_rel_error_r, max_rel_error_h); }
};

/// Analytic gradient against central differences of the value formula at
/// random admissible (k, r, h). The differences are taken in 50-digit
/// arithmetic: the energy is dominated by h-independent terms and its
/// h-dependence through the neighbor distance is O(h²), so double precision
/// differences carry no significant digits at large k.
inline GradientCheck gradient_fd_check(const CoefficientSet& c, const ModelParams& mp, int samples = 100,
                                       unsigned long seed = 20240601, double k_lo = 10.0, double k_hi = 1e6)
{
    using HP = boost::multiprecision::cpp_bin_float_50;
    mp.validate_tower();
    const HP pi = boost::math::constants::pi<HP>();
    const double a = 0.5 * (mp.N - 1);
    const auto widths = RectangleWidths::defaults(mp.m);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    GradientCheck out;
    out.samples = samples;
    for (int i = 0; i < samples; ++i) {
        const int k = static_cast<int>(std::lround(std::exp(std::log(k_lo) + unit(rng) * std::log(k_hi / k_lo))));
        const auto rect = admissible_rectangle(mp.m, k, widths);
        const double r = rect.r_lo + unit(rng) * (rect.r_hi - rect.r_lo);
        const double h = rect.h_lo + unit(rng) * (rect.h_hi - rect.h_lo);
        const auto rep = reduced_energy(c, mp, k, r, h);

        auto F = [&](const HP& rr, const HP& hh) {
            const auto t = detail::energy_terms<HP>(c.A1, c.A2, c.B1, mp.m, a, k, rr, hh, pi);
            return HP(t.self + t.neighbor + t.layer);
        };
        const HP R = r, H = h;
        const HP dr = R * HP(1e-12), dh = H * HP(1e-12);
        const double fr = static_cast<double>((F(R + dr, H) - F(R - dr, H)) / (2 * dr));
        const double fh = static_cast<double>((F(R, H + dh) - F(R, H - dh)) / (2 * dh));
        out.max_rel_error_r = std::max(out.max_rel_error_r, std::abs(rep.dF_dr - fr) / std::abs(fr));
        out.max_rel_error_h = std::max(out.max_rel_error_h, std::abs(rep.dF_dh - fh) / std::abs(fh));
    }
    return out;
}

/// C0 ∫∫ U(|y|)^p e^{-y1} dy over [-half, half]² by tensor Gauss-Legendre,
/// an oracle for B1 at N = 2 that avoids the polar reduction.
inline double cartesian_B1(const RadialProfile& prof, double half = 40.0, int panels = 80, int order = 10)
{
    if (prof.N != 2) throw Error(Errc::dimension, "the Cartesian oracle is two-dimensional");
    const GaussLegendre rule(order);
    const double w = 2.0 * half / panels;
    std::vector<double> x, wx;
    for (int i = 0; i < panels; ++i) {
        const double a = -half + i * w;
        for (std::size_t q = 0; q < rule.x.size(); ++q) {
            x.push_back(a + 0.5 * w * (rule.x[q] + 1.0));
            wx.push_back(0.5 * w * rule.w[q]);
        }
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double rho = std::hypot(x[i], x[j]);
            row += wx[j] * std::exp(prof.p * std::log(prof.value(rho)) - x[i]);
        }
        sum += wx[i] * row;
    }
    return prof.C0 * sum;
}

/// Largest relative change of A1, A2, B1 when panels are doubled.
inline double coefficient_refinement_change(const RadialProfile& prof, double a1, const CoefficientOptions& opt = {})
{
    const auto c = compute_coefficients(prof, a1, opt);
    CoefficientOptions fine = opt;
    fine.panels *= 2;
    fine.tail_panels *= 2;
    fine.angular_panels *= 2;
    const auto f = compute_coefficients(prof, a1, fine);
    return std::max({std::abs(f.A1 / c.A1 - 1.0), std::abs(f.A2 / c.A2 - 1.0), std::abs(f.B1 / c.B1 - 1.0)});
}

/// Diagnostics at the critical configuration of one k.
struct TowerRow
{
    int k = 0;
    CriticalPoint critical;
    double r_scaled = 0.0; ///< r*/(k ln k)
    double h_scaled = 0.0; ///< h* k
    BalanceRatios balance_half;
    BalanceRatios balance_m;
    ScalingDiagnostics scaling;
    InteractionDerivative derivative;
};

struct TowerSweep
{
    std::vector<TowerRow> rows;
    double r_limit = 0.0; ///< m/(2π)
    double h_limit = 0.0; ///< π(m+2)/m

    /// |r*/(k ln k) - m/(2π)| and |h* k - π(m+2)/m| strictly decrease.
    bool monotone_approach() const
    {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (!(std::abs(rows[i].r_scaled - r_limit) < std::abs(rows[i - 1].r_scaled - r_limit))) return false;
            if (!(std::abs(rows[i].h_scaled - h_limit) < std::abs(rows[i - 1].h_scaled - h_limit))) return false;
        }
        return true;
    }

    double max_grad_residual() const
    {
        double r = 0.0;
        for (const auto& row : rows) r = std::max(r, row.critical.grad_residual);
        return r;
    }

    bool signs_ok() const
    {
        return std::all_of(rows.begin(), rows.end(), [](const TowerRow& r) { return r.critical.signs.ok(); });
    }

    bool scaling_in_band() const
    {
        return std::all_of(rows.begin(), rows.end(), [](const TowerRow& r) { return r.scaling.in_band(); });
    }

    /// Growth factor above 1 and increasing along the sweep.
    bool growth_increasing() const
    {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!(rows[i].scaling.growth_factor > 1.0)) return false;
            if (i > 0 && !(rows[i].scaling.growth_factor > rows[i - 1].scaling.growth_factor)) return false;
        }
        return !rows.empty();
    }

    /// |ratio - 1| strictly decreasing.
    bool derivative_tightening() const
    {
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (!(std::abs(rows[i].derivative.ratio - 1.0) < std::abs(rows[i - 1].derivative.ratio - 1.0))) {
                return false;
            }
        }
        return true;
    }

    double max_companion() const
    {
        double c = 0.0;
        for (const auto& row : rows) c = std::max(c, std::abs(row.derivative.companion));
        return c;
    }

    /// (max - min)/min of one balance ratio over the sweep.
    static double variation(const std::vector<double>& v)
    {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        return (*hi - *lo) / *lo;
    }

    /// Largest variation over the four balance ratios; NaN if any is undefined.
    double balance_variation() const
    {
        std::vector<double> nh, lh, nm, lm;
        for (const auto& r : rows) {
            if (!r.balance_half.layer_defined || !r.balance_m.layer_defined) return NAN;
            nh.push_back(r.balance_half.neighbor);
            lh.push_back(r.balance_half.layer);
            nm.push_back(r.balance_m.neighbor);
            lm.push_back(r.balance_m.layer);
        }
        return std::max({variation(nh), variation(lh), variation(nm), variation(lm)});
    }

    /// All balance ratios finite and within [lo, hi].
    bool balance_order_one(double lo = 0.1, double hi = 10.0) const
    {
        for (const auto& r : rows) {
            for (double v : {r.balance_half.neighbor, r.balance_half.layer, r.balance_m.neighbor, r.balance_m.layer}) {
                if (!std::isfinite(v) || v < lo || v > hi) return false;
            }
        }
        return !rows.empty();
    }
};

inline TowerSweep tower_sweep(const RadialProfile& prof, const CoefficientSet& c, const ModelParams& mp,
                              const std::vector<int>& k_list)
{
    mp.validate_tower();
    TowerSweep out;
    out.r_limit = mp.m / (2.0 * std::numbers::pi);
    out.h_limit = std::numbers::pi * (mp.m + 2.0) / mp.m;
    for (int k : k_list) {
        TowerRow row;
        row.k = k;
        row.critical = find_critical_point(c, mp, k);
        const TowerConfig cfg{k, row.critical.r_star, row.critical.h_star, mp.N};
        row.r_scaled = row.critical.r_star / (k * std::log(double(k)));
        row.h_scaled = row.critical.h_star * k;
        row.balance_half = balance_residuals(prof, c, mp, cfg, BalanceCoefficient::half_m_plus_one);
        row.balance_m = balance_residuals(prof, c, mp, cfg, BalanceCoefficient::m);
        row.scaling = scaling_relations(prof, mp, cfg);
        row.derivative = interaction_derivative_check(prof, cfg);
        out.rows.push_back(row);
    }
    return out;
}

} // namespace bubble_tower

#endif
