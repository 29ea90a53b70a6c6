#ifndef BUBBLE_TOWER_FIELD_HPP
#define BUBBLE_TOWER_FIELD_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "coefficients.hpp"
#include "energy.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "model.hpp"
#include "profile.hpp"

namespace bubble_tower {

/// Σ_c U(|y - c|).
inline double sum_of_bubbles(const RadialProfile& prof, const std::vector<Point>& centers, const Point& y)
{
    double w = 0.0;
    for (const auto& c : centers) w += prof.value(distance(y, c));
    return w;
}

/// Value and gradient of the bubble sum.
inline double sum_of_bubbles(const RadialProfile& prof, const std::vector<Point>& centers, const Point& y,
                             Point& grad)
{
    grad.assign(y.size(), 0.0);
    double w = 0.0;
    for (const auto& c : centers) {
        const double rho = distance(y, c);
        const auto s = prof.eval(rho);
        w += s.U;
        if (rho > 0.0) {
            for (std::size_t i = 0; i < y.size(); ++i) grad[i] += s.U1 * (y[i] - c[i]) / rho;
        }
    }
    return w;
}

/// -(V(|y|) - 1) Σ U_c + ((Σ U_c)^p - Σ U_c^p) for an arbitrary radial
/// potential, passed as its excess V - 1.
inline double residual_at(const RadialProfile& prof, const std::function<double(double)>& excess,
                          const std::vector<Point>& centers, const Point& y)
{
    double w = 0.0, wp = 0.0;
    for (const auto& c : centers) {
        const double u = prof.value(distance(y, c));
        w += u;
        wp += std::pow(u, prof.p);
    }
    return -excess(norm(y)) * w + (std::pow(w, prof.p) - wp);
}

/// Residual of the double-tower bubble sum W_{r,h} for the model potential.
inline double residual_lk(const RadialProfile& prof, const ModelParams& mp, const TowerConfig& cfg, const Point& y)
{
    const auto centers = tower_points(cfg);
    return residual_at(prof, [&](double r) { return potential_excess(mp, r); }, centers, y);
}

struct StarSampling
{
    int ray_points = 120;      ///< along the radial ray through each center, span ±ray_half_length
    double ray_half_length = 3.0;
    int segment_points = 200;  ///< on the origin-to-center segment
    int fill_per_center = 512; ///< low-discrepancy points in a box around each center
    int global_fill = 2000;    ///< low-discrepancy points in the bounding box of all centers
    unsigned seed = 0;         ///< offset into the low-discrepancy sequence
};

struct StarNormReport
{
    double value = 0.0;
    Point argmax_point;
    double tau = 0.0;
    long sample_count = 0;
};

namespace detail {

inline double radical_inverse(unsigned long i, unsigned base)
{
    double f = 1.0, out = 0.0;
    while (i > 0) {
        f /= base;
        out += f * static_cast<double>(i % base);
        i /= base;
    }
    return out;
}

inline std::vector<Point> star_samples(const std::vector<Point>& centers, const StarSampling& s)
{
    std::vector<Point> pts;
    if (centers.empty()) return pts;
    const std::size_t dim = centers.front().size();
    const std::size_t active = std::min<std::size_t>(dim, 3);
    pts.push_back(Point(dim, 0.0));

    for (std::size_t ci = 0; ci < centers.size(); ++ci) {
        const auto& c = centers[ci];
        const double cn = norm(c);
        Point dir(dim, 0.0);
        if (cn > 0.0) {
            for (std::size_t i = 0; i < dim; ++i) dir[i] = c[i] / cn;
        } else {
            dir[0] = 1.0;
        }
        for (int i = 0; i <= s.ray_points; ++i) {
            const double t = -s.ray_half_length + 2.0 * s.ray_half_length * i / s.ray_points;
            Point y = c;
            for (std::size_t d = 0; d < dim; ++d) y[d] += t * dir[d];
            pts.push_back(std::move(y));
        }
        for (int i = 0; i < s.segment_points; ++i) {
            Point y(dim);
            for (std::size_t d = 0; d < dim; ++d) y[d] = c[d] * i / s.segment_points;
            pts.push_back(std::move(y));
        }
        // Midpoint with the nearest other center, and a local box of half
        // width 0.6 times that distance.
        double dmin = INFINITY;
        std::size_t nearest = ci;
        for (std::size_t cj = 0; cj < centers.size(); ++cj) {
            if (cj == ci) continue;
            const double dd = distance(c, centers[cj]);
            if (dd > 0.0 && dd < dmin) {
                dmin = dd;
                nearest = cj;
            }
        }
        if (nearest == ci) dmin = 2.0 * s.ray_half_length;
        else {
            Point mid(dim);
            for (std::size_t d = 0; d < dim; ++d) mid[d] = 0.5 * (c[d] + centers[nearest][d]);
            pts.push_back(std::move(mid));
        }
        const double half = 0.6 * dmin;
        for (int i = 0; i < s.fill_per_center; ++i) {
            const unsigned long idx = s.seed + static_cast<unsigned long>(i) + 1;
            Point y = c;
            static constexpr unsigned bases[3] = {2, 3, 5};
            for (std::size_t d = 0; d < active; ++d) y[d] += half * (2.0 * radical_inverse(idx, bases[d]) - 1.0);
            pts.push_back(std::move(y));
        }
    }

    Point lo(dim, INFINITY), hi(dim, -INFINITY);
    for (const auto& c : centers) {
        for (std::size_t d = 0; d < dim; ++d) {
            lo[d] = std::min(lo[d], c[d]);
            hi[d] = std::max(hi[d], c[d]);
        }
    }
    for (int i = 0; i < s.global_fill; ++i) {
        const unsigned long idx = s.seed + static_cast<unsigned long>(i) + 1;
        static constexpr unsigned bases[3] = {7, 11, 13};
        Point y(dim, 0.0);
        for (std::size_t d = 0; d < active; ++d) {
            const double pad = 0.05 * (hi[d] - lo[d]) + 1.0;
            y[d] = lo[d] - pad + (hi[d] - lo[d] + 2.0 * pad) * radical_inverse(idx, bases[d]);
        }
        pts.push_back(std::move(y));
    }
    return pts;
}

} // namespace detail

/// Approximates sup |f(y)| / Σ_c e^{-τ|y-c|} over a structured sample set.
inline StarNormReport star_norm(const std::function<double(const Point&)>& f, const std::vector<Point>& centers,
                                double tau, const StarSampling& sampling = {})
{
    if (!(tau > 0.0 && tau < 1.0)) throw Error(Errc::invalid_parameter, "tau must lie in (0, 1)");
    if (centers.empty()) throw Error(Errc::invalid_parameter, "star norm needs at least one center");
    const auto pts = detail::star_samples(centers, sampling);
    StarNormReport rep;
    rep.tau = tau;
    rep.sample_count = static_cast<long>(pts.size());
    rep.argmax_point = pts.front();
    bool first = true;
    for (const auto& y : pts) {
        double weight = 0.0;
        for (const auto& c : centers) weight += std::exp(-tau * distance(y, c));
        const double v = std::abs(f(y)) / weight;
        if (first || v > rep.value || (v == rep.value && y < rep.argmax_point)) {
            rep.value = v;
            rep.argmax_point = y;
            first = false;
        }
    }
    return rep;
}

struct LkSweepEntry
{
    int k = 0;
    double r = 0.0;
    double h = 0.0;
    StarNormReport norm;
};

struct LkSweep
{
    std::vector<LkSweepEntry> entries;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    /// -min{p/2 - τ, 1} m, the exponent of the upper bound.
    double bound_exponent = 0.0;
};

/// ‖l_k‖_* at the critical configuration of each k and the least-squares
/// slope of log ‖l_k‖_* against log k.
inline LkSweep lk_decay_sweep(const RadialProfile& prof, const CoefficientSet& c, const ModelParams& mp,
                              const std::vector<int>& k_list, const StarSampling& sampling = {})
{
    mp.validate_tower();
    if (k_list.size() < 4) throw Error(Errc::invalid_parameter, "decay sweep needs at least four values of k");
    LkSweep out;
    out.bound_exponent = -std::min(0.5 * mp.p - mp.tau, 1.0) * mp.m;
    for (int k : k_list) {
        const auto cp = find_critical_point(c, mp, k);
        TowerConfig cfg{k, cp.r_star, cp.h_star, mp.N};
        const auto centers = tower_points(cfg);
        auto excess = [&](double r) { return potential_excess(mp, r); };
        auto f = [&](const Point& y) { return residual_at(prof, excess, centers, y); };
        out.entries.push_back({k, cp.r_star, cp.h_star, star_norm(f, centers, mp.tau, sampling)});
    }
    const double n = static_cast<double>(out.entries.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& e : out.entries) {
        const double x = std::log(static_cast<double>(e.k)), y = std::log(e.norm.value);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = n * sxx - sx * sx;
    out.slope = (n * sxy - sx * sy) / den;
    out.intercept = (sy - out.slope * sx) / n;
    double ss = 0.0;
    for (const auto& e : out.entries) {
        const double x = std::log(static_cast<double>(e.k)), y = std::log(e.norm.value);
        ss += std::pow(y - out.intercept - out.slope * x, 2);
    }
    out.slope_stderr = n > 2 ? std::sqrt(ss / (n - 2) / (sxx - sx * sx / n)) : 0.0;
    return out;
}

} // namespace bubble_tower

#endif
