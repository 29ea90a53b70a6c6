#ifndef BUBBLE_TOWER_GEOMETRY_HPP
#define BUBBLE_TOWER_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "error.hpp"

namespace bubble_tower {

using Point = std::vector<double>;

inline double distance(const Point& a, const Point& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

inline double norm(const Point& a)
{
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

/// Two layers of k points on the sphere of radius r at heights ±rh.
struct TowerConfig
{
    int k = 2;
    double r = 1.0;
    double h = 0.0;
    int N = 3;

    void validate() const
    {
        if (k < 2) throw Error(Errc::invalid_parameter, "tower needs k >= 2");
        if (!(r > 0.0)) throw Error(Errc::invalid_parameter, "tower radius r must be positive");
        if (!(h >= 0.0 && h < 1.0)) throw Error(Errc::invalid_parameter, "tower height h must lie in [0, 1)");
        if (N < 3) throw Error(Errc::dimension, "tower points need N >= 3");
    }
};

/// Second family of 2n points living in coordinates 4..6.
struct NestedConfig
{
    int n = 2;
    double t = 1.0;
    double l = 0.0;
    int N = 6;

    void validate() const
    {
        if (N < 6) throw Error(Errc::dimension, "nested points need N >= 6");
        if (n < 2) throw Error(Errc::invalid_parameter, "nested family needs n >= 2");
        if (!(t > 0.0)) throw Error(Errc::invalid_parameter, "nested radius t must be positive");
        if (!(l >= 0.0 && l < 1.0)) throw Error(Errc::invalid_parameter, "nested height l must lie in [0, 1)");
    }
};

namespace detail {

inline std::vector<Point> ring_pair(int count, double radius, double height, int N, int offset)
{
    const double q = std::sqrt(1.0 - height * height);
    std::vector<Point> pts;
    pts.reserve(2 * count);
    for (int sign : {+1, -1}) {
        for (int j = 0; j < count; ++j) {
            const double th = 2.0 * std::numbers::pi * j / count;
            Point x(N, 0.0);
            x[offset] = radius * q * std::cos(th);
            x[offset + 1] = radius * q * std::sin(th);
            x[offset + 2] = sign * radius * height;
            pts.push_back(std::move(x));
        }
    }
    return pts;
}

} // namespace detail

/// x_1^+, ..., x_k^+, x_1^-, ..., x_k^- in full N-dimensional coordinates.
inline std::vector<Point> tower_points(const TowerConfig& cfg)
{
    cfg.validate();
    return detail::ring_pair(cfg.k, cfg.r, cfg.h, cfg.N, 0);
}

/// p_1^+, ..., p_n^+, p_1^-, ..., p_n^- with the first three coordinates zero.
inline std::vector<Point> nested_points(const NestedConfig& cfg)
{
    cfg.validate();
    return detail::ring_pair(cfg.n, cfg.t, cfg.l, cfg.N, 3);
}

struct NearestDistances
{
    double neighbor = 0.0;
    double layer = 0.0;
};

inline NearestDistances nearest_distances(const TowerConfig& cfg)
{
    return {2.0 * cfg.r * std::sqrt(1.0 - cfg.h * cfg.h) * std::sin(std::numbers::pi / cfg.k), 2.0 * cfg.r * cfg.h};
}

inline NearestDistances nearest_distances(const NestedConfig& cfg)
{
    return {2.0 * cfg.t * std::sqrt(1.0 - cfg.l * cfg.l) * std::sin(std::numbers::pi / cfg.n), 2.0 * cfg.t * cfg.l};
}

/// True iff the set is invariant under rotation by 2π/k in (y1, y2) and the
/// reflections y2 -> -y2 and y3 -> -y3, up to 1e-12 relative to its size.
inline bool symmetry_orbit_check(const std::vector<Point>& points, int k)
{
    if (points.empty() || k < 1) return false;
    double scale = 1.0;
    for (const auto& q : points) scale = std::max(scale, norm(q));
    const double tol = 1e-12 * scale;
    const double c = std::cos(2.0 * std::numbers::pi / k), s = std::sin(2.0 * std::numbers::pi / k);

    auto contains = [&](const Point& q) {
        return std::any_of(points.begin(), points.end(), [&](const Point& x) { return distance(x, q) <= tol; });
    };
    for (const auto& x : points) {
        if (x.size() < 3) return false;
        Point rot = x;
        rot[0] = c * x[0] - s * x[1];
        rot[1] = s * x[0] + c * x[1];
        Point fl2 = x;
        fl2[1] = -x[1];
        Point fl3 = x;
        fl3[2] = -x[2];
        if (!contains(rot) || !contains(fl2) || !contains(fl3)) return false;
    }
    return true;
}

/// Admissible rectangle [(m ∓ w1)/(2π) k ln k] × [(π(m+2) ∓ w2)/(m k)].
struct Rectangle
{
    double r_lo = 0.0;
    double r_hi = 0.0;
    double h_lo = 0.0;
    double h_hi = 0.0;

    bool contains(double r, double h) const { return r > r_lo && r < r_hi && h > h_lo && h < h_hi; }
};

struct RectangleWidths
{
    double w1 = 0.0;
    double w2 = 0.0;

    /// Defaults 3m/4 and π(m+2)/2: wide enough to hold the leading-order
    /// critical points from k = 8 up to k = 10^6.
    static RectangleWidths defaults(double m)
    {
        return {0.75 * m, 0.5 * std::numbers::pi * (m + 2.0)};
    }
};

inline Rectangle admissible_rectangle(double m, int k, RectangleWidths w)
{
    if (!(w.w1 > 0.0 && w.w1 < m) || !(w.w2 > 0.0 && w.w2 < std::numbers::pi * (m + 2.0))) {
        throw Error(Errc::invalid_parameter, "rectangle widths must satisfy 0 < w1 < m and 0 < w2 < π(m+2)");
    }
    const double kl = k * std::log(static_cast<double>(k));
    const double hc = std::numbers::pi * (m + 2.0);
    return {(m - w.w1) / (2.0 * std::numbers::pi) * kl, (m + w.w1) / (2.0 * std::numbers::pi) * kl,
            (hc - w.w2) / (m * k), (hc + w.w2) / (m * k)};
}

} // namespace bubble_tower

#endif
