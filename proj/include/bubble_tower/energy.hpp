#ifndef BUBBLE_TOWER_ENERGY_HPP
#define BUBBLE_TOWER_ENERGY_HPP

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "coefficients.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "model.hpp"
#include "profile.hpp"

namespace bubble_tower {

/// Leading-order reduced energy and its exact gradient at one configuration.
///
/// With g(x) = e^{-x} x^{-(N-1)/2}, d = 2π√(1-h²) r/k and s = 2rh,
///
///   F = k (A1/r^m + A2 - 2 B1 g(d) - B1 g(s)) + offset.
///
/// `terms` already carry the factor k so that value = offset + Σ terms.
struct ReducedEnergyReport
{
    double value = 0.0;
    double dF_dr = 0.0;
    double dF_dh = 0.0;
    double self = 0.0;
    double constant = 0.0;
    double neighbor = 0.0;
    double layer = 0.0;
    double offset = 0.0;
    int k = 0;
    double r = 0.0;
    double h = 0.0;
    /// Largest ratio (dF/dx component)/(largest term in it), per component.
    double residual_norm = 0.0;
    /// Relative size of the prefactor-derivative contribution, which the
    /// classical leading-order gradient drops.
    double dropped_term_ratio = 0.0;
};

struct BoundarySigns
{
    double dr_left = 0.0;   ///< ∂F/∂r at (r_lo, h*), expected > 0
    double dr_right = 0.0;  ///< ∂F/∂r at (r_hi, h*), expected < 0
    double dh_bottom = 0.0; ///< ∂F/∂h at (r*, h_lo), expected > 0
    double dh_top = 0.0;    ///< ∂F/∂h at (r*, h_hi), expected < 0

    bool ok() const { return dr_left > 0.0 && dr_right < 0.0 && dh_bottom > 0.0 && dh_top < 0.0; }
};

struct CriticalPoint
{
    double r_star = 0.0;
    double h_star = 0.0;
    double grad_residual = 0.0;
    bool in_interior = false;
    int k = 0;
    int iterations = 0;
    Rectangle rect{};
    BoundarySigns signs{};
    /// ∂²F/∂h² < 0 at the point, i.e. a maximum in h.
    bool max_in_h = false;
};

namespace detail {

inline double log_g(double x, double a) { return -x - a * std::log(x); }

/// log of g(x)(1 + a/x) = -g'(x).
inline double log_gp(double x, double a) { return -x - a * std::log(x) + std::log1p(a / x); }

/// d/dx of log_gp.
inline double log_gp_prime(double x, double a) { return -1.0 - a / x - a / (x * (x + a)); }

template <class T>
struct EnergyTerms
{
    T self, constant, neighbor, layer;
};

/// The value formula alone, generic in the scalar so that it can be
/// differenced in extended precision; `pi` is supplied at that precision.
template <class T>
EnergyTerms<T> energy_terms(double A1, double A2, double B1, double m, double a, int k, const T& r, const T& h,
                            const T& pi)
{
    using std::exp;
    using std::log;
    using std::sqrt;
    const T q = sqrt(T(1) - h * h);
    const T d = T(2) * pi * q * r / T(k);
    const T s = T(2) * r * h;
    auto g = [&](const T& x) { return exp(-x - T(a) * log(x)); };
    return {T(k) * T(A1) * exp(-T(m) * log(r)), T(k) * T(A2), T(-2) * T(k) * T(B1) * g(d), -T(k) * T(B1) * g(s)};
}

struct EnergyModel
{
    double A1, A2, B1, m, a;

    ReducedEnergyReport evaluate(int k, double r, double h, double offset) const
    {
        if (k < 2) throw Error(Errc::invalid_parameter, "k must be >= 2");
        if (!(r > 0.0)) throw Error(Errc::invalid_parameter, "r must be positive");
        if (!(h > 0.0 && h < 1.0)) throw Error(Errc::invalid_parameter, "h must lie in (0, 1)");
        const double s = 2.0 * r * h;
        if (s < 10.0 * DBL_EPSILON * std::max(1.0, r)) {
            throw Error(Errc::degenerate_layer, "layer distance 2rh is below resolution");
        }
        const double q = std::sqrt(1.0 - h * h);
        const double d = 2.0 * std::numbers::pi * q * r / k;
        const double gd = std::exp(log_g(d, a));
        const double gs = std::exp(log_g(s, a));
        const double pd = 1.0 + a / d;
        const double ps = 1.0 + a / s;

        ReducedEnergyReport rep;
        rep.k = k;
        rep.r = r;
        rep.h = h;
        rep.offset = offset;
        const auto t = energy_terms<double>(A1, A2, B1, m, a, k, r, h, std::numbers::pi);
        rep.self = t.self;
        rep.constant = t.constant;
        rep.neighbor = t.neighbor;
        rep.layer = t.layer;
        rep.value = offset + rep.self + rep.constant + rep.neighbor + rep.layer;

        const double tr0 = -m * A1 * std::pow(r, -m - 1.0);
        const double tr1 = 2.0 * B1 * gd * pd * (2.0 * std::numbers::pi * q / k);
        const double tr2 = B1 * gs * ps * 2.0 * h;
        const double th1 = -2.0 * B1 * gd * pd * (2.0 * std::numbers::pi * r * h / (k * q));
        const double th2 = B1 * gs * ps * 2.0 * r;
        rep.dF_dr = k * (tr0 + tr1 + tr2);
        rep.dF_dh = k * (th1 + th2);
        const double sr = std::max({std::abs(tr0), std::abs(tr1), std::abs(tr2)});
        const double sh = std::max(std::abs(th1), std::abs(th2));
        rep.residual_norm = std::max(std::abs(tr0 + tr1 + tr2) / sr, std::abs(th1 + th2) / sh);
        rep.dropped_term_ratio = std::max(a / (d + a), a / (s + a));
        return rep;
    }

    /// Stationarity in log form, unknowns (log r, log h).
    std::array<double, 2> equations(int k, double lr, double lh) const
    {
        const double r = std::exp(lr), h = std::exp(lh);
        const double q = std::sqrt(1.0 - h * h);
        const double d = 2.0 * std::numbers::pi * q * r / k;
        const double s = 2.0 * r * h;
        const double t1 = std::log(4.0 * std::numbers::pi * B1 / k) + std::log(q) + log_gp(d, a);
        const double t2 = std::log(2.0 * B1) + lh + log_gp(s, a);
        const double hi = std::max(t1, t2);
        const double lse = hi + std::log(std::exp(t1 - hi) + std::exp(t2 - hi));
        const double e1 = std::log(m * A1) - (m + 1.0) * lr - lse;
        const double e2 = log_gp(s, a) - log_gp(d, a) - std::log(2.0 * std::numbers::pi / k) - lh + std::log(q);
        return {e1, e2};
    }

    std::array<double, 4> jacobian(int k, double lr, double lh) const
    {
        const double r = std::exp(lr), h = std::exp(lh);
        const double q2 = 1.0 - h * h;
        const double q = std::sqrt(q2);
        const double d = 2.0 * std::numbers::pi * q * r / k;
        const double s = 2.0 * r * h;
        const double t1 = std::log(4.0 * std::numbers::pi * B1 / k) + std::log(q) + log_gp(d, a);
        const double t2 = std::log(2.0 * B1) + lh + log_gp(s, a);
        const double w1 = 1.0 / (1.0 + std::exp(t2 - t1));
        const double w2 = 1.0 - w1;
        const double Gd = log_gp_prime(d, a) * d; // ∂/∂log d
        const double Gs = log_gp_prime(s, a) * s; // ∂/∂log s
        const double hq = h * h / q2;             // -∂log q/∂log h
        const double j11 = -(m + 1.0) - (w1 * Gd + w2 * Gs);
        const double j12 = -(w1 * (-hq - Gd * hq) + w2 * (1.0 + Gs));
        const double j21 = Gs - Gd;
        const double j22 = Gs + Gd * hq - 1.0 - hq;
        return {j11, j12, j21, j22};
    }
};

inline EnergyModel make_model(const CoefficientSet& c, const ModelParams& mp)
{
    if (c.N != mp.N) throw Error(Errc::invalid_parameter, "coefficients were computed for a different N");
    return {c.A1, c.A2, c.B1, mp.m, 0.5 * (mp.N - 1)};
}

inline CriticalPoint newton_critical(const EnergyModel& em, int k, const Rectangle& rect, double offset)
{
    if (!(rect.r_lo > 0.0 && rect.r_hi > rect.r_lo && rect.h_lo > 0.0 && rect.h_hi < 1.0 && rect.h_hi > rect.h_lo)) {
        throw Error(Errc::invalid_parameter, "search rectangle must lie inside (0, inf) x (0, 1)");
    }
    const double kl = k * std::log(static_cast<double>(k));
    double lr = std::log(em.m / (2.0 * std::numbers::pi) * kl);
    double lh = std::log(std::numbers::pi * (em.m + 2.0) / (em.m * k));
    auto resid = [&](double x, double y) {
        const auto e = em.equations(k, x, y);
        return std::hypot(e[0], e[1]);
    };
    double res = resid(lr, lh);
    int it = 0;
    for (; it < 200 && res > 1e-15; ++it) {
        const auto e = em.equations(k, lr, lh);
        const auto J = em.jacobian(k, lr, lh);
        const double det = J[0] * J[3] - J[1] * J[2];
        if (!(std::abs(det) > 0.0) || !std::isfinite(det)) break;
        const double dx = -(J[3] * e[0] - J[1] * e[1]) / det;
        const double dy = -(-J[2] * e[0] + J[0] * e[1]) / det;
        double lam = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 40; ++halving, lam *= 0.5) {
            const double nx = lr + lam * dx, ny = lh + lam * dy;
            if (std::exp(ny) >= 1.0) continue;
            const double nr = resid(nx, ny);
            if (std::isfinite(nr) && nr < res) {
                lr = nx;
                lh = ny;
                res = nr;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }

    CriticalPoint cp;
    cp.k = k;
    cp.iterations = it;
    cp.r_star = std::exp(lr);
    cp.h_star = std::exp(lh);
    cp.rect = rect;
    const auto rep = em.evaluate(k, cp.r_star, cp.h_star, offset);
    cp.grad_residual = rep.residual_norm;
    cp.in_interior = rect.contains(cp.r_star, cp.h_star);
    if (!(cp.grad_residual <= 1e-8)) {
        std::ostringstream os;
        os << "Newton did not converge for k = " << k << " (relative gradient residual " << cp.grad_residual
           << " after " << it << " iterations)";
        throw Error(Errc::search_failure, os.str());
    }
    if (!cp.in_interior) {
        std::ostringstream os;
        os << "critical point (r, h) = (" << cp.r_star << ", " << cp.h_star << ") lies outside the rectangle for k = "
           << k << "; widen it";
        throw Error(Errc::search_failure, os.str());
    }
    cp.signs.dr_left = em.evaluate(k, rect.r_lo, cp.h_star, offset).dF_dr;
    cp.signs.dr_right = em.evaluate(k, rect.r_hi, cp.h_star, offset).dF_dr;
    cp.signs.dh_bottom = em.evaluate(k, cp.r_star, rect.h_lo, offset).dF_dh;
    cp.signs.dh_top = em.evaluate(k, cp.r_star, rect.h_hi, offset).dF_dh;
    const double dh = 1e-6 * cp.h_star;
    cp.max_in_h = em.evaluate(k, cp.r_star, cp.h_star + dh, offset).dF_dh <
                  em.evaluate(k, cp.r_star, cp.h_star - dh, offset).dF_dh;
    return cp;
}

} // namespace detail

inline ReducedEnergyReport reduced_energy(const CoefficientSet& c, const ModelParams& mp, int k, double r, double h)
{
    mp.validate_tower();
    return detail::make_model(c, mp).evaluate(k, r, h, 0.0);
}

inline std::pair<double, double> reduced_gradient(const CoefficientSet& c, const ModelParams& mp, int k, double r,
                                                  double h)
{
    const auto rep = reduced_energy(c, mp, k, r, h);
    return {rep.dF_dr, rep.dF_dh};
}

inline CriticalPoint find_critical_point(const CoefficientSet& c, const ModelParams& mp, int k, const Rectangle& rect)
{
    mp.validate_tower();
    return detail::newton_critical(detail::make_model(c, mp), k, rect, 0.0);
}

inline CriticalPoint find_critical_point(const CoefficientSet& c, const ModelParams& mp, int k)
{
    return find_critical_point(c, mp, k, admissible_rectangle(mp.m, k, RectangleWidths::defaults(mp.m)));
}

struct NestedEnergyResult
{
    ReducedEnergyReport report;
    CriticalPoint critical;
};

/// Second-family energy G(t, l) = offset + n(A1/t^m + A2 - ...); the report
/// is evaluated at the supplied (t, l), the critical point searched over the
/// rectangle built from the same widths.
inline NestedEnergyResult nested_energy(const CoefficientSet& c, const ModelParams& mp, int n, double t, double l,
                                        double offset, RectangleWidths w)
{
    mp.validate_nested();
    const auto em = detail::make_model(c, mp);
    NestedEnergyResult out;
    out.report = em.evaluate(n, t, l, offset);
    out.critical = detail::newton_critical(em, n, admissible_rectangle(mp.m, n, w), offset);
    return out;
}

inline NestedEnergyResult nested_energy(const CoefficientSet& c, const ModelParams& mp, int n, double t, double l,
                                        double offset = 0.0)
{
    return nested_energy(c, mp, n, t, l, offset, RectangleWidths::defaults(mp.m));
}

/// Which prefactor the balance diagnostic uses for the potential force.
enum class BalanceCoefficient {
    half_m_plus_one, ///< a1 (m+1)/2
    m                ///< a1 m
};

struct BalanceRatios
{
    double neighbor = 0.0;
    double layer = 0.0;
    /// false when h = 0 and the layer ratio is undefined (then NaN).
    bool layer_defined = true;
};

/// Force balance ratios: potential pull over neighbor attraction
/// (4B1 U(d_neighbor) π/k) and over layer attraction (B1 U(d_layer)).
inline BalanceRatios balance_residuals(const RadialProfile& prof, const CoefficientSet& c, const ModelParams& mp,
                                       const TowerConfig& cfg,
                                       BalanceCoefficient which = BalanceCoefficient::half_m_plus_one)
{
    cfg.validate();
    const double coef = which == BalanceCoefficient::half_m_plus_one ? 0.5 * (mp.m + 1.0) : mp.m;
    const double intU2 = c.A1 / c.a1;
    const double pull = mp.a1 * coef * intU2 / std::pow(cfg.r, mp.m + 1.0);
    const auto dist = nearest_distances(cfg);
    const double q = std::sqrt(1.0 - cfg.h * cfg.h);
    BalanceRatios out;
    out.neighbor = pull * q / (4.0 * c.B1 * prof.value(dist.neighbor) * std::numbers::pi / cfg.k);
    if (cfg.h == 0.0) {
        out.layer = NAN;
        out.layer_defined = false;
    } else {
        out.layer = pull * cfg.h / (c.B1 * prof.value(dist.layer));
    }
    return out;
}

struct ScalingDiagnostics
{
    double neighbor_ratio = 0.0; ///< (k/r^{m+1}) / U(d_neighbor)
    double layer_ratio = 0.0;    ///< (1/(k r^{m+1})) / U(d_layer)
    double growth_factor = 0.0;  ///< (U(d_neighbor)/k²) · r^{m+2}
    double band_lo = 0.1;
    double band_hi = 10.0;

    bool in_band() const
    {
        return neighbor_ratio >= band_lo && neighbor_ratio <= band_hi && layer_ratio >= band_lo &&
               layer_ratio <= band_hi;
    }
};

inline ScalingDiagnostics scaling_relations(const RadialProfile& prof, const ModelParams& mp, const TowerConfig& cfg,
                                            double band_lo = 0.1, double band_hi = 10.0)
{
    cfg.validate();
    const auto dist = nearest_distances(cfg);
    const double rm1 = std::pow(cfg.r, mp.m + 1.0);
    ScalingDiagnostics s;
    s.neighbor_ratio = (cfg.k / rm1) / prof.value(dist.neighbor);
    s.layer_ratio = (1.0 / (cfg.k * rm1)) / prof.value(dist.layer);
    s.growth_factor = prof.value(dist.neighbor) / (double(cfg.k) * cfg.k) * std::pow(cfg.r, mp.m + 2.0);
    s.band_lo = band_lo;
    s.band_hi = band_hi;
    return s;
}

struct InteractionDerivative
{
    double exact = 0.0;             ///< mixed derivative from the x_2^+ bubble
    double exact_counter = 0.0;     ///< same from the x_k^+ bubble
    double asymptote = 0.0;         ///< 2π²√(1-h²)/k² · U(d_neighbor)
    double ratio = 0.0;             ///< exact / asymptote
    double companion = 0.0;         ///< y3-derivative combination, zero by parity
};

namespace detail {

/// Hessian of y -> U(|y - c|) in the first three coordinates, given the
/// displacement z = y - c.
inline std::array<std::array<double, 3>, 3> bubble_hessian(const RadialProfile& prof, const std::array<double, 3>& z)
{
    const double rho = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
    const auto s = prof.eval(rho);
    std::array<double, 3> n{z[0] / rho, z[1] / rho, z[2] / rho};
    std::array<std::array<double, 3>, 3> H{};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            H[i][j] = s.U2 * n[i] * n[j] + s.U1 / rho * ((i == j ? 1.0 : 0.0) - n[i] * n[j]);
        }
    }
    return H;
}

} // namespace detail

/// Exact ∂/∂y1 (√(1-h²) ∂U_{x}/∂y1 + ∂U_{x}/∂r) at x_1^+ for the in-layer
/// neighbors x = x_2^+ and x_k^+, compared with 2π²√(1-h²)/k² U(d_neighbor).
///
/// Moving the center with r gives ∂U_x/∂r = -(x/r)·∇U_x, so the quantity is
/// √(1-h²) H11 - (x/r)·H e1 with H the bubble Hessian at x_1^+.
inline InteractionDerivative interaction_derivative_check(const RadialProfile& prof, const TowerConfig& cfg)
{
    cfg.validate();
    if (cfg.k < 8) throw Error(Errc::invalid_parameter, "interaction derivative check needs k >= 8");
    const double q = std::sqrt(1.0 - cfg.h * cfg.h);
    const double r = cfg.r;
    const double th = 2.0 * std::numbers::pi / cfg.k;
    const double sh = std::sin(0.5 * th);

    auto contribution = [&](double angle_sign) {
        const double sn = angle_sign * std::sin(th);
        // z = x_1^+ - x, with 1 - cos θ written as 2 sin²(θ/2).
        const std::array<double, 3> z{r * q * 2.0 * sh * sh, -r * q * sn, 0.0};
        const auto H = detail::bubble_hessian(prof, z);
        const std::array<double, 3> xr{q * std::cos(th), q * sn, cfg.h};
        return q * H[0][0] - (xr[0] * H[0][0] + xr[1] * H[1][0] + xr[2] * H[2][0]);
    };

    InteractionDerivative out;
    out.exact = contribution(+1.0);
    out.exact_counter = contribution(-1.0);
    const double dn = nearest_distances(cfg).neighbor;
    out.asymptote = 2.0 * std::numbers::pi * std::numbers::pi * q / (double(cfg.k) * cfg.k) * prof.value(dn);
    out.ratio = out.exact / out.asymptote;

    // h (∂²/∂y3∂y1)(U_{x_2^+} + U_{x_k^+} + U_{x_1^-}) at x_1^+.
    const std::array<double, 3> z2{r * q * 2.0 * sh * sh, -r * q * std::sin(th), cfg.h * r - cfg.h * r};
    const std::array<double, 3> zk{r * q * 2.0 * sh * sh, r * q * std::sin(th), cfg.h * r - cfg.h * r};
    const std::array<double, 3> zm{r * q - r * q, 0.0, 2.0 * r * cfg.h};
    out.companion = cfg.h * (detail::bubble_hessian(prof, z2)[2][0] + detail::bubble_hessian(prof, zk)[2][0] +
                             detail::bubble_hessian(prof, zm)[2][0]);
    return out;
}

} // namespace bubble_tower

#endif
