#ifndef BUBBLE_TOWER_PROFILE_HPP
#define BUBBLE_TOWER_PROFILE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "error.hpp"
#include "ode.hpp"

namespace bubble_tower {

struct ProfileOptions
{
    double r_max = 30.0;
    double dr = 0.01;
    /// Relative agreement required between the two bracketing trajectories
    /// for the outward solution to be trusted.
    double match_rel = 1e-9;
    /// Shooting bracket for U(0); a non-positive s_hi selects the default
    /// 10·((p+1)/2)^{1/(p-1)}.
    double s_lo = 1.0;
    double s_hi = 0.0;
    OdeOptions ode{};
};

/// U and its first two radial derivatives at one radius.
struct ProfileSample
{
    double U = 0.0;
    double U1 = 0.0;
    double U2 = 0.0;
};

/// Tabulated radial ground state of -ΔU + U = U^p.
///
/// Between grid nodes U and U' are quintic Hermite interpolants built from
/// (U, U', U'') and (U', U'', U''') respectively, and U'' is recovered from
/// the ODE. Near the origin the Taylor series takes over, and beyond r_max
/// the asymptotic law c·e^{-r}·r^{-(N-1)/2} is used with c matched to the
/// last tabulated value.
class RadialProfile
{
  public:
    int N = 0;
    double p = 0.0;
    std::vector<double> grid;
    std::vector<double> U;
    std::vector<double> U1;
    std::vector<double> U2;
    std::vector<double> U3;
    double C0 = 0.0;
    double r_match = 0.0;
    double shoot_value = 0.0;
    /// Jump in U' where the outward and inward solutions were glued.
    double slope_jump = 0.0;
    double glue_radius = 0.0;

    double r_max() const { return grid.back(); }
    double spacing() const { return grid[1] - grid[0]; }
    double tail_exponent() const { return 0.5 * (N - 1); }

    /// Coefficient of the far-field formula used beyond r_max.
    double tail_coefficient() const
    {
        const double R = r_max();
        return U.back() * std::exp(R) * std::pow(R, tail_exponent());
    }

    /// -ΔU + U - U^p source term f(u) = u - |u|^{p-1}u.
    double source(double u) const { return u - std::pow(std::abs(u), p - 1.0) * u; }

    ProfileSample eval(double r) const
    {
        if (r < 2e-3) return series(r);
        const double R = r_max();
        if (r > R) {
            const double a = tail_exponent();
            ProfileSample s;
            s.U = tail_coefficient() * std::exp(-r) * std::pow(r, -a);
            s.U1 = -s.U * (1.0 + a / r);
            s.U2 = s.U * (1.0 + 2.0 * a / r + a * (a + 1.0) / (r * r));
            return s;
        }
        const double h = spacing();
        std::size_t i = static_cast<std::size_t>(r / h);
        if (i >= grid.size() - 1) i = grid.size() - 2;
        const double t = (r - grid[i]) / h;
        ProfileSample s;
        s.U = hermite5(t, h, U[i], U1[i], U2[i], U[i + 1], U1[i + 1], U2[i + 1]);
        s.U1 = hermite5(t, h, U1[i], U2[i], U3[i], U1[i + 1], U2[i + 1], U3[i + 1]);
        s.U2 = source(s.U) - (N - 1) / r * s.U1;
        return s;
    }

    double value(double r) const { return eval(r).U; }

    /// U(r)·e^r·r^{(N-1)/2} at grid index i.
    double plateau(std::size_t i) const
    {
        return U[i] * std::exp(grid[i]) * std::pow(grid[i], tail_exponent());
    }

    /// Relative spread (max - min)/min of the plateau over [r_match, r_max].
    double plateau_variation() const
    {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = first_index(r_match); i < grid.size(); ++i) {
            const double v = plateau(i);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        return (hi - lo) / lo;
    }

    std::size_t first_index(double r) const
    {
        return static_cast<std::size_t>(std::lround(r / spacing()));
    }

  private:
    ProfileSample series(double r) const
    {
        const double s = shoot_value;
        const double A = source(s) / (2.0 * N);
        const double B = (1.0 - p * std::pow(s, p - 1.0)) * A / (4.0 * (N + 2.0));
        const double r2 = r * r;
        return {s + A * r2 + B * r2 * r2, 2.0 * A * r + 4.0 * B * r2 * r, 2.0 * A + 12.0 * B * r2};
    }

    static double hermite5(double t, double h, double f0, double d0, double s0, double f1, double d1, double s1)
    {
        const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
        const double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
        const double h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
        const double h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
        const double h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
        const double h5 = 0.5 * (t3 - 2.0 * t4 + t5);
        return f0 * h0 + h * d0 * h1 + h * h * s0 * h2 + f1 * (1.0 - h0) + h * d1 * h4 + h * h * s1 * h5;
    }
};

namespace detail {

enum class ShotKind { over, under, undecided };

struct Shot
{
    ShotKind kind = ShotKind::undecided;
    std::vector<std::array<double, 2>> samples; // (U, U') at grid[1..]
};

inline auto radial_rhs(int N, double p)
{
    return [N, p](double r, const std::array<double, 2>& y) {
        const double u = y[0];
        return std::array<double, 2>{y[1], -(N - 1) / r * y[1] + u - std::pow(std::abs(u), p - 1.0) * u};
    };
}

/// Integrates from the origin with U(0) = s and classifies the trajectory:
/// crossing zero means s is too large, turning upward means too small.
inline Shot shoot(int N, double p, double s, const ProfileOptions& opt, bool record)
{
    const double r0 = 1e-3;
    const double fs = s - std::pow(s, p);
    const double A = fs / (2.0 * N);
    const double B = (1.0 - p * std::pow(s, p - 1.0)) * A / (4.0 * (N + 2.0));
    std::array<double, 2> y{s + A * r0 * r0 + B * std::pow(r0, 4), 2.0 * A * r0 + 4.0 * B * std::pow(r0, 3)};
    double r = r0;

    Shot shot;
    ShotKind kind = ShotKind::undecided;
    auto stop = [&](double, const std::array<double, 2>& st) {
        if (st[0] <= 0.0) kind = ShotKind::over;
        else if (st[1] >= 0.0) kind = ShotKind::under;
        return kind != ShotKind::undecided;
    };
    if (stop(r, y)) {
        shot.kind = kind;
        return shot;
    }
    DormandPrince<2> ode(opt.ode);
    auto f = radial_rhs(N, p);
    const std::size_t n = static_cast<std::size_t>(std::lround(opt.r_max / opt.dr));
    for (std::size_t i = 1; i <= n; ++i) {
        if (!ode.advance(f, r, y, i * opt.dr, stop)) break;
        if (record) shot.samples.push_back(y);
    }
    shot.kind = kind;
    return shot;
}

} // namespace detail

/// Radial ground state by shooting on U(0).
///
/// The separatrix is bracketed to width `tol`; the two bracketing
/// trajectories agree up to some radius, after which the far field is
/// produced by integrating the decaying branch inward from r_max and gluing
/// it to the outward solution.
inline RadialProfile solve_ground_state(int N, double p, double tol = 1e-13, const ProfileOptions& opt = {})
{
    if (N < 1) throw Error(Errc::invalid_parameter, "dimension N must be >= 1");
    if (!(p > 1.0)) throw Error(Errc::invalid_parameter, "exponent p must exceed 1");
    if (N >= 3 && !(p < (N + 2.0) / (N - 2.0))) {
        throw Error(Errc::invalid_parameter, "exponent p must be below (N+2)/(N-2)");
    }
    if (!(tol > 0.0)) throw Error(Errc::invalid_parameter, "tolerance must be positive");
    if (!(opt.dr > 0.0) || !(opt.r_max > 20.0 * opt.dr)) {
        throw Error(Errc::invalid_parameter, "grid needs dr > 0 and r_max well above dr");
    }

    double lo = opt.s_lo;
    double hi = opt.s_hi > 0.0 ? opt.s_hi : 10.0 * std::pow(0.5 * (p + 1.0), 1.0 / (p - 1.0));
    if (detail::shoot(N, p, lo, opt, false).kind == detail::ShotKind::over ||
        detail::shoot(N, p, hi, opt, false).kind != detail::ShotKind::over) {
        std::ostringstream os;
        os << "no sign change of the shooting classification on [" << lo << ", " << hi << "]";
        throw Error(Errc::no_ground_state, os.str());
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (detail::shoot(N, p, mid, opt, false).kind == detail::ShotKind::over) hi = mid;
        else lo = mid;
    }

    const auto shot_lo = detail::shoot(N, p, lo, opt, true);
    const auto shot_hi = detail::shoot(N, p, hi, opt, true);
    const std::size_t n = static_cast<std::size_t>(std::lround(opt.r_max / opt.dr));
    const std::size_t avail = std::min(shot_lo.samples.size(), shot_hi.samples.size());

    // Last grid index (1-based into the grid) where both trajectories agree.
    std::size_t ia = 0;
    for (std::size_t j = 0; j < avail; ++j) {
        const double a = shot_lo.samples[j][0], b = shot_hi.samples[j][0];
        if (std::abs(a - b) > opt.match_rel * std::abs(0.5 * (a + b))) break;
        ia = j + 1;
    }
    if (ia < 10 || ia >= n) {
        throw Error(Errc::integration, "bracketing trajectories diverge too early to resolve the profile");
    }

    RadialProfile prof;
    prof.N = N;
    prof.p = p;
    prof.shoot_value = 0.5 * (lo + hi);
    prof.grid.resize(n + 1);
    prof.U.assign(n + 1, 0.0);
    prof.U1.assign(n + 1, 0.0);
    for (std::size_t i = 0; i <= n; ++i) prof.grid[i] = i * opt.dr;
    prof.U[0] = prof.shoot_value;
    for (std::size_t i = 1; i <= ia; ++i) {
        prof.U[i] = 0.5 * (shot_lo.samples[i - 1][0] + shot_hi.samples[i - 1][0]);
        prof.U1[i] = 0.5 * (shot_lo.samples[i - 1][1] + shot_hi.samples[i - 1][1]);
    }

    // Decaying branch r^{-ν}K_ν(r) of the linearized far-field equation.
    const double nu = 0.5 * (N - 2);
    const double R = n * opt.dr;
    const double dR = std::pow(R, -nu) * std::cyl_bessel_k(std::abs(nu), R);
    const double dR1 = -std::pow(R, -nu) * std::cyl_bessel_k(std::abs(nu + 1.0), R);
    const double ra = ia * opt.dr;
    const double target = prof.U[ia];
    auto f = detail::radial_rhs(N, p);

    auto inward = [&](double c, std::vector<std::array<double, 2>>* out) {
        DormandPrince<2> ode(opt.ode);
        std::array<double, 2> y{c * dR, c * dR1};
        double r = R;
        if (out) out->assign(n + 1, {0.0, 0.0});
        if (out) (*out)[n] = y;
        for (std::size_t i = n; i > ia; --i) {
            ode.advance(f, r, y, (i - 1) * opt.dr);
            if (out) (*out)[i - 1] = y;
        }
        return y;
    };

    const double d_ra = std::pow(ra, -nu) * std::cyl_bessel_k(std::abs(nu), ra);
    double c0 = target / d_ra, c1 = 1.01 * c0;
    double g0 = inward(c0, nullptr)[0] - target, g1 = inward(c1, nullptr)[0] - target;
    for (int it = 0; it < 60 && std::abs(g1) > 1e-15 * target; ++it) {
        if (g1 == g0) break;
        const double c2 = c1 - g1 * (c1 - c0) / (g1 - g0);
        c0 = c1;
        g0 = g1;
        c1 = c2;
        g1 = inward(c1, nullptr)[0] - target;
    }
    if (!(std::abs(g1) <= 1e-10 * target)) {
        throw Error(Errc::integration, "far-field amplitude matching did not converge");
    }
    std::vector<std::array<double, 2>> far;
    inward(c1, &far);
    prof.glue_radius = ra;
    prof.slope_jump = far[ia][1] - prof.U1[ia];
    for (std::size_t i = ia + 1; i <= n; ++i) {
        prof.U[i] = far[i][0];
        prof.U1[i] = far[i][1];
    }

    prof.U2.assign(n + 1, 0.0);
    prof.U3.assign(n + 1, 0.0);
    prof.U2[0] = prof.source(prof.shoot_value) / N;
    for (std::size_t i = 1; i <= n; ++i) {
        const double r = prof.grid[i];
        const double u = prof.U[i], u1 = prof.U1[i];
        if (!(u > 0.0) || !(u1 < 0.0)) {
            throw Error(Errc::integration, "profile lost positivity or monotonicity");
        }
        const double u2 = prof.source(u) - (N - 1) / r * u1;
        prof.U2[i] = u2;
        prof.U3[i] = -(N - 1) / r * u2 + (N - 1) / (r * r) * u1 + u1 - p * std::pow(u, p - 1.0) * u1;
    }

    // Tail-switch radius: smallest r beyond which the logarithmic derivative
    // follows the asymptotic law and the plateau is flat to 0.5%.
    const double a = prof.tail_exponent();
    double pmin = INFINITY, pmax = -INFINITY;
    std::size_t im = 0;
    for (std::size_t i = n; i >= 1; --i) {
        const double r = prof.grid[i];
        const bool law = std::abs(prof.U1[i] / prof.U[i] + 1.0 + a / r) < 5e-3;
        const double v = prof.plateau(i);
        pmin = std::min(pmin, v);
        pmax = std::max(pmax, v);
        if (!law || (pmax - pmin) / pmin > 0.005) break;
        im = i;
    }
    if (im == 0 || prof.grid[im] > R - 1.0) {
        throw Error(Errc::non_converged_tail,
                    "decay plateau not reached before r_max; increase r_max");
    }
    prof.r_match = prof.grid[im];

    std::vector<double> plat;
    for (std::size_t i = im; i <= n; ++i) plat.push_back(prof.plateau(i));
    std::sort(plat.begin(), plat.end());
    const std::size_t mid = plat.size() / 2;
    prof.C0 = plat.size() % 2 ? plat[mid] : 0.5 * (plat[mid - 1] + plat[mid]);
    return prof;
}

/// Decay constant C0 with a check that the plateau is flat to 1%.
inline double decay_constant(const RadialProfile& prof)
{
    const double var = prof.plateau_variation();
    if (!(var <= 0.01) || !(prof.C0 > 0.0) || !std::isfinite(prof.C0)) {
        std::ostringstream os;
        os << "decay plateau varies by " << var << "; increase r_max";
        throw Error(Errc::non_converged_tail, os.str());
    }
    return prof.C0;
}

/// Closed-form 1D soliton ((p+1)/2)^{1/(p-1)} sech^{2/(p-1)}((p-1)x/2).
inline double soliton_1d(double p, double x)
{
    const double z = 0.5 * (p - 1.0) * std::abs(x);
    // sech z = 2e^{-z}/(1+e^{-2z}) stays finite for large |x|.
    const double sech = 2.0 * std::exp(-z) / (1.0 + std::exp(-2.0 * z));
    return std::pow(0.5 * (p + 1.0), 1.0 / (p - 1.0)) * std::pow(sech, 2.0 / (p - 1.0));
}

/// d/dx of soliton_1d.
inline double soliton_1d_derivative(double p, double x)
{
    const double z = 0.5 * (p - 1.0) * x;
    return -soliton_1d(p, x) * std::tanh(z);
}

} // namespace bubble_tower

#endif
