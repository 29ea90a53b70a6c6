#ifndef BUBBLE_TOWER_COEFFICIENTS_HPP
#define BUBBLE_TOWER_COEFFICIENTS_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "error.hpp"
#include "profile.hpp"
#include "quadrature.hpp"

namespace bubble_tower {

struct CoefficientOptions
{
    int panels = 120;       ///< radial panels on [0, r_max]
    int order = 10;         ///< Gauss-Legendre points per panel
    int tail_panels = 40;   ///< panels over the analytic far field
    int angular_panels = 8; ///< panels for the polar-angle integral
    double max_rel_error = 1e-4;
};

/// Interaction coefficients A1 = a1∫U², A2 = (1 - 2/(p+1))∫U^{p+1},
/// B1 = C0∫U^p e^{-y1}.
struct CoefficientSet
{
    double A1 = 0.0;
    double A2 = 0.0;
    double B1 = 0.0;
    double err = 0.0; ///< largest relative error estimate of the three
    int N = 0;
    double p = 0.0;
    double a1 = 0.0;
};

/// Area of the unit sphere in R^n, i.e. ω_{n-1}; equals 2 for n = 1.
inline double sphere_area(int n)
{
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// e^{-r}·∫_0^π e^{-r cos θ} sin^{N-2}θ dθ, scaled so that it stays bounded.
/// The integrand is concentrated at θ = π within a width of order r^{-1/2}.
inline double scaled_angular_factor(int N, double r, int panels = 8)
{
    static const GaussLegendre rule(10);
    // Substituting φ = π - θ gives e^{-r(1 - cos φ)} sin^{N-2}φ.
    const double cut = r > 10.0 ? std::min(std::numbers::pi, 10.0 / std::sqrt(r)) : std::numbers::pi;
    auto f = [&](double phi) {
        const double s = std::sin(phi);
        const double w = N == 2 ? 1.0 : std::pow(s, N - 2);
        return std::exp(-2.0 * r * std::pow(std::sin(0.5 * phi), 2)) * w;
    };
    return composite_gl(f, 0.0, cut, panels, rule);
}

/// Closed form of the unscaled angular factor, √π Γ((N-1)/2) (2/r)^ν I_ν(r)
/// with ν = (N-2)/2. Used to check the quadrature.
inline double angular_factor_bessel(int N, double r)
{
    const double nu = 0.5 * (N - 2);
    return std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (N - 1)) * std::pow(2.0 / r, nu) *
           std::cyl_bessel_i(nu, r);
}

namespace detail {

struct RadialIntegral
{
    double value = 0.0;
    double err = 0.0;
};

/// ∫_0^∞ g(r) dr where g uses the profile (and its far-field formula past
/// r_max). `decay` is the exponential rate of g at infinity; the far field
/// is integrated until g has dropped by e^{-40} and the remainder bounded.
template <class G>
RadialIntegral radial_integral(const RadialProfile& prof, G&& g, double decay, const CoefficientOptions& opt)
{
    const GaussLegendre rule(opt.order);
    const double R = prof.r_max();
    const double L = std::min(40.0 / decay, 600.0 - R);
    auto run = [&](int panels, int tail_panels) {
        return composite_gl(g, 0.0, R, panels, rule) + composite_gl(g, R, R + L, tail_panels, rule);
    };
    const double coarse = run(opt.panels, opt.tail_panels);
    const double fine = run(2 * opt.panels, 2 * opt.tail_panels);
    // Geometric bound on what lies beyond R + L.
    const double rest = std::abs(g(R + L)) / decay;
    return {coarse, std::abs(fine - coarse) + rest};
}

inline void check_error(const char* name, const RadialIntegral& q, const CoefficientOptions& opt)
{
    const double rel = q.err / std::abs(q.value);
    if (!(rel <= opt.max_rel_error)) {
        std::ostringstream os;
        os << name << " quadrature error estimate " << rel << " exceeds " << opt.max_rel_error;
        throw Error(Errc::quadrature, os.str());
    }
}

inline RadialIntegral integral_U2(const RadialProfile& prof, const CoefficientOptions& opt)
{
    const double w = sphere_area(prof.N);
    auto g = [&](double r) {
        const double u = prof.value(r);
        return w * u * u * std::pow(r, prof.N - 1);
    };
    return radial_integral(prof, g, 2.0, opt);
}

inline RadialIntegral integral_Up1(const RadialProfile& prof, const CoefficientOptions& opt)
{
    const double w = sphere_area(prof.N);
    auto g = [&](double r) { return w * std::pow(prof.value(r), prof.p + 1.0) * std::pow(r, prof.N - 1); };
    return radial_integral(prof, g, prof.p + 1.0, opt);
}

/// ∫_{R^N} U(|y|)^p e^{-y1} dy.
inline RadialIntegral integral_Up_exp(const RadialProfile& prof, const CoefficientOptions& opt)
{
    const int N = prof.N;
    const double p = prof.p;
    if (N == 1) {
        // U even: ∫ U^p e^{-x} dx = ∫_0^∞ U^p (e^{-x} + e^{x}) dx.
        auto g = [&](double x) {
            return std::exp(p * std::log(prof.value(x)) + x) * (1.0 + std::exp(-2.0 * x));
        };
        return radial_integral(prof, g, p - 1.0, opt);
    }
    const double w = sphere_area(N - 1);
    auto g = [&](double r) {
        const double up_er = std::exp(p * std::log(prof.value(r)) + r);
        return w * up_er * std::pow(r, N - 1) * scaled_angular_factor(N, r, opt.angular_panels);
    };
    return radial_integral(prof, g, p - 1.0, opt);
}

} // namespace detail

inline double compute_A1(const RadialProfile& prof, double a1, const CoefficientOptions& opt = {})
{
    if (!(a1 > 0.0)) throw Error(Errc::invalid_parameter, "a1 must be positive");
    auto q = detail::integral_U2(prof, opt);
    detail::check_error("A1", q, opt);
    return a1 * q.value;
}

inline double compute_A2(const RadialProfile& prof, const CoefficientOptions& opt = {})
{
    auto q = detail::integral_Up1(prof, opt);
    detail::check_error("A2", q, opt);
    return (1.0 - 2.0 / (prof.p + 1.0)) * q.value;
}

inline double compute_B1(const RadialProfile& prof, const CoefficientOptions& opt = {})
{
    auto q = detail::integral_Up_exp(prof, opt);
    detail::check_error("B1", q, opt);
    return prof.C0 * q.value;
}

inline CoefficientSet compute_coefficients(const RadialProfile& prof, double a1, const CoefficientOptions& opt = {})
{
    if (!(a1 > 0.0)) throw Error(Errc::invalid_parameter, "a1 must be positive");
    const auto q1 = detail::integral_U2(prof, opt);
    const auto q2 = detail::integral_Up1(prof, opt);
    const auto qb = detail::integral_Up_exp(prof, opt);
    detail::check_error("A1", q1, opt);
    detail::check_error("A2", q2, opt);
    detail::check_error("B1", qb, opt);
    CoefficientSet c;
    c.A1 = a1 * q1.value;
    c.A2 = (1.0 - 2.0 / (prof.p + 1.0)) * q2.value;
    c.B1 = prof.C0 * qb.value;
    c.err = std::max({q1.err / q1.value, q2.err / q2.value, qb.err / qb.value});
    c.N = prof.N;
    c.p = prof.p;
    c.a1 = a1;
    return c;
}

} // namespace bubble_tower

#endif
