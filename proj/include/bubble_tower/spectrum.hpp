#ifndef BUBBLE_TOWER_SPECTRUM_HPP
#define BUBBLE_TOWER_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "profile.hpp"

namespace bubble_tower {

/// Symmetric tridiagonal matrix: diagonal `d`, off-diagonal `e` (size n-1).
struct Tridiagonal
{
    std::vector<double> d;
    std::vector<double> e;

    std::size_t size() const { return d.size(); }

    /// Number of eigenvalues strictly below x (Sturm sequence).
    std::size_t count_below(double x) const
    {
        std::size_t count = 0;
        double q = 1.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double off = i == 0 ? 0.0 : e[i - 1] * e[i - 1] / q;
            q = d[i] - x - off;
            if (q == 0.0) q = -1e-300;
            if (q < 0.0) ++count;
        }
        return count;
    }

    /// Eigenvalue with 0-based index `idx` in ascending order, by bisection.
    double eigenvalue(std::size_t idx) const
    {
        double lo = INFINITY, hi = -INFINITY;
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double rad = (i > 0 ? std::abs(e[i - 1]) : 0.0) + (i + 1 < d.size() ? std::abs(e[i]) : 0.0);
            lo = std::min(lo, d[i] - rad);
            hi = std::max(hi, d[i] + rad);
        }
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (count_below(mid) > idx) hi = mid;
            else lo = mid;
        }
        return 0.5 * (lo + hi);
    }

    std::vector<double> lowest(std::size_t count) const
    {
        std::vector<double> out;
        for (std::size_t i = 0; i < std::min(count, d.size()); ++i) out.push_back(eigenvalue(i));
        return out;
    }

    /// Unit eigenvector for an accurate eigenvalue estimate, by inverse
    /// iteration with a tridiagonal LU factorization with partial pivoting.
    std::vector<double> eigenvector(double lambda) const
    {
        const std::size_t n = d.size();
        const double shift = lambda + 1e-10 * std::max(1.0, std::abs(lambda));
        std::vector<double> x(n, 1.0 / std::sqrt(double(n)));
        for (int it = 0; it < 4; ++it) {
            // Row i holds (lower, diag, upper, upper2) after pivoting.
            std::vector<double> a(n), b(n), c(n, 0.0), c2(n, 0.0), rhs = x;
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = i > 0 ? e[i - 1] : 0.0;
                b[i] = d[i] - shift;
                c[i] = i + 1 < n ? e[i] : 0.0;
            }
            for (std::size_t i = 0; i + 1 < n; ++i) {
                if (std::abs(a[i + 1]) > std::abs(b[i])) {
                    std::swap(b[i], a[i + 1]);
                    std::swap(c[i], b[i + 1]);
                    std::swap(c2[i], c[i + 1]);
                    std::swap(rhs[i], rhs[i + 1]);
                }
                if (b[i] == 0.0) b[i] = 1e-300;
                const double f = a[i + 1] / b[i];
                b[i + 1] -= f * c[i];
                c[i + 1] -= f * c2[i];
                rhs[i + 1] -= f * rhs[i];
            }
            if (b[n - 1] == 0.0) b[n - 1] = 1e-300;
            for (std::size_t k = n; k-- > 0;) {
                double s = rhs[k];
                if (k + 1 < n) s -= c[k] * rhs[k + 1];
                if (k + 2 < n) s -= c2[k] * rhs[k + 2];
                rhs[k] = s / b[k];
            }
            double nrm = 0.0;
            for (double v : rhs) nrm += v * v;
            nrm = std::sqrt(nrm);
            for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / nrm;
        }
        return x;
    }
};

struct SpectralGrid
{
    double r_max = 30.0;
    double spacing = 0.02;
};

struct SpectrumOptions
{
    std::size_t count = 4;
    /// Multiplies the p U^{p-1} term; 1 is the true linearization.
    double potential_scale = 1.0;
    /// Report Richardson-extrapolated values.
    bool extrapolate = true;
    /// Largest tolerated change of any reported eigenvalue under refinement.
    double resolution_tol = 1e-4;
    /// Eigenvalues below -negative_tol count as negative.
    double negative_tol = 1e-4;
};

struct SpectralReport
{
    int ell = 0;
    std::vector<double> eigenvalues;
    /// Cosine similarity of the lowest eigenvector with the sampled
    /// translation mode (ℓ = 1 and the odd toy class only), otherwise NaN.
    double zero_mode_alignment = NAN;
    int negative_count = 0;
    double r_max = 0.0;
    double spacing = 0.0;
    /// Largest change of the reported eigenvalues under one grid halving.
    double refinement_change = 0.0;
    /// Eigenvector samples (r, v) of the lowest mode on the finest grid.
    std::vector<std::pair<double, double>> lowest_mode;
};

namespace detail {

/// Sector operator after v = r^{(N-1)/2}φ on interior nodes r_i = i·h.
inline Tridiagonal sector_matrix(const RadialProfile& prof, int ell, double r_max, double h, double scale)
{
    const std::size_t n = static_cast<std::size_t>(std::lround(r_max / h));
    Tridiagonal T;
    T.d.resize(n - 1);
    T.e.assign(n - 2, -1.0 / (h * h));
    const int N = prof.N;
    const double cent = 0.25 * (N - 1) * (N - 3) + ell * (ell + N - 2.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double r = i * h;
        const double u = prof.value(r);
        T.d[i - 1] = 2.0 / (h * h) + cent / (r * r) + 1.0 - scale * prof.p * std::pow(u, prof.p - 1.0);
    }
    return T;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b)
{
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return std::abs(ab) / std::sqrt(aa * bb);
}

inline std::vector<double> richardson(const std::vector<double>& coarse, const std::vector<double>& fine)
{
    std::vector<double> out(std::min(coarse.size(), fine.size()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
    return out;
}

/// Eigenvalues from spacings h, h/2, h/4. With extrapolation the reported
/// values are Richardson estimates from (h/2, h/4) and the change is measured
/// against the (h, h/2) estimates; otherwise the h/4 values against h/2.
template <class Build>
std::vector<double> refined_eigenvalues(Build&& build, double h, const SpectrumOptions& opt, SpectralReport& rep,
                                        const std::string& what, Tridiagonal& finest)
{
    const auto l1 = build(h).lowest(opt.count);
    const auto l2 = build(0.5 * h).lowest(opt.count);
    finest = build(0.25 * h);
    const auto l4 = finest.lowest(opt.count);
    const auto prev = opt.extrapolate ? richardson(l1, l2) : l2;
    const auto best = opt.extrapolate ? richardson(l2, l4) : l4;
    double change = 0.0;
    for (std::size_t i = 0; i < best.size(); ++i) change = std::max(change, std::abs(best[i] - prev[i]));
    rep.refinement_change = change;
    if (change > opt.resolution_tol) {
        std::ostringstream os;
        os << what << ": eigenvalues change by " << change << " under refinement; reduce the spacing";
        throw Error(Errc::resolution, os.str());
    }
    return best;
}

inline std::size_t smallest_magnitude(const std::vector<double>& v)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) < std::abs(v[best])) best = i;
    return best;
}

} // namespace detail

/// Lowest eigenvalues of L_ℓ = -∂rr - (N-1)/r ∂r + ℓ(ℓ+N-2)/r² + 1 - pU^{p-1}
/// with Dirichlet conditions at the origin (after symmetrization) and r_max.
inline SpectralReport radial_linearized_spectrum(const RadialProfile& prof, int ell, const SpectralGrid& grid = {},
                                                 const SpectrumOptions& opt = {})
{
    if (prof.N < 2) throw Error(Errc::dimension, "sector spectra need N >= 2; use the 1D toy for N = 1");
    if (ell < 0) throw Error(Errc::invalid_parameter, "sector index must be >= 0");
    if (!(grid.spacing > 0.0 && grid.spacing <= 0.02)) {
        throw Error(Errc::invalid_parameter, "spectral spacing must lie in (0, 0.02]");
    }
    if (!(grid.r_max >= 25.0)) throw Error(Errc::invalid_parameter, "spectral r_max must be >= 25");

    SpectralReport rep;
    rep.ell = ell;
    rep.r_max = grid.r_max;
    rep.spacing = grid.spacing;
    Tridiagonal Tf;
    auto build = [&](double h) { return detail::sector_matrix(prof, ell, grid.r_max, h, opt.potential_scale); };
    rep.eigenvalues =
        detail::refined_eigenvalues(build, grid.spacing, opt, rep, "sector " + std::to_string(ell), Tf);
    for (double v : rep.eigenvalues)
        if (v < -opt.negative_tol) ++rep.negative_count;

    const auto vec = Tf.eigenvector(Tf.eigenvalue(0));
    const double hf = 0.25 * grid.spacing;
    const double a = 0.5 * (prof.N - 1);
    for (std::size_t i = 0; i < vec.size(); ++i) rep.lowest_mode.push_back({(i + 1) * hf, vec[i]});
    if (ell == 1) {
        std::vector<double> mode(vec.size());
        for (std::size_t i = 0; i < vec.size(); ++i) {
            const double r = (i + 1) * hf;
            mode[i] = std::pow(r, a) * prof.eval(r).U1;
        }
        rep.zero_mode_alignment = detail::cosine(vec, mode);
    }
    return rep;
}

struct NondegeneracyVerdict
{
    bool pass = false;
    std::vector<SpectralReport> sectors; ///< ℓ = 0..4
    bool zero_mode_ok = false;           ///< ℓ = 1 has an aligned zero eigenvalue
    bool radial_ok = false;              ///< ℓ = 0: one negative, none near zero
    bool higher_ok = false;              ///< ℓ ≥ 2 strictly positive
    std::string message;
};

struct NondegeneracyOptions
{
    double zero_tol = 1e-6;
    double alignment_min = 0.999;
    double radial_gap = 1e-3;
};

inline NondegeneracyVerdict nondegeneracy_check(const RadialProfile& prof, const SpectralGrid& grid = {},
                                                const SpectrumOptions& opt = {},
                                                const NondegeneracyOptions& crit = {})
{
    NondegeneracyVerdict v;
    for (int ell = 0; ell <= 4; ++ell) v.sectors.push_back(radial_linearized_spectrum(prof, ell, grid, opt));
    const auto& s1 = v.sectors[1];
    v.zero_mode_ok = std::abs(s1.eigenvalues.front()) <= crit.zero_tol && s1.zero_mode_alignment >= crit.alignment_min;
    const auto& s0 = v.sectors[0];
    double gap = INFINITY;
    for (double e : s0.eigenvalues)
        if (e > -opt.negative_tol) gap = std::min(gap, std::abs(e));
    v.radial_ok = s0.negative_count == 1 && gap >= crit.radial_gap;
    v.higher_ok = true;
    for (int ell = 2; ell <= 4; ++ell) v.higher_ok = v.higher_ok && v.sectors[ell].eigenvalues.front() > 0.0;
    v.pass = v.zero_mode_ok && v.radial_ok && v.higher_ok;

    std::ostringstream os;
    if (!v.zero_mode_ok) {
        os << "translation mode broken: l=1 lowest eigenvalue " << s1.eigenvalues.front() << ", alignment "
           << s1.zero_mode_alignment << "; ";
    }
    if (!v.radial_ok) os << "radial sector has " << s0.negative_count << " negative eigenvalues, gap " << gap << "; ";
    if (!v.higher_ok) os << "a sector l>=2 has a non-positive eigenvalue; ";
    v.message = v.pass ? "non-degenerate" : os.str();
    return v;
}

struct ToyGrid
{
    double padding = 20.0;
    double spacing = 0.01;
};

namespace detail {

/// Even (sym = true) or odd restriction of -∂xx + 1 - pW^{p-1} about `mid`
/// on nodes mid + i·h, i = 0..M, Dirichlet at i = M + 1.
inline Tridiagonal toy_matrix(double p, const std::vector<double>& centers, double mid, double half, double h,
                              bool even)
{
    const std::size_t M = static_cast<std::size_t>(std::ceil(half / h));
    auto W = [&](double x) {
        double w = 0.0;
        for (double c : centers) w += soliton_1d(p, x - c);
        return w;
    };
    Tridiagonal T;
    const std::size_t first = even ? 0 : 1;
    for (std::size_t i = first; i <= M; ++i) {
        const double x = mid + i * h;
        T.d.push_back(2.0 / (h * h) + 1.0 - p * std::pow(W(x), p - 1.0));
    }
    T.e.assign(T.d.size() - 1, -1.0 / (h * h));
    // Even class: v_{-1} = v_1; scaling v_0 by 1/√2 keeps the matrix symmetric.
    if (even) T.e[0] = -std::sqrt(2.0) / (h * h);
    return T;
}

} // namespace detail

/// Spectrum of the linearization about a sum of 1D solitons, split into the
/// even (ell = 0) and odd (ell = 1) classes about the configuration center.
inline std::vector<SpectralReport> toy_tower_spectrum_1d(double p, std::vector<double> centers,
                                                         const ToyGrid& grid = {}, const SpectrumOptions& opt = {})
{
    if (!(p > 1.0)) throw Error(Errc::invalid_parameter, "exponent p must exceed 1");
    if (centers.empty()) throw Error(Errc::invalid_parameter, "toy tower needs at least one center");
    std::sort(centers.begin(), centers.end());
    for (std::size_t i = 1; i < centers.size(); ++i) {
        if (centers[i] - centers[i - 1] < 2.0) throw Error(Errc::invalid_parameter, "centers must be separated by >= 2");
    }
    const double mid = 0.5 * (centers.front() + centers.back());
    const double half = 0.5 * (centers.back() - centers.front()) + grid.padding;
    std::vector<SpectralReport> out;
    for (bool even : {true, false}) {
        SpectralReport rep;
        rep.ell = even ? 0 : 1;
        rep.r_max = half;
        rep.spacing = grid.spacing;
        Tridiagonal Tf;
        auto build = [&](double h) { return detail::toy_matrix(p, centers, mid, half, h, even); };
        rep.eigenvalues =
            detail::refined_eigenvalues(build, grid.spacing, opt, rep, even ? "toy even class" : "toy odd class", Tf);
        for (double v : rep.eigenvalues)
            if (v < -opt.negative_tol) ++rep.negative_count;
        const double hf = 0.25 * grid.spacing;
        const auto vec = Tf.eigenvector(Tf.eigenvalue(0));
        const std::size_t first = even ? 0 : 1;
        for (std::size_t i = 0; i < vec.size(); ++i) rep.lowest_mode.push_back({(i + first) * hf, vec[i]});
        if (!even) {
            // Global translation Σ U'(x - c) is odd about the center; compare
            // it with the eigenvector of the smallest |λ|.
            const auto near = Tf.eigenvector(Tf.eigenvalue(detail::smallest_magnitude(rep.eigenvalues)));
            std::vector<double> mode(vec.size());
            for (std::size_t i = 0; i < vec.size(); ++i) {
                const double x = mid + (i + first) * hf;
                for (double c : centers) mode[i] += soliton_1d_derivative(p, x - c);
            }
            rep.zero_mode_alignment = detail::cosine(near, mode);
        }
        out.push_back(std::move(rep));
    }
    return out;
}

struct ToyDecayFit
{
    std::vector<double> separations;
    /// smallest and second-smallest |λ| at each separation (Richardson values)
    std::vector<double> smallest;
    std::vector<double> second;
    double slope_smallest = 0.0;
    double slope_second = 0.0;
    double r2_smallest = 0.0;
    double r2_second = 0.0;
};

namespace detail {

inline void linear_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& r2)
{
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    const double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
    slope = cxy / cxx;
    r2 = cyy > 0.0 ? cxy * cxy / (cxx * cyy) : 1.0;
}

} // namespace detail

/// Two solitons at ±d/2 for each d: log-linear fits of the two
/// smallest-magnitude eigenvalues against d.
inline ToyDecayFit toy_tower_decay(double p, const std::vector<double>& separations, const ToyGrid& grid = {},
                                   const SpectrumOptions& opt = {})
{
    ToyDecayFit fit;
    fit.separations = separations;
    std::vector<double> l1, l2;
    for (double d : separations) {
        const auto reps = toy_tower_spectrum_1d(p, {-0.5 * d, 0.5 * d}, grid, opt);
        std::vector<double> mags;
        for (const auto& r : reps)
            for (double v : r.eigenvalues) mags.push_back(std::abs(v));
        std::sort(mags.begin(), mags.end());
        fit.smallest.push_back(mags[0]);
        fit.second.push_back(mags[1]);
        l1.push_back(std::log(mags[0]));
        l2.push_back(std::log(mags[1]));
    }
    detail::linear_fit(separations, l1, fit.slope_smallest, fit.r2_smallest);
    detail::linear_fit(separations, l2, fit.slope_second, fit.r2_second);
    return fit;
}

} // namespace bubble_tower

#endif
