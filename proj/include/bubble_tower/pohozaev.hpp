#ifndef BUBBLE_TOWER_POHOZAEV_HPP
#define BUBBLE_TOWER_POHOZAEV_HPP

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "energy.hpp"
#include "error.hpp"
#include "geometry.hpp"
#include "model.hpp"
#include "profile.hpp"
#include "quadrature.hpp"

namespace bubble_tower {

/// Axis-aligned box sampled on a uniform node grid in dimension 2 or 3.
struct GridBox
{
    int dim = 3;
    std::array<double, 3> lo{};
    double spacing = 0.0;
    std::array<int, 3> nodes{1, 1, 1};

    /// Cube [-half, half]^dim with `cells` cells per side.
    static GridBox cube(int dim, double half, int cells)
    {
        if (dim != 2 && dim != 3) throw Error(Errc::dimension, "grid fields support dimension 2 or 3");
        if (cells < 16) throw Error(Errc::invalid_parameter, "boxes need at least 16 cells per side");
        if (!(half > 0.0)) throw Error(Errc::invalid_parameter, "box half width must be positive");
        GridBox b;
        b.dim = dim;
        b.spacing = 2.0 * half / cells;
        for (int a = 0; a < 3; ++a) {
            b.lo[a] = a < dim ? -half : 0.0;
            b.nodes[a] = a < dim ? cells + 1 : 1;
        }
        return b;
    }

    std::size_t size() const { return std::size_t(nodes[0]) * nodes[1] * nodes[2]; }

    std::size_t index(int i, int j, int k) const { return i + std::size_t(nodes[0]) * (j + std::size_t(nodes[1]) * k); }

    std::array<double, 3> coord(int i, int j, int k) const
    {
        return {lo[0] + i * spacing, lo[1] + j * spacing, lo[2] + k * spacing};
    }

    bool operator==(const GridBox& o) const
    {
        return dim == o.dim && lo == o.lo && spacing == o.spacing && nodes == o.nodes;
    }
};

struct GridField
{
    GridBox box;
    std::vector<double> values;

    static GridField sample(const GridBox& box, const std::function<double(const std::array<double, 3>&)>& f)
    {
        GridField g{box, std::vector<double>(box.size())};
        for (int k = 0; k < box.nodes[2]; ++k)
            for (int j = 0; j < box.nodes[1]; ++j)
                for (int i = 0; i < box.nodes[0]; ++i) g.values[box.index(i, j, k)] = f(box.coord(i, j, k));
        return g;
    }

    double at(int i, int j, int k) const { return values[box.index(i, j, k)]; }

    /// Second-order first derivative along `axis`, one-sided at the boundary.
    double d1(const std::array<int, 3>& ix, int axis) const
    {
        const int n = box.nodes[axis];
        auto f = [&](int off) {
            auto q = ix;
            q[axis] += off;
            return at(q[0], q[1], q[2]);
        };
        const double h = box.spacing;
        if (ix[axis] == 0) return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
        if (ix[axis] == n - 1) return (3.0 * f(0) - 4.0 * f(-1) + f(-2)) / (2.0 * h);
        return (f(1) - f(-1)) / (2.0 * h);
    }

    /// Second-order second derivative along `axis`, one-sided at the boundary.
    double d2(const std::array<int, 3>& ix, int axis) const
    {
        const int n = box.nodes[axis];
        auto f = [&](int off) {
            auto q = ix;
            q[axis] += off;
            return at(q[0], q[1], q[2]);
        };
        const double h2 = box.spacing * box.spacing;
        if (ix[axis] == 0) return (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) / h2;
        if (ix[axis] == n - 1) return (2.0 * f(0) - 5.0 * f(-1) + 4.0 * f(-2) - f(-3)) / h2;
        return (f(1) - 2.0 * f(0) + f(-1)) / h2;
    }

    double laplacian(const std::array<int, 3>& ix) const
    {
        double s = 0.0;
        for (int a = 0; a < box.dim; ++a) s += d2(ix, a);
        return s;
    }
};

/// Radial potential and its radial derivative.
struct RadialPotential
{
    std::function<double(double)> V;
    std::function<double(double)> dV;

    static RadialPotential model(const ModelParams& mp)
    {
        return {[mp](double r) { return potential_value(mp, r); },
                [mp](double r) { return potential_grad_radial(mp, r); }};
    }

    static RadialPotential constant(double c)
    {
        return {[c](double) { return c; }, [](double) { return 0.0; }};
    }
};

/// Which linearization enters the ξ equation of the identity.
enum class Coupling {
    linearized, ///< -Δξ + Vξ - p u^{p-1} ξ
    symmetric   ///< -Δξ + Vξ - ξ^p, so that u = ξ gives identical volume terms
};

struct PohozaevReport
{
    int j = 0;
    // Surface terms of I_j.
    double surf_dnu_u = 0.0;   ///< -∮ ∂u/∂ν ∂ξ/∂y_j
    double surf_dnu_xi = 0.0;  ///< -∮ ∂ξ/∂ν ∂u/∂y_j
    double surf_grad = 0.0;    ///< ∮ <∇u,∇ξ> ν_j
    double surf_uxi = 0.0;     ///< ∮ u ξ ν_j
    double I_j = 0.0;
    // Remaining surface and volume terms.
    double surf_potential = 0.0; ///< ∮ (V - 1) u ξ ν_j
    double surf_power = 0.0;     ///< ∮ u^p ξ ν_j
    double vol_potential = 0.0;  ///< ∫ u ξ ∂V/∂y_j
    double vol_pde_u = 0.0;      ///< ∫ (-Δu + Vu - u^p) ∂ξ/∂y_j
    double vol_pde_xi = 0.0;     ///< ∫ (ξ equation) ∂u/∂y_j
    double residual = 0.0;
    double spacing = 0.0;
};

namespace detail {

inline double spow(double u, double p) { return std::pow(std::abs(u), p - 1.0) * u; }

inline void check_pair(const GridField& u, const GridField& xi, int j)
{
    if (!(u.box == xi.box) || u.values.size() != u.box.size() || xi.values.size() != xi.box.size()) {
        throw Error(Errc::shape, "fields must share one grid");
    }
    if (j < 1 || j > u.box.dim) throw Error(Errc::invalid_parameter, "direction j must lie in 1..dim");
}

/// Visits every boundary node of every face with its face-quadrature
/// weight and outward normal axis/sign.
template <class F>
void for_each_face_node(const GridBox& b, F&& f)
{
    auto tw = [&](int i, int n) { return (i == 0 || i == n - 1) ? 0.5 * b.spacing : b.spacing; };
    for (int axis = 0; axis < b.dim; ++axis) {
        for (int side = 0; side < 2; ++side) {
            const int fixed = side == 0 ? 0 : b.nodes[axis] - 1;
            const double sign = side == 0 ? -1.0 : 1.0;
            std::array<int, 3> lo{0, 0, 0}, hi = b.nodes;
            lo[axis] = fixed;
            hi[axis] = fixed + 1;
            for (int k = lo[2]; k < hi[2]; ++k)
                for (int j = lo[1]; j < hi[1]; ++j)
                    for (int i = lo[0]; i < hi[0]; ++i) {
                        std::array<int, 3> ix{i, j, k};
                        double w = 1.0;
                        for (int a = 0; a < b.dim; ++a)
                            if (a != axis) w *= tw(ix[a], b.nodes[a]);
                        f(ix, axis, sign, w);
                    }
        }
    }
}

template <class F>
void for_each_node(const GridBox& b, F&& f)
{
    auto tw = [&](int i, int n) { return (i == 0 || i == n - 1) ? 0.5 * b.spacing : b.spacing; };
    for (int k = 0; k < b.nodes[2]; ++k)
        for (int j = 0; j < b.nodes[1]; ++j)
            for (int i = 0; i < b.nodes[0]; ++i) {
                std::array<int, 3> ix{i, j, k};
                double w = 1.0;
                for (int a = 0; a < b.dim; ++a) w *= tw(ix[a], b.nodes[a]);
                f(ix, w);
            }
}

} // namespace detail

/// I_j(u, ξ, Ω) = -∮ ∂u/∂ν ∂ξ/∂y_j - ∮ ∂ξ/∂ν ∂u/∂y_j + ∮ <∇u,∇ξ> ν_j + ∮ u ξ ν_j
/// on the box, with j counted from 1. Fills the four surface terms of `rep`.
inline double bilinear_form_Ij(const GridField& u, const GridField& xi, int j, PohozaevReport* rep = nullptr)
{
    detail::check_pair(u, xi, j);
    const int jj = j - 1;
    const int dim = u.box.dim;
    double t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
    detail::for_each_face_node(u.box, [&](const std::array<int, 3>& ix, int axis, double sign, double w) {
        std::array<double, 3> gu{}, gx{};
        for (int a = 0; a < dim; ++a) {
            gu[a] = u.d1(ix, a);
            gx[a] = xi.d1(ix, a);
        }
        const double dnu_u = sign * gu[axis];
        const double dnu_x = sign * gx[axis];
        const double nuj = axis == jj ? sign : 0.0;
        double dot = 0.0;
        for (int a = 0; a < dim; ++a) dot += gu[a] * gx[a];
        const double uu = u.at(ix[0], ix[1], ix[2]), xx = xi.at(ix[0], ix[1], ix[2]);
        t1 -= w * dnu_u * gx[jj];
        t2 -= w * dnu_x * gu[jj];
        t3 += w * dot * nuj;
        t4 += w * uu * xx * nuj;
    });
    if (rep) {
        rep->surf_dnu_u = t1;
        rep->surf_dnu_xi = t2;
        rep->surf_grad = t3;
        rep->surf_uxi = t4;
    }
    return t1 + t2 + t3 + t4;
}

/// Residual of the integration-by-parts identity
///
///   I_j + ∮(V-1)uξν_j - ∮u^pξν_j - ∫uξ ∂_jV
///       - ∫(-Δu + Vu - u^p)∂_jξ - ∫(-Δξ + Vξ - p u^{p-1}ξ)∂_ju = 0,
///
/// which holds for any smooth u, ξ; on a grid it measures discretization
/// error only.
inline PohozaevReport generalized_identity_residual(const GridField& u, const GridField& xi,
                                                    const RadialPotential& pot, double p, int j,
                                                    Coupling coupling = Coupling::linearized)
{
    PohozaevReport rep;
    rep.j = j;
    rep.spacing = u.box.spacing;
    rep.I_j = bilinear_form_Ij(u, xi, j, &rep);
    const int jj = j - 1;
    const auto& b = u.box;

    auto radius = [&](const std::array<int, 3>& ix) {
        const auto y = b.coord(ix[0], ix[1], ix[2]);
        return std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    };

    detail::for_each_face_node(b, [&](const std::array<int, 3>& ix, int axis, double sign, double w) {
        if (axis != jj) return;
        const double uu = u.at(ix[0], ix[1], ix[2]), xx = xi.at(ix[0], ix[1], ix[2]);
        rep.surf_potential += w * (pot.V(radius(ix)) - 1.0) * uu * xx * sign;
        rep.surf_power += w * detail::spow(uu, p) * xx * sign;
    });

    detail::for_each_node(b, [&](const std::array<int, 3>& ix, double w) {
        const auto y = b.coord(ix[0], ix[1], ix[2]);
        const double r = radius(ix);
        const double uu = u.at(ix[0], ix[1], ix[2]), xx = xi.at(ix[0], ix[1], ix[2]);
        const double Vr = pot.V(r);
        const double dVj = r > 0.0 ? pot.dV(r) * y[jj] / r : 0.0;
        const double eq_u = -u.laplacian(ix) + Vr * uu - detail::spow(uu, p);
        const double coupling_term =
            coupling == Coupling::linearized ? p * std::pow(std::abs(uu), p - 1.0) * xx : detail::spow(xx, p);
        const double eq_xi = -xi.laplacian(ix) + Vr * xx - coupling_term;
        rep.vol_potential += w * uu * xx * dVj;
        rep.vol_pde_u += w * eq_u * xi.d1(ix, jj);
        rep.vol_pde_xi += w * eq_xi * u.d1(ix, jj);
    });

    rep.residual = rep.I_j + rep.surf_potential - rep.surf_power - rep.vol_potential - rep.vol_pde_u - rep.vol_pde_xi;
    return rep;
}

inline PohozaevReport generalized_identity_residual(const GridField& u, const GridField& xi, const ModelParams& mp,
                                                    double p, int j, Coupling coupling = Coupling::linearized)
{
    return generalized_identity_residual(u, xi, RadialPotential::model(mp), p, j, coupling);
}

/// Off-center Gaussian amplitude·exp(-|y - c|²/(2σ²)).
struct Gaussian
{
    double amplitude = 1.0;
    std::array<double, 3> center{};
    double sigma = 1.0;

    double operator()(const std::array<double, 3>& y) const
    {
        double s = 0.0;
        for (int a = 0; a < 3; ++a) s += (y[a] - center[a]) * (y[a] - center[a]);
        return amplitude * std::exp(-0.5 * s / (sigma * sigma));
    }
};

struct ConvergenceRow
{
    int cells = 0;
    double spacing = 0.0;
    double residual = 0.0;
    double ratio = NAN; ///< previous residual / this residual
    PohozaevReport report;
};

/// Identity residual for a manufactured Gaussian pair on [-half, half]^3 at
/// each resolution in `cells`.
inline std::vector<ConvergenceRow> manufactured_convergence(const ModelParams& mp, const std::vector<int>& cells,
                                                            int j = 1, double half = 2.0,
                                                            Gaussian u = {1.0, {0.3, -0.2, 0.1}, 0.8},
                                                            Gaussian xi = {0.7, {-0.25, 0.15, 0.3}, 0.7})
{
    std::vector<ConvergenceRow> rows;
    const auto pot = RadialPotential::model(mp);
    for (int n : cells) {
        const auto box = GridBox::cube(3, half, n);
        const auto fu = GridField::sample(box, u);
        const auto fx = GridField::sample(box, xi);
        ConvergenceRow row;
        row.cells = n;
        row.spacing = box.spacing;
        row.report = generalized_identity_residual(fu, fx, pot, mp.p, j);
        row.residual = row.report.residual;
        if (!rows.empty()) row.ratio = rows.back().residual / row.residual;
        rows.push_back(row);
    }
    return rows;
}

/// Which bubble plays u and which is differentiated for ξ.
struct BubblePair
{
    int i = 1;       ///< index of the u bubble, 1..k
    int i_sign = 1;  ///< layer of the u bubble, +1 or -1
    int j = 1;       ///< index of the ξ bubble, 1..k
    int j_sign = 1;  ///< layer of the ξ bubble
    bool d_dh = false; ///< ξ = ∂U/∂h instead of ∂U/∂r
};

struct BoundaryEstimate
{
    double value = 0.0;        ///< I_ℓ(U_{x_i}, ξ, Ω) by surface quadrature
    double power_term = 0.0;   ///< ∮ U_{x_j}^p ξ ν_ℓ
    double closed_form = NAN;  ///< i = j only: U(ρ)^p (-U'(ρ)) (4π/3) ρ² (∂x_j/∂·)_ℓ
    double bound = 0.0;        ///< e^{-((p+1)/2 - σ) d_neighbor}
    double sigma = 0.05;
    double radius = 0.0;       ///< ball radius d_neighbor / 2
};

/// Boundary terms of the bilinear form on the ball of radius
/// |x_2^+ - x_1^+|/2 about x_1^+, in the three-dimensional cross-section.
/// The sphere rule is Gauss-Legendre in cos θ (nodes cluster toward the
/// poles) times the trapezoid rule in φ.
inline BoundaryEstimate bubble_pair_boundary_estimates(const RadialProfile& prof, const TowerConfig& cfg,
                                                       const BubblePair& pair, int ell, int n_theta = 64,
                                                       int n_phi = 128, double sigma = 0.05)
{
    cfg.validate();
    if (prof.N != 3) throw Error(Errc::dimension, "boundary estimates use a three-dimensional profile");
    if (ell != 1 && ell != 3) throw Error(Errc::invalid_parameter, "direction ell must be 1 or 3");
    if (pair.i < 1 || pair.i > cfg.k || pair.j < 1 || pair.j > cfg.k || std::abs(pair.i_sign) != 1 ||
        std::abs(pair.j_sign) != 1) {
        throw Error(Errc::invalid_parameter, "bubble pair indices out of range");
    }
    const double q = std::sqrt(1.0 - cfg.h * cfg.h);
    auto center = [&](int idx, int sgn) {
        const double th = 2.0 * std::numbers::pi * (idx - 1) / cfg.k;
        return std::array<double, 3>{cfg.r * q * std::cos(th), cfg.r * q * std::sin(th), sgn * cfg.r * cfg.h};
    };
    auto velocity = [&](int idx, int sgn) {
        const double th = 2.0 * std::numbers::pi * (idx - 1) / cfg.k;
        if (!pair.d_dh) return std::array<double, 3>{q * std::cos(th), q * std::sin(th), sgn * cfg.h};
        return std::array<double, 3>{-cfg.r * cfg.h / q * std::cos(th), -cfg.r * cfg.h / q * std::sin(th),
                                     sgn * cfg.r};
    };
    const auto x1 = center(1, 1);
    const auto xi_c = center(pair.i, pair.i_sign);
    const auto xj_c = center(pair.j, pair.j_sign);
    const auto vj = velocity(pair.j, pair.j_sign);
    const double dn = nearest_distances(cfg).neighbor;
    const double rho = 0.5 * dn;
    const int l = ell - 1;

    const GaussLegendre rule(n_theta);
    BoundaryEstimate out;
    out.sigma = sigma;
    out.radius = rho;
    out.bound = std::exp(-(0.5 * (prof.p + 1.0) - sigma) * dn);
    for (int a = 0; a < n_theta; ++a) {
        const double mu = rule.x[a];
        const double st = std::sqrt(1.0 - mu * mu);
        for (int b = 0; b < n_phi; ++b) {
            const double ph = 2.0 * std::numbers::pi * b / n_phi;
            const std::array<double, 3> nu{st * std::cos(ph), st * std::sin(ph), mu};
            const double w = rule.w[a] * (2.0 * std::numbers::pi / n_phi) * rho * rho;
            std::array<double, 3> y{};
            for (int c = 0; c < 3; ++c) y[c] = x1[c] + rho * nu[c];

            // u = U(|y - x_i|) and its gradient.
            std::array<double, 3> zi{}, zj{};
            for (int c = 0; c < 3; ++c) {
                zi[c] = y[c] - xi_c[c];
                zj[c] = y[c] - xj_c[c];
            }
            const double ri = std::sqrt(zi[0] * zi[0] + zi[1] * zi[1] + zi[2] * zi[2]);
            const double rj = std::sqrt(zj[0] * zj[0] + zj[1] * zj[1] + zj[2] * zj[2]);
            const auto si = prof.eval(ri);
            const auto sj = prof.eval(rj);
            std::array<double, 3> gu{}, gj{};
            for (int c = 0; c < 3; ++c) {
                gu[c] = si.U1 * zi[c] / ri;
                gj[c] = sj.U1 * zj[c] / rj;
            }
            // ξ = -∇U_{x_j}·v and ∇ξ = -H_{x_j} v.
            const auto H = detail::bubble_hessian(prof, zj);
            double xi = 0.0;
            std::array<double, 3> gx{};
            for (int c = 0; c < 3; ++c) {
                xi -= gj[c] * vj[c];
                for (int e = 0; e < 3; ++e) gx[c] -= H[c][e] * vj[e];
            }
            double dnu_u = 0.0, dnu_x = 0.0, dot = 0.0;
            for (int c = 0; c < 3; ++c) {
                dnu_u += gu[c] * nu[c];
                dnu_x += gx[c] * nu[c];
                dot += gu[c] * gx[c];
            }
            out.value += w * (-dnu_u * gx[l] - dnu_x * gu[l] + dot * nu[l] + si.U * xi * nu[l]);
            out.power_term += w * std::pow(sj.U, prof.p) * xi * nu[l];
        }
    }
    if (pair.i == pair.j && pair.i_sign == pair.j_sign && pair.i == 1 && pair.i_sign == 1) {
        const auto s = prof.eval(rho);
        out.closed_form = std::pow(s.U, prof.p) * (-s.U1) * (4.0 * std::numbers::pi / 3.0) * rho * rho * vj[l];
    }
    return out;
}

} // namespace bubble_tower

#endif
