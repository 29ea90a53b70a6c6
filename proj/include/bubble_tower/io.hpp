#ifndef BUBBLE_TOWER_IO_HPP
#define BUBBLE_TOWER_IO_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "coefficients.hpp"
#include "energy.hpp"
#include "error.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "model.hpp"
#include "pohozaev.hpp"
#include "profile.hpp"
#include "spectrum.hpp"

namespace bubble_tower::io {

using Json = nlohmann::ordered_json;

/// 17 significant digits; "nan" and "inf" spelled out.
inline std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row) { rows.push_back(std::move(row)); }

    std::string csv() const
    {
        std::ostringstream os;
        for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
        os << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
            os << '\n';
        }
        return os.str();
    }
};

inline void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error(Errc::io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io, "cannot open " + path.string() + " for writing");
    out << content;
    out.close();
    if (!out) throw Error(Errc::io, "write to " + path.string() + " failed");
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

/// NaN has no JSON spelling; it becomes null.
inline Json number(double x)
{
    if (!std::isfinite(x)) return nullptr;
    return x;
}

inline Json vector_json(const std::vector<double>& v)
{
    Json a = Json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

inline Json to_json(const ModelParams& mp)
{
    return Json{{"N", mp.N}, {"p", mp.p}, {"a1", mp.a1}, {"a2", mp.a2}, {"m", mp.m}, {"tau", mp.tau}};
}

inline Table profile_table(const RadialProfile& prof)
{
    Table t{{"r", "U", "U1", "U2"}, {}};
    for (std::size_t i = 0; i < prof.grid.size(); ++i) t.add({prof.grid[i], prof.U[i], prof.U1[i], prof.U2[i]});
    return t;
}

inline Json profile_sidecar(const RadialProfile& prof)
{
    return Json{{"N", prof.N},
                {"p", prof.p},
                {"C0", number(prof.C0)},
                {"r_match", prof.r_match},
                {"r_max", prof.r_max()},
                {"spacing", prof.spacing()},
                {"shoot_value", prof.shoot_value},
                {"plateau_variation", number(prof.plateau_variation())}};
}

inline Json to_json(const CoefficientSet& c)
{
    return Json{{"A1", c.A1}, {"A2", c.A2}, {"B1", c.B1}, {"err", c.err}, {"N", c.N}, {"p", c.p}, {"a1", c.a1}};
}

inline Table points_table(const std::vector<Point>& pts)
{
    Table t;
    if (pts.empty()) return t;
    for (std::size_t d = 0; d < pts.front().size(); ++d) t.columns.push_back("y" + std::to_string(d + 1));
    for (const auto& p : pts) t.add(p);
    return t;
}

inline Json to_json(const ReducedEnergyReport& r)
{
    return Json{{"k", r.k},
                {"r", r.r},
                {"h", r.h},
                {"value", r.value},
                {"dF_dr", r.dF_dr},
                {"dF_dh", r.dF_dh},
                {"terms", {{"self", r.self}, {"constant", r.constant}, {"neighbor", r.neighbor}, {"layer", r.layer}}},
                {"offset", r.offset},
                {"residual_norm", r.residual_norm},
                {"dropped_term_ratio", r.dropped_term_ratio}};
}

inline Json to_json(const CriticalPoint& c)
{
    return Json{{"k", c.k},
                {"r_star", c.r_star},
                {"h_star", c.h_star},
                {"grad_residual", c.grad_residual},
                {"in_interior", c.in_interior},
                {"iterations", c.iterations},
                {"rectangle", {c.rect.r_lo, c.rect.r_hi, c.rect.h_lo, c.rect.h_hi}},
                {"boundary_signs",
                 {{"dr_left", c.signs.dr_left},
                  {"dr_right", c.signs.dr_right},
                  {"dh_bottom", c.signs.dh_bottom},
                  {"dh_top", c.signs.dh_top},
                  {"ok", c.signs.ok()}}},
                {"max_in_h", c.max_in_h}};
}

inline Json to_json(const BalanceRatios& b)
{
    return Json{{"neighbor", number(b.neighbor)}, {"layer", number(b.layer)}, {"layer_defined", b.layer_defined}};
}

inline Json to_json(const ScalingDiagnostics& s)
{
    return Json{{"neighbor_ratio", s.neighbor_ratio},
                {"layer_ratio", s.layer_ratio},
                {"growth_factor", s.growth_factor},
                {"band", {s.band_lo, s.band_hi}},
                {"in_band", s.in_band()}};
}

inline Json to_json(const InteractionDerivative& d)
{
    return Json{{"exact", d.exact},
                {"exact_counter", d.exact_counter},
                {"asymptote", d.asymptote},
                {"ratio", d.ratio},
                {"companion", d.companion}};
}

inline Json to_json(const StarNormReport& s)
{
    return Json{{"value", s.value},
                {"argmax_point", vector_json(s.argmax_point)},
                {"tau", s.tau},
                {"sample_count", s.sample_count}};
}

inline Json to_json(const LkSweep& s)
{
    Json entries = Json::array();
    for (const auto& e : s.entries) {
        entries.push_back({{"k", e.k}, {"r", e.r}, {"h", e.h}, {"norm", to_json(e.norm)}});
    }
    return Json{{"entries", entries},
                {"slope", s.slope},
                {"intercept", s.intercept},
                {"slope_stderr", s.slope_stderr},
                {"bound_exponent", s.bound_exponent}};
}

inline Json to_json(const PohozaevReport& r)
{
    return Json{{"j", r.j},
                {"spacing", r.spacing},
                {"I_j", r.I_j},
                {"surf_dnu_u", r.surf_dnu_u},
                {"surf_dnu_xi", r.surf_dnu_xi},
                {"surf_grad", r.surf_grad},
                {"surf_uxi", r.surf_uxi},
                {"surf_potential", r.surf_potential},
                {"surf_power", r.surf_power},
                {"vol_potential", r.vol_potential},
                {"vol_pde_u", r.vol_pde_u},
                {"vol_pde_xi", r.vol_pde_xi},
                {"residual", r.residual}};
}

inline Json to_json(const ConvergenceRow& c)
{
    return Json{{"cells", c.cells},
                {"spacing", c.spacing},
                {"residual", c.residual},
                {"ratio", number(c.ratio)},
                {"report", to_json(c.report)}};
}

inline Json to_json(const BoundaryEstimate& b)
{
    return Json{{"value", b.value},
                {"power_term", b.power_term},
                {"closed_form", number(b.closed_form)},
                {"bound", b.bound},
                {"sigma", b.sigma},
                {"radius", b.radius}};
}

inline Json to_json(const SpectralReport& s)
{
    return Json{{"ell", s.ell},
                {"lowest_eigenvalues", vector_json(s.eigenvalues)},
                {"zero_mode_alignment", number(s.zero_mode_alignment)},
                {"negative_count", s.negative_count},
                {"grid", {{"r_max", s.r_max}, {"spacing", s.spacing}}},
                {"refinement_change", s.refinement_change}};
}

inline Json to_json(const NondegeneracyVerdict& v)
{
    Json sectors = Json::array();
    for (const auto& s : v.sectors) sectors.push_back(to_json(s));
    return Json{{"pass", v.pass},
                {"zero_mode_ok", v.zero_mode_ok},
                {"radial_ok", v.radial_ok},
                {"higher_ok", v.higher_ok},
                {"message", v.message},
                {"sectors", sectors}};
}

inline Json to_json(const ToyDecayFit& f)
{
    return Json{{"separations", vector_json(f.separations)},
                {"smallest", vector_json(f.smallest)},
                {"second", vector_json(f.second)},
                {"slope_smallest", f.slope_smallest},
                {"slope_second", f.slope_second},
                {"r2_smallest", f.r2_smallest},
                {"r2_second", f.r2_second}};
}

inline Table mode_table(const SpectralReport& s)
{
    Table t{{"r", "v"}, {}};
    for (const auto& [r, v] : s.lowest_mode) t.add({r, v});
    return t;
}

} // namespace bubble_tower::io

#endif
