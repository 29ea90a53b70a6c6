// bubble_tower: command line driver for profiles, coefficients, energy
// landscapes, residual and Pohozaev checks and spectra.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bubble_tower/bubble_tower.hpp"
#include "bubble_tower/io.hpp"
#include "pipeline.hpp"

namespace bt = bubble_tower;
namespace fs = std::filesystem;
using bt::io::Json;
using bt::io::Table;

namespace {

struct Context
{
    bt::Config cfg;
    bt::ModelParams model;
    bt::pipeline::Options opt;
    fs::path out;
    std::string command;

    /// Effective configuration written next to every artifact set.
    Json run_record() const
    {
        Json entries = Json::object();
        for (const auto& [k, v] : cfg.entries()) entries[k] = v;
        return Json{{"command", command}, {"model", bt::io::to_json(model)}, {"config", entries}};
    }

    void write_record() const { bt::io::write_json(out / (command + "_run.json"), run_record()); }

    bt::RadialProfile profile(int N, double p) const
    {
        return bt::solve_ground_state(N, p, opt.profile_tol, opt.profile);
    }

    bt::RadialProfile profile() const { return profile(model.N, model.p); }

    std::vector<int> k_list(const std::string& section, std::vector<int> fallback) const
    {
        return bt::pipeline::to_ints(cfg.get_list(section, "k_list", {fallback.begin(), fallback.end()}));
    }
};

std::string fmt(double x) { return bt::io::format_double(x); }

void cmd_profile(const Context& ctx)
{
    ctx.model.validate();
    const auto prof = ctx.profile();
    bt::io::write_file(ctx.out / "profile.csv", bt::io::profile_table(prof).csv());
    bt::io::write_json(ctx.out / "profile.json", bt::io::profile_sidecar(prof));
    std::printf("U(0) = %s  C0 = %s  r_match = %s\n", fmt(prof.U.front()).c_str(), fmt(prof.C0).c_str(),
                fmt(prof.r_match).c_str());
}

void cmd_coeffs(const Context& ctx)
{
    ctx.model.validate();
    const auto prof = ctx.profile();
    const auto c = bt::compute_coefficients(prof, ctx.model.a1, ctx.opt.coeffs);
    bt::io::write_json(ctx.out / "coefficients.json", bt::io::to_json(c));
    std::printf("A1 = %s  A2 = %s  B1 = %s  err = %s\n", fmt(c.A1).c_str(), fmt(c.A2).c_str(), fmt(c.B1).c_str(),
                fmt(c.err).c_str());
}

void cmd_landscape(const Context& ctx)
{
    ctx.model.validate_tower();
    const int k = ctx.cfg.get_int("landscape", "k", 1000);
    const int nr = ctx.cfg.get_int("landscape", "nr", 41);
    const int nh = ctx.cfg.get_int("landscape", "nh", 41);
    if (k < 2 || nr < 2 || nh < 2) throw bt::Error(bt::Errc::invalid_parameter, "landscape needs k, nr, nh >= 2");
    const auto prof = ctx.profile();
    const auto c = bt::compute_coefficients(prof, ctx.model.a1, ctx.opt.coeffs);
    const auto rect = bt::admissible_rectangle(ctx.model.m, k, bt::RectangleWidths::defaults(ctx.model.m));
    Table t{{"r", "h", "F", "dF_dr", "dF_dh"}, {}};
    for (int i = 0; i < nr; ++i) {
        const double r = rect.r_lo + (rect.r_hi - rect.r_lo) * i / (nr - 1);
        for (int j = 0; j < nh; ++j) {
            const double h = rect.h_lo + (rect.h_hi - rect.h_lo) * j / (nh - 1);
            const auto rep = bt::reduced_energy(c, ctx.model, k, r, h);
            t.add({r, h, rep.value, rep.dF_dr, rep.dF_dh});
        }
    }
    bt::io::write_file(ctx.out / "landscape.csv", t.csv());
    const auto cp = bt::find_critical_point(c, ctx.model, k);
    bt::io::write_json(ctx.out / "landscape.json",
                       Json{{"k", k},
                            {"rectangle", {rect.r_lo, rect.r_hi, rect.h_lo, rect.h_hi}},
                            {"coefficients", bt::io::to_json(c)},
                            {"critical_point", bt::io::to_json(cp)},
                            {"at_critical_point", bt::io::to_json(bt::reduced_energy(c, ctx.model, k, cp.r_star,
                                                                                     cp.h_star))}});
    std::printf("k = %d  r* = %s  h* = %s\n", k, fmt(cp.r_star).c_str(), fmt(cp.h_star).c_str());
}

void cmd_critical_point(const Context& ctx)
{
    ctx.model.validate_tower();
    const auto prof = ctx.profile();
    const auto c = bt::compute_coefficients(prof, ctx.model.a1, ctx.opt.coeffs);
    Table t{{"k", "r_star", "h_star", "r_over_k_log_k", "h_times_k", "grad_residual"}, {}};
    Json points = Json::array();
    std::printf("%10s %24s %24s %12s\n", "k", "r*/(k ln k)", "h* k", "residual");
    for (int k : ctx.opt.trend_k) {
        const auto cp = bt::find_critical_point(c, ctx.model, k);
        const double rs = cp.r_star / (k * std::log(double(k)));
        const double hs = cp.h_star * k;
        t.add({double(k), cp.r_star, cp.h_star, rs, hs, cp.grad_residual});
        points.push_back(bt::io::to_json(cp));
        std::printf("%10d %24s %24s %12.3e\n", k, fmt(rs).c_str(), fmt(hs).c_str(), cp.grad_residual);
    }
    bt::io::write_file(ctx.out / "critical_points.csv", t.csv());
    bt::io::write_json(ctx.out / "critical_points.json",
                       Json{{"r_limit", ctx.model.m / (2.0 * std::numbers::pi)},
                            {"h_limit", std::numbers::pi * (ctx.model.m + 2.0) / ctx.model.m},
                            {"points", points}});
}

void cmd_balance(const Context& ctx)
{
    ctx.model.validate_tower();
    const auto prof = ctx.profile();
    const auto c = bt::compute_coefficients(prof, ctx.model.a1, ctx.opt.coeffs);
    const auto sweep = bt::tower_sweep(prof, c, ctx.model, ctx.k_list("balance", ctx.opt.trend_k));
    Table t{{"k", "r_star", "h_star", "neighbor_half_m_plus_one", "layer_half_m_plus_one", "neighbor_m", "layer_m"},
            {}};
    std::printf("%10s %22s %22s %22s %22s\n", "k", "nbr a(m+1)/2", "layer a(m+1)/2", "nbr a m", "layer a m");
    for (const auto& r : sweep.rows) {
        t.add({double(r.k), r.critical.r_star, r.critical.h_star, r.balance_half.neighbor, r.balance_half.layer,
               r.balance_m.neighbor, r.balance_m.layer});
        std::printf("%10d %22s %22s %22s %22s\n", r.k, fmt(r.balance_half.neighbor).c_str(),
                    fmt(r.balance_half.layer).c_str(), fmt(r.balance_m.neighbor).c_str(),
                    fmt(r.balance_m.layer).c_str());
    }
    bt::io::write_file(ctx.out / "balance.csv", t.csv());
    bt::io::write_json(ctx.out / "balance.json",
                       Json{{"rows", bt::pipeline::sweep_rows(sweep)},
                            {"variation", bt::io::number(sweep.balance_variation())}});
}

void cmd_scaling(const Context& ctx)
{
    ctx.model.validate_tower();
    const auto prof = ctx.profile();
    const auto c = bt::compute_coefficients(prof, ctx.model.a1, ctx.opt.coeffs);
    const auto sweep = bt::tower_sweep(prof, c, ctx.model, ctx.k_list("scaling", ctx.opt.trend_k));
    Table t{{"k", "neighbor_ratio", "layer_ratio", "growth_factor"}, {}};
    for (const auto& r : sweep.rows) {
        t.add({double(r.k), r.scaling.neighbor_ratio, r.scaling.layer_ratio, r.scaling.growth_factor});
    }
    bt::io::write_file(ctx.out / "scaling.csv", t.csv());

    const auto deriv = bt::tower_sweep(prof, c, ctx.model, ctx.opt.derivative_k);
    Table d{{"k", "exact", "exact_counter", "asymptote", "ratio", "companion"}, {}};
    for (const auto& r : deriv.rows) {
        d.add({double(r.k), r.derivative.exact, r.derivative.exact_counter, r.derivative.asymptote,
               r.derivative.ratio, r.derivative.companion});
        std::printf("k = %8d  derivative/asymptote = %s\n", r.k, fmt(r.derivative.ratio).c_str());
    }
    bt::io::write_file(ctx.out / "interaction_derivative.csv", d.csv());
    bt::io::write_json(ctx.out / "scaling.json",
                       Json{{"in_band", sweep.scaling_in_band()},
                            {"growth_increasing", sweep.growth_increasing()},
                            {"rows", bt::pipeline::sweep_rows(sweep)},
                            {"derivative_tightening", deriv.derivative_tightening()},
                            {"derivative_rows", bt::pipeline::sweep_rows(deriv)}});
}

void cmd_lk_decay(const Context& ctx)
{
    ctx.model.validate_tower();
    const auto prof = ctx.profile();
    const auto c = bt::compute_coefficients(prof, ctx.model.a1, ctx.opt.coeffs);
    const auto sweep = bt::lk_decay_sweep(prof, c, ctx.model, ctx.opt.lk_k, ctx.opt.sampling);
    Table t{{"k", "r", "h", "star_norm"}, {}};
    for (const auto& e : sweep.entries) t.add({double(e.k), e.r, e.h, e.norm.value});
    bt::io::write_file(ctx.out / "lk_decay.csv", t.csv());
    bt::io::write_json(ctx.out / "lk_decay.json", bt::io::to_json(sweep));
    std::printf("slope = %s  bound exponent = %s\n", fmt(sweep.slope).c_str(), fmt(sweep.bound_exponent).c_str());
}

void cmd_pohozaev(const Context& ctx)
{
    ctx.model.validate();
    Table t{{"j", "cells", "spacing", "residual", "ratio"}, {}};
    Json dirs = Json::array();
    for (int j : ctx.opt.pohozaev_directions) {
        const auto rows = bt::manufactured_convergence(ctx.model, ctx.opt.pohozaev_cells, j, ctx.opt.pohozaev_half);
        Json levels = Json::array();
        for (const auto& r : rows) {
            t.add({double(j), double(r.cells), r.spacing, r.residual, r.ratio});
            levels.push_back(bt::io::to_json(r));
            std::printf("j = %d  cells = %4d  residual = %s  ratio = %s\n", j, r.cells, fmt(r.residual).c_str(),
                        fmt(r.ratio).c_str());
        }
        dirs.push_back({{"j", j}, {"levels", levels}});
    }
    bt::io::write_file(ctx.out / "pohozaev.csv", t.csv());

    Json boundary = Json::array();
    if (ctx.model.N == 3) {
        const auto prof = ctx.profile();
        const auto c = bt::compute_coefficients(prof, ctx.model.a1, ctx.opt.coeffs);
        for (int k : ctx.k_list("pohozaev", {14, 16, 20, 32})) {
            const auto cp = bt::find_critical_point(c, ctx.model, k);
            const bt::TowerConfig cfg{k, cp.r_star, cp.h_star, 3};
            const auto est = bt::bubble_pair_boundary_estimates(prof, cfg, {}, 1);
            boundary.push_back({{"k", k}, {"estimate", bt::io::to_json(est)}});
        }
    }
    bt::io::write_json(ctx.out / "pohozaev.json", Json{{"directions", dirs}, {"boundary_estimates", boundary}});
}

void cmd_spectrum(const Context& ctx)
{
    ctx.model.validate();
    const auto prof = ctx.profile();
    const auto v = bt::nondegeneracy_check(prof, ctx.opt.spectral_grid, ctx.opt.spectrum);
    Table t{{"ell", "lambda0", "lambda1", "lambda2", "lambda3", "negative_count", "alignment"}, {}};
    std::printf("%3s %22s %22s %22s %22s %4s %10s\n", "l", "lambda0", "lambda1", "lambda2", "lambda3", "neg",
                "align");
    for (const auto& s : v.sectors) {
        t.add({double(s.ell), s.eigenvalues[0], s.eigenvalues[1], s.eigenvalues[2], s.eigenvalues[3],
               double(s.negative_count), s.zero_mode_alignment});
        std::printf("%3d %22s %22s %22s %22s %4d %10s\n", s.ell, fmt(s.eigenvalues[0]).c_str(),
                    fmt(s.eigenvalues[1]).c_str(), fmt(s.eigenvalues[2]).c_str(), fmt(s.eigenvalues[3]).c_str(),
                    s.negative_count, std::isnan(s.zero_mode_alignment) ? "-" : fmt(s.zero_mode_alignment).c_str());
    }
    std::printf("verdict: %s\n", v.message.c_str());
    bt::io::write_file(ctx.out / "spectrum.csv", t.csv());
    bt::io::write_file(ctx.out / "spectrum_mode_l1.csv", bt::io::mode_table(v.sectors[1]).csv());
    bt::io::write_json(ctx.out / "spectrum.json", bt::io::to_json(v));
}

void cmd_toy_tower(const Context& ctx)
{
    const double p = ctx.cfg.get_double("toy-tower", "p", ctx.model.p);
    const auto fit = bt::toy_tower_decay(p, ctx.opt.separations, ctx.opt.toy_grid, ctx.opt.spectrum);
    Table t{{"d", "smallest", "second"}, {}};
    Json classes = Json::array();
    for (std::size_t i = 0; i < fit.separations.size(); ++i) {
        const double d = fit.separations[i];
        t.add({d, fit.smallest[i], fit.second[i]});
        const auto reps = bt::toy_tower_spectrum_1d(p, {-0.5 * d, 0.5 * d}, ctx.opt.toy_grid, ctx.opt.spectrum);
        classes.push_back({{"d", d}, {"even", bt::io::to_json(reps[0])}, {"odd", bt::io::to_json(reps[1])}});
    }
    bt::io::write_file(ctx.out / "toy_tower.csv", t.csv());
    Json j = bt::io::to_json(fit);
    j["p"] = p;
    j["classes"] = classes;
    bt::io::write_json(ctx.out / "toy_tower.json", j);
    std::printf("slopes %s %s  R^2 %s %s\n", fmt(fit.slope_smallest).c_str(), fmt(fit.slope_second).c_str(),
                fmt(fit.r2_smallest).c_str(), fmt(fit.r2_second).c_str());
}

void cmd_report(const Context& ctx)
{
    const auto m = bt::pipeline::collect(ctx.model, ctx.opt);
    bt::io::write_json(ctx.out / "summary.json", bt::pipeline::to_json(m));
    std::printf("summary written to %s\n", (ctx.out / "summary.json").string().c_str());
}

fs::path resolve_out(const std::optional<std::string>& flag, const bt::Config& cfg)
{
    if (flag) return *flag;
    if (const char* env = std::getenv("BUBBLE_TOWER_OUT"); env && *env) return env;
    if (auto v = cfg.get("output", "dir")) return *v;
    return "out";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Ground states, reduced energies and spectral checks for double-tower configurations"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<int> N;
    std::optional<double> p, a1, a2, m, tau;
    std::vector<std::string> overrides;
    app.add_option("-c,--config", config_path, "Configuration file");
    app.add_option("-o,--out", out_dir, "Output directory (overrides BUBBLE_TOWER_OUT)");
    app.add_option("--N", N, "Dimension");
    app.add_option("--p", p, "Exponent");
    app.add_option("--a1", a1, "Potential coefficient a1");
    app.add_option("--a2", a2, "Potential coefficient a2");
    app.add_option("--m", m, "Potential decay exponent");
    app.add_option("--tau", tau, "Star norm weight exponent");
    app.add_option("--set", overrides, "Override a config entry, section.key=value");

    const std::map<std::string, std::pair<std::string, void (*)(const Context&)>> commands{
        {"profile", {"Ground-state profile CSV and JSON sidecar", cmd_profile}},
        {"coeffs", {"Interaction coefficients A1, A2, B1", cmd_coeffs}},
        {"landscape", {"Reduced energy on the admissible rectangle", cmd_landscape}},
        {"critical-point", {"Critical configurations over a k sweep", cmd_critical_point}},
        {"balance", {"Force balance ratios at critical points", cmd_balance}},
        {"scaling", {"Scaling relations and interaction derivative", cmd_scaling}},
        {"lk-decay", {"Star norm of the residual over a k sweep", cmd_lk_decay}},
        {"pohozaev", {"Identity residual convergence and boundary estimates", cmd_pohozaev}},
        {"spectrum", {"Sector spectra of the linearized operator", cmd_spectrum}},
        {"toy-tower", {"Two-soliton near-kernel decay", cmd_toy_tower}},
        {"report", {"Full pipeline summary JSON", cmd_report}},
    };
    for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    Context ctx;
    try {
        if (!config_path.empty()) ctx.cfg = bt::Config::load(config_path);
        for (const auto& o : overrides) {
            const auto eq = o.find('=');
            const auto dot = o.rfind('.', eq);
            if (eq == std::string::npos || dot == std::string::npos) {
                throw bt::Error(bt::Errc::invalid_parameter, "--set expects section.key=value, got '" + o + "'");
            }
            ctx.cfg.set(o.substr(0, dot), o.substr(dot + 1, eq - dot - 1), o.substr(eq + 1));
        }
        ctx.model = bt::ModelParams::from_config(ctx.cfg, "model");
        if (N) ctx.model.N = *N;
        if (p) ctx.model.p = *p;
        if (a1) ctx.model.a1 = *a1;
        if (a2) ctx.model.a2 = *a2;
        if (m) ctx.model.m = *m;
        if (tau) ctx.model.tau = *tau;
        ctx.model.validate();
        ctx.opt = bt::pipeline::Options::from_config(ctx.cfg);
        ctx.out = resolve_out(out_dir, ctx.cfg);
        ctx.command = app.get_subcommands().front()->get_name();
        commands.at(ctx.command).second(ctx);
        ctx.write_record();
    } catch (const bt::Error& e) {
        std::fprintf(stderr, "error (%s): %s\n",
                     e.category() == bt::ErrorCategory::config      ? "config"
                     : e.category() == bt::ErrorCategory::numerical ? "numerical"
                                                                    : "io",
                     e.what());
        return e.exit_status();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
