#ifndef BUBBLE_TOWER_TOOLS_PIPELINE_HPP
#define BUBBLE_TOWER_TOOLS_PIPELINE_HPP

// Full verification pipeline: the metrics behind every acceptance criterion.
// Shared by the `report` subcommand and the acceptance binary.

#include <chrono>
#include <string>
#include <vector>

#include "bubble_tower/bubble_tower.hpp"
#include "bubble_tower/checks.hpp"
#include "bubble_tower/io.hpp"

namespace bubble_tower::pipeline {

inline std::vector<int> to_ints(const std::vector<double>& v)
{
    std::vector<int> out;
    for (double x : v) {
        if (x != std::floor(x) || x < 1 || x > 2e9) throw Error(Errc::invalid_parameter, "expected positive integers");
        out.push_back(static_cast<int>(x));
    }
    return out;
}

struct Options
{
    ProfileOptions profile;
    double profile_tol = 1e-13;
    CoefficientOptions coeffs;
    std::vector<int> trend_k{1000, 10000, 100000, 1000000};
    std::vector<int> derivative_k{50, 100, 1000, 10000, 100000, 1000000};
    std::vector<int> lk_k{8, 16, 32, 64};
    StarSampling sampling;
    std::vector<int> pohozaev_cells{64, 128, 256};
    std::vector<int> pohozaev_directions{1, 2, 3};
    double pohozaev_half = 2.0;
    SpectralGrid spectral_grid;
    SpectrumOptions spectrum;
    ToyGrid toy_grid;
    std::vector<double> separations{4, 6, 8, 10};
    int gradient_samples = 100;
    unsigned long gradient_seed = 20240601;

    /// Reads the per-command sections used by the individual subcommands.
    static Options from_config(const Config& cfg)
    {
        Options o;
        o.profile.r_max = cfg.get_double("profile", "r_max", o.profile.r_max);
        o.profile.dr = cfg.get_double("profile", "dr", o.profile.dr);
        o.profile.s_hi = cfg.get_double("profile", "s_hi", o.profile.s_hi);
        o.profile_tol = cfg.get_double("profile", "tol", o.profile_tol);
        o.coeffs.panels = cfg.get_int("coeffs", "panels", o.coeffs.panels);
        o.coeffs.order = cfg.get_int("coeffs", "order", o.coeffs.order);
        o.coeffs.tail_panels = cfg.get_int("coeffs", "tail_panels", o.coeffs.tail_panels);
        o.coeffs.angular_panels = cfg.get_int("coeffs", "angular_panels", o.coeffs.angular_panels);
        o.trend_k = to_ints(cfg.get_list("critical-point", "k_list", {o.trend_k.begin(), o.trend_k.end()}));
        o.derivative_k = to_ints(cfg.get_list("scaling", "derivative_k_list", {o.derivative_k.begin(), o.derivative_k.end()}));
        o.lk_k = to_ints(cfg.get_list("lk-decay", "k_list", {o.lk_k.begin(), o.lk_k.end()}));
        o.sampling.ray_points = cfg.get_int("lk-decay", "ray_points", o.sampling.ray_points);
        o.sampling.ray_half_length = cfg.get_double("lk-decay", "ray_half_length", o.sampling.ray_half_length);
        o.sampling.segment_points = cfg.get_int("lk-decay", "segment_points", o.sampling.segment_points);
        o.sampling.fill_per_center = cfg.get_int("lk-decay", "fill_per_center", o.sampling.fill_per_center);
        o.sampling.global_fill = cfg.get_int("lk-decay", "global_fill", o.sampling.global_fill);
        o.sampling.seed = static_cast<unsigned>(cfg.get_int("lk-decay", "seed", static_cast<int>(o.sampling.seed)));
        o.pohozaev_cells = to_ints(cfg.get_list("pohozaev", "cells", {o.pohozaev_cells.begin(), o.pohozaev_cells.end()}));
        o.pohozaev_directions = to_ints(
            cfg.get_list("pohozaev", "directions", {o.pohozaev_directions.begin(), o.pohozaev_directions.end()}));
        o.pohozaev_half = cfg.get_double("pohozaev", "half", o.pohozaev_half);
        o.spectral_grid.r_max = cfg.get_double("spectrum", "r_max", o.spectral_grid.r_max);
        o.spectral_grid.spacing = cfg.get_double("spectrum", "spacing", o.spectral_grid.spacing);
        o.spectrum.count = static_cast<std::size_t>(cfg.get_int("spectrum", "count", int(o.spectrum.count)));
        o.spectrum.potential_scale = cfg.get_double("spectrum", "potential_scale", o.spectrum.potential_scale);
        o.toy_grid.padding = cfg.get_double("toy-tower", "padding", o.toy_grid.padding);
        o.toy_grid.spacing = cfg.get_double("toy-tower", "spacing", o.toy_grid.spacing);
        o.separations = cfg.get_list("toy-tower", "separations", o.separations);
        o.gradient_samples = cfg.get_int("report", "gradient_samples", o.gradient_samples);
        o.gradient_seed = static_cast<unsigned long>(cfg.get_int("report", "seed", static_cast<int>(o.gradient_seed)));
        if (o.spectrum.count < 4) throw Error(Errc::invalid_parameter, "spectrum count must be >= 4");
        return o;
    }
};

class Stopwatch
{
  public:
    double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  private:
    using Clock = std::chrono::steady_clock;
    Clock::time_point start_ = Clock::now();
};

struct ClosedFormCase
{
    double p = 0.0;
    double U0 = 0.0;
    double U0_exact = 0.0;
    double C0 = 0.0;
    double C0_exact = 0.0;
};

struct PohozaevDirection
{
    int j = 0;
    std::vector<ConvergenceRow> rows;
    double seconds = 0.0;
};

/// Runtimes are kept out of the JSON so that the summary is reproducible.
struct Metrics
{
    ModelParams model;
    std::vector<ClosedFormCase> closed_form;
    double closed_form_seconds = 0.0;

    double plateau_variation = 0.0;
    double r_match = 0.0;
    double C0 = 0.0;

    CoefficientSet coeffs;
    CoefficientSet coeffs_1d;
    double refinement_change = 0.0;
    double B1_polar_2d = 0.0;
    double B1_cartesian_2d = 0.0;

    GradientCheck gradient;
    double gradient_seconds = 0.0;

    TowerSweep trend;
    double trend_seconds = 0.0;
    TowerSweep derivative;

    LkSweep lk;
    double lk_seconds = 0.0;

    std::vector<PohozaevDirection> pohozaev;

    NondegeneracyVerdict spectrum;
    double spectrum_seconds = 0.0;

    ToyDecayFit toy;
};

inline Metrics collect(const ModelParams& mp, const Options& opt)
{
    mp.validate_tower();
    Metrics m;
    m.model = mp;

    {
        Stopwatch sw;
        for (double p : {3.0, 2.0}) {
            const auto prof = solve_ground_state(1, p, opt.profile_tol, opt.profile);
            ClosedFormCase c;
            c.p = p;
            c.U0 = prof.U.front();
            c.U0_exact = soliton_1d(p, 0.0);
            c.C0 = decay_constant(prof);
            // sech z ~ 2e^{-z}, so U(x) e^x tends to U(0) 2^{2/(p-1)}.
            c.C0_exact = c.U0_exact * std::pow(2.0, 2.0 / (p - 1.0));
            m.closed_form.push_back(c);
        }
        m.closed_form_seconds = sw.seconds();
    }

    const auto prof = solve_ground_state(mp.N, mp.p, opt.profile_tol, opt.profile);
    m.plateau_variation = prof.plateau_variation();
    m.r_match = prof.r_match;
    m.C0 = decay_constant(prof);

    m.coeffs = compute_coefficients(prof, mp.a1, opt.coeffs);
    const auto prof1 = solve_ground_state(1, 3.0, opt.profile_tol, opt.profile);
    m.coeffs_1d = compute_coefficients(prof1, 1.0, opt.coeffs);
    const auto prof2 = solve_ground_state(2, 3.0, opt.profile_tol, opt.profile);
    m.B1_polar_2d = compute_B1(prof2, opt.coeffs);
    m.B1_cartesian_2d = cartesian_B1(prof2);
    m.refinement_change = std::max({coefficient_refinement_change(prof, mp.a1, opt.coeffs),
                                    coefficient_refinement_change(prof1, 1.0, opt.coeffs),
                                    coefficient_refinement_change(prof2, 1.0, opt.coeffs)});

    {
        Stopwatch sw;
        m.gradient = gradient_fd_check(m.coeffs, mp, opt.gradient_samples, opt.gradient_seed);
        m.gradient_seconds = sw.seconds();
    }
    {
        Stopwatch sw;
        m.trend = tower_sweep(prof, m.coeffs, mp, opt.trend_k);
        m.trend_seconds = sw.seconds();
    }
    m.derivative = tower_sweep(prof, m.coeffs, mp, opt.derivative_k);
    {
        Stopwatch sw;
        m.lk = lk_decay_sweep(prof, m.coeffs, mp, opt.lk_k, opt.sampling);
        m.lk_seconds = sw.seconds();
    }
    for (int j : opt.pohozaev_directions) {
        Stopwatch sw;
        PohozaevDirection d;
        d.j = j;
        d.rows = manufactured_convergence(mp, opt.pohozaev_cells, j, opt.pohozaev_half);
        d.seconds = sw.seconds();
        m.pohozaev.push_back(std::move(d));
    }
    {
        Stopwatch sw;
        m.spectrum = nondegeneracy_check(prof, opt.spectral_grid, opt.spectrum);
        m.spectrum_seconds = sw.seconds();
    }
    m.toy = toy_tower_decay(mp.p, opt.separations, opt.toy_grid, opt.spectrum);
    return m;
}

inline io::Json sweep_rows(const TowerSweep& s)
{
    io::Json rows = io::Json::array();
    for (const auto& r : s.rows) {
        rows.push_back({{"k", r.k},
                        {"r_star", r.critical.r_star},
                        {"h_star", r.critical.h_star},
                        {"r_over_k_log_k", r.r_scaled},
                        {"h_times_k", r.h_scaled},
                        {"grad_residual", r.critical.grad_residual},
                        {"boundary_signs_ok", r.critical.signs.ok()},
                        {"balance_half_m_plus_one", io::to_json(r.balance_half)},
                        {"balance_m", io::to_json(r.balance_m)},
                        {"scaling", io::to_json(r.scaling)},
                        {"interaction_derivative", io::to_json(r.derivative)}});
    }
    return rows;
}

inline io::Json to_json(const Metrics& m)
{
    using io::Json;
    using io::number;
    Json closed = Json::array();
    for (const auto& c : m.closed_form) {
        closed.push_back({{"p", c.p},
                          {"U0", c.U0},
                          {"U0_exact", c.U0_exact},
                          {"U0_error", std::abs(c.U0 - c.U0_exact)},
                          {"C0", c.C0},
                          {"C0_exact", c.C0_exact},
                          {"C0_rel_error", std::abs(c.C0 / c.C0_exact - 1.0)}});
    }
    Json poh = Json::array();
    for (const auto& d : m.pohozaev) {
        Json rows = Json::array();
        for (const auto& r : d.rows) rows.push_back(io::to_json(r));
        poh.push_back({{"j", d.j}, {"levels", rows}});
    }
    Json out;
    out["model"] = io::to_json(m.model);
    out["profile_exactness"] = {{"N", 1}, {"cases", closed}};
    out["decay_law"] = {{"N", m.model.N},
                        {"p", m.model.p},
                        {"C0", m.C0},
                        {"r_match", m.r_match},
                        {"plateau_variation", m.plateau_variation}};
    out["coefficients"] = {{"main", io::to_json(m.coeffs)},
                           {"one_dimensional", io::to_json(m.coeffs_1d)},
                           {"refinement_change", m.refinement_change},
                           {"B1_two_dimensional_polar", m.B1_polar_2d},
                           {"B1_two_dimensional_cartesian", m.B1_cartesian_2d},
                           {"B1_oracle_rel_difference", std::abs(m.B1_polar_2d / m.B1_cartesian_2d - 1.0)}};
    out["energy_gradient"] = {{"samples", m.gradient.samples},
                              {"max_rel_error_r", m.gradient.max_rel_error_r},
                              {"max_rel_error_h", m.gradient.max_rel_error_h}};
    out["critical_trend"] = {{"r_limit", m.trend.r_limit},
                             {"h_limit", m.trend.h_limit},
                             {"monotone_approach", m.trend.monotone_approach()},
                             {"max_grad_residual", m.trend.max_grad_residual()},
                             {"boundary_signs_ok", m.trend.signs_ok()},
                             {"rows", sweep_rows(m.trend)}};
    out["scaling_relations"] = {{"in_band", m.trend.scaling_in_band()},
                                {"growth_increasing", m.trend.growth_increasing()}};
    out["residual_decay"] = io::to_json(m.lk);
    out["residual_decay"]["slope_limit"] = 0.9 * m.lk.bound_exponent;
    out["pohozaev"] = poh;
    out["nondegeneracy"] = io::to_json(m.spectrum);
    out["interaction_derivative"] = {{"tightening", m.derivative.derivative_tightening()},
                                     {"max_companion", m.derivative.max_companion()},
                                     {"rows", sweep_rows(m.derivative)}};
    out["balance"] = {{"order_one", m.trend.balance_order_one()},
                      {"variation", number(m.trend.balance_variation())}};
    out["toy_tower"] = io::to_json(m.toy);
    return out;
}

} // namespace bubble_tower::pipeline

#endif
