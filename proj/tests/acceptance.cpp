// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Runs the full pipeline on configs/default.cfg.

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "bubble_tower/bubble_tower.hpp"
#include "pipeline.hpp"

namespace bt = bubble_tower;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void verdict(int n, bool ok, const std::string& detail)
{
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", n, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool run_report(const fs::path& dir)
{
    const std::string cmd = std::string("'") + BUBBLE_TOWER_CLI + "' -c '" + BUBBLE_TOWER_CONFIG + "' -o '" +
                            dir.string() + "' report > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
}

} // namespace

int main()
{
    try {
        const auto cfg = bt::Config::load(BUBBLE_TOWER_CONFIG);
        auto mp = bt::ModelParams::from_config(cfg, "model");
        const auto opt = bt::pipeline::Options::from_config(cfg);
        const auto m = bt::pipeline::collect(mp, opt);

        // 1
        {
            bool ok = m.closed_form_seconds < 1.0;
            std::string d;
            for (const auto& c : m.closed_form) {
                const double eu = std::abs(c.U0 - c.U0_exact), ec = std::abs(c.C0 / c.C0_exact - 1.0);
                ok = ok && eu <= 1e-6 && ec <= 1e-5;
                d += fmt("p=%g |dU0|=%.2e C0 rel=%.2e; ", c.p, eu, ec);
            }
            verdict(1, ok, d + fmt("%.3f s", m.closed_form_seconds));
        }
        // 2
        verdict(2, m.plateau_variation <= 0.005,
                fmt("plateau variation %.3e on [%.2f, r_max], C0=%.10g", m.plateau_variation, m.r_match, m.C0));
        // 3
        {
            const double e1 = std::abs(m.coeffs_1d.A1 - 4.0);
            const double eb = std::abs(m.B1_polar_2d / m.B1_cartesian_2d - 1.0);
            verdict(3, e1 <= 1e-6 && m.refinement_change < 1e-5 && eb <= 1e-3,
                    fmt("|A1(N=1)-4|=%.2e, refinement %.2e, B1 polar/Cartesian %.2e", e1, m.refinement_change, eb));
        }
        // 4
        verdict(4, m.gradient.worst() <= 1e-6 && m.gradient_seconds < 1.0,
                fmt("%d samples, worst relative error %.2e (r %.2e, h %.2e), %.3f s", m.gradient.samples,
                    m.gradient.worst(), m.gradient.max_rel_error_r, m.gradient.max_rel_error_h, m.gradient_seconds));
        // 5
        {
            const auto& t = m.trend;
            std::string d;
            for (const auto& row : t.rows) {
                d += fmt("k=%d r*/(k ln k)=%.6f h*k=%.6f; ", row.k, row.r_scaled, row.h_scaled);
            }
            const bool ok = t.monotone_approach() && t.max_grad_residual() <= 1e-8 && t.signs_ok() &&
                            m.trend_seconds < 5.0;
            verdict(5, ok,
                    d + fmt("limits %.6f, %.6f; residual %.2e; signs %s; %.3f s", t.r_limit, t.h_limit,
                            t.max_grad_residual(), t.signs_ok() ? "ok" : "broken", m.trend_seconds));
        }
        // 6
        {
            std::string d;
            for (const auto& row : m.trend.rows) {
                d += fmt("k=%d (%.3g, %.3g, growth %.3g); ", row.k, row.scaling.neighbor_ratio,
                         row.scaling.layer_ratio, row.scaling.growth_factor);
            }
            verdict(6, m.trend.scaling_in_band() && m.trend.growth_increasing(), d + "band [0.1, 10]");
        }
        // 7
        {
            const double limit = 0.9 * m.lk.bound_exponent;
            verdict(7, m.lk.slope <= limit && m.lk_seconds < 30.0,
                    fmt("slope %.3f (stderr %.3f) vs limit %.3f, %.2f s", m.lk.slope, m.lk.slope_stderr, limit,
                        m.lk_seconds));
        }
        // 8
        {
            bool ok = !m.pohozaev.empty();
            std::string d;
            for (const auto& dir : m.pohozaev) {
                d += fmt("j=%d ratios", dir.j);
                for (std::size_t i = 1; i < dir.rows.size(); ++i) {
                    ok = ok && dir.rows[i].ratio >= 3.5 && dir.rows[i].ratio <= 4.5;
                    d += fmt(" %.3f", dir.rows[i].ratio);
                }
                ok = ok && dir.rows.size() >= 3 && dir.seconds < 20.0;
                d += fmt(" (%.1f s); ", dir.seconds);
            }
            verdict(8, ok, d);
        }
        // 9
        {
            const auto& v = m.spectrum;
            const auto& s0 = v.sectors.at(0);
            const auto& s1 = v.sectors.at(1);
            bool radial_gap = true;
            for (double e : s0.eigenvalues)
                if (e >= -1e-4 && std::abs(e) < 1e-3) radial_gap = false;
            const bool ok = v.pass && std::abs(s1.eigenvalues[0]) <= 1e-6 && s1.zero_mode_alignment >= 0.999 &&
                            s0.negative_count == 1 && radial_gap && m.spectrum_seconds < 10.0;
            std::string d = fmt("l=1 lowest %.2e alignment %.6f; l=0 negatives %d; lowest l=2..4", s1.eigenvalues[0],
                                s1.zero_mode_alignment, s0.negative_count);
            for (int l = 2; l <= 4; ++l) d += fmt(" %.5f", v.sectors.at(l).eigenvalues[0]);
            verdict(9, ok, d + fmt("; %s; %.2f s", v.message.c_str(), m.spectrum_seconds));
        }
        // 10
        {
            const auto& rows = m.derivative.rows;
            const bool first_ok = !rows.empty() && rows.front().k == 50 &&
                                  std::abs(rows.front().derivative.ratio - 1.0) <= 0.25;
            std::string d;
            for (const auto& row : rows) d += fmt("k=%d %.4f; ", row.k, row.derivative.ratio);
            verdict(10, first_ok && m.derivative.derivative_tightening() && m.derivative.max_companion() <= 1e-12,
                    d + fmt("companion %.1e", m.derivative.max_companion()));
        }
        // 11
        {
            const double var = m.trend.balance_variation();
            std::string d;
            for (const auto& row : m.trend.rows) {
                d += fmt("k=%d (m+1)/2: %.4f, %.4f | m: %.4f, %.4f; ", row.k, row.balance_half.neighbor,
                         row.balance_half.layer, row.balance_m.neighbor, row.balance_m.layer);
            }
            verdict(11, m.trend.balance_order_one() && var < 0.5, d + fmt("variation %.4f", var));
        }
        // 12
        verdict(12, m.toy.r2_smallest >= 0.98 && m.toy.r2_second >= 0.98,
                fmt("slopes %.4f, %.4f; R^2 %.6f, %.6f", m.toy.slope_smallest, m.toy.slope_second, m.toy.r2_smallest,
                    m.toy.r2_second));
        // 13
        {
            const auto base = fs::temp_directory_path() / ("bubble_tower_acceptance_" + std::to_string(::getpid()));
            fs::remove_all(base);
            const bool ran = run_report(base / "a") && run_report(base / "b");
            bool same = ran;
            std::size_t files = 0;
            if (ran) {
                for (const auto& entry : fs::directory_iterator(base / "a")) {
                    const auto other = base / "b" / entry.path().filename();
                    same = same && fs::exists(other) && slurp(entry.path()) == slurp(other);
                    ++files;
                }
                same = same && files > 0;
            }
            fs::remove_all(base);
            verdict(13, same, ran ? fmt("%zu report artifacts compared byte for byte", files) : "report run failed");
        }
    } catch (const bt::Error& e) {
        std::printf("[FAIL] pipeline error: %s\n", e.what());
        return 1;
    }
    return failures ? 1 : 0;
}
