// Acceptance suite: every release criterion at its stated tolerance, one
// pass/fail line per criterion.  Exit code 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "landis/bessel.hpp"
#include "landis/bessel_audit.hpp"
#include "landis/carleman.hpp"
#include "landis/elliptic.hpp"
#include "landis/heat.hpp"
#include "landis/lattice.hpp"
#include "landis/report.hpp"
#include "landis/weights.hpp"

namespace fs = std::filesystem;
namespace lat = landis::lattice;
namespace heat = landis::heat;
namespace wt = landis::weights;
namespace cl = landis::carleman;
namespace el = landis::elliptic;

namespace {

int g_failures = 0;

struct Criterion {
    const char* label;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;

    explicit Criterion(const char* l) : label(l) {}
    void check(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    ~Criterion() {
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %-58s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", label, secs,
                    detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++g_failures;
    }
};

std::string num(double x) { return landis::report::fmt(x); }

lat::LatticeField random_smooth_field(const lat::LatticeBox& box, std::mt19937_64& rng) {
    auto pm1 = [&rng] { return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0; };
    lat::LatticeField f(box);
    const double half = box.extent * box.h * 0.5;
    for (int bump = 0; bump < 4; ++bump) {
        const double c = half * pm1(), a = pm1(), w = 0.5 + 0.5 * std::fabs(pm1());
        lat::detail::for_each_site(box, [&](std::size_t i, const std::array<int, 3>& j) {
            double r2 = 0.0;
            for (int k = 0; k < box.d; ++k) r2 += (j[k] * box.h - c) * (j[k] * box.h - c);
            f.values[i] += a * std::exp(-r2 / (w * w));
        });
    }
    return f;
}

// 1. Appendix inequality margins and the Wronskian oracle.
void criterion_bessel() {
    Criterion c("1. bessel audit: inequality margins + wronskian");
    std::vector<int> orders;
    for (int n = -20; n <= 20; ++n) orders.push_back(n);
    const auto rep =
        landis::bessel_audit::audit_appendix_b(orders, {0.1, 1.0, 10.0, 1e3, 1e6});
    for (const auto& row : rep.rows) {
        c.check(row.min_margin >= -1e-8, row.name + " margin " + num(row.min_margin));
        if (row.strict)
            c.check(row.min_margin > -1e-10, row.name + " strict " + num(row.min_margin));
    }
    std::vector<int> worders;
    for (int n = 0; n <= 12; ++n) worders.push_back(n);
    const double w = landis::bessel_audit::wronskian_worst(worders, {0.2, 1.0, 7.3, 19.0, 50.0});
    c.check(w <= 1e-8, "wronskian " + num(w));
}

// 2. Heat kernel mass conservation and integrator agreement.
void criterion_heat_kernel() {
    Criterion c("2. heat kernel: mass conservation + integrator agreement");
    // kernel mass over d, h
    for (int d : {1, 2}) {
        for (double h : {1.0, 0.25}) {
            const int extent = h == 1.0 ? 24 : (d == 1 ? 120 : 96);
            const lat::LatticeBox box(d, h, extent);
            for (double t : {0.25, 1.0}) {
                const double mass = heat::total_mass(heat::free_kernel_log(box, t, {0, 0, 0}))
                                        .to_linear();
                c.check(std::fabs(mass - 1.0) < 1e-10,
                        "kernel mass d=" + std::to_string(d) + " h=" + num(h) + " t=" +
                            num(t) + ": " + num(std::fabs(mass - 1.0)));
            }
        }
    }
    // integrator vs closed form (and solver mass conservation)
    auto agree = [&](int d, double h, int extent, double dt_max) {
        const lat::LatticeBox box(d, h, extent);
        const heat::HeatProblem p(
            box, [](const std::array<int, 3>&, double) { return 0.0; }, 0.0, true,
            lat::LatticeField::delta(box, {0, 0, 0}), heat::HeatProblem::uniform_grid(9));
        const auto traj = heat::solve(p, heat::HeatMethod::Rk4, dt_max);
        const auto want = heat::free_kernel_log(box, 1.0, {0, 0, 0});
        double worst = 0.0;
        lat::detail::for_each_site(box, [&](std::size_t i, const std::array<int, 3>& j) {
            const double wv = want.values[i].to_linear();
            bool interior = true;
            for (int k = 0; k < d; ++k)
                if (std::abs(j[k]) > extent - 5) interior = false;
            if (wv > 1e-13 && interior)
                worst = std::max(worst,
                                 std::fabs(traj.snapshots.back().values[i] - wv) / wv);
        });
        c.check(worst < 1e-8, "integrator d=" + std::to_string(d) + " h=" + num(h) + ": " +
                                   num(worst));
        const double m = heat::total_mass(traj.snapshots.back());
        c.check(std::fabs(m - 1.0) < 1e-10,
                "solver mass d=" + std::to_string(d) + " h=" + num(h) + ": " +
                    num(std::fabs(m - 1.0)));
    };
    agree(1, 1.0, 24, 1e-3);
    agree(1, 0.25, 120, 6e-5);
    agree(2, 1.0, 20, 5e-4);
}

// 3. Energy estimate and interior regularity on seeded random problems.
void criterion_energy_caccioppoli() {
    Criterion c("3. energy + caccioppoli audits on 20 random problems");
    const lat::LatticeBox box(1, 0.25, 28);
    for (int p = 0; p < 20; ++p) {
        std::mt19937_64 rng(landis::report::derive_seed(2026, p));
        auto pm1 = [&rng] { return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0; };
        std::vector<double> vs(box.site_count());
        for (auto& v : vs) v = pm1();
        auto V = [vs, box](const std::array<int, 3>& j, double) { return vs[box.flat(j)]; };
        const heat::HeatProblem prob(box, V, 1.0, true, random_smooth_field(box, rng),
                                     heat::HeatProblem::uniform_grid(129));
        const auto traj = heat::solve(prob, heat::HeatMethod::Rk4, 1.0);
        const auto energy = heat::audit_energy(traj);
        c.check(energy.min_slack_rel >= -1e-6,
                "energy slack p" + std::to_string(p) + ": " + num(energy.min_slack_rel));
        const auto cc = heat::audit_caccioppoli(traj, 5.0);
        c.check(std::isfinite(cc.c2_hat) && cc.c2_hat >= 0.0,
                "caccioppoli p" + std::to_string(p));
    }
}

// 4. Commutator positivity at delta = 1 and the coefficient lower bound.
void criterion_commutator_positivity() {
    Criterion c("4. commutator positivity (delta=1) + coefficient bound");
    int fields = 0;
    std::uint64_t task = 0;
    for (double gamma : {1.0, 4.0}) {
        for (double h : {0.5, 0.25, 0.1}) {
            const lat::LatticeBox box(1, h, 12);
            const auto spec = wt::WeightSpec::delta_interp(gamma, 1.0, h);
            std::mt19937_64 rng(landis::report::derive_seed(4, task++));
            auto pm1 = [&rng] { return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0; };
            for (int s = 0; s < 167; ++s) {
                lat::LatticeField f(box);
                lat::detail::for_each_site(box,
                                           [&](std::size_t i, const std::array<int, 3>& j) {
                                               if (std::abs(j[0]) <= box.extent - 2)
                                                   f.values[i] = pm1();
                                           });
                const double scale =
                    (4.0 * box.d / std::pow(h, 4)) *
                    (1.0 + h * h / gamma + std::pow(h, 6) / (4.0 * gamma * gamma * gamma)) *
                    std::pow(lat::l2_norm(f), 2);
                const double v = wt::commutator_form(f, spec);
                if (v < -1e-10 * scale)
                    c.check(false, "negative commutator at gamma=" + num(gamma) +
                                       " h=" + num(h) + ": " + num(v / scale));
                ++fields;
            }
        }
    }
    c.check(fields >= 1000, "only " + std::to_string(fields) + " fields sampled");
    // 10 x 10 x 10 grid for the eight-term coefficient bound
    const std::vector<double> js{-20, -10, -5, -2, 0, 1, 3, 5, 10, 20};
    const std::vector<double> xs{0.1, 0.3, 0.7, 1.0, 2.0, 5.0, 10.0, 50.0, 200.0, 1e3};
    const std::vector<double> ds{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    double worst = std::numeric_limits<double>::infinity();
    for (double j : js)
        for (double x : xs)
            for (double dd : ds)
                worst = std::min(worst, wt::lambda_delta((int)j, x, dd) -
                                            wt::lambda_delta_lower_bound(x));
    c.check(worst >= -1e-12, "coefficient bound margin " + num(worst));
}

// 5. Log-convexity of the explicit solution across meshes.
void criterion_logconvexity() {
    Criterion c("5. log-convexity of the explicit solution (V=0)");
    for (double h : {0.5, 0.25, 0.1}) {
        const lat::LatticeBox box(1, h, (int)std::lround(32.0 / h));
        std::vector<double> times;
        std::vector<lat::LogField> frames;
        for (int i = 0; i <= 16; ++i) {
            times.push_back(i / 16.0);
            frames.push_back(heat::example_solution(box, times.back()));
        }
        const auto we = wt::weighted_energy(times, frames,
                                            wt::WeightSpec::close_to_continuum(4.0, h, false));
        const auto lc = wt::audit_logconvexity(we, 0.0);
        c.check(!lc.degenerate && lc.n_hat <= 1e-6,
                "h=" + num(h) + " n_hat=" + num(lc.n_hat));
    }
}

// 6. Parabolic commutator piece identities on 50 seeded fields.
void criterion_carleman_pieces() {
    Criterion c("6. parabolic carleman identities on 50 seeded fields");
    cl::CarlemanConfig cfg(2.0 * 16.0, 4.0, 0.125, 1);
    const auto box = cl::carleman_box(cfg);
    double worst_id = 0.0, worst_td = 0.0;
    for (int s = 0; s < 50; ++s) {
        // asserted on the time grid refined once from 4097
        const auto f = cl::sample_in_support_field(cfg, box, 8193,
                                                   landis::report::derive_seed(6, s));
        const auto p = cl::commutator_pieces(cfg, f);
        worst_id = std::max(worst_id, std::fabs(p.III - 2.0 * p.II) / std::fabs(p.III));
        worst_td = std::max(worst_td, std::fabs(p.total - p.direct) / std::fabs(p.total));
    }
    c.check(worst_id <= 1e-8, "identity err " + num(worst_id));
    c.check(worst_td <= 1e-6, "total vs direct " + num(worst_td));
}

// 7. Regime exponent recovery from the explicit solution.
void criterion_regimes() {
    Criterion c("7. regime exponent recovery (lower-bound sweeps)");
    const auto ctc = cl::lower_bound_audit({10, 14, 18, 22, 26, 30, 34, 38}, 0.02, 1, 9);
    c.check(ctc.has_ctc, "no close-to-continuum points");
    c.check(ctc.ctc_fit.r2 >= 0.99, "ctc fit r2 " + num(ctc.ctc_fit.r2));
    c.check(ctc.ctc_exponent.exponent >= 1.9 && ctc.ctc_exponent.exponent <= 2.1,
            "ctc exponent " + num(ctc.ctc_exponent.exponent));
    std::vector<double> slopes;
    for (double h : {0.5, 1.0}) {
        const auto disc = cl::lower_bound_audit(
            {40, 60, 80, 100, 120, 140, 160, 180, 200}, h, 1, 9);
        c.check(disc.has_disc, "no discrete points at h=" + num(h));
        c.check(disc.disc_fit.r2 >= 0.99,
                "disc fit r2 h=" + num(h) + ": " + num(disc.disc_fit.r2));
        slopes.push_back(disc.disc_fit.slope);
    }
    const double stab = std::fabs(slopes[1] - slopes[0]) / std::fabs(slopes[0]);
    c.check(stab <= 0.10, "slope stability " + num(stab));
}

// 8. Upper-bound weight-ratio exponent.
void criterion_upper_ratio() {
    Criterion c("8. upper-bound weight ratio scaling");
    for (double R : {0.5, 1.0, 1.5}) {
        const auto ub = cl::upper_bound_ctc(4.0, R, 0.02, 1, 25.0);
        c.check(ub.ratio_metric >= -1.1 && ub.ratio_metric <= -0.9,
                "R=" + num(R) + " metric " + num(ub.ratio_metric));
    }
}

// 9. Elliptic testbed: residual, recursion, decay trend.
void criterion_elliptic_testbed() {
    Criterion c("9. elliptic J-testbed: residual + recursion + trend");
    const auto p = el::j_testbed(2.0, 210);
    const double resid = lat::sup_norm(el::elliptic_residual(p));
    c.check(resid <= 1e-10, "residual " + num(resid));
    const auto shells = el::shell_extract(p, 151);
    const auto rec = el::uc_recursion_audit(shells);
    c.check(rec.worst_margin >= 0.0,
            "recursion margin " + num(rec.worst_margin) + " at N=" +
                std::to_string(rec.argmin_shell));
    const auto trend = el::j_decay_trend(p, 2.0, 50, 200);
    c.check(std::fabs(trend.slope - 1.0) <= 0.05, "trend slope " + num(trend.slope));
}

// 10. Threshold logic: synthetic decay flagged, genuine solution untouched.
void criterion_threshold_logic() {
    Criterion c("10. forced-decay threshold logic");
    el::ShellData synth;
    synth.h = 1.0;
    synth.d = 1;
    for (int N = 1; N <= 30; ++N) {
        synth.M.push_back(landis::LogScalar(+1, -N * std::log(4.0)));
        synth.q.push_back(0.0);
    }
    const auto v = el::uc_threshold_verdict(synth);
    c.check(v.flagged, "synthetic 4^-N not flagged");
    c.check(v.first_flagged_shell >= 1,
            "N0 = " + std::to_string(v.first_flagged_shell));
    // every shell from N0 on stays below the threshold
    bool all_following = true;
    for (int N = v.first_flagged_shell; N + 1 <= synth.shell_count(); ++N)
        if (!(synth.M[N] < el::uc_threshold(synth, N))) all_following = false;
    c.check(all_following, "flagging not persistent past N0");

    const auto jp = el::j_testbed(2.0, 210);
    const auto shells = el::shell_extract(jp, 160);
    c.check(!el::uc_threshold_verdict(shells).flagged, "genuine solution flagged");
}

// 11. Determinism of the CLI: identical config + seed, identical bytes.
void criterion_determinism(const std::string& cli, const std::string& config_dir) {
    Criterion c("11. byte-identical reruns of the CLI");
    if (cli.empty()) {
        c.check(false, "cli path not provided");
        return;
    }
    const fs::path base = fs::temp_directory_path() / "landis_acceptance";
    fs::remove_all(base);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    // every subcommand, trimmed where the full config would dominate the
    // runtime budget (determinism is representation-level, not size-level)
    struct Run {
        std::string sub, prefix, extra;
    };
    const std::vector<Run> runs = {
        {"bounds-sweep", "bounds_sweep_", ""},
        {"uc-check", "uc_check_", ""},
        {"gaussian-limit", "gaussian_limit_", ""},
        {"bessel-audit", "bessel_audit_", ""},
        {"heat-run", "heat_run_", " problems=3"},
        {"convexity-audit", "convexity_audit_", " commutator.samples=20"},
        {"carleman-audit", "carleman_audit_", " samples=1 time_samples=513 refine=false"},
    };
    for (const auto& r : runs) {
        const fs::path a = base / (r.sub + "_a"), b = base / (r.sub + "_b");
        std::string cfgflag;
        const fs::path cfg = fs::path(config_dir) /
                             (std::string(r.prefix.begin(), r.prefix.end() - 1) + ".toml");
        if (fs::exists(cfg)) cfgflag = " --config " + cfg.string();
        for (const fs::path& out : {a, b}) {
            const std::string cmd = cli + " " + r.sub + cfgflag + " --seed 31337 --out " +
                                    out.string() + r.extra + " >/dev/null 2>&1";
            // complete outputs are written for exit 0 (all green) and 1
            // (contract failure); only validation/internal errors abort
            const int rc = WEXITSTATUS(std::system(cmd.c_str()));
            if (rc != 0 && rc != 1) {
                c.check(false, r.sub + " run failed rc=" + std::to_string(rc));
                return;
            }
        }
        for (const char* kind : {"data.csv", "summary.json"}) {
            const std::string fa = slurp(a / (r.prefix + kind));
            const std::string fb = slurp(b / (r.prefix + kind));
            c.check(!fa.empty() && fa == fb, r.sub + " " + kind + " differs");
        }
    }
    fs::remove_all(base);
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli = LANDIS_CLI_PATH;
    std::string config_dir = LANDIS_CONFIG_DIR;
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string flag = argv[i];
        if (flag == "--cli") cli = argv[i + 1];
        else if (flag == "--configs") config_dir = argv[i + 1];
    }
    criterion_bessel();
    criterion_heat_kernel();
    criterion_energy_caccioppoli();
    criterion_commutator_positivity();
    criterion_logconvexity();
    criterion_carleman_pieces();
    criterion_regimes();
    criterion_upper_ratio();
    criterion_elliptic_testbed();
    criterion_threshold_logic();
    criterion_determinism(cli, config_dir);
    if (g_failures) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all acceptance criteria PASSED\n");
    return 0;
}
