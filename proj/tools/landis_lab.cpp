// landis-lab: batch experiment runner for the lattice Landis laboratory.
// Every audit is exposed as a subcommand reading a TOML config, with CSV
// data plus a JSON summary as machine-readable output.  Exit code 0 iff
// every contract in the invoked audits passed; 1 on contract failure;
// 2 on config validation errors; 3 on internal errors.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "landis/bessel.hpp"
#include "landis/bessel_audit.hpp"
#include "landis/carleman.hpp"
#include "landis/elliptic.hpp"
#include "landis/fit.hpp"
#include "landis/heat.hpp"
#include "landis/lattice.hpp"
#include "landis/report.hpp"
#include "landis/toml.hpp"
#include "landis/weights.hpp"

namespace fs = std::filesystem;
namespace lat = landis::lattice;
namespace heat = landis::heat;
namespace wt = landis::weights;
namespace cl = landis::carleman;
namespace el = landis::elliptic;
namespace rep = landis::report;

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Ctx {
    landis::toml::Table cfg;
    std::uint64_t seed = 12345;
    fs::path out = ".";
};

std::string fmt(double x) { return rep::fmt(x); }

double require_positive(double v, const std::string& what) {
    if (!(v > 0.0)) throw ConfigError(what + " must be positive");
    return v;
}

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

// ---------------------------------------------------------------- bessel-audit

int run_bessel_audit(Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    const int n_lo = (int)cfg.integer("orders.min", -20);
    const int n_hi = (int)cfg.integer("orders.max", 20);
    if (n_lo > n_hi) throw ConfigError("orders.min must not exceed orders.max");
    const auto xs = cfg.numbers("arguments", {0.1, 1.0, 10.0, 1e3, 1e6});
    if (xs.empty()) throw ConfigError("arguments must be nonempty");
    for (double x : xs) require_positive(x, "arguments");
    const auto wxs = cfg.numbers("wronskian.arguments", {0.2, 1.0, 7.3, 19.0, 50.0});
    const int wn = (int)cfg.integer("wronskian.orders_max", 12);
    for (double x : wxs)
        if (x <= 0.0 || x > 50.0) throw ConfigError("wronskian.arguments must lie in (0, 50]");

    std::vector<int> orders;
    for (int n = n_lo; n <= n_hi; ++n) orders.push_back(n);
    const auto audit = landis::bessel_audit::audit_appendix_b(orders, xs);
    std::vector<int> worders;
    for (int n = 0; n <= wn; ++n) worders.push_back(n);
    const double wworst = landis::bessel_audit::wronskian_worst(worders, wxs);

    rep::Csv csv({"inequality", "min_margin", "argmin_order", "argmin_x", "strict"});
    rep::Summary sum("bessel-audit", ctx.seed);
    for (const auto& row : audit.rows) {
        csv.row({row.name, fmt(row.min_margin), std::to_string(row.argmin_order),
                 fmt(row.argmin_x), row.strict ? "1" : "0"});
        sum.add_contract({row.name + "_margin", row.min_margin >= -1e-8, row.min_margin,
                          ">= -1e-8"});
        if (row.strict)
            sum.add_contract({row.name + "_strict", row.min_margin > -1e-10, row.min_margin,
                              "> -1e-10"});
    }
    sum.add_contract({"wronskian_identity", wworst <= 1e-8, wworst, "<= 1e-8 relative"});
    sum.json()["grid"] = {{"orders_min", n_lo}, {"orders_max", n_hi}, {"arguments", xs}};
    csv.write((ctx.out / "bessel_audit_data.csv").string());
    sum.write((ctx.out / "bessel_audit_summary.json").string());
    return sum.all_pass() ? 0 : 1;
}

// ------------------------------------------------------------------- heat-run

int run_heat_run(Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    const int d = (int)cfg.integer("d", 1);
    const double h = require_positive(cfg.number("h", 0.25), "h");
    const int extent = (int)cfg.integer("extent", 24);
    const int samples = (int)cfg.integer("t_samples", 129);
    const int problems = (int)cfg.integer("problems", 1);
    const double dt_max = require_positive(cfg.number("dt_max", 1.0), "dt_max");
    const std::string method_s = cfg.text("method", "rk4");
    const std::string vkind = cfg.text("potential.kind", "random");
    const double vbound = cfg.number("potential.bound", 1.0);
    const std::string ikind = cfg.text("initial.kind", "smooth_random");
    const double kernel_t0 = cfg.number("initial.kernel_t0", 0.2);
    const auto cacc_R = cfg.numbers("caccioppoli_R", {5.0});
    const bool export_snaps = cfg.boolean("export_snapshots", false);
    if (method_s != "rk4" && method_s != "exponential")
        throw ConfigError("method must be rk4 or exponential");
    if (vkind != "random" && vkind != "zero") throw ConfigError("potential.kind invalid");
    if (ikind != "smooth_random" && ikind != "delta" && ikind != "kernel")
        throw ConfigError("initial.kind invalid");
    if (problems < 1) throw ConfigError("problems must be >= 1");
    const lat::LatticeBox box(d, h, extent);
    for (double R : cacc_R)
        if (R + 1.0 >= extent * h) throw ConfigError("caccioppoli_R leaves the box");
    const auto method =
        method_s == "rk4" ? heat::HeatMethod::Rk4 : heat::HeatMethod::Exponential;

    rep::Csv csv({"problem", "seed", "energy_min_slack", "caccioppoli_R", "caccioppoli_c2",
                  "final_mass"});
    rep::Summary sum("heat-run", ctx.seed);
    nlohmann::json manifests = nlohmann::json::array();
    for (int p = 0; p < problems; ++p) {
        const std::uint64_t ps = rep::derive_seed(ctx.seed, p);
        std::mt19937_64 rng(ps);
        auto pm1 = [&rng] { return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0; };
        std::vector<double> vs(box.site_count(), 0.0);
        if (vkind == "random")
            for (auto& v : vs) v = vbound * pm1();
        auto V = [vs, box](const std::array<int, 3>& j, double) { return vs[box.flat(j)]; };
        lat::LatticeField psi;
        if (ikind == "delta") psi = lat::LatticeField::delta(box, {0, 0, 0});
        else if (ikind == "kernel") psi = heat::free_kernel_solution(box, kernel_t0, {0, 0, 0});
        else psi = random_smooth_field(box, rng);
        const heat::HeatProblem prob(box, V, vkind == "zero" ? 0.0 : vbound,
                                     true, psi, heat::HeatProblem::uniform_grid(samples));
        const auto traj = heat::solve(prob, method, dt_max);
        const auto energy = heat::audit_energy(traj);
        sum.add_contract({"energy_slack_p" + std::to_string(p),
                          energy.min_slack_rel >= -1e-6, energy.min_slack_rel,
                          ">= -1e-6 relative"});
        for (double R : cacc_R) {
            const auto cc = heat::audit_caccioppoli(traj, R);
            sum.add_contract({"caccioppoli_finite_p" + std::to_string(p),
                              std::isfinite(cc.c2_hat), cc.c2_hat, "finite"});
            csv.row({std::to_string(p), std::to_string(ps), fmt(energy.min_slack_rel),
                     fmt(R), fmt(cc.c2_hat), fmt(heat::total_mass(traj.snapshots.back()))});
        }
        manifests.push_back({{"problem", p},
                             {"h", h},
                             {"d", d},
                             {"method", method_s},
                             {"t_samples", samples},
                             {"steps", traj.stats.steps},
                             {"max_step_error", traj.stats.max_step_error}});
        if (export_snaps && p == 0) {
            for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
                std::ofstream snap(ctx.out / ("heat_snapshot_" + std::to_string(i) + ".csv"));
                lat::write_csv(snap, traj.snapshots[i]);
            }
            nlohmann::json manifest = manifests.back();
            manifest["t_grid"] = prob.t_grid;
            std::ofstream mf(ctx.out / "heat_trajectory_manifest.json");
            mf << manifest.dump(2) << "\n";
        }
    }
    sum.json()["integrators"] = manifests;
    csv.write((ctx.out / "heat_run_data.csv").string());
    sum.write((ctx.out / "heat_run_summary.json").string());
    return sum.all_pass() ? 0 : 1;
}

// ------------------------------------------------------------ convexity-audit

int run_convexity_audit(Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    const double gamma = require_positive(cfg.number("gamma", 4.0), "gamma");
    const auto h_list = cfg.numbers("h_list", {0.5, 0.25, 0.1});
    const int tsamp = (int)cfg.integer("time_samples", 17);
    const auto cg = cfg.numbers("commutator.gammas", {1.0, 4.0});
    const auto ch = cfg.numbers("commutator.h_list", {0.5, 0.25, 0.1});
    const int csamples = (int)cfg.integer("commutator.samples", 167);
    const int cextent = (int)cfg.integer("commutator.extent", 12);
    const auto lj = cfg.numbers("lambda.j_list", {-20, -10, -5, -2, 0, 1, 3, 5, 10, 20});
    const auto lx = cfg.numbers("lambda.x_list",
                                {0.1, 0.3, 0.7, 1.0, 2.0, 5.0, 10.0, 50.0, 200.0, 1e3});
    const auto ld = cfg.numbers("lambda.delta_list",
                                {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0});
    if (h_list.empty() || cg.empty() || ch.empty()) throw ConfigError("empty grids");
    for (double h : h_list) require_positive(h, "h_list");
    for (double x : lx) require_positive(x, "lambda.x_list");
    for (double dd : ld)
        if (dd <= 0.0 || dd > 1.0) throw ConfigError("lambda.delta_list must lie in (0,1]");

    rep::Csv csv({"kind", "gamma", "h", "extra", "value"});
    rep::Summary sum("convexity-audit", ctx.seed);

    // log-convexity of the explicit solution across meshes
    for (double h : h_list) {
        const lat::LatticeBox box(1, h, (int)std::lround(32.0 / h));
        std::vector<double> times;
        std::vector<lat::LogField> frames;
        for (int i = 0; i < tsamp; ++i) {
            times.push_back((double)i / (tsamp - 1));
            frames.push_back(heat::example_solution(box, times.back()));
        }
        const auto we =
            wt::weighted_energy(times, frames, wt::WeightSpec::close_to_continuum(gamma, h, false));
        const auto lc = wt::audit_logconvexity(we, 0.0);
        csv.row({"logconvexity_nhat", fmt(gamma), fmt(h), "", fmt(lc.n_hat)});
        sum.add_contract({"logconvexity_nhat_h" + fmt(h),
                          !lc.degenerate && lc.n_hat <= 1e-6, lc.n_hat, "<= 1e-6"});
        // time-dependent weighted energy: monotone after removing e^{2tV}
        const auto psi = heat::free_kernel_solution(box, 0.25, {0, 0, 0});
        const heat::HeatProblem prob(
            box, [](const std::array<int, 3>&, double) { return 0.0; }, 0.0, true, psi,
            heat::HeatProblem::uniform_grid(tsamp));
        const auto mono = wt::audit_monotone_energy(
            heat::solve(prob, heat::HeatMethod::Rk4, 1.0),
            wt::WeightSpec::close_to_continuum(gamma, h, true));
        csv.row({"monotonicity_violation", fmt(gamma), fmt(h), "",
                 fmt(mono.worst_violation_rel)});
        sum.add_contract({"monotone_energy_h" + fmt(h), mono.pass(),
                          mono.worst_violation_rel, "<= 1e-8 relative"});
    }

    // commutator positivity at delta = 1 over the (gamma, h) grid
    std::uint64_t task = 0;
    for (double g : cg) {
        for (double h : ch) {
            const lat::LatticeBox box(1, h, cextent);
            const auto spec = wt::WeightSpec::delta_interp(g, 1.0, h);
            double worst = std::numeric_limits<double>::infinity();
            std::mt19937_64 rng(rep::derive_seed(ctx.seed, task++));
            auto pm1 = [&rng] { return 2.0 * ((rng() >> 11) * 0x1.0p-53) - 1.0; };
            for (int s = 0; s < csamples; ++s) {
                lat::LatticeField f(box);
                lat::detail::for_each_site(box, [&](std::size_t i, const std::array<int, 3>& j) {
                    if (std::abs(j[0]) <= box.extent - 2) f.values[i] = pm1();
                });
                const double scale =
                    (4.0 * box.d / std::pow(h, 4)) *
                    (1.0 + h * h / g + std::pow(h, 6) / (4.0 * g * g * g)) *
                    std::pow(lat::l2_norm(f), 2);
                worst = std::min(worst, wt::commutator_form(f, spec) / scale);
            }
            csv.row({"commutator_min_over_scale", fmt(g), fmt(h), "", fmt(worst)});
            sum.add_contract({"commutator_positive_g" + fmt(g) + "_h" + fmt(h),
                              worst >= -1e-10, worst, ">= -1e-10 of scale"});
        }
    }

    // the eight-term coefficient lower bound over the (j, x, delta) grid
    double lworst = std::numeric_limits<double>::infinity();
    double l1min = std::numeric_limits<double>::infinity();
    for (double jj : lj)
        for (double x : lx)
            for (double dd : ld) {
                const double lam = wt::lambda_delta((int)jj, x, dd);
                lworst = std::min(lworst, lam - wt::lambda_delta_lower_bound(x));
                if (dd == 1.0) l1min = std::min(l1min, lam);
            }
    csv.row({"lambda_margin_min", "", "", "", fmt(lworst)});
    csv.row({"lambda_delta1_min", "", "", "", fmt(l1min)});
    sum.add_contract({"lambda_lower_bound", lworst >= -1e-12, lworst, ">= 0 (rounding)"});
    sum.add_contract({"lambda_delta1_positive", l1min > 0.0, l1min, "> 0"});

    csv.write((ctx.out / "convexity_audit_data.csv").string());
    sum.write((ctx.out / "convexity_audit_summary.json").string());
    return sum.all_pass() ? 0 : 1;
}

// ------------------------------------------------------------- carleman-audit

int run_carleman_audit(Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    const std::string variant = cfg.text("variant", "parabolic");
    const double R = cfg.number("R", 10.0);
    const double h = require_positive(cfg.number("h", 0.1), "h");
    const int d = (int)cfg.integer("d", 1);
    const int samples = (int)cfg.integer("samples", 10);
    const int tsamp = (int)cfg.integer("time_samples", 2049);
    const bool refine = cfg.boolean("refine", true);
    const std::string apolicy = cfg.text("alpha.policy", "ratio");
    if (variant != "parabolic" && variant != "elliptic") throw ConfigError("variant invalid");
    if (R < 1.0) throw ConfigError("R must be >= 1");
    if (samples < 1) throw ConfigError("samples must be >= 1");
    double alpha;
    if (apolicy == "fixed") alpha = cfg.number("alpha.value");
    else if (apolicy == "ratio") alpha = cfg.number("alpha.ratio", 2.0) * R * R;
    else if (apolicy == "select") alpha = cl::alpha_select(R, h, d).alpha;
    else throw ConfigError("alpha.policy must be fixed, ratio, or select");

    cl::CarlemanConfig ccfg(alpha, R, h, d);
    rep::Summary sum(variant == "parabolic" ? "carleman-audit" : "carleman-audit-elliptic",
                     ctx.seed);
    rep::Csv csv({"sample", "I", "II", "III", "IV", "total", "direct", "identity_err",
                  "total_vs_direct"});

    if (variant == "elliptic") {
        const auto rep_el = el::audit_carleman_elliptic(ccfg, samples, ctx.seed);
        sum.json()["c_hat"] = rep_el.c_hat;
        sum.json()["min_commutator"] = rep_el.min_commutator;
        sum.add_contract({"c_hat_finite", std::isfinite(rep_el.c_hat) && rep_el.c_hat > 0.0,
                          rep_el.c_hat, "finite positive"});
        sum.add_contract({"commutator_nonnegative", rep_el.min_commutator >= -1e-10,
                          rep_el.min_commutator, ">= -1e-10"});
        sum.write((ctx.out / "carleman_audit_summary.json").string());
        csv.write((ctx.out / "carleman_audit_data.csv").string());
        return sum.all_pass() ? 0 : 1;
    }

    const auto cond = cl::check_carleman_conditions(ccfg);
    sum.json()["conditions"] = {
        {"c_phi", cond.c_phi},
        {"cond_alpha", cond.cond_alpha},
        {"clause", cond.clause == cl::RegimeClause::Small
                       ? "small"
                       : (cond.clause == cl::RegimeClause::Large ? "large" : "gap")},
        {"cond_clause", cond.cond_clause},
        {"mesh_fine_enough", cond.mesh_fine_enough}};

    const auto box = cl::carleman_box(ccfg);
    double worst_id = 0.0, worst_td = 0.0, worst_stab = 0.0;
    for (int s = 0; s < samples; ++s) {
        const std::uint64_t ps = rep::derive_seed(ctx.seed, s);
        const auto f = cl::sample_in_support_field(ccfg, box, tsamp, ps);
        const auto p = cl::commutator_pieces(ccfg, f);
        double id_err, td_err;
        if (refine) {
            const auto f2 = cl::sample_in_support_field(ccfg, box, 2 * tsamp - 1, ps);
            const auto p2 = cl::commutator_pieces(ccfg, f2);
            id_err = std::fabs(p2.III - 2.0 * p2.II) / std::fabs(p2.III);
            td_err = std::fabs(p2.total - p2.direct) / std::fabs(p2.total);
            for (double delta :
                 {std::fabs(p.I - p2.I) / std::fabs(p2.I),
                  std::fabs(p.II - p2.II) / std::fabs(p2.II),
                  std::fabs(p.IV - p2.IV) / std::fabs(p2.IV)})
                worst_stab = std::max(worst_stab, delta);
            csv.row({std::to_string(s), fmt(p2.I), fmt(p2.II), fmt(p2.III), fmt(p2.IV),
                     fmt(p2.total), fmt(p2.direct), fmt(id_err), fmt(td_err)});
        } else {
            id_err = std::fabs(p.III - 2.0 * p.II) / std::fabs(p.III);
            td_err = std::fabs(p.total - p.direct) / std::fabs(p.total);
            csv.row({std::to_string(s), fmt(p.I), fmt(p.II), fmt(p.III), fmt(p.IV),
                     fmt(p.total), fmt(p.direct), fmt(id_err), fmt(td_err)});
        }
        worst_id = std::max(worst_id, id_err);
        worst_td = std::max(worst_td, td_err);
    }
    sum.add_contract({"third_equals_twice_second", worst_id <= 1e-8, worst_id,
                      "<= 1e-8 relative"});
    sum.add_contract({"total_matches_direct", worst_td <= 1e-6, worst_td, "<= 1e-6 relative"});
    if (refine)
        sum.add_contract({"pieces_stable_under_refinement", worst_stab <= 1e-4, worst_stab,
                          "<= 1e-4 relative"});
    if (cond.pass()) {
        const auto ca = cl::audit_carleman_inequality(ccfg, std::min(samples, 5), ctx.seed,
                                                      std::min(tsamp, 129));
        sum.json()["c_hat"] = ca.c_hat;
        sum.add_contract({"c_hat_finite", std::isfinite(ca.c_hat) && ca.c_hat > 0.0,
                          ca.c_hat, "finite positive"});
    }
    csv.write((ctx.out / "carleman_audit_data.csv").string());
    sum.write((ctx.out / "carleman_audit_summary.json").string());
    return sum.all_pass() ? 0 : 1;
}

// --------------------------------------------------------------- bounds-sweep

int run_bounds_sweep(Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    const int d = (int)cfg.integer("d", 1);
    const double gamma = require_positive(cfg.number("gamma", 4.0), "gamma");
    const double mu = require_positive(cfg.number("mu", 1.0 / M_E), "mu");
    const double uh = require_positive(cfg.number("upper_ctc.h", 0.02), "upper_ctc.h");
    const auto uR = cfg.numbers("upper_ctc.R_list", {0.5, 1.0, 1.5});
    const double uM = cfg.number("upper_ctc.M", 25.0);
    const bool disc_enable = cfg.boolean("upper_disc.enable", true);
    const double dh = cfg.number("upper_disc.h", 0.05);
    const double dR = cfg.number("upper_disc.R", 80.0);
    const double lh = require_positive(cfg.number("lower_ctc.h", 0.02), "lower_ctc.h");
    const auto lR = cfg.numbers("lower_ctc.R_list", {10, 14, 18, 22, 26, 30, 34, 38});
    const auto ldh = cfg.numbers("lower_disc.h_list", {0.5, 1.0});
    const auto ldR = cfg.numbers("lower_disc.R_list", {40, 60, 80, 100, 120, 140, 160, 180, 200});
    const int tsamp = (int)cfg.integer("time_samples", 9);
    if (uR.empty() || lR.empty() || ldR.empty() || ldh.empty())
        throw ConfigError("bounds-sweep: empty grids");
    for (double R : lR)
        if (R <= 2.0) throw ConfigError("lower_ctc.R_list needs R > 2");

    rep::Csv csv({"d", "h", "R", "Rh", "regime", "alpha", "quantity", "value"});
    rep::Summary sum("bounds-sweep", ctx.seed);

    // upper bound, close-to-continuum
    for (double R : uR) {
        const auto ub = cl::upper_bound_ctc(gamma, R, uh, d, uM);
        csv.row({std::to_string(d), fmt(uh), fmt(R), fmt(R * uh), "close_to_continuum",
                 fmt(0.0), "upper_ratio_metric", fmt(ub.ratio_metric)});
        sum.add_contract({"upper_ctc_ratio_R" + fmt(R),
                          ub.ratio_metric >= -1.1 * d && ub.ratio_metric <= -0.9 * d,
                          ub.ratio_metric, "in [-1.1 d, -0.9 d]"});
    }
    // upper bound, purely discrete
    if (disc_enable) {
        const auto ub = cl::upper_bound_discrete(mu, dR, dh, d);
        csv.row({std::to_string(d), fmt(dh), fmt(dR), fmt(dR * dh), "purely_discrete",
                 fmt(0.0), "upper_asymptotic_mismatch", fmt(ub.mismatch)});
        sum.add_contract({"upper_disc_asymptotics", ub.mismatch <= 0.1, ub.mismatch,
                          "<= 0.1 of logmag"});
    }

    // lower bound sweeps: close-to-continuum
    const auto ctc = cl::lower_bound_audit(lR, lh, d, tsamp);
    for (const auto& row : ctc.rows) {
        const auto sel = cl::alpha_select(std::max(1.0, row.R), lh, d);
        csv.row({std::to_string(d), fmt(lh), fmt(row.R), fmt(row.Rh), row.regime,
                 fmt(sel.alpha), "log_annulus_mass", fmt(row.log_mass)});
    }
    if (!ctc.has_ctc) throw ConfigError("lower_ctc grid produced no in-regime points");
    sum.json()["ctc_fit"] = {{"slope", ctc.ctc_fit.slope},
                             {"r2", ctc.ctc_fit.r2},
                             {"exponent", ctc.ctc_exponent.exponent},
                             {"exponent_r2", ctc.ctc_exponent.r2}};
    sum.add_contract({"ctc_fit_r2", ctc.ctc_fit.r2 >= 0.99, ctc.ctc_fit.r2, ">= 0.99"});
    sum.add_contract({"ctc_exponent", ctc.ctc_exponent.exponent >= 1.9 &&
                                          ctc.ctc_exponent.exponent <= 2.1,
                      ctc.ctc_exponent.exponent, "in [1.9, 2.1]"});

    // lower bound sweeps: purely discrete, slope stability across meshes
    std::vector<double> slopes;
    for (double hh : ldh) {
        const auto disc = cl::lower_bound_audit(ldR, hh, d, tsamp);
        if (!disc.has_disc) throw ConfigError("lower_disc grid produced no in-regime points");
        for (const auto& row : disc.rows) {
            const auto sel = cl::alpha_select(std::max(1.0, row.R), hh, d);
            csv.row({std::to_string(d), fmt(hh), fmt(row.R), fmt(row.Rh), row.regime,
                     fmt(sel.alpha), "log_annulus_mass", fmt(row.log_mass)});
        }
        slopes.push_back(disc.disc_fit.slope);
        sum.json()["disc_fit_h" + fmt(hh)] = {{"slope", disc.disc_fit.slope},
                                              {"r2", disc.disc_fit.r2}};
        sum.add_contract({"disc_fit_r2_h" + fmt(hh), disc.disc_fit.r2 >= 0.99,
                          disc.disc_fit.r2, ">= 0.99"});
    }
    double stab = 0.0;
    for (double s : slopes)
        stab = std::max(stab, std::fabs(s - slopes.front()) / std::fabs(slopes.front()));
    sum.add_contract({"disc_slope_stability", stab <= 0.10, stab, "<= 10% across meshes"});

    // contradiction threshold from the fitted close-to-continuum decay rate
    const double c_lower = -ctc.ctc_fit.slope;
    const auto gap = cl::landis_gap(gamma, c_lower, d);
    sum.json()["landis_gap"] = {{"gamma", gamma},
                                {"c_lower_empirical", c_lower},
                                {"gamma_star", gap.gamma_star},
                                {"contradiction", gap.contradiction},
                                {"crossing_R", gap.crossing_R},
                                {"verdict", gap.verdict}};
    sum.add_contract({"gamma_star_positive", gap.gamma_star > 0.0, gap.gamma_star, "> 0"});

    csv.write((ctx.out / "bounds_sweep_data.csv").string());
    sum.write((ctx.out / "bounds_sweep_summary.json").string());
    return sum.all_pass() ? 0 : 1;
}

// ------------------------------------------------------------------- uc-check

int run_uc_check(Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    const std::string testbed = cfg.text("testbed", "bessel_j");
    rep::Csv csv({"N", "log_M", "q", "factor", "margin", "log_threshold", "flagged"});
    rep::Summary sum("uc-check", ctx.seed);

    el::ShellData shells;
    bool genuine = false;
    if (testbed == "bessel_j") {
        const double t0 = require_positive(cfg.number("bessel_j.t0", 2.0), "bessel_j.t0");
        const int n_max = (int)cfg.integer("bessel_j.n_max", 210);
        const int n_shells = (int)cfg.integer("shells", 160);
        if (n_shells + 2 > n_max) throw ConfigError("shells must fit under bessel_j.n_max");
        const auto prob = el::j_testbed(t0, n_max);
        const double resid = lat::sup_norm(el::elliptic_residual(prob));
        sum.json()["residual_sup"] = resid;
        sum.add_contract({"residual_gate", resid <= 1e-10, resid, "<= 1e-10"});
        genuine = true;
        shells = el::shell_extract(prob, n_shells);
        const int lo = (int)cfg.integer("trend.n_lo", 50);
        const int hi = (int)cfg.integer("trend.n_hi", 200);
        if (lo >= hi || hi > n_max) throw ConfigError("trend window invalid");
        const auto trend = el::j_decay_trend(prob, t0, lo, hi);
        sum.json()["decay_trend"] = {{"slope", trend.slope}, {"r2", trend.r2}};
        sum.add_contract({"decay_trend_slope", std::fabs(trend.slope - 1.0) <= 0.05,
                          trend.slope, "within 5% of 1"});
    } else if (testbed == "synthetic") {
        const double base = cfg.number("synthetic.base", 4.0);
        const int count = (int)cfg.integer("synthetic.count", 30);
        if (base <= 1.0) throw ConfigError("synthetic.base must exceed 1");
        if (count < 2) throw ConfigError("synthetic.count must be >= 2");
        shells.h = 1.0;
        shells.d = (int)cfg.integer("d", 1);
        for (int N = 1; N <= count; ++N) {
            shells.M.push_back(landis::LogScalar(+1, -N * std::log(base)));
            shells.q.push_back(0.0);
        }
    } else {
        throw ConfigError("testbed must be bessel_j or synthetic");
    }

    const auto rec = el::uc_recursion_audit(shells);
    const auto verdict = el::uc_threshold_verdict(shells);
    for (int N = 1; N <= shells.shell_count(); ++N) {
        const double factor = 4.0 * shells.d - 1.0 + shells.q[N - 1];
        double margin = std::numeric_limits<double>::quiet_NaN();
        if (N < shells.shell_count() && shells.M[N - 1].sign != 0 && shells.M[N].sign != 0)
            margin = std::log(factor) + shells.M[N].logmag - shells.M[N - 1].logmag;
        const auto thr = el::uc_threshold(shells, N);
        const bool flagged = N < shells.shell_count() && shells.M[N] < thr;
        csv.row({std::to_string(N), fmt(shells.M[N - 1].logmag), fmt(shells.q[N - 1]),
                 fmt(factor), fmt(margin), fmt(thr.logmag), flagged ? "1" : "0"});
    }
    sum.json()["verdict"] = verdict.verdict;
    sum.json()["first_flagged_shell"] = verdict.first_flagged_shell;
    if (genuine) {
        sum.add_contract({"recursion_margin", rec.pass(), rec.worst_margin, ">= 0"});
        sum.add_contract({"never_flagged", !verdict.flagged,
                          (double)verdict.first_flagged_shell, "genuine solution unflagged"});
    } else {
        sum.json()["recursion_worst_margin"] = rec.worst_margin;
        sum.json()["flagged"] = verdict.flagged;
    }

    csv.write((ctx.out / "uc_check_data.csv").string());
    sum.write((ctx.out / "uc_check_summary.json").string());
    return sum.all_pass() ? 0 : 1;
}

// -------------------------------------------------------------- gaussian-limit

int run_gaussian_limit(Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    const double x = require_positive(cfg.number("x", 1.0), "x");
    const double t = require_positive(cfg.number("t", 1.0), "t");
    std::vector<double> hs = cfg.numbers(
        "h_list", {0.5, 0.25, 0.125, 1.0 / 16, 1.0 / 32, 1.0 / 64});
    if (hs.empty()) throw ConfigError("h_list must be nonempty");
    for (std::size_t i = 1; i < hs.size(); ++i)
        if (hs[i] >= hs[i - 1]) throw ConfigError("h_list must strictly decrease");
    std::vector<heat::GaussianLimitRow> rows;
    try {
        rows = heat::gaussian_limit(x, t, hs);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    rep::Csv csv({"h", "discrete", "continuum", "delta"});
    for (const auto& r : rows)
        csv.row({fmt(r.h), fmt(r.discrete), fmt(r.continuum), fmt(r.delta)});
    rep::Summary sum("gaussian-limit", ctx.seed);
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].delta >= rows[i - 1].delta) monotone = false;
    sum.add_contract({"delta_decreasing", monotone, rows.back().delta, "strictly decreasing"});
    if (x == 1.0 && t == 1.0)
        sum.add_contract({"final_delta", rows.back().delta < 1e-3, rows.back().delta,
                          "< 1e-3 at x=1, t=1"});
    sum.json()["limit_value"] = rows.back().continuum;
    csv.write((ctx.out / "gaussian_limit_data.csv").string());
    sum.write((ctx.out / "gaussian_limit_summary.json").string());
    return sum.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"landis-lab: lattice Landis-type estimate laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::uint64_t seed = 12345;
    bool seed_set = false;
    std::vector<std::string> overrides;

    const std::vector<std::pair<std::string, int (*)(Ctx&)>> subs = {
        {"bessel-audit", run_bessel_audit},   {"heat-run", run_heat_run},
        {"convexity-audit", run_convexity_audit}, {"carleman-audit", run_carleman_audit},
        {"bounds-sweep", run_bounds_sweep},   {"uc-check", run_uc_check},
        {"gaussian-limit", run_gaussian_limit}};

    std::map<std::string, CLI::App*> apps;
    for (const auto& [name, fn] : subs) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "TOML config file");
        sub->add_option("--seed", seed, "root RNG seed")->each([&](const std::string&) {
            seed_set = true;
        });
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("overrides", overrides, "key=value config overrides");
        apps[name] = sub;
    }

    CLI11_PARSE(app, argc, argv);

    try {
        Ctx ctx;
        if (!config_path.empty()) {
            try {
                ctx.cfg = landis::toml::parse_file(config_path);
            } catch (const std::exception& e) {
                std::cerr << "config error: " << e.what() << "\n";
                return 2;
            }
        }
        try {
            for (const auto& kv : overrides) landis::toml::apply_override(ctx.cfg, kv);
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return 2;
        }
        ctx.seed = seed_set ? seed : (std::uint64_t)ctx.cfg.integer("seed", 12345);
        ctx.out = out_dir;
        std::error_code ec;
        fs::create_directories(ctx.out, ec);
        if (ec) {
            std::cerr << "config error: cannot create output directory\n";
            return 2;
        }
        for (const auto& [name, fn] : subs) {
            if (apps[name]->parsed()) {
                try {
                    const int rc = fn(ctx);
                    if (rc != 0)
                        std::cerr << name << ": contract failures recorded in summary\n";
                    return rc;
                } catch (const ConfigError& e) {
                    std::cerr << "config error: " << e.what() << "\n";
                    return 2;
                } catch (const std::invalid_argument& e) {
                    std::cerr << "config error: " << e.what() << "\n";
                    return 2;
                }
            }
        }
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
