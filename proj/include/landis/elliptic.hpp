#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "landis/bessel.hpp"
#include "landis/carleman.hpp"
#include "landis/fit.hpp"
#include "landis/lattice.hpp"

// Stationary discrete Schrodinger tooling: residual evaluation, the static
// Carleman audit, the three-case Carleman-parameter selection, the
// sup-metric shell recursion with its decay thresholds, and the Bessel-J
// solution testbed.

namespace landis::elliptic {

using lattice::LatticeBox;
using lattice::LatticeField;
using lattice::LogField;

using SitePotential = std::function<double(const std::array<int, 3>&)>;
using SitePredicate = std::function<bool(const std::array<int, 3>&)>;

struct EllipticProblem {
    LatticeBox box;
    SitePotential potential;
    double v_sup = 0.0;      // declared sup bound over the audited window
    LatticeField u;
    LogField u_log;          // same field in log scale (deep tails survive)
    SitePredicate interior;  // where the equation is audited
    SitePredicate window;    // where the field is defined (shell extraction)

    EllipticProblem(LatticeBox b, SitePotential V, double declared_sup, LatticeField u_,
                    LogField ulog, SitePredicate interior_ = nullptr,
                    SitePredicate window_ = nullptr)
        : box(b),
          potential(std::move(V)),
          v_sup(declared_sup),
          u(std::move(u_)),
          u_log(std::move(ulog)),
          interior(std::move(interior_)),
          window(std::move(window_)) {
        if (!(u.box == box) || !(u_log.box == box))
            throw std::invalid_argument("EllipticProblem: box mismatch");
        if (!interior)
            interior = [e = box.extent, d = box.d](const std::array<int, 3>& j) {
                for (int k = 0; k < d; ++k)
                    if (std::abs(j[k]) >= e) return false;
                return true;
            };
        if (!window) window = [](const std::array<int, 3>&) { return true; };
        double actual = 0.0;
        lattice::detail::for_each_site(box, [&](std::size_t, const std::array<int, 3>& j) {
            if (window(j)) actual = std::max(actual, std::fabs(potential(j)));
        });
        if (actual > v_sup * (1.0 + 1e-12) + 1e-300)
            throw std::invalid_argument("EllipticProblem: declared potential bound too small");
    }
};

// Delta u + V u on the interior window (zero elsewhere); its sup norm is
// the solution-quality gate for every downstream audit.
inline LatticeField elliptic_residual(const EllipticProblem& p) {
    const auto lap = lattice::discrete_laplacian(p.u);
    LatticeField res(p.box);
    lattice::detail::for_each_site(p.box, [&](std::size_t i, const std::array<int, 3>& j) {
        if (p.interior(j)) res.values[i] = lap.values[i] + p.potential(j) * p.u.values[i];
    });
    return res;
}

inline bool residual_gate(const EllipticProblem& p, double tol = 1e-8) {
    return lattice::sup_norm(elliptic_residual(p)) <= tol * lattice::sup_norm(p.u);
}

// --- sup-metric shells ---------------------------------------------------------

struct ShellData {
    double h = 1.0;
    int d = 1;
    std::vector<LogScalar> M;  // M[N-1] = max over |n|_inf in {N, N-1} of |u_n|
    std::vector<double> q;     // q[N-1] = h^2 max over |n|_inf = N of |V_n|

    int shell_count() const { return (int)M.size(); }
};

// Shells run over the sup metric; the Euclidean annuli of the parabolic
// machinery must never leak in here.
inline ShellData shell_extract(const EllipticProblem& p, int n_shells) {
    if (n_shells < 1 || n_shells >= p.box.extent)
        throw std::invalid_argument("shell_extract: bad shell range");
    ShellData s;
    s.h = p.box.h;
    s.d = p.box.d;
    std::vector<LogScalar> ring_max(n_shells + 1);  // max |u| on |n|_inf = N, N = 0..n_shells
    std::vector<double> v_max(n_shells + 1, 0.0);
    lattice::detail::for_each_site(p.box, [&](std::size_t i, const std::array<int, 3>& j) {
        if (!p.window(j)) return;
        const int N = p.box.inf_index(j);
        if (N > n_shells) return;
        LogScalar mag = p.u_log.values[i];
        mag.sign = std::abs(mag.sign);
        if (ring_max[N] < mag) ring_max[N] = mag;
        v_max[N] = std::max(v_max[N], std::fabs(p.potential(j)));
    });
    for (int N = 1; N <= n_shells; ++N) {
        s.M.push_back(ring_max[N] < ring_max[N - 1] ? ring_max[N - 1] : ring_max[N]);
        s.q.push_back(p.box.h * p.box.h * v_max[N]);
    }
    return s;
}

// --- recursion audit -------------------------------------------------------------

struct RecursionReport {
    double worst_margin = std::numeric_limits<double>::infinity();  // log scale
    int argmin_shell = 0;
    bool pass(double tol = 0.0) const { return worst_margin >= tol; }
};

// Checks M_N <= (4d - 1 + q_N) M_{N+1} for every available N; the margin is
// log((4d-1+q_N) M_{N+1}) - log(M_N).
inline RecursionReport uc_recursion_audit(const ShellData& s) {
    RecursionReport rep;
    for (int N = 1; N + 1 <= s.shell_count(); ++N) {
        const LogScalar mN = s.M[N - 1], mN1 = s.M[N];
        if (mN.sign == 0) continue;  // vacuous: 0 <= anything
        double margin;
        if (mN1.sign == 0)
            margin = -std::numeric_limits<double>::infinity();
        else
            margin = std::log(4.0 * s.d - 1.0 + s.q[N - 1]) + mN1.logmag - mN.logmag;
        if (margin < rep.worst_margin) {
            rep.worst_margin = margin;
            rep.argmin_shell = N;
        }
    }
    return rep;
}

// M_1 / prod_{n=1}^{N} (4d - 1 + q_n), log scale.
inline LogScalar uc_threshold(const ShellData& s, int N) {
    if (N < 1 || N > s.shell_count())
        throw std::invalid_argument("uc_threshold: shell index out of range");
    if (s.M[0].sign == 0) return LogScalar::zero();
    long double acc = 0.0L;
    for (int n = 1; n <= N; ++n) acc += std::log(4.0L * s.d - 1.0L + (long double)s.q[n - 1]);
    return LogScalar(+1, s.M[0].logmag - (double)acc);
}

struct ThresholdVerdict {
    bool flagged = false;  // some shell fell below the forced-decay threshold
    int first_flagged_shell = 0;
    std::string verdict;
};

// If M_{N+1} drops below the threshold for some N, the recursion forces
// u = 0: report the first such shell.
inline ThresholdVerdict uc_threshold_verdict(const ShellData& s) {
    ThresholdVerdict v;
    for (int N = 1; N + 1 <= s.shell_count(); ++N) {
        const LogScalar thr = uc_threshold(s, N);
        if (s.M[N] < thr) {
            v.flagged = true;
            v.first_flagged_shell = N;
            v.verdict = "decay forces u == 0";
            return v;
        }
    }
    v.verdict = "no forced decay detected";
    return v;
}

// --- Carleman-parameter selection (three cases) ------------------------------------

struct EllipticAlphaSelection {
    double alpha = 0.0;
    double beta = 0.0;  // from R = h^{-beta} when meaningful
    std::string case_label;
};

// alpha = c R^{4/3} when h R^{1/3} <= 1; (sqrt(d)/4) R^{1+1/beta} log(R^{1-1/beta})
// when beta > 3; c (R/h) log(Rh) in fixed-mesh mode.  The continuum and
// fixed-mesh constants default to 1 and sqrt(d): only their scale matters
// downstream (no parameter conditions exist in the static case).
inline EllipticAlphaSelection alpha_select_elliptic(double R, double h, int d,
                                                    bool fixed_mesh = false) {
    if (R < 1.0) throw std::invalid_argument("alpha_select_elliptic: R must be >= 1");
    if (h <= 0.0) throw std::invalid_argument("alpha_select_elliptic: h must be positive");
    EllipticAlphaSelection sel;
    if (fixed_mesh) {
        if (R * h <= 1.0)
            throw std::invalid_argument("alpha_select_elliptic: fixed-mesh mode needs Rh > 1");
        sel.alpha = std::sqrt((double)d) * (R / h) * std::log(R * h);
        sel.case_label = "fixed_mesh";
        return sel;
    }
    if (h < 1.0 && R > 1.0) sel.beta = -std::log(R) / std::log(h);
    if (h * std::cbrt(R) <= 1.0) {
        sel.alpha = std::pow(R, 4.0 / 3.0);
        sel.case_label = "close_to_continuum";
    } else {
        if (sel.beta <= 3.0)
            throw std::invalid_argument(
                "alpha_select_elliptic: h R^{1/3} > 1 requires beta > 3");
        const double e1 = 1.0 + 1.0 / sel.beta, e2 = 1.0 - 1.0 / sel.beta;
        sel.alpha = (std::sqrt((double)d) / 4.0) * std::pow(R, e1) *
                    std::log(std::pow(R, e2));
        sel.case_label = "interpolating";
    }
    return sel;
}

// --- static Carleman audit ------------------------------------------------------------

struct EllipticCarlemanReport {
    double c_hat = 0.0;
    double min_commutator = 0.0;  // min over samples of <[S,A]f, f>
    std::uint64_t seed = 0;
};

// Static weight alpha |hj/R + 3 e_1|^2: identical operator algebra to the
// parabolic case frozen at the profile plateau, no time variable and no
// parameter conditions (the commutator is positive).
inline EllipticCarlemanReport audit_carleman_elliptic(const carleman::CarlemanConfig& cfg,
                                                      int samples, std::uint64_t seed) {
    const auto box = carleman::carleman_box(cfg);
    const double t_plateau = 0.5;  // profile == 3 there
    EllipticCarlemanReport rep;
    rep.seed = seed;
    rep.min_commutator = std::numeric_limits<double>::infinity();
    const double sq = std::sqrt((double)cfg.d);
    const double eps = 2.0 * cfg.alpha * cfg.h * cfg.h / (cfg.R * cfg.R);
    const double lhs_f =
        std::sqrt(std::sinh(eps)) * std::sinh(2.0 * cfg.alpha * cfg.h / (cfg.R * sq)) /
        (cfg.h * cfg.h);
    const double lhs_g = 2.0 * std::sqrt(std::sinh(eps)) / (cfg.h * cfg.h);
    std::mt19937_64 rng(seed);
    for (int n = 0; n < samples; ++n) {
        // smooth in-support spatial sample
        std::array<double, 4> amp{}, pha{};
        for (int m = 0; m < 4; ++m) {
            amp[m] = carleman::detail::uniform_pm1(rng);
            pha[m] = M_PI * carleman::detail::uniform_pm1(rng);
        }
        LatticeField f(box);
        lattice::detail::for_each_site(box, [&](std::size_t i, const std::array<int, 3>& j) {
            const double r = carleman::detail::moving_radius(cfg, j, 3.0);
            const double zb = carleman::detail::support_bump(r);
            if (zb == 0.0) return;
            double v = 0.0;
            for (int m = 0; m < 4; ++m)
                v += amp[m] * std::cos((m + 1) * cfg.h * j[0] / cfg.R + pha[m]);
            f.values[i] = zb * v;
        });
        const auto parts = carleman::conjugated_ops(cfg, f, t_plateau);
        // commutator positivity
        const auto sa = carleman::conjugated_ops(cfg, parts.A, t_plateau, false);
        const auto as = carleman::conjugated_ops(cfg, parts.S, t_plateau, false);
        long double comm = 0.0L, rhs2 = 0.0L, grad2 = 0.0L, norm2 = 0.0L;
        lattice::detail::for_each_site(box, [&](std::size_t i, const std::array<int, 3>& j) {
            comm += (long double)(sa.S.values[i] - as.A.values[i]) * f.values[i];
            const double rv = parts.S.values[i] + parts.A.values[i];
            rhs2 += (long double)rv * rv;
            norm2 += (long double)f.values[i] * f.values[i];
            for (int k = 0; k < cfg.d; ++k) {
                const double g = 0.5 * (f.at(lattice::detail::shifted(j, k, +1)) -
                                        f.at(lattice::detail::shifted(j, k, -1)));
                grad2 += (long double)g * g;
            }
        });
        const double hd = std::pow(box.h, box.d);
        rep.min_commutator = std::min(rep.min_commutator, (double)comm * hd);
        if (rhs2 > 0.0L) {
            const double lhs = lhs_f * std::sqrt((double)norm2 * hd) +
                               lhs_g * std::sqrt((double)grad2 * hd);
            rep.c_hat = std::max(rep.c_hat, lhs / std::sqrt((double)rhs2 * hd));
        }
    }
    return rep;
}

// --- Bessel-J testbed --------------------------------------------------------------

// u_n = J_n(t0) on the half-line window [0, n_max] solves the stationary
// equation with V(n) = 2 (1 - n/t0) there (three-term recurrence).
inline EllipticProblem j_testbed(double t0, int n_max) {
    if (t0 <= 0.0) throw std::invalid_argument("j_testbed: t0 must be positive");
    const LatticeBox box(1, 1.0, n_max + 2);
    LatticeField u(box);
    LogField ulog(box);
    for (int n = 0; n <= n_max; ++n) {
        const LogScalar v = bessel::log_bessel_j(n, t0);
        ulog.at({n, 0, 0}) = v;
        u.at({n, 0, 0}) = v.logmag > -700.0 ? v.to_linear() : 0.0;
    }
    auto V = [t0](const std::array<int, 3>& j) { return 2.0 * (1.0 - j[0] / t0); };
    const double vsup = 2.0 * std::fabs(1.0 - n_max / t0);
    auto interior = [n_max](const std::array<int, 3>& j) {
        return j[0] >= 1 && j[0] <= n_max - 1;
    };
    auto window = [n_max](const std::array<int, 3>& j) {
        return j[0] >= 0 && j[0] <= n_max;
    };
    return EllipticProblem(box, V, vsup, std::move(u), std::move(ulog), interior, window);
}

// Regression of log |J_N(t0)| against the large-order trend
// -N log N + N (1 + log(t0/2)); the slope approaches one.
inline fit::LinearFit j_decay_trend(const EllipticProblem& testbed, double t0, int n_lo,
                                    int n_hi) {
    std::vector<double> xs, ys;
    for (int n = n_lo; n <= n_hi; ++n) {
        const LogScalar v = testbed.u_log.at({n, 0, 0});
        if (v.sign == 0) continue;
        xs.push_back(-n * std::log((double)n) + n * (1.0 + std::log(t0 / 2.0)));
        ys.push_back(v.logmag);
    }
    return fit::linear_fit(xs, ys);
}

// --- contradiction logic --------------------------------------------------------------

enum class DecayKind { Continuum, Interpolating, FixedMesh };

struct EllipticGapVerdict {
    bool contradiction = false;
    double crossing_R = 0.0;
    std::string verdict;
};

// Assumed decay e^{-mu0 rate(R)} against the lower bound e^{-C rate(R)}:
// contradiction exactly when mu0 > C; the crossing scale solves
// (mu0 - C) rate(R) = 1.
inline EllipticGapVerdict landis_elliptic_gap(DecayKind kind, double mu0, double fitted_C,
                                              double beta, double h = 1.0) {
    if (fitted_C <= 0.0)
        throw std::invalid_argument("landis_elliptic_gap: fitted constant must be positive");
    auto rate = [&](double R) {
        switch (kind) {
            case DecayKind::Continuum: return std::pow(R, 4.0 / 3.0);
            case DecayKind::Interpolating:
                return std::pow(R, 1.0 + 1.0 / beta) *
                       std::log(std::pow(R, 1.0 - 1.0 / beta));
            case DecayKind::FixedMesh: return (R / h) * std::log(R * h);
        }
        return 0.0;
    };
    EllipticGapVerdict v;
    if (mu0 > fitted_C) {
        v.contradiction = true;
        // bisect (mu0 - C) rate(R) = 1 on R in (max(1, 1/h), huge)
        double lo = std::max(1.0, 1.0 / h) + 1e-9, hi = lo + 1.0;
        while ((mu0 - fitted_C) * rate(hi) < 1.0 && hi < 1e12) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if ((mu0 - fitted_C) * rate(mid) < 1.0) lo = mid;
            else hi = mid;
        }
        v.crossing_R = 0.5 * (lo + hi);
        v.verdict = "contradiction: decay beats the lower bound beyond the crossing scale";
    } else if (mu0 == fitted_C) {
        v.verdict = "boundary: rates coincide, no verdict";
    } else {
        v.verdict = "no contradiction at this decay constant";
    }
    return v;
}

}  // namespace landis::elliptic
