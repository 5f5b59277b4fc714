#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "landis/bessel.hpp"
#include "landis/heat.hpp"
#include "landis/lattice.hpp"

// Bessel-weighted energies H(t), the symmetric/antisymmetric split of the
// conjugated Laplacian, commutator forms, and the log-convexity audits.
// Weight ratios, never raw weights, are the computational currency: every
// sum is carried in log scale with K_0-normalized factors where the
// contract asks for them.

namespace landis::weights {

using lattice::LatticeBox;
using lattice::LatticeField;
using lattice::LogField;

enum class WeightKind {
    CloseToContinuum,  // per axis K_m((gamma + 2t)/h^2), energies use the square
    PurelyDiscrete,    // per axis K_{m mu}(2/(e h^2)), energies use the first power
    DeltaInterp,       // per axis K_m(gamma/h^2)^delta, static
};

struct WeightSpec {
    WeightKind kind;
    double gamma = 0.0;
    double mu = 0.0;
    double delta = 1.0;
    double h = 1.0;
    bool time_dependent = false;
    bool normalized = true;  // divide by the order-0 factor per coordinate

    static WeightSpec close_to_continuum(double gamma, double h, bool time_dep = true,
                                         bool normalized = true) {
        if (gamma <= 0.0) throw std::invalid_argument("WeightSpec: gamma must be positive");
        WeightSpec s;
        s.kind = WeightKind::CloseToContinuum;
        s.gamma = gamma;
        s.h = h;
        s.time_dependent = time_dep;
        s.normalized = normalized;
        return s;
    }
    static WeightSpec purely_discrete(double mu, double h, bool normalized = true) {
        if (mu <= 0.0) throw std::invalid_argument("WeightSpec: mu must be positive");
        WeightSpec s;
        s.kind = WeightKind::PurelyDiscrete;
        s.mu = mu;
        s.h = h;
        s.normalized = normalized;
        return s;
    }
    static WeightSpec delta_interp(double gamma, double delta, double h,
                                   bool normalized = true) {
        if (gamma <= 0.0) throw std::invalid_argument("WeightSpec: gamma must be positive");
        if (delta <= 0.0 || delta > 1.0)
            throw std::invalid_argument("WeightSpec: delta must lie in (0,1]");
        WeightSpec s;
        s.kind = WeightKind::DeltaInterp;
        s.gamma = gamma;
        s.delta = delta;
        s.h = h;
        s.normalized = normalized;
        return s;
    }

    // power of the per-axis factor entering the energy
    double energy_power() const { return kind == WeightKind::PurelyDiscrete ? 1.0 : 2.0; }
};

namespace detail {

// log of the per-axis weight factor at orders 0..m_max.
inline std::vector<double> axis_log_weights(const WeightSpec& s, int m_max, double t) {
    std::vector<double> lw(m_max + 1);
    switch (s.kind) {
        case WeightKind::CloseToContinuum: {
            const double arg = (s.gamma + (s.time_dependent ? 2.0 * t : 0.0)) / (s.h * s.h);
            lw = bessel::log_bessel_k_table(m_max, arg);
            break;
        }
        case WeightKind::DeltaInterp: {
            const auto base = bessel::log_bessel_k_table(m_max, s.gamma / (s.h * s.h));
            for (int m = 0; m <= m_max; ++m) lw[m] = s.delta * base[m];
            break;
        }
        case WeightKind::PurelyDiscrete: {
            const double arg = 2.0 / (M_E * s.h * s.h);
            for (int m = 0; m <= m_max; ++m)
                lw[m] = bessel::log_bessel_k_real(m * s.mu, arg).logmag;
            break;
        }
    }
    if (s.normalized) {
        const double l0 = lw[0];
        for (auto& v : lw) v -= l0;
    }
    return lw;
}

inline double axis_log_at(const std::vector<double>& lw, int m) {
    return lw[(std::size_t)std::abs(m)];
}

}  // namespace detail

// Product over coordinates of the per-axis factor, log scale.
inline LogScalar weight_at(const WeightSpec& spec, const LatticeBox& box,
                           const std::array<int, 3>& j, double t) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("weight_at: t outside [0,1]");
    int m_max = 0;
    for (int k = 0; k < box.d; ++k) m_max = std::max(m_max, std::abs(j[k]));
    const auto lw = detail::axis_log_weights(spec, m_max, t);
    double lm = 0.0;
    for (int k = 0; k < box.d; ++k) lm += detail::axis_log_at(lw, j[k]);
    return LogScalar(+1, lm);
}

struct WeightedEnergy {
    std::vector<double> times;
    std::vector<LogScalar> values;  // H(t) or H_delta(t), sign in {0,+1}
};

namespace detail {

template <typename Frame>
LogScalar frame_energy(const Frame& frame, const WeightSpec& spec, double t) {
    const auto& box = frame.box;
    const auto lw = axis_log_weights(spec, box.extent, t);
    const double p = spec.energy_power();
    LogSum acc;
    lattice::detail::for_each_site(box, [&](std::size_t i, const std::array<int, 3>& j) {
        double lu;
        if constexpr (std::is_same_v<Frame, LogField>) {
            if (frame.values[i].sign == 0) return;
            lu = frame.values[i].logmag;
        } else {
            if (frame.values[i] == 0.0) return;
            lu = std::log(std::fabs(frame.values[i]));
        }
        double lm = 2.0 * lu;
        for (int k = 0; k < box.d; ++k) lm += p * axis_log_at(lw, j[k]);
        acc.add(lm);
    });
    LogScalar out = acc.value();
    if (out.sign != 0) out.logmag += box.d * std::log(box.h);
    return out;
}

}  // namespace detail

inline WeightedEnergy weighted_energy(const std::vector<double>& times,
                                      const std::vector<LogField>& frames,
                                      const WeightSpec& spec) {
    if (times.size() != frames.size())
        throw std::invalid_argument("weighted_energy: sampling mismatch");
    WeightedEnergy we;
    we.times = times;
    for (std::size_t i = 0; i < frames.size(); ++i)
        we.values.push_back(detail::frame_energy(frames[i], spec, times[i]));
    return we;
}

inline WeightedEnergy weighted_energy(const heat::Trajectory& traj, const WeightSpec& spec) {
    if (std::fabs(traj.problem.box.h - spec.h) > 1e-15)
        throw std::invalid_argument("weighted_energy: mesh mismatch");
    WeightedEnergy we;
    we.times = traj.problem.t_grid;
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i)
        we.values.push_back(detail::frame_energy(traj.snapshots[i], spec, we.times[i]));
    return we;
}

// --- weighted energy monotonicity -------------------------------------------

struct MonotonicityReport {
    double worst_violation_rel = 0.0;  // max over steps of m(t+)/m(t) - 1
    double argmax_t = 0.0;
    bool pass(double tol = 1e-8) const { return worst_violation_rel <= tol; }
};

// e^{-2 t |V|} H(t) must be nonincreasing for the time-dependent weight;
// raw (unnormalized) weights -- the order-0 factor itself moves with t.
inline MonotonicityReport audit_monotone_energy(const heat::Trajectory& traj,
                                                const WeightSpec& spec) {
    if (spec.kind != WeightKind::CloseToContinuum || !spec.time_dependent)
        throw std::invalid_argument(
            "audit_monotone_energy: needs the time-dependent weight");
    WeightSpec raw = spec;
    raw.normalized = false;
    const auto we = weighted_energy(traj, raw);
    MonotonicityReport rep;
    for (std::size_t i = 1; i < we.values.size(); ++i) {
        if (we.values[i].sign == 0) continue;  // zero stays zero
        if (we.values[i - 1].sign == 0) {
            rep.worst_violation_rel = std::numeric_limits<double>::infinity();
            rep.argmax_t = we.times[i];
            break;
        }
        const double dm = (we.values[i].logmag - 2.0 * we.times[i] * traj.problem.v_sup) -
                          (we.values[i - 1].logmag -
                           2.0 * we.times[i - 1] * traj.problem.v_sup);
        const double viol = std::expm1(std::max(0.0, dm));
        if (viol > rep.worst_violation_rel) {
            rep.worst_violation_rel = viol;
            rep.argmax_t = we.times[i];
        }
    }
    return rep;
}

// --- symmetric/antisymmetric split -------------------------------------------

struct SAPair {
    LatticeField symmetric;
    LatticeField antisymmetric;
};

// S f = (d_t w / w) f + (w Delta(f/w) + (1/w) Delta(f w)) / 2
// A f = (w Delta(f/w) - (1/w) Delta(f w)) / 2
// assembled from neighbor weight ratios only; the time-derivative term is
// dropped for static weights.
inline SAPair sa_apply(const LatticeField& f, const WeightSpec& spec, double t) {
    const auto& box = f.box;
    const auto lw = detail::axis_log_weights(spec, box.extent + 1, t);
    // rho[m + extent + 1] = w(m+1)/w(m) for m in [-extent-1, extent]
    const int off = box.extent + 1;
    std::vector<double> rho(2 * box.extent + 2);
    for (int m = -box.extent - 1; m <= box.extent; ++m)
        rho[m + off] = std::exp(detail::axis_log_at(lw, m + 1) - detail::axis_log_at(lw, m));

    SAPair out{LatticeField(box), LatticeField(box)};
    const double invh2 = 1.0 / (box.h * box.h);
    lattice::detail::for_each_site(box, [&](std::size_t i, const std::array<int, 3>& j) {
        double p = 0.0, q = 0.0, dtw = 0.0;
        for (int k = 0; k < box.d; ++k) {
            const double r_up = rho[j[k] + off];        // w(j_k+1)/w(j_k)
            const double r_dn = rho[j[k] - 1 + off];    // w(j_k)/w(j_k-1)
            const double fp = f.at(lattice::detail::shifted(j, k, +1));
            const double fm = f.at(lattice::detail::shifted(j, k, -1));
            p += fp / r_up - 2.0 * f.values[i] + fm * r_dn;   // w Delta(f/w)
            q += fp * r_up - 2.0 * f.values[i] + fm / r_dn;   // (1/w) Delta(f w)
            dtw += r_up + 1.0 / r_dn;  // K_{j+1}/K_j + K_{j-1}/K_j
        }
        out.symmetric.values[i] = 0.5 * invh2 * (p + q);
        out.antisymmetric.values[i] = 0.5 * invh2 * (p - q);
        if (spec.time_dependent && spec.kind == WeightKind::CloseToContinuum)
            out.symmetric.values[i] += -invh2 * dtw * f.values[i];
    });
    return out;
}

// Single-axis version of the split (tensor weights act coordinate-wise).
inline SAPair sa_apply_axis(const LatticeField& f, const WeightSpec& spec, double t,
                            int axis) {
    const auto& box = f.box;
    if (axis < 0 || axis >= box.d) throw std::invalid_argument("sa_apply_axis: bad axis");
    const auto lw = detail::axis_log_weights(spec, box.extent + 1, t);
    const int off = box.extent + 1;
    std::vector<double> rho(2 * box.extent + 2);
    for (int m = -box.extent - 1; m <= box.extent; ++m)
        rho[m + off] = std::exp(detail::axis_log_at(lw, m + 1) - detail::axis_log_at(lw, m));
    SAPair out{LatticeField(box), LatticeField(box)};
    const double invh2 = 1.0 / (box.h * box.h);
    lattice::detail::for_each_site(box, [&](std::size_t i, const std::array<int, 3>& j) {
        const double r_up = rho[j[axis] + off];
        const double r_dn = rho[j[axis] - 1 + off];
        const double fp = f.at(lattice::detail::shifted(j, axis, +1));
        const double fm = f.at(lattice::detail::shifted(j, axis, -1));
        const double p = fp / r_up - 2.0 * f.values[i] + fm * r_dn;
        const double q = fp * r_up - 2.0 * f.values[i] + fm / r_dn;
        out.symmetric.values[i] = 0.5 * invh2 * (p + q);
        out.antisymmetric.values[i] = 0.5 * invh2 * (p - q);
    });
    return out;
}

// <[S,A]f, f> evaluated directly as <S(Af) - A(Sf), f>; static weights.
inline double commutator_form(const LatticeField& f, const WeightSpec& spec) {
    if (spec.time_dependent)
        throw std::invalid_argument("commutator_form: static weights only");
    const auto first = sa_apply(f, spec, 0.0);
    const auto sa = sa_apply(first.antisymmetric, spec, 0.0);
    const auto as = sa_apply(first.symmetric, spec, 0.0);
    long double acc = 0.0L;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        acc += (long double)(sa.symmetric.values[i] - as.antisymmetric.values[i]) *
               f.values[i];
    return (double)acc * std::pow(f.box.h, f.box.d);
}

// Same quadratic form from its closed-form decomposition: per axis a
// positive gradient sum plus the eight-ratio coefficient acting on f^2.
inline double commutator_closed_form(const LatticeField& f, const WeightSpec& spec) {
    if (spec.time_dependent)
        throw std::invalid_argument("commutator_closed_form: static weights only");
    const auto& box = f.box;
    const auto lw = detail::axis_log_weights(spec, box.extent + 2, 0.0);
    auto L = [&](int m) { return detail::axis_log_at(lw, m); };
    const int E = box.extent;
    std::vector<double> pcoef(2 * E + 1), lcoef(2 * E + 1);
    for (int m = -E; m <= E; ++m) {
        const double t = L(m - 1) + L(m + 1) - 2.0 * L(m);
        pcoef[m + E] = std::exp(t) - std::exp(-t);
        const double r1 = 2.0 * (L(m + 1) - L(m));
        const double r2 = 2.0 * (L(m - 1) - L(m));
        const double r5 = 2.0 * L(m + 1) - L(m) - L(m + 2);
        const double r7 = 2.0 * L(m - 1) - L(m) - L(m - 2);
        lcoef[m + E] = std::exp(r1) + std::exp(r2) - std::exp(-r2) - std::exp(-r1) +
                       std::exp(r5) - std::exp(-r5) + std::exp(r7) - std::exp(-r7);
    }
    const double invh4 = 1.0 / std::pow(box.h, 4);
    long double acc = 0.0L;
    lattice::detail::for_each_site(box, [&](std::size_t i, const std::array<int, 3>& j) {
        for (int k = 0; k < box.d; ++k) {
            const double g = f.at(lattice::detail::shifted(j, k, +1)) -
                             f.at(lattice::detail::shifted(j, k, -1));
            acc += (long double)pcoef[j[k] + E] * g * g;
            acc += (long double)lcoef[j[k] + E] * f.values[i] * f.values[i];
        }
    });
    return 0.5 * (double)acc * invh4 * std::pow(box.h, box.d);
}

// The eight-term order-shift expression for the K^delta weight at a single
// order and argument; >= -2(1 + 1/x + 1/(4x^3)) always, positive at delta=1.
inline double lambda_delta(int j, double x, double delta) {
    if (x <= 0.0) throw std::invalid_argument("lambda_delta: x must be positive");
    if (delta < 0.0 || delta > 1.0)
        throw std::invalid_argument("lambda_delta: delta must lie in [0,1]");
    const auto lk = bessel::log_bessel_k_table(std::abs(j) + 2, x);
    auto L = [&](int m) { return lk[(std::size_t)std::abs(m)]; };
    const double r1 = 2.0 * delta * (L(j + 1) - L(j));
    const double r2 = 2.0 * delta * (L(j - 1) - L(j));
    const double r5 = delta * (2.0 * L(j + 1) - L(j) - L(j + 2));
    const double r7 = delta * (2.0 * L(j - 1) - L(j) - L(j - 2));
    return std::exp(r1) + std::exp(r2) - std::exp(-r2) - std::exp(-r1) + std::exp(r5) -
           std::exp(-r5) + std::exp(r7) - std::exp(-r7);
}

inline double lambda_delta_lower_bound(double x) {
    return -2.0 * (1.0 + 1.0 / x + 1.0 / (4.0 * x * x * x));
}

// --- log-convexity ------------------------------------------------------------

struct LogConvexityReport {
    double n_hat = 0.0;     // smallest N with H(t) <= e^{N Vsup'} H(0)^{1-t} H(1)^t
    double argmax_t = 0.0;
    bool degenerate = false;  // endpoint vanished while the interior did not
};

inline LogConvexityReport audit_logconvexity(const WeightedEnergy& energy, double v_sup) {
    if (energy.times.size() < 3 || energy.times.front() != 0.0 || energy.times.back() != 1.0)
        throw std::invalid_argument("audit_logconvexity: need samples spanning [0,1]");
    LogConvexityReport rep;
    const auto& H = energy.values;
    const bool ends_ok = H.front().sign != 0 && H.back().sign != 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < H.size(); ++i) {
        if (H[i].sign == 0) continue;
        if (!ends_ok) {
            rep.degenerate = true;
            return rep;
        }
        const double t = energy.times[i];
        const double excess = H[i].logmag - (1.0 - t) * H.front().logmag -
                              t * H.back().logmag;
        if (excess > worst) {
            worst = excess;
            rep.argmax_t = t;
        }
    }
    rep.n_hat = worst / std::max(v_sup, 1.0);
    return rep;
}

}  // namespace landis::weights
