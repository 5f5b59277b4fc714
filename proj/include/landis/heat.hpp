#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "landis/bessel.hpp"
#include "landis/lattice.hpp"

// Semidiscrete heat equation on the truncated box: u' = Delta u + V u with
// continuous time, plus the closed-form Bessel solutions and the energy /
// interior-regularity / Gaussian-limit audits.

namespace landis::heat {

using lattice::LatticeBox;
using lattice::LatticeField;
using lattice::LogField;

using Potential = std::function<double(const std::array<int, 3>&, double)>;

struct HeatProblem {
    LatticeBox box;
    Potential potential;          // V(j, t)
    double v_sup = 0.0;           // declared sup bound, must dominate samples
    bool time_independent = true;
    LatticeField initial;
    std::vector<double> t_grid;   // 0 = t_0 < ... < t_last = 1

    HeatProblem(LatticeBox b, Potential V, double declared_sup, bool time_indep,
                LatticeField psi, std::vector<double> grid)
        : box(b),
          potential(std::move(V)),
          v_sup(declared_sup),
          time_independent(time_indep),
          initial(std::move(psi)),
          t_grid(std::move(grid)) {
        if (!(initial.box == box)) throw std::invalid_argument("HeatProblem: box mismatch");
        if (t_grid.size() < 2 || t_grid.front() != 0.0 || t_grid.back() != 1.0)
            throw std::invalid_argument("HeatProblem: t_grid must run from 0 to 1");
        for (std::size_t i = 1; i < t_grid.size(); ++i)
            if (t_grid[i] <= t_grid[i - 1])
                throw std::invalid_argument("HeatProblem: t_grid must increase");
        // declared bound must dominate the actual sup over box x t_grid
        double actual = 0.0;
        lattice::detail::for_each_site(box, [&](std::size_t, const std::array<int, 3>& j) {
            if (time_independent) {
                actual = std::max(actual, std::fabs(potential(j, 0.0)));
            } else {
                for (double t : t_grid) actual = std::max(actual, std::fabs(potential(j, t)));
            }
        });
        if (actual > v_sup * (1.0 + 1e-12) + 1e-300)
            throw std::invalid_argument("HeatProblem: declared potential bound too small");
    }

    static std::vector<double> uniform_grid(int samples = 129) {
        std::vector<double> g(samples);
        for (int i = 0; i < samples; ++i) g[i] = (double)i / (samples - 1);
        g.back() = 1.0;
        return g;
    }
};

struct IntegratorStats {
    std::int64_t steps = 0;
    double max_step_error = 0.0;
};

struct Trajectory {
    HeatProblem problem;
    std::vector<LatticeField> snapshots;  // one per t_grid entry
    IntegratorStats stats;
};

enum class HeatMethod { Rk4, Exponential };

struct InstabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void rhs(const HeatProblem& p, const LatticeField& u, double t,
                const std::vector<double>* vcache, LatticeField& out) {
    const double invh2 = 1.0 / (p.box.h * p.box.h);
    lattice::detail::for_each_site(p.box, [&](std::size_t i, const std::array<int, 3>& j) {
        double acc = 0.0;
        for (int k = 0; k < p.box.d; ++k)
            acc += u.at(lattice::detail::shifted(j, k, +1)) - 2.0 * u.values[i] +
                   u.at(lattice::detail::shifted(j, k, -1));
        const double v = vcache ? (*vcache)[i] : p.potential(j, t);
        out.values[i] = invh2 * acc + v * u.values[i];
    });
}

inline void rk4_step(const HeatProblem& p, LatticeField& u, double t, double dt,
                     const std::vector<double>* vcache, LatticeField scratch[4]) {
    LatticeField& k1 = scratch[0];
    LatticeField& k2 = scratch[1];
    LatticeField& k3 = scratch[2];
    LatticeField& k4 = scratch[3];
    rhs(p, u, t, vcache, k1);
    LatticeField tmp = lattice::axpy(0.5 * dt, k1, u);
    rhs(p, tmp, t + 0.5 * dt, vcache, k2);
    tmp = lattice::axpy(0.5 * dt, k2, u);
    rhs(p, tmp, t + 0.5 * dt, vcache, k3);
    tmp = lattice::axpy(dt, k3, u);
    rhs(p, tmp, t + dt, vcache, k4);
    for (std::size_t i = 0; i < u.values.size(); ++i)
        u.values[i] += dt / 6.0 *
                       (k1.values[i] + 2.0 * k2.values[i] + 2.0 * k3.values[i] +
                        k4.values[i]);
}

// Dense symmetric matrix exponential by scaling and squaring with a Taylor
// core; the generator Delta + V on desk-size boxes is small.
inline std::vector<double> expm_times(const std::vector<double>& A, int n, double t) {
    // returns exp(t A) as dense row-major n x n
    double norm = 0.0;  // inf-norm
    for (int r = 0; r < n; ++r) {
        double s = 0.0;
        for (int c = 0; c < n; ++c) s += std::fabs(A[r * n + c]);
        norm = std::max(norm, s);
    }
    int squarings = 0;
    double scale = std::fabs(t) * norm;
    while (scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    const double tau = t / std::pow(2.0, squarings);
    std::vector<double> result(n * n, 0.0), term(n * n, 0.0), next(n * n, 0.0);
    for (int i = 0; i < n; ++i) result[i * n + i] = 1.0, term[i * n + i] = 1.0;
    for (int k = 1; k <= 30; ++k) {
        // term <- term * (tau A) / k
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double s = 0.0;
                for (int m = 0; m < n; ++m) s += term[r * n + m] * A[m * n + c];
                next[r * n + c] = s * tau / k;
            }
        std::swap(term, next);
        double tn = 0.0;
        for (double v : term) tn = std::max(tn, std::fabs(v));
        for (int i = 0; i < n * n; ++i) result[i] += term[i];
        if (tn < 1e-20) break;
    }
    for (int s = 0; s < squarings; ++s) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                double acc = 0.0;
                for (int m = 0; m < n; ++m) acc += result[r * n + m] * result[m * n + c];
                next[r * n + c] = acc;
            }
        std::swap(result, next);
    }
    return result;
}

}  // namespace detail

// Integrates u' = Delta u + V u over t_grid.  rk4 obeys the stability-
// margined step dt <= min(dt_max, 0.1 h^2/(2d + |V| h^2)); the exponential
// method (time-independent V only) exponentiates the boxed generator.
inline Trajectory solve(const HeatProblem& p, HeatMethod method, double dt_max) {
    if (dt_max <= 0.0) throw std::invalid_argument("solve: dt_max must be positive");
    Trajectory traj{p, {}, {}};
    traj.snapshots.reserve(p.t_grid.size());

    const double norm0 = lattice::l2_norm(p.initial);

    if (method == HeatMethod::Exponential) {
        if (!p.time_independent)
            throw std::invalid_argument("solve: exponential method needs static V");
        const int n = (int)p.box.site_count();
        if (n > 1200)
            throw std::invalid_argument("solve: exponential method limited to small boxes");
        std::vector<double> A(n * (std::size_t)n, 0.0);
        const double invh2 = 1.0 / (p.box.h * p.box.h);
        lattice::detail::for_each_site(p.box, [&](std::size_t i, const std::array<int, 3>& j) {
            A[i * n + i] = -2.0 * p.box.d * invh2 + p.potential(j, 0.0);
            for (int k = 0; k < p.box.d; ++k)
                for (int step : {-1, +1}) {
                    const auto jj = lattice::detail::shifted(j, k, step);
                    if (p.box.contains(jj)) A[i * n + p.box.flat(jj)] = invh2;
                }
        });
        LatticeField u = p.initial;
        traj.snapshots.push_back(u);
        for (std::size_t i = 1; i < p.t_grid.size(); ++i) {
            const double dt = p.t_grid[i] - p.t_grid[i - 1];
            const auto P = detail::expm_times(A, n, dt);
            LatticeField nu(p.box);
            for (int r = 0; r < n; ++r) {
                double s = 0.0;
                for (int c = 0; c < n; ++c) s += P[r * (std::size_t)n + c] * u.values[c];
                nu.values[r] = s;
            }
            u = nu;
            traj.snapshots.push_back(u);
            ++traj.stats.steps;
        }
        return traj;
    }

    // rk4; the cap keeps dt well inside the 0.1 h^2/(2d + |V| h^2)
    // stability budget so that halving dt moves snapshots by < 1e-8.
    const double h2 = p.box.h * p.box.h;
    const double dt_stab = 0.05 * h2 / (2.0 * p.box.d + p.v_sup * h2);
    const double dt_cap = std::min(dt_max, dt_stab);
    std::vector<double> vcache;
    const std::vector<double>* vptr = nullptr;
    if (p.time_independent) {
        vcache.resize(p.box.site_count());
        lattice::detail::for_each_site(p.box, [&](std::size_t i, const std::array<int, 3>& j) {
            vcache[i] = p.potential(j, 0.0);
        });
        vptr = &vcache;
    }
    LatticeField scratch[4] = {LatticeField(p.box), LatticeField(p.box),
                               LatticeField(p.box), LatticeField(p.box)};
    LatticeField u = p.initial;
    traj.snapshots.push_back(u);
    for (std::size_t seg = 1; seg < p.t_grid.size(); ++seg) {
        const double t0 = p.t_grid[seg - 1], t1 = p.t_grid[seg];
        const int nsub = std::max(1, (int)std::ceil((t1 - t0) / dt_cap - 1e-12));
        const double dt = (t1 - t0) / nsub;
        double t = t0;
        for (int s = 0; s < nsub; ++s) {
            if ((traj.stats.steps & 63) == 0) {
                // occasional embedded estimate: full step vs two half steps
                LatticeField a = u, b = u;
                detail::rk4_step(p, a, t, dt, vptr, scratch);
                detail::rk4_step(p, b, t, dt / 2, vptr, scratch);
                detail::rk4_step(p, b, t + dt / 2, dt / 2, vptr, scratch);
                double num = 0.0, den = 0.0;
                for (std::size_t i = 0; i < a.values.size(); ++i) {
                    num = std::max(num, std::fabs(a.values[i] - b.values[i]));
                    den = std::max(den, std::fabs(b.values[i]));
                }
                if (den > 0.0)
                    traj.stats.max_step_error = std::max(traj.stats.max_step_error, num / den);
                u = b;
            } else {
                detail::rk4_step(p, u, t, dt, vptr, scratch);
            }
            t += dt;
            ++traj.stats.steps;
        }
        const double bound = std::exp(2.0 * t1 * p.v_sup) * norm0;
        if (lattice::l2_norm(u) > bound * 1.01 + 1e-300)
            throw InstabilityError("solve: norm grew past the energy bound at t=" +
                                   std::to_string(t1));
        traj.snapshots.push_back(u);
    }
    return traj;
}

// Free kernel u_j(t) = prod_k e^{-2t/h^2} I_{j_k - s_k}(2t/h^2), log domain.
inline LogField free_kernel_log(const LatticeBox& box, double t,
                                const std::array<int, 3>& source) {
    if (t < 0.0) throw std::invalid_argument("free_kernel_log: negative time");
    if (!box.contains(source))
        throw std::invalid_argument("free_kernel_log: source outside box");
    const double x = 2.0 * t / (box.h * box.h);
    int n_max = 0;
    for (int k = 0; k < box.d; ++k)
        n_max = std::max(n_max, box.extent + std::abs(source[k]));
    const auto tab = bessel::log_bessel_i_table(n_max, x);
    LogField out(box);
    lattice::detail::for_each_site(box, [&](std::size_t i, const std::array<int, 3>& j) {
        double lm = 0.0;
        bool zero = false;
        for (int k = 0; k < box.d; ++k) {
            const double lk = tab[std::abs(j[k] - source[k])];
            if (lk == -std::numeric_limits<double>::infinity()) zero = true;
            lm += -x + lk;
        }
        out.values[i] = zero ? LogScalar::zero() : LogScalar(+1, lm);
    });
    return out;
}

inline LatticeField free_kernel_solution(const LatticeBox& box, double t,
                                         const std::array<int, 3>& source) {
    return free_kernel_log(box, t, source).to_linear();
}

// The explicit fast-decaying free solution
//   u_j(t) = prod_k e^{-2t/h^2} I_{j_k}(2t/h^2 + 1/h^2) / I_0(1/h^2),
// kept in log domain (its tail underflows immediately).
inline LogField example_solution(const LatticeBox& box, double t) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("example_solution: t outside [0,1]");
    const double h2 = box.h * box.h;
    const double z = (2.0 * t + 1.0) / h2;
    const auto tab = bessel::log_bessel_i_table(box.extent, z);
    const double li0 = bessel::log_bessel_i(0, 1.0 / h2).logmag;
    LogField out(box);
    lattice::detail::for_each_site(box, [&](std::size_t i, const std::array<int, 3>& j) {
        double lm = 0.0;
        for (int k = 0; k < box.d; ++k)
            lm += -2.0 * t / h2 + tab[std::abs(j[k])] - li0;
        out.values[i] = LogScalar(+1, lm);
    });
    return out;
}

// Sum of all sites (signed), in log domain.
inline LogScalar total_mass(const LogField& f) {
    LogSum pos, neg;
    for (const auto& v : f.values) {
        if (v.sign > 0) pos.add(v.logmag);
        else if (v.sign < 0) neg.add(v.logmag);
    }
    return pos.value() - neg.value();
}

inline double total_mass(const LatticeField& f) {
    long double s = 0.0L;
    for (double v : f.values) s += v;
    return (double)s;
}

// --- energy estimate audit -------------------------------------------------

struct EnergyReport {
    double min_slack_rel = 0.0;   // min over t of (bound - lhs)/bound
    double argmin_t = 0.0;
    bool pass(double tol = -1e-6) const { return min_slack_rel >= tol; }
};

// Checks |u(t)|^2 + 2 h^d int_0^t sum |D_- u|^2 <= e^{2 t |V|} |u(0)|^2 on
// the trajectory grid (trapezoid in time).
inline EnergyReport audit_energy(const Trajectory& traj) {
    const auto& p = traj.problem;
    const double n0sq = std::pow(lattice::l2_norm(p.initial), 2);
    std::vector<double> grad(traj.snapshots.size());
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        double g = 0.0;
        for (int k = 0; k < p.box.d; ++k) {
            const double nk =
                lattice::l2_norm(lattice::diff_op(traj.snapshots[i], k,
                                                  lattice::DiffKind::Backward));
            g += nk * nk;
        }
        grad[i] = g;
    }
    EnergyReport rep;
    rep.min_slack_rel = std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        if (i > 0)
            acc += 0.5 * (p.t_grid[i] - p.t_grid[i - 1]) * (grad[i] + grad[i - 1]);
        const double lhs =
            std::pow(lattice::l2_norm(traj.snapshots[i]), 2) + 2.0 * acc;
        const double bound = std::exp(2.0 * p.t_grid[i] * p.v_sup) * n0sq;
        const double slack = bound > 0.0 ? (bound - lhs) / bound : 0.0;
        if (slack < rep.min_slack_rel) {
            rep.min_slack_rel = slack;
            rep.argmin_t = p.t_grid[i];
        }
    }
    return rep;
}

// --- interior parabolic regularity audit ------------------------------------

struct CaccioppoliReport {
    double lhs = 0.0;          // int_0^1 sum_k |D_+ u|^2 on A(R-1,R)
    double mass_time = 0.0;    // int_0^1 |u|^2 on A(R-2,R+1)
    double mass_zero = 0.0;    // |u(0)|^2 on A(R-2,R+1)
    double c2_hat = 0.0;       // smallest C2 with C1 = 1
};

inline CaccioppoliReport audit_caccioppoli(const Trajectory& traj, double R) {
    const auto& p = traj.problem;
    if (R + 1.0 >= p.box.extent * p.box.h)
        throw std::invalid_argument("audit_caccioppoli: annulus leaves the box");
    auto annulus_sq = [&](const LatticeField& f, double r1, double r2) {
        long double s = 0.0L;
        lattice::detail::for_each_site(p.box, [&](std::size_t i, const std::array<int, 3>& j) {
            const double r = p.box.radius(j);
            if (r1 < r && r < r2) s += (long double)f.values[i] * f.values[i];
        });
        return (double)s * std::pow(p.box.h, p.box.d);
    };
    std::vector<double> g(traj.snapshots.size(), 0.0), m(traj.snapshots.size(), 0.0);
    for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
        for (int k = 0; k < p.box.d; ++k)
            g[i] += annulus_sq(lattice::diff_op(traj.snapshots[i], k,
                                                lattice::DiffKind::Forward),
                               R - 1.0, R);
        m[i] = annulus_sq(traj.snapshots[i], R - 2.0, R + 1.0);
    }
    CaccioppoliReport rep;
    for (std::size_t i = 1; i < traj.snapshots.size(); ++i) {
        const double w = 0.5 * (p.t_grid[i] - p.t_grid[i - 1]);
        rep.lhs += w * (g[i] + g[i - 1]);
        rep.mass_time += w * (m[i] + m[i - 1]);
    }
    rep.mass_zero = annulus_sq(traj.snapshots[0], R - 2.0, R + 1.0);
    rep.c2_hat = rep.mass_time > 0.0
                     ? std::max(0.0, (rep.lhs - rep.mass_zero) / rep.mass_time)
                     : 0.0;
    return rep;
}

// --- Gaussian limit table ----------------------------------------------------

struct GaussianLimitRow {
    double h;
    double discrete;   // (1/h) e^{-2t/(xh)^2} I_{1/h}(2t/(xh)^2)
    double continuum;  // (x/sqrt(4 pi t)) e^{-x^2/(4t)}
    double delta;
};

inline std::vector<GaussianLimitRow> gaussian_limit(double x, double t,
                                                    const std::vector<double>& h_list) {
    if (x <= 0.0 || t <= 0.0)
        throw std::invalid_argument("gaussian_limit: x and t must be positive");
    std::vector<GaussianLimitRow> rows;
    for (double h : h_list) {
        const double inv = 1.0 / h;
        if (std::fabs(inv - std::round(inv)) > 1e-9)
            throw std::invalid_argument("gaussian_limit: 1/h must be an integer");
        const int n = (int)std::round(inv);
        const double z = 2.0 * t / (x * h * x * h);
        const double lv = bessel::log_bessel_i(n, z).logmag - z + std::log(inv);
        const double cont = x / std::sqrt(4.0 * M_PI * t) * std::exp(-x * x / (4.0 * t));
        const double disc = std::exp(lv);
        rows.push_back({h, disc, cont, std::fabs(disc - cont)});
    }
    return rows;
}

}  // namespace landis::heat
