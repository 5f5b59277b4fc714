#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "landis/log_scalar.hpp"

// Log-domain evaluation of the modified Bessel functions I_n, K_n and the
// oscillatory J_n for integer orders, arguments from 1e-3 up to 1e8.
// Values such as K_0(1e6) ~ exp(-1e6) never exist in linear scale here;
// every routine returns a LogScalar.
//
// Branch layout:
//   I_n: power series (small x); large-argument expansion (x >> n^2);
//        ratio continued fraction + stable downward recurrence otherwise;
//        uniform large-order expansion for very large n.
//   K_n: ascending series for K_0/K_1 (small x), optimally truncated
//        large-argument expansion (moderate/large x), then upward
//        recurrence in the order carried in log scale; uniform large-order
//        expansion for very large n.  Real orders go through the cosh
//        integral representation (trapezoid on a doubly-exponentially
//        decaying even integrand) or the large-order expansion.
//   J_n: leading-term-dominated series in log scale when n >= x,
//        otherwise plain series or downward (Miller) recurrence.

namespace landis::bessel {

struct BesselEvalPolicy {
    double series_cutoff = 30.0;          // power series below this argument
    double asymptotic_order_ratio = 10.0; // nu/z above this may use uniform expansion
    int quadrature_nodes = 256;           // trapezoid nodes for the K integral
};

inline const BesselEvalPolicy& default_policy() {
    static const BesselEvalPolicy p{};
    return p;
}

namespace detail {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240;

// --- I_n: power series, log prefactor split out -------------------------

inline double log_i_series(int n, double x) {
    // log I_n(x) = n log(x/2) - lgamma(n+1) + log sum_k t_k,
    // t_0 = 1, t_{k+1} = t_k * (x^2/4) / ((k+1)(n+k+1)); all terms positive.
    const long double q = (long double)x * x / 4.0L;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 0; k < 40000; ++k) {
        term *= q / ((long double)(k + 1) * (long double)(n + k + 1));
        sum += term;
        if (term < sum * 1e-22L) break;
    }
    return n * std::log(x / 2.0) - std::lgamma((double)n + 1.0) +
           (double)std::log(sum);
}

// --- large-argument expansion, valid when x is well above 4 n^2 ----------

inline double log_i_asym_large_arg(int n, double x) {
    // I_n(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k,
    // a_k = prod_{i<=k}(4n^2-(2i-1)^2) / (k! (8x)^k); truncated at the
    // smallest term (the series is asymptotic).
    const long double mu = 4.0L * n * n;
    long double term = 1.0L, sum = 1.0L, prev = 1e300L;
    for (int k = 1; k < 1000; ++k) {
        const long double f =
            (mu - (2.0L * k - 1.0L) * (2.0L * k - 1.0L)) / (8.0L * k * (long double)x);
        term *= -f;
        if (std::fabs((double)term) >= (double)prev) break;  // started diverging
        sum += term;
        prev = std::fabs((double)term);
        if (prev < 1e-20L) break;
    }
    return x - 0.5 * std::log(2.0 * M_PI * x) + std::log((double)sum);
}

inline double log_k_asym_large_arg(int n, double x) {
    // K_n(x) ~ sqrt(pi/(2x)) e^{-x} * sum_k a_k (same a_k, all +).
    const long double mu = 4.0L * n * n;
    long double term = 1.0L, sum = 1.0L, prev = 1e300L;
    for (int k = 1; k < 1000; ++k) {
        const long double f =
            (mu - (2.0L * k - 1.0L) * (2.0L * k - 1.0L)) / (8.0L * k * (long double)x);
        term *= f;
        if (std::fabs((double)term) >= (double)prev) break;
        sum += term;
        prev = std::fabs((double)term);
        if (prev < 1e-20L) break;
    }
    return -x + 0.5 * std::log(M_PI / (2.0 * x)) + std::log((double)sum);
}

// --- uniform large-order (Debye) expansions with correction terms --------

inline long double debye_poly(int k, long double t) {
    // Olver's u_k(t) polynomials, k <= 4.
    const long double t2 = t * t;
    switch (k) {
        case 0: return 1.0L;
        case 1: return t * (3.0L - 5.0L * t2) / 24.0L;
        case 2: return t2 * (81.0L - 462.0L * t2 + 385.0L * t2 * t2) / 1152.0L;
        case 3:
            return t * t2 *
                   (30375.0L - 369603.0L * t2 + 765765.0L * t2 * t2 -
                    425425.0L * t2 * t2 * t2) /
                   414720.0L;
        case 4:
            return t2 * t2 *
                   (4465125.0L - 94121676.0L * t2 + 349922430.0L * t2 * t2 -
                    446185740.0L * t2 * t2 * t2 + 185910725.0L * t2 * t2 * t2 * t2) /
                   39813120.0L;
        default: return 0.0L;
    }
}

// eta(z) = sqrt(1+z^2) + log(z / (1 + sqrt(1+z^2))), the exponent of the
// uniform expansions at order nu and argument nu*z.
inline double uniform_eta(double z) {
    const double r = std::hypot(1.0, z);
    return r + std::log(z / (1.0 + r));
}

inline double log_i_uniform(double nu, double z, int terms = 5) {
    const long double t = 1.0L / std::sqrt(1.0L + (long double)z * z);
    long double s = 0.0L, p = 1.0L;
    for (int k = 0; k < terms; ++k) {
        s += debye_poly(k, t) * p;
        p /= nu;
    }
    return nu * uniform_eta(z) - 0.5 * std::log(2.0 * M_PI * nu) -
           0.25 * std::log1p(z * z) + std::log((double)s);
}

inline double log_k_uniform(double nu, double z, int terms = 5) {
    const long double t = 1.0L / std::sqrt(1.0L + (long double)z * z);
    long double s = 0.0L, p = 1.0L;
    for (int k = 0; k < terms; ++k) {
        s += debye_poly(k, t) * (k % 2 ? -p : p);
        p /= nu;
    }
    return -nu * uniform_eta(z) + 0.5 * std::log(M_PI / (2.0 * nu)) -
           0.25 * std::log1p(z * z) + std::log((double)s);
}

// --- ratio continued fraction I_{nu+1}/I_nu (works for real nu >= 0) -----

inline double i_ratio_cf(double nu, double x) {
    // Gautschi/Lentz evaluation of x / (2(nu+1) + x^2/(2(nu+2) + ...)).
    const double tiny = 1e-300;
    double b = 2.0 * (nu + 1.0) / x;
    double f = b, C = b, D = 0.0;
    if (f == 0.0) f = tiny;
    for (int i = 2; i < 20000000; ++i) {
        b = 2.0 * (nu + i) / x;
        C = b + 1.0 / C;
        if (C == 0.0) C = tiny;
        D = b + D;
        if (D == 0.0) D = tiny;
        D = 1.0 / D;
        const double delta = C * D;
        f *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return 1.0 / f;
}

// --- downward recurrence from a continued-fraction seed -------------------

inline double log_i_cf_down(int n, double x) {
    // Seed (I_{n+1}, I_n) ~ (r, 1) with r from the continued fraction, run
    // I_{k-1} = I_{k+1} + (2k/x) I_k down to 0, rescale on overflow, anchor
    // at the large-argument value of log I_0.
    const double r = i_ratio_cf((double)n, x);
    double up = r, cur = 1.0;  // I_{k+1}, I_k at k = n
    double logscale = 0.0;
    for (int k = n; k >= 1; --k) {
        const double prev = up + (2.0 * k / x) * cur;
        up = cur;
        cur = prev;
        if (cur > 1e280) {
            up /= 1e280;
            cur /= 1e280;
            logscale += std::log(1e280);
        }
    }
    // cur = I_0 / I_n (up to the tracked scale)
    return log_i_asym_large_arg(0, x) - (std::log(cur) + logscale);
}

// --- K_0, K_1 ascending series (small argument) ---------------------------

inline std::pair<double, double> k01_series(double x) {
    // K_0 = -(log(x/2)+gamma) I_0 + sum_{k>=1} q^k/(k!)^2 H_k
    // K_1 = 1/x + log(x/2) I_1 - (x/4) sum_k (psi(k+1)+psi(k+2)) q^k/(k!(k+1)!)
    // with psi(k+1) = -gamma + H_k; long double to beat the cancellation
    // against the log term.
    const long double q = (long double)x * x / 4.0L;
    const long double lh = std::log((long double)x / 2.0L);
    long double i0 = 1.0L, i1 = 1.0L, t0 = 1.0L, t1 = 1.0L;
    long double s0 = 0.0L, s1 = 0.0L;  // series parts
    long double Hk = 0.0L;
    long double psum1 = -2.0L * kEulerGamma + 1.0L;  // psi(1)+psi(2)
    s1 = psum1;                                      // k = 0 term of K_1 sum
    for (int k = 1; k < 400; ++k) {
        t0 *= q / ((long double)k * k);
        i0 += t0;
        t1 *= q / ((long double)k * (k + 1));
        i1 += t1;
        Hk += 1.0L / k;
        s0 += t0 * Hk;
        // psi(k+1)+psi(k+2) = -2 gamma + 2 H_k + 1/(k+1)
        const long double pk = -2.0L * kEulerGamma + 2.0L * Hk + 1.0L / (k + 1);
        s1 += t1 * pk;
        if (t0 < 1e-30L && t1 < 1e-30L) break;
    }
    i1 *= (long double)x / 2.0L;
    const long double K0 = -(lh + kEulerGamma) * i0 + s0;
    const long double K1 = 1.0L / x + lh * i1 - ((long double)x / 4.0L) * s1;
    return {(double)K0, (double)K1};
}

inline std::pair<double, double> log_k01(double x) {
    if (x <= 11.0) {
        auto [k0, k1] = k01_series(x);
        return {std::log(k0), std::log(k1)};
    }
    return {log_k_asym_large_arg(0, x), log_k_asym_large_arg(1, x)};
}

// Upward order recurrence in log scale: K_{k+1} = (2k/x) K_k + K_{k-1};
// all quantities positive, so this is a pure log-sum-exp chain.
inline double log_k_upward(int n, double x) {
    auto [l0, l1] = log_k01(x);
    if (n == 0) return l0;
    if (n == 1) return l1;
    double lo = l0, hi = l1;
    for (int k = 1; k < n; ++k) {
        const double nxt = log_add(std::log(2.0 * k / x) + hi, lo);
        lo = hi;
        hi = nxt;
    }
    return hi;
}

// --- cosh integral representation, trapezoid in log scale ----------------
// K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt; the integrand is even
// and decays doubly exponentially, so the plain trapezoid converges at
// spectral rate once the window covers the mass.

inline double log_k_integral(double nu, double z, int nodes) {
    if (nodes < 64) throw std::domain_error("log_k_integral: need >= 64 nodes");
    nu = std::fabs(nu);
    auto logf = [&](double t) {
        // log( e^{-z cosh t} cosh(nu t) ), stable for large nu*t
        const double a = nu * t;
        double lc;
        if (a > 30.0) lc = a - std::log(2.0) + std::log1p(std::exp(-2.0 * a));
        else lc = std::log(std::cosh(a));
        return -z * std::cosh(t) + lc;
    };
    const double tpeak = std::asinh(nu / z);
    const double fpeak = logf(tpeak);
    double T = tpeak + 1.0;
    while (logf(T) > fpeak - 800.0) T += 0.5;
    const double dt = T / (nodes - 1);
    long double sum = 0.0L;
    for (int i = 0; i < nodes; ++i) {
        const double t = i * dt;
        const double w = (i == 0 || i == nodes - 1) ? 0.5 : 1.0;
        sum += (long double)w * std::exp((long double)(logf(t) - fpeak));
    }
    return fpeak + std::log((double)(sum)) + std::log(dt);
}

// Half-integer orders have an exact finite form:
// K_{m+1/2}(x) = sqrt(pi/(2x)) e^{-x} sum_{k=0}^{m} (m+k)!/(k!(m-k)!(2x)^k).
inline double log_k_half_integer(int m, double x) {
    m = std::abs(m);
    LogSum s;
    for (int k = 0; k <= m; ++k) {
        const double lt = std::lgamma(m + k + 1.0) - std::lgamma(k + 1.0) -
                          std::lgamma(m - k + 1.0) - k * std::log(2.0 * x);
        s.add(lt);
    }
    return -x + 0.5 * std::log(M_PI / (2.0 * x)) + s.log_value();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public evaluators
// ---------------------------------------------------------------------------

inline LogScalar log_bessel_i(int n, double x,
                              const BesselEvalPolicy& pol = default_policy()) {
    if (x < 0.0) throw std::domain_error("log_bessel_i: negative argument");
    n = std::abs(n);  // I_n = I_{-n} for integer n
    if (x == 0.0) return n == 0 ? LogScalar::one() : LogScalar::zero();
    if (x <= pol.series_cutoff) return LogScalar(+1, detail::log_i_series(n, x));
    if (x >= 2.0 * (double)n * n)
        return LogScalar(+1, detail::log_i_asym_large_arg(n, x));
    if (n > 20000 && n >= pol.asymptotic_order_ratio * x)
        return LogScalar(+1, detail::log_i_uniform((double)n, x / n));
    return LogScalar(+1, detail::log_i_cf_down(n, x));
}

inline LogScalar log_bessel_k(int n, double x,
                              const BesselEvalPolicy& pol = default_policy()) {
    if (x <= 0.0) throw std::domain_error("log_bessel_k: nonpositive argument");
    n = std::abs(n);  // K_{-nu} = K_nu
    if (n > 20000 && n >= pol.asymptotic_order_ratio * x)
        return LogScalar(+1, detail::log_k_uniform((double)n, x / n));
    return LogScalar(+1, detail::log_k_upward(n, x));
}

// Real (possibly non-integer) order; evaluation through the integral
// representation, switching to the large-order expansion when the order
// dwarfs the argument.
inline LogScalar log_bessel_k_real(double nu, double x,
                                   const BesselEvalPolicy& pol = default_policy()) {
    if (x <= 0.0) throw std::domain_error("log_bessel_k_real: nonpositive argument");
    nu = std::fabs(nu);
    if (nu == std::floor(nu) && nu < 2e9) return log_bessel_k((int)nu, x, pol);
    if (std::fabs(nu - std::floor(nu) - 0.5) < 1e-12 && nu < 1e6)
        return LogScalar(+1, detail::log_k_half_integer((int)std::floor(nu), x));
    if (nu > 20000 && nu >= pol.asymptotic_order_ratio * x)
        return LogScalar(+1, detail::log_k_uniform(nu, x / nu));
    return LogScalar(+1, detail::log_k_integral(nu, x, pol.quadrature_nodes));
}

inline LogScalar log_bessel_j(int n, double x,
                              const BesselEvalPolicy& pol = default_policy()) {
    (void)pol;  // series/recurrence switching is argument-driven for J
    if (x <= 0.0) throw std::domain_error("log_bessel_j: nonpositive argument");
    if (n < 0) throw std::domain_error("log_bessel_j: negative order");
    const long double q = (long double)x * x / 4.0L;
    if ((double)n >= x || x <= 20.0) {
        // Alternating series with the log prefactor split off; track the
        // largest term to detect cancellation.
        long double term = 1.0L, sum = 1.0L, peak = 1.0L;
        for (int k = 0; k < 40000; ++k) {
            term *= -q / ((long double)(k + 1) * (long double)(n + k + 1));
            sum += term;
            peak = std::max(peak, std::fabs(term));
            if (std::fabs(term) < 1e-25L * std::max(std::fabs(sum), 1e-30L) &&
                (long double)(k) > q / (n + k + 1.0L))
                break;
        }
        if (peak < 1e6L * std::fabs(sum)) {  // enough digits survive
            const double lp = n * std::log(x / 2.0) - std::lgamma((double)n + 1.0);
            if (sum == 0.0L) return LogScalar::zero();
            return LogScalar(sum > 0 ? +1 : -1, lp + (double)std::log(std::fabs(sum)));
        }
    }
    // Miller downward recurrence, normalized with J_0 + 2 sum J_{2k} = 1.
    int M = (int)std::max<double>(n, std::ceil(x)) + 60;
    if (M % 2) ++M;
    double jp = 0.0, jc = 1e-30;
    double target = 0.0, norm = 0.0;
    for (int k = M; k >= 1; --k) {
        const double jm = (2.0 * k / x) * jc - jp;
        jp = jc;
        jc = jm;
        if (k - 1 == n) target = jc;
        if ((k - 1) % 2 == 0) norm += (k - 1 == 0 ? 1.0 : 2.0) * jc;
        if (std::fabs(jc) > 1e280) {
            jp /= 1e280;
            jc /= 1e280;
            target /= 1e280;
            norm /= 1e280;
        }
    }
    const double v = target / norm;
    return LogScalar::from_linear(v);
}

// K_{n+1}(x)/K_n(x) without either value in linear scale.
inline double k_ratio(int n, double x,
                      const BesselEvalPolicy& pol = default_policy()) {
    if (x <= 0.0) throw std::domain_error("k_ratio: nonpositive argument");
    const double a = log_bessel_k(n + 1, x, pol).logmag;
    const double b = log_bessel_k(n, x, pol).logmag;
    return std::exp(a - b);
}

// I_{nu+1}(x)/I_nu(x) for real nu >= 0 (ratio only; used by audits).
inline double i_ratio(double nu, double x) {
    if (x <= 0.0) throw std::domain_error("i_ratio: nonpositive argument");
    if (nu < 0.0) throw std::domain_error("i_ratio: negative order");
    return detail::i_ratio_cf(nu, x);
}

// log I_n(x) for all n = 0..n_max in one pass: one continued fraction at
// the top order plus a single downward sweep.  Much cheaper than n_max
// independent evaluations when kernels need a whole column.
inline std::vector<double> log_bessel_i_table(int n_max, double x,
                                              const BesselEvalPolicy& pol =
                                                  default_policy()) {
    if (x < 0.0) throw std::domain_error("log_bessel_i_table: negative argument");
    if (n_max < 0) throw std::domain_error("log_bessel_i_table: bad order");
    std::vector<double> out(n_max + 1);
    if (x == 0.0) {
        out[0] = 0.0;
        for (int n = 1; n <= n_max; ++n)
            out[n] = -std::numeric_limits<double>::infinity();
        return out;
    }
    if (x <= pol.series_cutoff) {
        for (int n = 0; n <= n_max; ++n) out[n] = detail::log_i_series(n, x);
        return out;
    }
    const double r = detail::i_ratio_cf((double)n_max, x);
    double up = r, cur = 1.0, shift = 0.0;
    out[n_max] = 0.0;
    for (int k = n_max; k >= 1; --k) {
        const double prev = up + (2.0 * k / x) * cur;
        up = cur;
        cur = prev;
        if (cur > 1e280) {
            up /= 1e280;
            cur /= 1e280;
            shift += std::log(1e280);
        }
        out[k - 1] = std::log(cur) + shift;
    }
    const double anchor = detail::log_i_asym_large_arg(0, x);
    const double w0 = out[0];
    for (int n = 0; n <= n_max; ++n) out[n] = anchor - w0 + out[n];
    return out;
}

// log K_n(x) for n = 0..n_max (upward recurrence carried in log scale).
inline std::vector<double> log_bessel_k_table(int n_max, double x,
                                              const BesselEvalPolicy& pol =
                                                  default_policy()) {
    if (x <= 0.0) throw std::domain_error("log_bessel_k_table: nonpositive argument");
    (void)pol;
    std::vector<double> out(n_max + 1);
    auto [l0, l1] = detail::log_k01(x);
    out[0] = l0;
    if (n_max >= 1) out[1] = l1;
    for (int k = 1; k < n_max; ++k)
        out[k + 1] = log_add(std::log(2.0 * k / x) + out[k], out[k - 1]);
    return out;
}

// Right-hand sides of the uniform large-order estimates for K_n(nz) and
// I_n(nz) at leading order; exposed as a cross-check companion to the
// full evaluators.
inline std::pair<LogScalar, LogScalar> uniform_asymptotics(int n, double z) {
    if (n < 1) throw std::domain_error("uniform_asymptotics: order must be >= 1");
    if (z <= 0.0) throw std::domain_error("uniform_asymptotics: nonpositive argument");
    const double eta = detail::uniform_eta(z);
    const double lk = -n * eta + 0.5 * std::log(M_PI / (2.0 * n)) -
                      0.25 * std::log1p(z * z);
    const double li = n * eta - 0.5 * std::log(2.0 * M_PI * n) -
                      0.25 * std::log1p(z * z);
    return {LogScalar(+1, lk), LogScalar(+1, li)};
}

}  // namespace landis::bessel
