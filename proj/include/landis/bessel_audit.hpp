#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "landis/bessel.hpp"

// Machine checks of the Macdonald-function inequality family: Turan-type
// bounds, order monotonicity, the derivative recurrence against a finite
// difference, and the I/K product monotonicity at half-integer orders.
//
// Margins are evaluated on e^{x} sqrt(2x/pi)-scaled values S_n(x) kept in
// linear long double, so consecutive orders share the exponential factor
// exactly and the tiny margins at x = 1e6 survive rounding.

namespace landis::bessel_audit {

namespace detail {

// Scaled column S_n(x) = K_n(x) e^x sqrt(2x/pi) for n = 0..n_max.
inline std::vector<long double> scaled_k_column(int n_max, double x) {
    std::vector<long double> S(n_max + 1);
    long double s0, s1;
    if (x <= 11.0) {
        auto [k0, k1] = bessel::detail::k01_series(x);
        const long double sc = std::exp((long double)x) *
                               std::sqrt(2.0L * x / (long double)M_PI);
        s0 = k0 * sc;
        s1 = k1 * sc;
    } else {
        // asymptotic partial sums, optimally truncated
        auto partial = [&](int nu) {
            const long double mu = 4.0L * nu * nu;
            long double term = 1.0L, sum = 1.0L, prev = 1e300L;
            for (int k = 1; k < 1000; ++k) {
                term *= (mu - (2.0L * k - 1.0L) * (2.0L * k - 1.0L)) /
                        (8.0L * k * (long double)x);
                if (std::fabs((double)term) >= (double)prev) break;
                sum += term;
                prev = std::fabs((double)term);
                if (prev < 1e-24L) break;
            }
            return sum;
        };
        s0 = partial(0);
        s1 = partial(1);
    }
    S[0] = s0;
    if (n_max >= 1) S[1] = s1;
    for (int k = 1; k < n_max; ++k)
        S[k + 1] = (2.0L * k / x) * S[k] + S[k - 1];  // scale-invariant recurrence
    return S;
}

// S_{m+1/2}(x) from the exact finite half-integer form.
inline long double scaled_k_half(int m, double x) {
    long double sum = 0.0L, term = 1.0L;
    for (int k = 0; k <= m; ++k) {
        if (k > 0)
            term *= (long double)(m + k) * (m - k + 1) / ((long double)k * 2.0L * x);
        sum += term;
    }
    return sum;
}

}  // namespace detail

struct InequalityRow {
    std::string name;
    double min_margin = std::numeric_limits<double>::infinity();
    int argmin_order = 0;
    double argmin_x = 0.0;
    bool strict = false;  // the inequality is strict, not just nonnegative

    void feed(double margin, int n, double x) {
        if (margin < min_margin) {
            min_margin = margin;
            argmin_order = n;
            argmin_x = x;
        }
    }
};

struct AppendixReport {
    std::vector<InequalityRow> rows;
    bool pass(double tol = -1e-8, double strict_tol = -1e-10) const {
        for (const auto& r : rows) {
            if (r.min_margin < tol) return false;
            if (r.strict && r.min_margin <= strict_tol) return false;
        }
        return true;
    }
};

inline AppendixReport audit_appendix_b(const std::vector<int>& orders,
                                       const std::vector<double>& xs) {
    if (orders.empty() || xs.empty())
        throw std::invalid_argument("audit_appendix_b: empty grid");
    for (double x : xs)
        if (x <= 0.0) throw std::invalid_argument("audit_appendix_b: x must be positive");

    InequalityRow turan{"turan"};
    turan.strict = true;
    InequalityRow turan2{"turan_lower"};
    turan2.strict = true;
    InequalityRow turan3{"turan_two_sided_order0"};
    turan3.strict = true;
    InequalityRow monot{"order_monotonicity"};
    monot.strict = true;
    InequalityRow recur{"derivative_recurrence_vs_fd"};
    InequalityRow prodmono{"product_monotonicity"};
    prodmono.strict = true;

    int n_top = 1;
    for (int n : orders) n_top = std::max(n_top, std::abs(n) + 2);

    for (double x : xs) {
        const auto S = detail::scaled_k_column(n_top, x);
        auto ratio2 = [&](int n) {  // K_n^2 / (K_{n+1} K_{n-1}), order-symmetric
            const long double a = S[std::abs(n)];
            const long double b = S[std::abs(n + 1)], c = S[std::abs(n - 1)];
            return (double)((a / b) * (a / c));
        };
        for (int n : orders) {
            const int an = std::abs(n);
            // Turan: K_n^2 <= K_{n+1} K_{n-1}
            turan.feed(1.0 - ratio2(n), n, x);
            // reverse Turan bound away from order zero
            if (an >= 1) turan2.feed(ratio2(n) - x / (1.0 + x), n, x);
            // order monotonicity K_n < K_{n+1} for n >= 0
            if (n >= 0) monot.feed((double)(S[n + 1] / S[n]) - 1.0, n, x);
            // derivative recurrence against a Richardson-extrapolated central
            // difference of log K; the shared exponential factor and the
            // sqrt(x) prefactor are differenced analytically so only the
            // O(1) scaled sums enter the cancellation.
            {
                const double delta = 5e-3 * x;
                auto dlog = [&](double dd) {
                    const auto Sp = detail::scaled_k_column(an, x + dd);
                    const auto Sm = detail::scaled_k_column(an, x - dd);
                    return -2.0 * dd -
                           0.5 * (std::log(x + dd) - std::log(x - dd)) +
                           (double)(std::log(Sp[an] / Sm[an]));
                };
                const double fd =
                    (8.0 * dlog(delta) - dlog(2.0 * delta)) / (12.0 * delta);
                const double formula =
                    -(double)((S[std::abs(n + 1)] + S[std::abs(n - 1)]) / (2.0L * S[an]));
                recur.feed(-std::fabs(fd / formula - 1.0), n, x);
            }
            // product monotonicity at half-integer orders (nu = |n| >= 1):
            //   I_{nu+1/2}/I_{nu-1/2} < x/(nu + sqrt(nu^2+x^2)) <= K_{nu-1/2}/K_{nu+1/2}
            if (an >= 1) {
                const double nu = an;
                const double mid = x / (nu + std::hypot(nu, x));
                const double iratio = bessel::i_ratio(nu - 0.5, x);
                const double kratio =
                    (double)(detail::scaled_k_half(an - 1, x) / detail::scaled_k_half(an, x));
                prodmono.feed((mid - iratio) / (1.0 - iratio), n, x);
                prodmono.feed((kratio - mid) / (1.0 - mid), n, x);
            }
        }
        // two-sided bound at order zero
        const double r0 = ratio2(0);
        turan3.feed(r0 - 1.0 / (1.0 + 1.0 / x + 1.0 / (4.0 * x * x * x)), 0, x);
        turan3.feed(x / (x + 1.0) - r0, 0, x);
    }

    AppendixReport rep;
    rep.rows = {turan, turan2, turan3, monot, recur, prodmono};
    return rep;
}

// Wronskian-style cross-check: I_n K_{n+1} + I_{n+1} K_n = 1/x.
// Returns the worst relative deviation over the grid.
inline double wronskian_worst(const std::vector<int>& orders,
                              const std::vector<double>& xs) {
    double worst = 0.0;
    for (int n : orders) {
        for (double x : xs) {
            const auto v = bessel::log_bessel_i(n, x) * bessel::log_bessel_k(n + 1, x) +
                           bessel::log_bessel_i(n + 1, x) * bessel::log_bessel_k(n, x);
            worst = std::max(worst, std::fabs(v.to_linear() * x - 1.0));
        }
    }
    return worst;
}

}  // namespace landis::bessel_audit
