#pragma once

// Independent reference evaluators used only by tests.  Deliberately simple
// and slow: plain long-double power series for I and J, and a dense
// trapezoid of the cosh integral for K in linear scale.  None of these
// share code with the library's evaluation branches.

#include <cmath>
#include <stdexcept>

namespace oracle {

// Truncated power series, all terms positive.
inline long double bessel_i(int n, long double x) {
    n = n < 0 ? -n : n;
    if (x == 0.0L) return n == 0 ? 1.0L : 0.0L;
    const long double q = x * x / 4.0L;
    long double pref = 1.0L;
    for (int k = 1; k <= n; ++k) pref *= x / (2.0L * k);
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 10000; ++k) {
        term *= q / ((long double)k * (n + k));
        sum += term;
        if (term < sum * 1e-25L) break;
    }
    return pref * sum;
}

// Alternating series; accurate while cancellation is mild (x <= ~25).
inline long double bessel_j(int n, long double x) {
    if (n < 0) throw std::invalid_argument("oracle::bessel_j: order");
    const long double q = x * x / 4.0L;
    long double pref = 1.0L;
    for (int k = 1; k <= n; ++k) pref *= x / (2.0L * k);
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 10000; ++k) {
        term *= -q / ((long double)k * (n + k));
        sum += term;
        if (std::fabs((double)term) < 1e-28L && k > (int)x) break;
    }
    return pref * sum;
}

// K_nu(z) = int_0^inf e^{-z cosh t} cosh(nu t) dt by a dense trapezoid;
// linear scale, so only usable where K does not underflow (z <= ~600).
inline long double bessel_k(long double nu, long double z, int nodes = 20000) {
    if (z <= 0.0L) throw std::invalid_argument("oracle::bessel_k: argument");
    nu = std::fabs((double)nu);
    // window: walk out until the integrand is negligible
    auto logf = [&](long double t) {
        long double a = nu * t;
        long double lc = a > 30.0L ? a - std::log(2.0L) : std::log(std::cosh(a));
        return -z * std::cosh(t) + lc;
    };
    long double tpk = std::asinh((double)(nu / z));
    long double T = tpk + 1.0L;
    while (logf(T) > logf(tpk) - 120.0L) T += 0.25L;
    const long double dt = T / nodes;
    long double s = 0.5L * std::exp(logf(0.0L));
    for (int i = 1; i < nodes; ++i) s += std::exp(logf(i * dt));
    s += 0.5L * std::exp(logf(T));
    return s * dt;
}

}  // namespace oracle
