#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

// Small least-squares helpers for the exponent-recovery audits.

namespace landis::fit {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;  // coefficient of determination
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need at least two points");
    const std::size_t n = x.size();
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += (long double)x[i] * x[i];
        sxy += (long double)x[i] * y[i];
    }
    const long double det = n * sxx - sx * sx;
    if (det == 0.0L) throw std::invalid_argument("linear_fit: degenerate abscissae");
    LinearFit f;
    f.slope = (double)((n * sxy - sx * sy) / det);
    f.intercept = (double)((sy - f.slope * sx) / n);
    long double ssr = 0, sst = 0;
    const long double ybar = sy / n;
    for (std::size_t i = 0; i < n; ++i) {
        const long double e = y[i] - (f.slope * x[i] + f.intercept);
        ssr += e * e;
        sst += ((long double)y[i] - ybar) * ((long double)y[i] - ybar);
    }
    f.r2 = sst > 0.0L ? (double)(1.0L - ssr / sst) : 1.0;
    return f;
}

struct PowerFit {
    double exponent = 0.0;  // p in y ~ scale * x^p + offset
    double scale = 0.0;
    double offset = 0.0;
    double r2 = 0.0;
};

// Profiled fit of y = scale * x^p + offset: for each p on a grid solve the
// linear subproblem, keep the best residual.  Robust against the additive
// offsets that bias a plain log-log regression.
inline PowerFit profiled_power_fit(const std::vector<double>& x,
                                   const std::vector<double>& y, double p_min = 1.0,
                                   double p_max = 3.0, double p_step = 1e-3) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("profiled_power_fit: need at least three points");
    const std::size_t n = x.size();
    long double sy = 0, sst = 0;
    for (double v : y) sy += v;
    const long double ybar = sy / n;
    for (double v : y) sst += ((long double)v - ybar) * ((long double)v - ybar);

    PowerFit best;
    long double best_ssr = -1.0L;
    std::vector<double> xp(n);
    for (double p = p_min; p <= p_max + 1e-12; p += p_step) {
        for (std::size_t i = 0; i < n; ++i) xp[i] = std::pow(x[i], p);
        long double sx = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sx += xp[i];
            sxx += (long double)xp[i] * xp[i];
            sxy += (long double)xp[i] * y[i];
        }
        const long double det = n * sxx - sx * sx;
        if (det == 0.0L) continue;
        const long double a = (n * sxy - sx * sy) / det;
        const long double b = (sy - a * sx) / n;
        long double ssr = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const long double e = y[i] - (a * xp[i] + b);
            ssr += e * e;
        }
        if (best_ssr < 0.0L || ssr < best_ssr) {
            best_ssr = ssr;
            best.exponent = p;
            best.scale = (double)a;
            best.offset = (double)b;
        }
    }
    best.r2 = sst > 0.0L ? (double)(1.0L - best_ssr / sst) : 1.0;
    return best;
}

}  // namespace landis::fit
