#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace landis {

// Signed number stored as (sign, log of magnitude).  Survives magnitudes
// like exp(-1e6) that underflow any native float.  Multiplicative ops act
// on logmag directly; add/sub go through log-sum-exp and never materialize
// the linear value.
struct LogScalar {
    int sign = 0;  // -1, 0, +1
    double logmag = -std::numeric_limits<double>::infinity();

    constexpr LogScalar() = default;
    constexpr LogScalar(int s, double lm) : sign(s), logmag(lm) {
        if (sign == 0) logmag = -std::numeric_limits<double>::infinity();
    }

    static LogScalar zero() { return LogScalar(); }
    static LogScalar one() { return LogScalar(+1, 0.0); }

    static LogScalar from_linear(double x) {
        if (x == 0.0) return LogScalar();
        return LogScalar(x > 0 ? +1 : -1, std::log(std::fabs(x)));
    }
    // Exponent known in log form already, sign separate.
    static LogScalar from_log(double lm, int s = +1) {
        if (s == 0) return LogScalar();
        return LogScalar(s, lm);
    }

    bool is_zero() const { return sign == 0; }

    // Linear value; overflows to +-inf and underflows to 0 like exp() does.
    double to_linear() const {
        if (sign == 0) return 0.0;
        return sign * std::exp(logmag);
    }

    LogScalar operator-() const { return LogScalar(-sign, logmag); }

    friend LogScalar operator*(LogScalar a, LogScalar b) {
        if (a.sign == 0 || b.sign == 0) return LogScalar();
        return LogScalar(a.sign * b.sign, a.logmag + b.logmag);
    }
    friend LogScalar operator/(LogScalar a, LogScalar b) {
        if (b.sign == 0) throw std::domain_error("LogScalar: division by zero");
        if (a.sign == 0) return LogScalar();
        return LogScalar(a.sign * b.sign, a.logmag - b.logmag);
    }
    // Integer or real power of a nonnegative value (or integer power of any).
    LogScalar pow(double p) const {
        if (sign == 0) return LogScalar();
        if (sign < 0) throw std::domain_error("LogScalar: pow of negative base");
        return LogScalar(+1, logmag * p);
    }

    friend LogScalar operator+(LogScalar a, LogScalar b) {
        if (a.sign == 0) return b;
        if (b.sign == 0) return a;
        if (a.logmag < b.logmag) std::swap(a, b);
        // |a| >= |b|
        const double d = b.logmag - a.logmag;  // <= 0
        if (a.sign == b.sign)
            return LogScalar(a.sign, a.logmag + std::log1p(std::exp(d)));
        const double t = std::exp(d);
        if (t == 1.0) return LogScalar();  // exact cancellation
        return LogScalar(a.sign, a.logmag + std::log1p(-t));
    }
    friend LogScalar operator-(LogScalar a, LogScalar b) { return a + (-b); }

    LogScalar& operator+=(LogScalar o) { *this = *this + o; return *this; }
    LogScalar& operator*=(LogScalar o) { *this = *this * o; return *this; }

    // Magnitude comparison helpers (sign-aware total order).
    friend bool operator<(LogScalar a, LogScalar b) {
        if (a.sign != b.sign) return a.sign < b.sign;
        if (a.sign == 0) return false;
        return a.sign > 0 ? a.logmag < b.logmag : a.logmag > b.logmag;
    }
    friend bool operator>(LogScalar a, LogScalar b) { return b < a; }
};

// log(exp(a) + exp(b)) without leaving log scale.
inline double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    if (a < b) std::swap(a, b);
    return a + std::log1p(std::exp(b - a));
}

// Streaming log-sum-exp accumulator for nonnegative terms.
class LogSum {
  public:
    void add(double lm) { total_ = log_add(total_, lm); }
    void add(LogScalar v) {
        if (v.sign < 0) throw std::domain_error("LogSum: negative term");
        if (v.sign != 0) add(v.logmag);
    }
    double log_value() const { return total_; }
    LogScalar value() const {
        if (total_ == -std::numeric_limits<double>::infinity()) return LogScalar();
        return LogScalar(+1, total_);
    }

  private:
    double total_ = -std::numeric_limits<double>::infinity();
};

}  // namespace landis
