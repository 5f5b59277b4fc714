#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "landis/log_scalar.hpp"

// Truncated-box representation of real fields on the scaled integer lattice
// with the difference operators, norms and annulus sums used everywhere
// else.  Sites outside the box are implicitly zero.

namespace landis::lattice {

struct LatticeBox {
    int d = 1;       // spatial dimension, 1..3
    double h = 1.0;  // mesh size
    int extent = 4;  // indices run over [-extent, extent] per axis

    LatticeBox() = default;
    LatticeBox(int d_, double h_, int extent_) : d(d_), h(h_), extent(extent_) {
        if (d < 1 || d > 3) throw std::invalid_argument("LatticeBox: d must be 1..3");
        if (h <= 0.0) throw std::invalid_argument("LatticeBox: h must be positive");
        if (extent < 4) throw std::invalid_argument("LatticeBox: extent must be >= 4");
        std::size_t n = 1;
        for (int k = 0; k < d; ++k) {
            n *= side();
            if (n > (std::size_t)1 << 31)
                throw std::invalid_argument("LatticeBox: box too large");
        }
    }

    int side() const { return 2 * extent + 1; }
    std::size_t site_count() const {
        std::size_t n = 1;
        for (int k = 0; k < d; ++k) n *= side();
        return n;
    }
    bool contains(const std::array<int, 3>& j) const {
        for (int k = 0; k < d; ++k)
            if (std::abs(j[k]) > extent) return false;
        return true;
    }
    std::size_t flat(const std::array<int, 3>& j) const {
        std::size_t idx = 0;
        for (int k = 0; k < d; ++k) idx = idx * side() + (std::size_t)(j[k] + extent);
        return idx;
    }
    std::array<int, 3> unflat(std::size_t idx) const {
        std::array<int, 3> j{0, 0, 0};
        for (int k = d - 1; k >= 0; --k) {
            j[k] = (int)(idx % side()) - extent;
            idx /= side();
        }
        return j;
    }
    // Euclidean |hj|
    double radius(const std::array<int, 3>& j) const {
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += (double)j[k] * j[k];
        return h * std::sqrt(s);
    }
    // sup metric |j|_inf (index units)
    int inf_index(const std::array<int, 3>& j) const {
        int m = 0;
        for (int k = 0; k < d; ++k) m = std::max(m, std::abs(j[k]));
        return m;
    }
    bool operator==(const LatticeBox& o) const {
        return d == o.d && h == o.h && extent == o.extent;
    }
};

struct LatticeField {
    LatticeBox box;
    std::vector<double> values;  // dense, zero outside the box

    LatticeField() = default;
    explicit LatticeField(const LatticeBox& b) : box(b), values(b.site_count(), 0.0) {}

    double& at(const std::array<int, 3>& j) { return values[box.flat(j)]; }
    double at(const std::array<int, 3>& j) const {
        return box.contains(j) ? values[box.flat(j)] : 0.0;
    }
    static LatticeField delta(const LatticeBox& b, const std::array<int, 3>& site,
                              double amplitude = 1.0) {
        LatticeField f(b);
        f.at(site) = amplitude;
        return f;
    }
};

// Log-domain variant for fields whose tails underflow linear doubles.
struct LogField {
    LatticeBox box;
    std::vector<LogScalar> values;

    LogField() = default;
    explicit LogField(const LatticeBox& b) : box(b), values(b.site_count()) {}

    LogScalar& at(const std::array<int, 3>& j) { return values[box.flat(j)]; }
    LogScalar at(const std::array<int, 3>& j) const {
        return box.contains(j) ? values[box.flat(j)] : LogScalar::zero();
    }
    // Linear snapshot; magnitudes below exp(-700) clamp to zero, the count
    // of clamped sites is reported through *clamped when non-null.
    LatticeField to_linear(std::int64_t* clamped = nullptr) const {
        LatticeField f(box);
        std::int64_t n = 0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i].sign != 0 && values[i].logmag < -700.0) {
                ++n;
                continue;
            }
            f.values[i] = values[i].to_linear();
        }
        if (clamped) *clamped = n;
        return f;
    }
};

namespace detail {

template <typename F>
void for_each_site(const LatticeBox& box, F&& fn) {
    const std::size_t n = box.site_count();
    for (std::size_t i = 0; i < n; ++i) fn(i, box.unflat(i));
}

inline std::array<int, 3> shifted(std::array<int, 3> j, int axis, int step) {
    j[axis] += step;
    return j;
}

}  // namespace detail

enum class DiffKind { Forward, Backward, Symmetric };

// D_{+,k}, D_{-,k}, or the symmetric difference along one axis.
inline LatticeField diff_op(const LatticeField& f, int axis, DiffKind kind) {
    if (axis < 0 || axis >= f.box.d) throw std::invalid_argument("diff_op: bad axis");
    LatticeField out(f.box);
    const double invh = 1.0 / f.box.h;
    detail::for_each_site(f.box, [&](std::size_t i, const std::array<int, 3>& j) {
        switch (kind) {
            case DiffKind::Forward:
                out.values[i] = invh * (f.at(detail::shifted(j, axis, +1)) - f.values[i]);
                break;
            case DiffKind::Backward:
                out.values[i] = invh * (f.values[i] - f.at(detail::shifted(j, axis, -1)));
                break;
            case DiffKind::Symmetric:
                out.values[i] = 0.5 * invh *
                                (f.at(detail::shifted(j, axis, +1)) -
                                 f.at(detail::shifted(j, axis, -1)));
                break;
        }
    });
    return out;
}

// (Delta f)_j = h^-2 sum_k (f_{j+e_k} - 2 f_j + f_{j-e_k}) with zero
// extension; evaluated as sum_k D_{-,k} D_{+,k} f so it reproduces the
// composed difference operators bit for bit.
inline LatticeField discrete_laplacian(const LatticeField& f) {
    LatticeField out(f.box);
    const double invh = 1.0 / f.box.h;
    detail::for_each_site(f.box, [&](std::size_t i, const std::array<int, 3>& j) {
        double acc = 0.0;
        for (int k = 0; k < f.box.d; ++k) {
            const double fwd_here = invh * (f.at(detail::shifted(j, k, +1)) - f.values[i]);
            const double fwd_prev = invh * (f.values[i] - f.at(detail::shifted(j, k, -1)));
            acc += invh * (fwd_here - fwd_prev);
        }
        out.values[i] = acc;
    });
    return out;
}

inline double l2_norm(const LatticeField& f) {
    long double s = 0.0L;
    for (double v : f.values) s += (long double)v * v;
    return std::sqrt((double)s * std::pow(f.box.h, f.box.d));
}

inline double sup_norm(const LatticeField& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::fabs(v));
    return m;
}

// h^d sum f_j g_j
inline double inner(const LatticeField& f, const LatticeField& g) {
    if (!(f.box == g.box)) throw std::invalid_argument("inner: box mismatch");
    long double s = 0.0L;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        s += (long double)f.values[i] * g.values[i];
    return (double)s * std::pow(f.box.h, f.box.d);
}

inline LatticeField axpy(double a, const LatticeField& x, const LatticeField& y) {
    LatticeField out(x.box);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = a * x.values[i] + y.values[i];
    return out;
}

inline LatticeField scaled(const LatticeField& x, double a) {
    LatticeField out(x.box);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = a * x.values[i];
    return out;
}

// | sum_j sum_k (D_{+,k} f)_j g_j + sum_j sum_k f_j (D_{-,k} g)_j |.
// Both fields must vanish on the outermost layer so that the zero
// extension does not clip the identity.
inline double summation_by_parts_check(const LatticeField& f, const LatticeField& g) {
    if (!(f.box == g.box))
        throw std::invalid_argument("summation_by_parts_check: box mismatch");
    const int E = f.box.extent;
    bool boundary_ok = true;
    detail::for_each_site(f.box, [&](std::size_t i, const std::array<int, 3>& j) {
        for (int k = 0; k < f.box.d; ++k)
            if (std::abs(j[k]) == E && (f.values[i] != 0.0 || g.values[i] != 0.0))
                boundary_ok = false;
    });
    if (!boundary_ok)
        throw std::invalid_argument(
            "summation_by_parts_check: support touches the boundary");
    long double s = 0.0L;
    for (int k = 0; k < f.box.d; ++k) {
        const LatticeField df = diff_op(f, k, DiffKind::Forward);
        const LatticeField dg = diff_op(g, k, DiffKind::Backward);
        for (std::size_t i = 0; i < df.values.size(); ++i)
            s += (long double)df.values[i] * g.values[i] +
                 (long double)f.values[i] * dg.values[i];
    }
    return std::fabs((double)s);
}

// h^d sum over R-2 < |hj| < R+1 of u_j^2 for a single snapshot.
inline LogScalar annulus_mass(const LogField& u, double R) {
    if (R + 1.0 >= u.box.extent * u.box.h)
        throw std::invalid_argument("annulus_mass: annulus leaves the box");
    LogSum s;
    detail::for_each_site(u.box, [&](std::size_t i, const std::array<int, 3>& j) {
        const double r = u.box.radius(j);
        if (R - 2.0 < r && r < R + 1.0 && u.values[i].sign != 0)
            s.add(2.0 * u.values[i].logmag);
    });
    LogScalar out = s.value();
    if (out.sign != 0) out.logmag += u.box.d * std::log(u.box.h);
    return out;
}

inline double annulus_mass(const LatticeField& u, double R) {
    if (R + 1.0 >= u.box.extent * u.box.h)
        throw std::invalid_argument("annulus_mass: annulus leaves the box");
    long double s = 0.0L;
    detail::for_each_site(u.box, [&](std::size_t i, const std::array<int, 3>& j) {
        const double r = u.box.radius(j);
        if (R - 2.0 < r && r < R + 1.0) s += (long double)u.values[i] * u.values[i];
    });
    return (double)s * std::pow(u.box.h, u.box.d);
}

// Trapezoid-in-time annulus mass over a sampled trajectory (log domain).
inline LogScalar annulus_mass_time_integral(const std::vector<double>& times,
                                            const std::vector<LogField>& frames,
                                            double R) {
    if (times.size() != frames.size() || times.size() < 2)
        throw std::invalid_argument("annulus_mass_time_integral: bad sampling");
    LogSum s;
    for (std::size_t i = 0; i < times.size(); ++i) {
        double w = 0.0;
        if (i > 0) w += 0.5 * (times[i] - times[i - 1]);
        if (i + 1 < times.size()) w += 0.5 * (times[i + 1] - times[i]);
        const LogScalar m = annulus_mass(frames[i], R);
        if (m.sign != 0) s.add(m.logmag + std::log(w));
    }
    return s.value();
}

// CSV snapshot: j_1..j_d,value  (or j_1..j_d,sign,logmag for log fields).
inline void write_csv(std::ostream& os, const LatticeField& f) {
    for (int k = 0; k < f.box.d; ++k) os << "j_" << (k + 1) << ",";
    os << "value\n";
    detail::for_each_site(f.box, [&](std::size_t i, const std::array<int, 3>& j) {
        char buf[40];
        for (int k = 0; k < f.box.d; ++k) os << j[k] << ",";
        std::snprintf(buf, sizeof buf, "%.17g", f.values[i]);
        os << buf << "\n";
    });
}

inline void write_csv(std::ostream& os, const LogField& f) {
    for (int k = 0; k < f.box.d; ++k) os << "j_" << (k + 1) << ",";
    os << "sign,logmag\n";
    detail::for_each_site(f.box, [&](std::size_t i, const std::array<int, 3>& j) {
        char buf[40];
        for (int k = 0; k < f.box.d; ++k) os << j[k] << ",";
        os << f.values[i].sign << ",";
        std::snprintf(buf, sizeof buf, "%.17g", f.values[i].logmag);
        os << buf << "\n";
    });
}

}  // namespace landis::lattice
