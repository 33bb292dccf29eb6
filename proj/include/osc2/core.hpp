#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <vector>

namespace osc2 {

using Vec = std::vector<double>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Velocity inside the model's singular cone (|y| < y_min).
struct SingularVelocity : Error {
    double t = std::numeric_limits<double>::quiet_NaN();
    explicit SingularVelocity(const std::string& msg) : Error(msg) {}
    SingularVelocity(const std::string& msg, double time) : Error(msg), t(time) {}
};

/// Metric tensor not invertible (or condition number beyond 1e12).
struct SingularMetric : Error {
    double t = std::numeric_limits<double>::quiet_NaN();
    explicit SingularMetric(const std::string& msg) : Error(msg) {}
    SingularMetric(const std::string& msg, double time) : Error(msg), t(time) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

struct InvalidSpec : Error {
    explicit InvalidSpec(const std::string& msg) : Error(msg) {}
};

/// Trajectory left the chart's guarded domain mid-integration.
struct DomainExit : Error {
    double t = std::numeric_limits<double>::quiet_NaN();
    DomainExit(const std::string& msg, double time) : Error(msg), t(time) {}
};

struct TooFewSamples : Error {
    explicit TooFewSamples(const std::string& msg) : Error(msg) {}
};

struct IndexOutOfRange : Error {
    explicit IndexOutOfRange(const std::string& msg) : Error(msg) {}
};

// ---------------------------------------------------------------------------
// Small dense vector helpers (n <= 4, row-major everywhere)
// ---------------------------------------------------------------------------

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline bool all_finite(const Vec& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

inline Vec vec_add(const Vec& a, const Vec& b) {
    Vec r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

inline Vec vec_sub(const Vec& a, const Vec& b) {
    Vec r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

inline Vec vec_scale(double c, const Vec& a) {
    Vec r(a);
    for (double& v : r) v *= c;
    return r;
}

/// r = a + c*b
inline Vec vec_axpy(const Vec& a, double c, const Vec& b) {
    Vec r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += c * b[i];
    return r;
}

// ---------------------------------------------------------------------------
// Tensor value carriers. Row index contravariant (upper), trailing indices
// covariant. Dense row-major layout; n stays desk-scale so no sparsity.
// ---------------------------------------------------------------------------

struct SquareField {
    int n = 0;
    std::vector<double> a;  ///< a[i*n + j] = T^i_j

    SquareField() = default;
    explicit SquareField(int dim, double fill = 0.0)
        : n(dim), a(static_cast<std::size_t>(dim) * dim, fill) {}

    static SquareField identity(int dim) {
        SquareField f(dim);
        for (int i = 0; i < dim; ++i) f(i, i) = 1.0;
        return f;
    }

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

    Vec apply(const Vec& v) const {
        Vec r(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    SquareField times(const SquareField& o) const {
        SquareField r(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int k = 0; k < n; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::abs(v));
        return m;
    }

    double max_asymmetry() const {
        double m = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) m = std::max(m, std::abs((*this)(i, j) - (*this)(j, i)));
        return m;
    }

    void symmetrize() {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double s = 0.5 * ((*this)(i, j) + (*this)(j, i));
                (*this)(i, j) = s;
                (*this)(j, i) = s;
            }
    }
};

inline SquareField field_sub(const SquareField& a, const SquareField& b) {
    SquareField r(a);
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] -= b.a[i];
    return r;
}

struct CubeField {
    int n = 0;
    std::vector<double> a;  ///< a[(i*n + j)*n + k] = T^i_jk

    CubeField() = default;
    explicit CubeField(int dim, double fill = 0.0)
        : n(dim), a(static_cast<std::size_t>(dim) * dim * dim, fill) {}

    double& operator()(int i, int j, int k) {
        return a[(static_cast<std::size_t>(i) * n + j) * n + k];
    }
    double operator()(int i, int j, int k) const {
        return a[(static_cast<std::size_t>(i) * n + j) * n + k];
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::abs(v));
        return m;
    }

    /// Largest |T^i_jk - T^i_kj| over the trailing pair.
    double max_asymmetry_jk() const {
        double m = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = j + 1; k < n; ++k)
                    m = std::max(m, std::abs((*this)(i, j, k) - (*this)(i, k, j)));
        return m;
    }

    void symmetrize_jk() {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = j + 1; k < n; ++k) {
                    const double s = 0.5 * ((*this)(i, j, k) + (*this)(i, k, j));
                    (*this)(i, j, k) = s;
                    (*this)(i, k, j) = s;
                }
    }
};

struct QuadField {
    int n = 0;
    std::vector<double> a;

    QuadField() = default;
    explicit QuadField(int dim, double fill = 0.0)
        : n(dim), a(static_cast<std::size_t>(dim) * dim * dim * dim, fill) {}

    double& operator()(int i, int j, int k, int l) {
        return a[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
    }
    double operator()(int i, int j, int k, int l) const {
        return a[((static_cast<std::size_t>(i) * n + j) * n + k) * n + l];
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a) m = std::max(m, std::abs(v));
        return m;
    }
};

// Uniform element access so finite-difference helpers can combine any carrier.
inline std::vector<double>& elems(Vec& v) { return v; }
inline const std::vector<double>& elems(const Vec& v) { return v; }

template <class T>
    requires requires(T t) { t.a; }
inline std::vector<double>& elems(T& t) { return t.a; }

template <class T>
    requires requires(T t) { t.a; }
inline const std::vector<double>& elems(const T& t) { return t.a; }

// ---------------------------------------------------------------------------
// States on M, TM and the 2-osculator bundle
// ---------------------------------------------------------------------------

struct BasePoint {
    Vec x;
    int n() const { return static_cast<int>(x.size()); }
};

struct FirstOrderState {
    Vec x, y;
    int n() const { return static_cast<int>(x.size()); }
};

/// Point (x, y, y2) of the second-order bundle; along extension curves
/// y = dx/dt and y2 = (1/2) d2x/dt2.
struct SecondOrderState {
    Vec x, y, y2;
    int n() const { return static_cast<int>(x.size()); }
    FirstOrderState first_order() const { return {x, y}; }
};

inline void validate_state(const FirstOrderState& s) {
    if (s.x.empty() || s.x.size() != s.y.size())
        throw DimensionMismatch("state blocks x and y must share dimension n >= 1");
    if (!all_finite(s.x) || !all_finite(s.y)) throw InvalidSpec("state has non-finite entries");
}

inline void validate_state(const SecondOrderState& s) {
    if (s.x.empty() || s.x.size() != s.y.size() || s.x.size() != s.y2.size())
        throw DimensionMismatch("state blocks x, y, y2 must share dimension n >= 1");
    if (!all_finite(s.x) || !all_finite(s.y) || !all_finite(s.y2))
        throw InvalidSpec("state has non-finite entries");
}

// ---------------------------------------------------------------------------
// Differentiation strategy
// ---------------------------------------------------------------------------

enum class DiffMode { analytic_if_available, forced_finite_difference };

/// Central-difference step policy. Base steps follow the standard
/// per-derivative-order scaling eps^(1/2), eps^(1/3), eps^(1/4); every step is
/// scaled by max(1, |coordinate|). Surfaces that are themselves FD-built get
/// inflated steps sized to their noise floor eta ~ eps^(2/3).
struct DiffStrategy {
    DiffMode mode = DiffMode::analytic_if_available;
    double h1 = std::sqrt(std::numeric_limits<double>::epsilon());
    double h2 = std::cbrt(std::numeric_limits<double>::epsilon());
    double h3 = std::pow(std::numeric_limits<double>::epsilon(), 0.25);

    void validate() const {
        if (!(h1 > 0.0) || !(h2 > 0.0) || !(h3 > 0.0))
            throw InvalidSpec("DiffStrategy steps must be positive");
    }

    double step(int order, double coord) const {
        const double base = order <= 1 ? h1 : (order == 2 ? h2 : h3);
        return base * std::max(1.0, std::abs(coord));
    }

    double noisy_step(int order, double coord) const {
        const double eta = std::pow(std::numeric_limits<double>::epsilon(), 2.0 / 3.0);
        const double base = std::pow(eta, 1.0 / (order + 2));
        return base * std::max(1.0, std::abs(coord));
    }

    bool forced_fd() const { return mode == DiffMode::forced_finite_difference; }
};

// ---------------------------------------------------------------------------
// Pointwise central-difference stencils over callables f : Vec -> T
// ---------------------------------------------------------------------------

namespace fd {

/// d f / d v_i
template <class F>
auto central1(F&& f, Vec v, int i, double h) {
    const double v0 = v[i];
    v[i] = v0 + h;
    auto fp = f(v);
    v[i] = v0 - h;
    auto fm = f(v);
    if constexpr (std::is_same_v<decltype(fp), double>) {
        return (fp - fm) / (2.0 * h);
    } else {
        auto& p = elems(fp);
        const auto& m = elems(fm);
        for (std::size_t s = 0; s < p.size(); ++s) p[s] = (p[s] - m[s]) / (2.0 * h);
        return fp;
    }
}

template <class F>
double central1_scalar(F&& f, Vec v, int i, double h) {
    const double v0 = v[i];
    v[i] = v0 + h;
    const double fp = f(v);
    v[i] = v0 - h;
    const double fm = f(v);
    return (fp - fm) / (2.0 * h);
}

/// d2 f / d v_i d v_j. The mixed stencil sums in a canonical order so the
/// result is exactly symmetric under (i, j) exchange.
template <class F>
double central2(F&& f, Vec v, int i, int j, double hi, double hj) {
    if (i == j) {
        const double v0 = v[i];
        const double f0 = f(v);
        v[i] = v0 + hi;
        const double fp = f(v);
        v[i] = v0 - hi;
        const double fm = f(v);
        return (fp - 2.0 * f0 + fm) / (hi * hi);
    }
    const double vi = v[i], vj = v[j];
    v[i] = vi + hi; v[j] = vj + hj; const double fpp = f(v);
    v[i] = vi + hi; v[j] = vj - hj; const double fpm = f(v);
    v[i] = vi - hi; v[j] = vj + hj; const double fmp = f(v);
    v[i] = vi - hi; v[j] = vj - hj; const double fmm = f(v);
    return ((fpp + fmm) - (fpm + fmp)) / (4.0 * hi * hj);
}

/// d3 f / d v_i d v_j d v_k, composed as an outer first difference of the
/// inner second stencil.
template <class F>
double central3(F&& f, Vec v, int i, int j, int k, double h) {
    const double vk = v[k];
    v[k] = vk + h;
    const double dp = central2(f, v, i, j, h, h);
    v[k] = vk - h;
    const double dm = central2(f, v, i, j, h, h);
    return (dp - dm) / (2.0 * h);
}

// ---------------------------------------------------------------------------
// Fornberg finite-difference weights on arbitrary nodes.
// ---------------------------------------------------------------------------

/// Weights c[j][k]: node j's weight when approximating the k-th derivative at
/// point z from samples at `nodes` (k = 0..order).
inline std::vector<std::vector<double>> fornberg_weights(double z, const std::vector<double>& nodes,
                                                         int order) {
    const int nd = static_cast<int>(nodes.size()) - 1;
    std::vector<std::vector<double>> c(nd + 1, std::vector<double>(order + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= nd; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        double c5 = c4;
        c4 = nodes[i] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    return c;
}

/// Per-sample derivative of a uniformly sampled vector series. Fourth-order
/// central stencils in the interior, Fornberg one-sided stencils on the two
/// samples at each edge.
inline std::vector<Vec> series_derivative(const std::vector<Vec>& f, double dt, int order) {
    const std::size_t m = f.size();
    if (m < 5) throw TooFewSamples("series_derivative needs at least 5 samples");
    if (order != 1 && order != 2) throw InvalidSpec("series_derivative supports orders 1 and 2");
    const std::size_t n = f[0].size();
    std::vector<Vec> out(m, Vec(n, 0.0));

    const double s1[5] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
    const double s2[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
    const double inv = order == 1 ? 1.0 / dt : 1.0 / (dt * dt);
    for (std::size_t k = 2; k + 2 < m; ++k)
        for (std::size_t c = 0; c < n; ++c) {
            double s = 0.0;
            for (int o = -2; o <= 2; ++o)
                s += (order == 1 ? s1[o + 2] : s2[o + 2]) * f[k + o][c];
            out[k][c] = s * inv;
        }

    // 6-node one-sided stencils keep fourth order at the edges
    const std::size_t nn = std::min<std::size_t>(6, m);
    std::vector<double> nodes(nn);
    for (std::size_t i = 0; i < nn; ++i) nodes[i] = static_cast<double>(i) * dt;
    for (std::size_t k : {std::size_t(0), std::size_t(1), m - 2, m - 1}) {
        const std::size_t base = (k < m / 2) ? 0 : m - nn;
        const auto w = fornberg_weights(static_cast<double>(k - base) * dt, nodes, order);
        for (std::size_t c = 0; c < n; ++c) {
            double s = 0.0;
            for (std::size_t i = 0; i < nn; ++i) s += w[i][order] * f[base + i][c];
            out[k][c] = s;
        }
    }
    return out;
}

}  // namespace fd

/// Supremum over interior samples; `margin` samples at each edge are excluded
/// (one-sided stencil territory).
inline double interior_sup(const std::vector<double>& r, std::size_t margin = 2) {
    double m = 0.0;
    if (r.size() <= 2 * margin) return m;
    for (std::size_t k = margin; k + margin < r.size(); ++k) m = std::max(m, r[k]);
    return m;
}

}  // namespace osc2
