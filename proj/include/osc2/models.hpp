#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "osc2/core.hpp"
#include "osc2/derivatives.hpp"
#include "osc2/model.hpp"

namespace osc2 {

// ---------------------------------------------------------------------------
// Specs (the deserialization targets of the CLI config)
// ---------------------------------------------------------------------------

enum class ModelKind {
    euclidean,
    flat_polar,
    sphere,
    hyperbolic_half_plane,
    randers,
    minkowski_norm,
    riemannian_callback
};

struct ModelSpec {
    ModelKind kind = ModelKind::euclidean;
    int n = 2;
    double radius = 1.0;                        ///< sphere
    Vec randers_b = {0.3, 0.1};                 ///< randers drift covector
    std::optional<SquareField> randers_a;       ///< randers base metric, identity if absent
    std::function<SquareField(const Vec&)> metric_cb;  ///< riemannian_callback only
};

enum class ForceKind { zero, linear_drag, position_spring, callback };

struct ForceSpec {
    ForceKind kind = ForceKind::zero;
    int n = 2;
    double drag_k = 1.0;                 ///< linear_drag
    std::optional<SquareField> spring_K; ///< position_spring
    std::function<Vec(const Vec&, const Vec&)> force_cb;
    std::function<SquareField(const Vec&, const Vec&)> dF_dx_cb, dF_dy_cb;
};

// ---------------------------------------------------------------------------
// Riemannian chart data: everything the spray family needs in closed form.
// ---------------------------------------------------------------------------

struct RiemannianCharts {
    std::function<SquareField(const Vec&)> g;       ///< g_ij(x)
    std::function<CubeField(const Vec&)> dg;        ///< [i][j][k] = dg_ij/dx^k
    std::function<CubeField(const Vec&)> gamma;     ///< Christoffel G^i_jk
    std::function<QuadField(const Vec&)> dgamma;    ///< [i][j][k][l] = dG^i_jk/dx^l
};

/// Assemble a GeometryModel for L = g_ij(x) y^i y^j from chart data. All spray
/// callbacks come out in closed form, so Euler/homogeneity identities hold to
/// round-off.
inline GeometryModel make_riemannian(int n, RiemannianCharts c, std::string name,
                                     std::function<bool(const Vec&)> domain = nullptr) {
    GeometryModel m;
    m.n = n;
    m.name = std::move(name);
    m.is_spray_homogeneous = true;
    m.y_min = 0.0;
    m.domain_ok = std::move(domain);

    m.lagrangian = [c](const Vec& x, const Vec& y) {
        const SquareField g = c.g(x);
        double s = 0.0;
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) s += g(i, j) * y[i] * y[j];
        return s;
    };
    m.dL_dx = [c, n](const Vec& x, const Vec& y) {
        const CubeField dg = c.dg(x);
        Vec r(n, 0.0);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) r[k] += dg(i, j, k) * y[i] * y[j];
        return r;
    };
    m.dL_dy = [c, n](const Vec& x, const Vec& y) {
        const SquareField g = c.g(x);
        Vec r(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) r[i] += 2.0 * g(i, j) * y[j];
        return r;
    };
    m.d2L_dyy = [c](const Vec& x, const Vec&) {
        SquareField g = c.g(x);
        for (double& v : g.a) v *= 2.0;
        return g;
    };
    m.d2L_dyx = [c, n](const Vec& x, const Vec& y) {
        const CubeField dg = c.dg(x);
        SquareField r(n);
        for (int s = 0; s < n; ++s)
            for (int j = 0; j < n; ++j) {
                double v = 0.0;
                for (int k = 0; k < n; ++k) v += 2.0 * dg(s, k, j) * y[k];
                r(s, j) = v;
            }
        return r;
    };
    m.spray = [c, n](const Vec& x, const Vec& y) {
        const CubeField G = c.gamma(x);
        Vec r(n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) r[i] += 0.5 * G(i, j, k) * y[j] * y[k];
        return r;
    };
    m.spray_dy = [c, n](const Vec& x, const Vec& y) {
        const CubeField G = c.gamma(x);
        SquareField r(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double v = 0.0;
                for (int k = 0; k < n; ++k) v += G(i, j, k) * y[k];
                r(i, j) = v;
            }
        return r;
    };
    m.spray_dx = [c, n](const Vec& x, const Vec& y) {
        const QuadField dG = c.dgamma(x);
        SquareField r(n);
        for (int i = 0; i < n; ++i)
            for (int l = 0; l < n; ++l) {
                double v = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) v += 0.5 * dG(i, a, b, l) * y[a] * y[b];
                r(i, l) = v;
            }
        return r;
    };
    m.spray_dyy = [c](const Vec& x, const Vec&) { return c.gamma(x); };
    m.spray_dyx = [c, n](const Vec& x, const Vec& y) {
        const QuadField dG = c.dgamma(x);
        CubeField r(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double v = 0.0;
                    for (int mm = 0; mm < n; ++mm) v += dG(i, j, mm, k) * y[mm];
                    r(i, j, k) = v;
                }
        return r;
    };
    m.spray_dyyy = [n](const Vec&, const Vec&) { return QuadField(n); };
    m.spray_dyyx = [c](const Vec& x, const Vec&) { return c.dgamma(x); };
    return m;
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace presets {

inline GeometryModel euclidean(int n, const std::string& name = "euclidean") {
    RiemannianCharts c;
    c.g = [n](const Vec&) { return SquareField::identity(n); };
    c.dg = [n](const Vec&) { return CubeField(n); };
    c.gamma = [n](const Vec&) { return CubeField(n); };
    c.dgamma = [n](const Vec&) { return QuadField(n); };
    return make_riemannian(n, c, name);
}

/// Flat plane in the polar chart (r, phi): L = yr^2 + r^2 yphi^2.
inline GeometryModel flat_polar() {
    RiemannianCharts c;
    c.g = [](const Vec& x) {
        SquareField g(2);
        g(0, 0) = 1.0;
        g(1, 1) = x[0] * x[0];
        return g;
    };
    c.dg = [](const Vec& x) {
        CubeField d(2);
        d(1, 1, 0) = 2.0 * x[0];
        return d;
    };
    c.gamma = [](const Vec& x) {
        CubeField G(2);
        G(0, 1, 1) = -x[0];
        G(1, 0, 1) = G(1, 1, 0) = 1.0 / x[0];
        return G;
    };
    c.dgamma = [](const Vec& x) {
        QuadField d(2);
        d(0, 1, 1, 0) = -1.0;
        d(1, 0, 1, 0) = d(1, 1, 0, 0) = -1.0 / (x[0] * x[0]);
        return d;
    };
    return make_riemannian(2, c, "flat_polar", [](const Vec& x) { return x[0] >= 0.05; });
}

/// Round sphere of radius r in the (theta, phi) chart; poles excluded.
inline GeometryModel sphere(double radius = 1.0) {
    const double r2 = radius * radius;
    RiemannianCharts c;
    c.g = [r2](const Vec& x) {
        SquareField g(2);
        const double s = std::sin(x[0]);
        g(0, 0) = r2;
        g(1, 1) = r2 * s * s;
        return g;
    };
    c.dg = [r2](const Vec& x) {
        CubeField d(2);
        d(1, 1, 0) = r2 * std::sin(2.0 * x[0]);
        return d;
    };
    c.gamma = [](const Vec& x) {
        CubeField G(2);
        const double s = std::sin(x[0]), co = std::cos(x[0]);
        G(0, 1, 1) = -s * co;
        G(1, 0, 1) = G(1, 1, 0) = co / s;
        return G;
    };
    c.dgamma = [](const Vec& x) {
        QuadField d(2);
        const double s = std::sin(x[0]);
        d(0, 1, 1, 0) = -std::cos(2.0 * x[0]);
        d(1, 0, 1, 0) = d(1, 1, 0, 0) = -1.0 / (s * s);
        return d;
    };
    return make_riemannian(2, c, "sphere", [](const Vec& x) {
        const double pi = 3.14159265358979323846;
        return x[0] >= 0.05 && x[0] <= pi - 0.05;
    });
}

/// Hyperbolic half-plane x2 > 0: L = (y1^2 + y2^2) / x2^2 (curvature -1).
inline GeometryModel hyperbolic_half_plane() {
    RiemannianCharts c;
    c.g = [](const Vec& x) {
        SquareField g(2);
        const double w = 1.0 / (x[1] * x[1]);
        g(0, 0) = g(1, 1) = w;
        return g;
    };
    c.dg = [](const Vec& x) {
        CubeField d(2);
        const double w = -2.0 / (x[1] * x[1] * x[1]);
        d(0, 0, 1) = d(1, 1, 1) = w;
        return d;
    };
    c.gamma = [](const Vec& x) {
        CubeField G(2);
        const double inv = 1.0 / x[1];
        G(0, 0, 1) = G(0, 1, 0) = -inv;
        G(1, 0, 0) = inv;
        G(1, 1, 1) = -inv;
        return G;
    };
    c.dgamma = [](const Vec& x) {
        QuadField d(2);
        const double w = 1.0 / (x[1] * x[1]);
        d(0, 0, 1, 1) = d(0, 1, 0, 1) = w;
        d(1, 0, 0, 1) = -w;
        d(1, 1, 1, 1) = w;
        return d;
    };
    return make_riemannian(2, c, "hyperbolic_half_plane",
                           [](const Vec& x) { return x[1] >= 0.05; });
}

/// Quadratic locally-Minkowski norm L(y) = sum (y^i)^2; dynamics comes from
/// the force field.
inline GeometryModel minkowski_norm(int n) { return euclidean(n, "minkowski_norm"); }

/// Randers norm squared, L = (alpha + beta)^2 with alpha = |y|_a and
/// beta = b_i y^i, constant data. Positive definite for |b|_a < 1; x-free, so
/// the space is locally Minkowski and the whole spray family vanishes.
inline GeometryModel randers(int n, const Vec& b, std::optional<SquareField> a_opt = {}) {
    if (static_cast<int>(b.size()) != n) throw InvalidSpec("randers: drift covector size != n");
    SquareField a = a_opt.value_or(SquareField::identity(n));
    if (a.n != n) throw InvalidSpec("randers: base metric dimension != n");
    if (a.max_asymmetry() > 1e-12) throw InvalidSpec("randers: base metric must be symmetric");
    // |b|_a^2 = a^{ij} b_i b_j  (positive definiteness demands it below 1)
    SquareField ainv = invert_metric(a);
    double bn2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) bn2 += ainv(i, j) * b[i] * b[j];
    if (!(bn2 < 1.0))
        throw InvalidSpec("randers: |b|_a = " + std::to_string(std::sqrt(bn2)) +
                          " violates |b|_a < 1");

    GeometryModel m;
    m.n = n;
    m.name = "randers";
    m.is_spray_homogeneous = true;
    m.y_min = 1e-8;  // L is only smooth on the slit tangent space

    auto alpha_of = [a, n](const Vec& y) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += a(i, j) * y[i] * y[j];
        return std::sqrt(s);
    };
    auto beta_of = [b, n](const Vec& y) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += b[i] * y[i];
        return s;
    };

    m.lagrangian = [alpha_of, beta_of](const Vec&, const Vec& y) {
        const double f = alpha_of(y) + beta_of(y);
        return f * f;
    };
    m.dL_dx = [n](const Vec&, const Vec&) { return Vec(n, 0.0); };
    m.dL_dy = [a, b, alpha_of, beta_of, n](const Vec&, const Vec& y) {
        const double al = alpha_of(y), be = beta_of(y);
        Vec r(n);
        for (int i = 0; i < n; ++i) {
            double ay = 0.0;
            for (int j = 0; j < n; ++j) ay += a(i, j) * y[j];
            r[i] = 2.0 * (al + be) * (ay / al + b[i]);
        }
        return r;
    };
    m.d2L_dyy = [a, b, alpha_of, beta_of, n](const Vec&, const Vec& y) {
        const double al = alpha_of(y), be = beta_of(y);
        Vec ell(n);
        for (int i = 0; i < n; ++i) {
            double ay = 0.0;
            for (int j = 0; j < n; ++j) ay += a(i, j) * y[j];
            ell[i] = ay / al;
        }
        SquareField h(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                h(i, j) = 2.0 * ((ell[i] + b[i]) * (ell[j] + b[j]) +
                                 (al + be) * (a(i, j) - ell[i] * ell[j]) / al);
        return h;
    };
    m.d2L_dyx = [n](const Vec&, const Vec&) { return SquareField(n); };
    m.spray = [n](const Vec&, const Vec&) { return Vec(n, 0.0); };
    m.spray_dy = [n](const Vec&, const Vec&) { return SquareField(n); };
    m.spray_dx = [n](const Vec&, const Vec&) { return SquareField(n); };
    m.spray_dyy = [n](const Vec&, const Vec&) { return CubeField(n); };
    m.spray_dyx = [n](const Vec&, const Vec&) { return CubeField(n); };
    m.spray_dyyy = [n](const Vec&, const Vec&) { return QuadField(n); };
    m.spray_dyyx = [n](const Vec&, const Vec&) { return QuadField(n); };
    return m;
}

/// Riemannian model from a user metric callback. Christoffel data is derived
/// by direct stencils on g (first and second order), then presented in closed
/// form so nothing downstream stacks finite differences.
inline GeometryModel riemannian_callback(int n, std::function<SquareField(const Vec&)> g_cb,
                                         std::function<bool(const Vec&)> domain = nullptr) {
    if (!g_cb) throw InvalidSpec("riemannian_callback: missing metric callback");
    const DiffStrategy d{};
    auto dg_cb = [g_cb, d, n](const Vec& x) {
        CubeField r(n);
        for (int k = 0; k < n; ++k) {
            SquareField c = fd::central1(g_cb, x, k, d.step(1, x[k]));
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) r(i, j, k) = c(i, j);
        }
        return r;
    };
    auto d2g_cb = [g_cb, d, n](const Vec& x) {
        QuadField r(n);
        for (int k = 0; k < n; ++k)
            for (int l = k; l < n; ++l) {
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) {
                        auto entry = [&](const Vec& xx) { return g_cb(xx)(i, j); };
                        const double v = fd::central2(entry, x, k, l, d.step(2, x[k]),
                                                      d.step(2, x[l]));
                        r(i, j, k, l) = v;
                        r(i, j, l, k) = v;
                    }
            }
        return r;
    };
    auto gamma_of = [n](const SquareField& g, const CubeField& dg) {
        const SquareField ginv = invert_metric(g);
        CubeField G(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double v = 0.0;
                    for (int s = 0; s < n; ++s)
                        v += 0.5 * ginv(i, s) * (dg(s, j, k) + dg(s, k, j) - dg(j, k, s));
                    G(i, j, k) = v;
                }
        return G;
    };

    RiemannianCharts c;
    c.g = g_cb;
    c.dg = dg_cb;
    c.gamma = [g_cb, dg_cb, gamma_of](const Vec& x) { return gamma_of(g_cb(x), dg_cb(x)); };
    c.dgamma = [g_cb, dg_cb, d2g_cb, n](const Vec& x) {
        // dGamma assembled from (g, dg, d2g); d(ginv)/dx = -ginv dg ginv
        const SquareField g = g_cb(x);
        const SquareField ginv = invert_metric(g);
        const CubeField dg = dg_cb(x);
        const QuadField d2g = d2g_cb(x);
        QuadField out(n);
        for (int l = 0; l < n; ++l) {
            SquareField dginv(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double v = 0.0;
                    for (int p = 0; p < n; ++p)
                        for (int q = 0; q < n; ++q) v -= ginv(i, p) * dg(p, q, l) * ginv(q, j);
                    dginv(i, j) = v;
                }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        double v = 0.0;
                        for (int s = 0; s < n; ++s) {
                            v += 0.5 * dginv(i, s) * (dg(s, j, k) + dg(s, k, j) - dg(j, k, s));
                            v += 0.5 * ginv(i, s) *
                                 (d2g(s, j, k, l) + d2g(s, k, j, l) - d2g(j, k, s, l));
                        }
                        out(i, j, k, l) = v;
                    }
        }
        return out;
    };
    return make_riemannian(n, c, "riemannian_callback", std::move(domain));
}

}  // namespace presets

inline GeometryModel build_model(const ModelSpec& spec) {
    switch (spec.kind) {
        case ModelKind::euclidean:
            if (spec.n < 1) throw InvalidSpec("euclidean: n must be >= 1");
            return presets::euclidean(spec.n);
        case ModelKind::flat_polar:
            if (spec.n != 2) throw InvalidSpec("flat_polar: chart is 2-dimensional");
            return presets::flat_polar();
        case ModelKind::sphere:
            if (spec.n != 2) throw InvalidSpec("sphere: chart is 2-dimensional");
            if (!(spec.radius > 0.0)) throw InvalidSpec("sphere: radius must be positive");
            return presets::sphere(spec.radius);
        case ModelKind::hyperbolic_half_plane:
            if (spec.n != 2) throw InvalidSpec("hyperbolic_half_plane: chart is 2-dimensional");
            return presets::hyperbolic_half_plane();
        case ModelKind::randers:
            return presets::randers(spec.n, spec.randers_b, spec.randers_a);
        case ModelKind::minkowski_norm:
            if (spec.n < 1) throw InvalidSpec("minkowski_norm: n must be >= 1");
            return presets::minkowski_norm(spec.n);
        case ModelKind::riemannian_callback:
            return presets::riemannian_callback(spec.n, spec.metric_cb);
    }
    throw InvalidSpec("unknown model kind");
}

inline ForceField build_force(const ForceSpec& spec) {
    const int n = spec.n;
    if (n < 1) throw InvalidSpec("force: n must be >= 1");
    ForceField f;
    f.n = n;
    switch (spec.kind) {
        case ForceKind::zero:
            return zero_force(n);
        case ForceKind::linear_drag: {
            const double k = spec.drag_k;
            if (k < 0.0) throw InvalidSpec("linear_drag: k must be >= 0");
            f.name = "linear_drag";
            f.force = [k, n](const Vec&, const Vec& y) {
                Vec r(n);
                for (int i = 0; i < n; ++i) r[i] = -k * y[i];
                return r;
            };
            f.dF_dx = [n](const Vec&, const Vec&) { return SquareField(n); };
            f.dF_dy = [k, n](const Vec&, const Vec&) {
                SquareField r(n);
                for (int i = 0; i < n; ++i) r(i, i) = -k;
                return r;
            };
            return f;
        }
        case ForceKind::position_spring: {
            SquareField K = spec.spring_K.value_or(SquareField::identity(n));
            if (K.n != n) throw InvalidSpec("position_spring: K dimension != n");
            for (double v : K.a)
                if (!std::isfinite(v)) throw InvalidSpec("position_spring: K has non-finite entries");
            f.name = "position_spring";
            f.force = [K, n](const Vec& x, const Vec&) {
                Vec r(n, 0.0);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) r[i] -= K(i, j) * x[j];
                return r;
            };
            f.dF_dx = [K](const Vec&, const Vec&) {
                SquareField r(K);
                for (double& v : r.a) v = -v;
                return r;
            };
            f.dF_dy = [n](const Vec&, const Vec&) { return SquareField(n); };
            return f;
        }
        case ForceKind::callback:
            if (!spec.force_cb) throw InvalidSpec("callback force: missing force callback");
            f.name = "callback";
            f.force = spec.force_cb;
            f.dF_dx = spec.dF_dx_cb;
            f.dF_dy = spec.dF_dy_cb;
            return f;
    }
    throw InvalidSpec("unknown force kind");
}

// ---------------------------------------------------------------------------
// Chart maps (used by the chart-covariance checks)
// ---------------------------------------------------------------------------

struct ChartMap {
    std::function<Vec(const Vec&)> forward;           ///< target coordinates of a point
    std::function<SquareField(const Vec&)> jacobian;  ///< d(target)/d(source)
};

inline ChartMap polar_to_cartesian() {
    ChartMap m;
    m.forward = [](const Vec& p) {
        return Vec{p[0] * std::cos(p[1]), p[0] * std::sin(p[1])};
    };
    m.jacobian = [](const Vec& p) {
        SquareField J(2);
        J(0, 0) = std::cos(p[1]);
        J(0, 1) = -p[0] * std::sin(p[1]);
        J(1, 0) = std::sin(p[1]);
        J(1, 1) = p[0] * std::cos(p[1]);
        return J;
    };
    return m;
}

inline ChartMap cartesian_to_polar() {
    ChartMap m;
    m.forward = [](const Vec& p) {
        return Vec{std::hypot(p[0], p[1]), std::atan2(p[1], p[0])};
    };
    m.jacobian = [](const Vec& p) {
        const double r2 = p[0] * p[0] + p[1] * p[1];
        const double r = std::sqrt(r2);
        SquareField J(2);
        J(0, 0) = p[0] / r;
        J(0, 1) = p[1] / r;
        J(1, 0) = -p[1] / r2;
        J(1, 1) = p[0] / r2;
        return J;
    };
    return m;
}

inline Vec push_vector(const ChartMap& c, const Vec& x, const Vec& v) {
    return c.jacobian(x).apply(v);
}

inline FirstOrderState push_state(const ChartMap& c, const FirstOrderState& s) {
    return {c.forward(s.x), push_vector(c, s.x, s.y)};
}

}  // namespace osc2
