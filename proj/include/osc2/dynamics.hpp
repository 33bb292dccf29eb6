#pragma once

#include <cstdlib>
#include <utility>

#include "osc2/connections.hpp"
#include "osc2/core.hpp"
#include "osc2/derivatives.hpp"
#include "osc2/model.hpp"

namespace osc2 {

// ---------------------------------------------------------------------------
// Sampled curves
// ---------------------------------------------------------------------------

/// Time-sampled curve on a uniform grid with its second-order lift and an
/// optional deviation field. w1 stores dw/dt; the half-rate w2 = (1/2) d2w/dt2
/// is derived by differencing where needed.
struct Trajectory {
    double dt = 0.0;
    std::vector<double> t;
    std::vector<Vec> x, y, y2;
    std::vector<Vec> w, w1;

    int n() const { return x.empty() ? 0 : static_cast<int>(x[0].size()); }
    std::size_t samples() const { return x.size(); }
    bool has_deviation() const { return !w.empty(); }

    SecondOrderState state(std::size_t k) const {
        if (k >= samples()) throw IndexOutOfRange("trajectory sample index out of range");
        return {x[k], y[k], y2[k]};
    }
};

struct IntegratorConfig {
    double dt = 1e-3;
    double t_end = 1.0;
    enum class Method { rk4 } method = Method::rk4;

    void validate() const {
        if (!(dt > 0.0) || !(t_end > 0.0)) throw InvalidSpec("integrator needs dt > 0, t_end > 0");
        if (t_end / dt > 1e7) throw InvalidSpec("integrator step budget t_end/dt exceeds 1e7");
        if (std::llround(t_end / dt) < 1)
            throw InvalidSpec("integrator needs at least one step (t_end >= dt/2)");
    }
    long long steps() const { return std::llround(t_end / dt); }
};

namespace detail {

/// Cubic Lagrange interpolation of a sampled column at t_{k+1/2}.
inline Vec interp_half(const std::vector<Vec>& col, std::size_t k) {
    const std::size_t m = col.size();
    const std::size_t base = (k == 0) ? 0 : std::min(k - 1, m - 4);
    const double xi = static_cast<double>(k) + 0.5 - static_cast<double>(base);
    double wgt[4];
    for (int i = 0; i < 4; ++i) {
        double p = 1.0;
        for (int j = 0; j < 4; ++j)
            if (j != i) p *= (xi - j) / static_cast<double>(i - j);
        wgt[i] = p;
    }
    Vec r(col[0].size(), 0.0);
    for (int i = 0; i < 4; ++i)
        for (std::size_t c = 0; c < r.size(); ++c) r[c] += wgt[i] * col[base + i][c];
    return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Base flow:  d2x/dt2 + 2 G(x, dx/dt) = F(x, dx/dt)
// ---------------------------------------------------------------------------

inline Trajectory integrate_trajectory(const GeometryModel& m, const ForceField& F,
                                       const FirstOrderState& init, const IntegratorConfig& cfg,
                                       const DiffStrategy& d = {}) {
    validate_state(init);
    cfg.validate();
    if (static_cast<int>(init.x.size()) != m.n)
        throw DimensionMismatch("initial state dimension != model dimension");
    if (!m.in_domain(init.x)) throw DomainExit("initial point outside chart domain", 0.0);

    GeometryEngine eng(m, d);
    const int n = m.n;
    const long long steps = cfg.steps();
    const std::size_t samples = static_cast<std::size_t>(steps) + 1;

    Trajectory traj;
    traj.dt = cfg.dt;
    traj.t.reserve(samples);
    traj.x.reserve(samples);
    traj.y.reserve(samples);
    traj.y2.reserve(samples);

    auto rhs = [&](double t, const Vec& z, Vec& dz) {
        const Vec x(z.begin(), z.begin() + n), y(z.begin() + n, z.end());
        if (!m.in_domain(x)) throw DomainExit(m.name + ": left chart domain at t = " + std::to_string(t), t);
        const Vec G = eng.spray(x, y);
        Vec Fv = F.is_zero() ? Vec(n, 0.0) : F.force(x, y);
        for (int i = 0; i < n; ++i) {
            dz[i] = y[i];
            dz[n + i] = Fv[i] - 2.0 * G[i];
        }
    };

    Vec z(init.x);
    z.insert(z.end(), init.y.begin(), init.y.end());
    Vec k1(2 * n), k2(2 * n), k3(2 * n), k4(2 * n), tmp(2 * n);

    auto push_sample = [&](double t, const Vec& zz, const Vec& dzz) {
        traj.t.push_back(t);
        traj.x.emplace_back(zz.begin(), zz.begin() + n);
        traj.y.emplace_back(zz.begin() + n, zz.end());
        Vec y2(n);
        for (int i = 0; i < n; ++i) y2[i] = 0.5 * dzz[n + i];  // y2 = -G + F/2
        traj.y2.push_back(std::move(y2));
    };

    double t = 0.0;
    for (long long k = 0; k < steps; ++k) {
        try {
            rhs(t, z, k1);  // reused as the first RK stage below
            push_sample(t, z, k1);
            const std::size_t N = z.size();
            for (std::size_t i = 0; i < N; ++i) tmp[i] = z[i] + 0.5 * cfg.dt * k1[i];
            rhs(t + 0.5 * cfg.dt, tmp, k2);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = z[i] + 0.5 * cfg.dt * k2[i];
            rhs(t + 0.5 * cfg.dt, tmp, k3);
            for (std::size_t i = 0; i < N; ++i) tmp[i] = z[i] + cfg.dt * k3[i];
            rhs(t + cfg.dt, tmp, k4);
            for (std::size_t i = 0; i < N; ++i)
                z[i] += cfg.dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        } catch (SingularMetric& e) {
            throw SingularMetric(std::string(e.what()) + " (at t = " + std::to_string(t) + ")", t);
        } catch (SingularVelocity& e) {
            throw SingularVelocity(std::string(e.what()) + " (at t = " + std::to_string(t) + ")", t);
        }
        t = static_cast<double>(k + 1) * cfg.dt;
    }
    rhs(t, z, k1);
    push_sample(t, z, k1);
    return traj;
}

/// Lagrangian value along the samples (constant for F = 0 spray flows).
inline std::vector<double> energies(const GeometryModel& m, const Trajectory& traj) {
    std::vector<double> e(traj.samples());
    for (std::size_t k = 0; k < traj.samples(); ++k) e[k] = m.lagrangian(traj.x[k], traj.y[k]);
    return e;
}

/// Interior sup of |D1(x) - y| and |D1(y) - 2 y2| (extension identities).
inline std::pair<double, double> extension_residuals(const Trajectory& traj) {
    const auto dx = fd::series_derivative(traj.x, traj.dt, 1);
    const auto dy = fd::series_derivative(traj.y, traj.dt, 1);
    double rx = 0.0, ry = 0.0;
    for (std::size_t k = 2; k + 2 < traj.samples(); ++k) {
        rx = std::max(rx, norm_inf(vec_sub(dx[k], traj.y[k])));
        ry = std::max(ry, norm_inf(vec_sub(dy[k], vec_scale(2.0, traj.y2[k]))));
    }
    return {rx, ry};
}

// ---------------------------------------------------------------------------
// Coefficient providers
// ---------------------------------------------------------------------------

using CoefficientProvider = std::function<DualCoefficients(const SecondOrderState&)>;

inline CoefficientProvider ours_provider(GeometryModel m, ForceField F, DiffStrategy d = {}) {
    return [m = std::move(m), F = std::move(F), d](const SecondOrderState& s2) {
        return our_dual_coefficients(m, F, s2, d);
    };
}

inline CoefficientProvider miron_provider(GeometryModel m, DiffStrategy d = {}) {
    return [m = std::move(m), d](const SecondOrderState& s2) {
        return miron_dual_coefficients(m, s2, d);
    };
}

// ---------------------------------------------------------------------------
// Deviation (Jacobi) integration along a stored base trajectory
// ---------------------------------------------------------------------------

/// Integrates  d2w/dt2 + 2 M1 dw/dt + 2 M2 w = 0  on the base grid, with the
/// dual coefficients evaluated on-extension (the stored y2 column). Base
/// samples are interpolated cubically at RK4 half-steps.
inline Trajectory integrate_jacobi(const GeometryModel& m, const ForceField& F,
                                   const Trajectory& base, const Vec& w0, const Vec& w0dot,
                                   const DiffStrategy& d = {}) {
    const int n = base.n();
    if (base.samples() < 4) throw TooFewSamples("integrate_jacobi needs at least 4 base samples");
    if (base.y2.size() != base.samples())
        throw DimensionMismatch("base trajectory has no second-order lift");
    if (static_cast<int>(w0.size()) != n || static_cast<int>(w0dot.size()) != n)
        throw DimensionMismatch("deviation initial data dimension != trajectory dimension");

    auto pack = [&](const SecondOrderState& s2) {
        const DualCoefficients mc = our_dual_coefficients(m, F, s2, d);
        SquareField A(mc.M1), B(mc.M2);
        for (double& v : A.a) v *= 2.0;
        for (double& v : B.a) v *= 2.0;
        return std::make_pair(A, B);
    };
    auto lin_rhs = [n](const std::pair<SquareField, SquareField>& ab, const Vec& u, Vec& du) {
        for (int i = 0; i < n; ++i) {
            du[i] = u[n + i];
            double a = 0.0;
            for (int j = 0; j < n; ++j)
                a -= ab.first(i, j) * u[n + j] + ab.second(i, j) * u[j];
            du[n + i] = a;
        }
    };

    Trajectory out(base);
    out.w.assign(base.samples(), Vec(n));
    out.w1.assign(base.samples(), Vec(n));

    Vec u(w0);
    u.insert(u.end(), w0dot.begin(), w0dot.end());
    Vec k1(2 * n), k2(2 * n), k3(2 * n), k4(2 * n), tmp(2 * n);
    const double dt = base.dt;

    auto store = [&](std::size_t k) {
        for (int i = 0; i < n; ++i) {
            out.w[k][i] = u[i];
            out.w1[k][i] = u[n + i];
        }
    };
    store(0);

    auto p0 = pack(base.state(0));
    for (std::size_t k = 0; k + 1 < base.samples(); ++k) {
        const SecondOrderState half{detail::interp_half(base.x, k), detail::interp_half(base.y, k),
                                    detail::interp_half(base.y2, k)};
        const auto ph = pack(half);
        const auto p1 = pack(base.state(k + 1));

        lin_rhs(p0, u, k1);
        for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
        lin_rhs(ph, tmp, k2);
        for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
        lin_rhs(ph, tmp, k3);
        for (std::size_t i = 0; i < u.size(); ++i) tmp[i] = u[i] + dt * k3[i];
        lin_rhs(p1, tmp, k4);
        for (std::size_t i = 0; i < u.size(); ++i)
            u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

        store(k + 1);
        p0 = p1;
    }
    return out;
}

/// Independent deviation oracle: central difference of two perturbed base
/// flows, w(t) = (x_+(t) - x_-(t)) / (2h). Optional Richardson pass combines
/// h and h/2 to cancel the leading h^2 truncation term.
inline Trajectory deviation_oracle(const GeometryModel& m, const ForceField& F,
                                   const FirstOrderState& init, const Vec& w0, const Vec& w0dot,
                                   const IntegratorConfig& cfg, double h = 1e-4,
                                   bool richardson = false, const DiffStrategy& d = {}) {
    if (!(h > 0.0)) throw InvalidSpec("deviation_oracle: h must be positive");
    Trajectory base = integrate_trajectory(m, F, init, cfg, d);
    const int n = base.n();

    auto run = [&](double hh) {
        FirstOrderState plus{vec_axpy(init.x, hh, w0), vec_axpy(init.y, hh, w0dot)};
        FirstOrderState minus{vec_axpy(init.x, -hh, w0), vec_axpy(init.y, -hh, w0dot)};
        const Trajectory tp = integrate_trajectory(m, F, plus, cfg, d);
        const Trajectory tm = integrate_trajectory(m, F, minus, cfg, d);
        std::vector<Vec> w(base.samples(), Vec(n)), w1(base.samples(), Vec(n));
        for (std::size_t k = 0; k < base.samples(); ++k)
            for (int i = 0; i < n; ++i) {
                w[k][i] = (tp.x[k][i] - tm.x[k][i]) / (2.0 * hh);
                w1[k][i] = (tp.y[k][i] - tm.y[k][i]) / (2.0 * hh);
            }
        return std::make_pair(std::move(w), std::move(w1));
    };

    auto [w, w1] = run(h);
    if (richardson) {
        auto [wh, w1h] = run(0.5 * h);
        for (std::size_t k = 0; k < w.size(); ++k)
            for (int i = 0; i < n; ++i) {
                w[k][i] = (4.0 * wh[k][i] - w[k][i]) / 3.0;
                w1[k][i] = (4.0 * w1h[k][i] - w1[k][i]) / 3.0;
            }
    }
    base.w = std::move(w);
    base.w1 = std::move(w1);
    return base;
}

// ---------------------------------------------------------------------------
// Covariant rates and parallel transport
// ---------------------------------------------------------------------------

/// Berwald covariant rate with reference vector y: returns vdot + N(x, y) v at
/// sample k (the geometrical acceleration when v = y).
inline Vec berwald_covariant_rate(const GeometryModel& m, const Trajectory& traj, std::size_t k,
                                  const Vec& v, const Vec& vdot, const DiffStrategy& d = {}) {
    if (k >= traj.samples()) throw IndexOutOfRange("berwald_covariant_rate: sample index out of range");
    if (v.size() != traj.x[k].size() || vdot.size() != v.size())
        throw DimensionMismatch("berwald_covariant_rate: vector dimension mismatch");
    const SquareField N = GeometryEngine(m, d).nonlinear(traj.x[k], traj.y[k]);
    return vec_add(vdot, N.apply(v));
}

struct TransportResult {
    Trajectory traj;
    /// sup_k |2 y2 + N y| -- how far the base is from a geodesic (warn if big).
    double base_geodesic_residual = 0.0;
};

/// Solves  dw/dt + N(x(t), y(t)) w = 0  along the base samples.
inline TransportResult parallel_transport(const GeometryModel& m, const Trajectory& base,
                                          const Vec& w0, const DiffStrategy& d = {}) {
    const int n = base.n();
    if (base.samples() < 4) throw TooFewSamples("parallel_transport needs at least 4 base samples");
    if (static_cast<int>(w0.size()) != n)
        throw DimensionMismatch("transport initial vector dimension != trajectory dimension");
    GeometryEngine eng(m, d);

    TransportResult out;
    out.traj = base;
    out.traj.w.assign(base.samples(), Vec(n));
    out.traj.w1.assign(base.samples(), Vec(n));

    double res = 0.0;
    for (std::size_t k = 0; k < base.samples(); ++k) {
        const SquareField N = eng.nonlinear(base.x[k], base.y[k]);
        res = std::max(res, norm2(vec_add(vec_scale(2.0, base.y2[k]), N.apply(base.y[k]))));
    }
    out.base_geodesic_residual = res;

    Vec u(w0);
    Vec k1(n), k2(n), k3(n), k4(n), tmp(n);
    const double dt = base.dt;
    auto rhs = [&](const SquareField& N, const Vec& w, Vec& dw) {
        Vec nv = N.apply(w);
        for (int i = 0; i < n; ++i) dw[i] = -nv[i];
    };
    auto store = [&](std::size_t k, const SquareField& N) {
        out.traj.w[k] = u;
        Vec nv = N.apply(u);
        for (int i = 0; i < n; ++i) out.traj.w1[k][i] = -nv[i];
    };

    SquareField N0 = eng.nonlinear(base.x[0], base.y[0]);
    store(0, N0);
    for (std::size_t k = 0; k + 1 < base.samples(); ++k) {
        const Vec xh = detail::interp_half(base.x, k), yh = detail::interp_half(base.y, k);
        const SquareField Nh = eng.nonlinear(xh, yh);
        const SquareField N1 = eng.nonlinear(base.x[k + 1], base.y[k + 1]);
        rhs(N0, u, k1);
        for (int i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k1[i];
        rhs(Nh, tmp, k2);
        for (int i = 0; i < n; ++i) tmp[i] = u[i] + 0.5 * dt * k2[i];
        rhs(Nh, tmp, k3);
        for (int i = 0; i < n; ++i) tmp[i] = u[i] + dt * k3[i];
        rhs(N1, tmp, k4);
        for (int i = 0; i < n; ++i) u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        store(k + 1, N1);
        N0 = N1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Residual certificates
// ---------------------------------------------------------------------------

/// Per-sample norm of the v2-component of the deviation field's extension:
/// |w2 + M1 w1 + M2 w| with w1 = dw/dt, w2 = (1/2) d2w/dt2 from 4th-order
/// stencils on the stored samples. Edge samples use one-sided stencils and are
/// excluded from reported suprema.
inline std::vector<double> v2_residual(const Trajectory& traj, const CoefficientProvider& mc) {
    if (traj.samples() < 5) throw TooFewSamples("v2_residual needs at least 5 samples");
    if (!traj.has_deviation()) throw DimensionMismatch("v2_residual: trajectory has no deviation field");
    const auto w1 = fd::series_derivative(traj.w, traj.dt, 1);
    auto w2 = fd::series_derivative(traj.w, traj.dt, 2);
    for (auto& row : w2)
        for (double& v : row) v *= 0.5;

    std::vector<double> res(traj.samples());
    for (std::size_t k = 0; k < traj.samples(); ++k) {
        const DualCoefficients c = mc(traj.state(k));
        res[k] = norm2(vec_add(vec_add(w2[k], c.M1.apply(w1[k])), c.M2.apply(traj.w[k])));
    }
    return res;
}

/// Horizontality residuals of the extension curve: per-sample norms of
/// (delta y1/dt, delta y2/dt) from adapted_components of differenced rates.
inline std::pair<std::vector<double>, std::vector<double>> horizontality_residual(
    const Trajectory& traj, const CoefficientProvider& mc) {
    if (traj.samples() < 5) throw TooFewSamples("horizontality_residual needs at least 5 samples");
    const auto dx = fd::series_derivative(traj.x, traj.dt, 1);
    const auto dy = fd::series_derivative(traj.y, traj.dt, 1);
    const auto dy2 = fd::series_derivative(traj.y2, traj.dt, 1);

    std::vector<double> r1(traj.samples()), r2(traj.samples());
    for (std::size_t k = 0; k < traj.samples(); ++k) {
        const DualCoefficients c = mc(traj.state(k));
        const auto blocks = adapted_components(dx[k], dy[k], dy2[k], c);
        r1[k] = norm2(blocks[1]);
        r2[k] = norm2(blocks[2]);
    }
    return {r1, r2};
}

/// Times where |w| dips to a zero (conjugate-point report; detection only, no
/// root solving). A zero between grid points leaves a local minimum of order
/// dt |w1|, so the threshold scales with the stored rate; the reported time is
/// refined by a parabolic fit of |w|^2.
inline std::vector<double> conjugate_times(const Trajectory& traj) {
    std::vector<double> out;
    if (!traj.has_deviation()) return out;
    double wmax = 0.0;
    for (const auto& w : traj.w) wmax = std::max(wmax, norm2(w));
    if (wmax == 0.0) return out;
    for (std::size_t k = 1; k + 1 < traj.samples(); ++k) {
        const double a = norm2(traj.w[k - 1]), b = norm2(traj.w[k]), c = norm2(traj.w[k + 1]);
        const double rate = traj.w1.empty() ? wmax : norm2(traj.w1[k]);
        const double thresh = std::max(2.0 * traj.dt * rate, 1e-9 * wmax);
        if (b <= a && b <= c && b < thresh && traj.t[k] > 0.0) {
            const double a2 = a * a, b2 = b * b, c2 = c * c;
            const double denom = a2 - 2.0 * b2 + c2;
            const double shift = denom > 0.0 ? 0.5 * (a2 - c2) / denom : 0.0;
            out.push_back(traj.t[k] + shift * traj.dt);
        }
    }
    return out;
}

}  // namespace osc2
