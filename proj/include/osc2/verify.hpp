#pragma once

#include <chrono>
#include <cstdio>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "osc2/config.hpp"
#include "osc2/connections.hpp"
#include "osc2/dynamics.hpp"
#include "osc2/models.hpp"

namespace osc2::verify {

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    std::string suite;
    std::string model;
    double sup_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool negative_control = false;  ///< pass means the residual EXCEEDS tolerance
    std::string note;
};

struct Options {
    std::uint64_t seed = 42;
    std::string suite;            ///< empty = every suite
    double tolerance_scale = 1.0; ///< scales tolerances (verification negative control)
};

struct Report {
    std::uint64_t seed = 42;
    std::vector<CheckResult> checks;
    bool overall_pass = true;
};

// ---------------------------------------------------------------------------
// Deterministic sampling
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3e", v);
    return buf;
}

/// Per-model sampling boxes (documented in the README): states drawn here stay
/// inside chart guards with margin for stencils and short integrations.
struct StateBox {
    Vec x_lo, x_hi, y_lo, y_hi;
    double min_speed = 0.1;
};

inline StateBox sampling_box(ModelKind kind) {
    switch (kind) {
        case ModelKind::sphere:
            return {{0.7, -3.0}, {2.4, 3.0}, {-1.0, -1.0}, {1.0, 1.0}, 0.2};
        case ModelKind::flat_polar:
            return {{0.7, -3.0}, {2.0, 3.0}, {-0.8, -0.8}, {0.8, 0.8}, 0.1};
        case ModelKind::hyperbolic_half_plane:
            return {{-1.0, 0.8}, {1.0, 2.0}, {-0.8, -0.8}, {0.8, 0.8}, 0.1};
        case ModelKind::randers:
            return {{-1.0, -1.0}, {1.0, 1.0}, {-1.2, -1.2}, {1.2, 1.2}, 0.3};
        default:
            return {{-1.0, -1.0}, {1.0, 1.0}, {-1.5, -1.5}, {1.5, 1.5}, 0.1};
    }
}

/// Tighter boxes for seeded integrations (margin to the chart guards over the
/// run horizon).
inline StateBox integration_box(ModelKind kind) {
    switch (kind) {
        case ModelKind::sphere:
            return {{1.2, -3.0}, {1.94, 3.0}, {-0.7, -0.7}, {0.7, 0.7}, 0.2};
        case ModelKind::flat_polar:
            return {{1.0, -3.0}, {1.8, 3.0}, {-0.3, -0.4}, {0.3, 0.4}, 0.1};
        case ModelKind::hyperbolic_half_plane:
            return {{-1.0, 1.0}, {1.0, 1.8}, {-0.4, -0.4}, {0.4, 0.4}, 0.1};
        default:
            return sampling_box(kind);
    }
}

inline FirstOrderState sample_state(const StateBox& box, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int n = static_cast<int>(box.x_lo.size());
    FirstOrderState s;
    s.x.resize(n);
    s.y.resize(n);
    for (int tries = 0; tries < 1000; ++tries) {
        for (int i = 0; i < n; ++i) {
            s.x[i] = box.x_lo[i] + (box.x_hi[i] - box.x_lo[i]) * u01(rng);
            s.y[i] = box.y_lo[i] + (box.y_hi[i] - box.y_lo[i]) * u01(rng);
        }
        if (norm2(s.y) >= box.min_speed) return s;
    }
    throw Error("sampling box rejected too many draws");
}

inline Vec sample_vec(int n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vec v(n);
    for (double& e : v) e = u(rng);
    return v;
}

// ---------------------------------------------------------------------------
// Closed forms used as expected values
// ---------------------------------------------------------------------------

namespace detail {

/// Unit-sphere great circle through (theta, phi) with chart velocity y, via
/// the R^3 embedding.
inline Vec sphere_great_circle(const Vec& x0, const Vec& y0, double t) {
    const double th = x0[0], ph = x0[1];
    const double st = std::sin(th), ct = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);
    const double p[3] = {st * cp, st * sp, ct};
    const double eth[3] = {ct * cp, ct * sp, -st};
    const double eph[3] = {-st * sp, st * cp, 0.0};
    double v[3];
    for (int i = 0; i < 3; ++i) v[i] = y0[0] * eth[i] + y0[1] * eph[i];
    const double speed = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    double q[3] = {p[0], p[1], p[2]};
    if (speed > 1e-15) {
        const double c = std::cos(speed * t), s = std::sin(speed * t);
        for (int i = 0; i < 3; ++i) q[i] = c * p[i] + s * v[i] / speed;
    }
    return {std::acos(std::max(-1.0, std::min(1.0, q[2]))), std::atan2(q[1], q[0])};
}

inline const double kPi = 3.14159265358979323846;

struct ZooEntry {
    ModelSpec spec;
    bool spray_nontrivial = false;  ///< curvature/connection actually nonzero
};

inline std::vector<ZooEntry> zoo() {
    ModelSpec sphere{ModelKind::sphere, 2};
    ModelSpec polar{ModelKind::flat_polar, 2};
    ModelSpec hyp{ModelKind::hyperbolic_half_plane, 2};
    ModelSpec eu{ModelKind::euclidean, 2};
    ModelSpec mink{ModelKind::minkowski_norm, 2};
    ModelSpec rand{ModelKind::randers, 2};
    rand.randers_b = {0.3, 0.1};
    return {{sphere, true}, {polar, true}, {hyp, true}, {eu, false}, {mink, false}, {rand, false}};
}

inline DiffStrategy fd_strategy() {
    DiffStrategy d;
    d.mode = DiffMode::forced_finite_difference;
    return d;
}

inline Trajectory equator_geodesic(double dt, double t_end) {
    const auto m = presets::sphere();
    return integrate_trajectory(m, zero_force(2), {{kPi / 2, 0.0}, {0.0, 1.0}},
                                {dt, t_end});
}

/// Manufactured non-geodesic sphere curve x(t) = (pi/2, t^2) with consistent
/// rates (y = dx/dt, y2 = x''/2).
inline Trajectory parabola_curve(double dt, double t_end) {
    Trajectory traj;
    traj.dt = dt;
    const long long steps = std::llround(t_end / dt);
    for (long long k = 0; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        traj.t.push_back(t);
        traj.x.push_back({kPi / 2, t * t});
        traj.y.push_back({0.0, 2.0 * t});
        traj.y2.push_back({0.0, 1.0});
    }
    return traj;
}

/// Relative sup-norm deviation between the FD oracle and the Jacobi ODE.
inline double oracle_vs_jacobi(const GeometryModel& m, const ForceField& F,
                               const FirstOrderState& init, const Vec& w0, const Vec& w0dot,
                               const IntegratorConfig& cfg) {
    const Trajectory oracle = deviation_oracle(m, F, init, w0, w0dot, cfg);
    const Trajectory jac = integrate_jacobi(m, F, oracle, w0, w0dot);
    double sup_w = 0.0, sup_diff = 0.0;
    for (std::size_t k = 0; k < jac.samples(); ++k) {
        sup_w = std::max(sup_w, norm2(jac.w[k]));
        sup_diff = std::max(sup_diff, norm2(vec_sub(oracle.w[k], jac.w[k])));
    }
    return sup_diff / (1.0 + sup_w);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Acceptance criteria (the exit gate); each returns one CheckResult
// ---------------------------------------------------------------------------

/// Criterion 1: equatorial unit-speed Jacobi field reproduces sin t.
inline CheckResult criterion_1(std::uint64_t /*seed*/ = 42) {
    CheckResult r{"criterion_1_sphere_jacobi_closed_form", "acceptance", "sphere"};
    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory base = detail::equator_geodesic(1e-3, detail::kPi / 2);
    const Trajectory jac =
        integrate_jacobi(presets::sphere(), zero_force(2), base, {0.0, 0.0}, {1.0, 0.0});
    double err = 0.0;
    for (std::size_t k = 0; k < jac.samples(); ++k)
        err = std::max(err, std::abs(jac.w[k][0] - std::sin(jac.t[k])));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.sup_residual = err;
    r.tolerance = 1e-6;
    r.pass = err < 1e-6 && secs < 1.0;
    r.note = "sup|w_theta - sin t| over [0, pi/2], dt = 1e-3; runtime " +
             sci(secs) + " s (budget 1 s)";
    return r;
}

/// Criterion 2: vanishing v2-component on the criterion-1 field, with a
/// non-Jacobi negative control.
inline CheckResult criterion_2(std::uint64_t /*seed*/ = 42) {
    CheckResult r{"criterion_2_theorem4_v2_residual", "acceptance", "sphere"};
    const auto m = presets::sphere();
    const auto F = zero_force(2);
    const Trajectory base = detail::equator_geodesic(1e-3, detail::kPi / 2);
    const Trajectory jac = integrate_jacobi(m, F, base, {0.0, 0.0}, {1.0, 0.0});
    const auto provider = ours_provider(m, F);
    const double sup = interior_sup(v2_residual(jac, provider));

    Trajectory control = base;
    control.w.resize(base.samples());
    control.w1.resize(base.samples());
    for (std::size_t k = 0; k < base.samples(); ++k) {
        const double t = base.t[k];
        control.w[k] = {t * t, 0.0};
        control.w1[k] = {2.0 * t, 0.0};
    }
    const double sup_control = interior_sup(v2_residual(control, provider));

    r.sup_residual = sup;
    r.tolerance = 1e-5;
    r.pass = sup < 1e-5 && sup_control > 0.1;
    r.note = "Jacobi-field residual vs 1e-5; negative control w = (t^2, 0) residual " +
             sci(sup_control) + " (must exceed 0.1)";
    return r;
}

/// Criterion 3: FD deviation oracle vs the Jacobi ODE on sphere, flat_polar,
/// hyperbolic and the drag model, 10 seeded initial conditions each.
inline CheckResult criterion_3(std::uint64_t seed = 42) {
    CheckResult r{"criterion_3_oracle_equivalence", "acceptance", "zoo"};
    std::mt19937_64 rng(seed ^ fnv1a(r.name));
    struct Case {
        GeometryModel m;
        ForceField F;
        ModelKind kind;
        double t_end;
    };
    const std::vector<Case> cases = {
        {presets::sphere(), zero_force(2), ModelKind::sphere, 1.0},
        {presets::flat_polar(), zero_force(2), ModelKind::flat_polar, 1.0},
        {presets::hyperbolic_half_plane(), zero_force(2), ModelKind::hyperbolic_half_plane, 1.0},
        {presets::minkowski_norm(2), build_force({ForceKind::linear_drag, 2, 1.0}),
         ModelKind::minkowski_norm, 1.0}};
    double worst = 0.0;
    std::string worst_model;
    for (const auto& c : cases) {
        const StateBox box = integration_box(c.kind);
        for (int trial = 0; trial < 10; ++trial) {
            const FirstOrderState s = sample_state(box, rng);
            const Vec w0 = sample_vec(2, rng), w0dot = sample_vec(2, rng);
            const double rel = detail::oracle_vs_jacobi(c.m, c.F, s, w0, w0dot, {1e-3, c.t_end});
            if (rel > worst) {
                worst = rel;
                worst_model = c.m.name;
            }
        }
    }
    r.sup_residual = worst;
    r.tolerance = 1e-4;
    r.pass = worst < 1e-4;
    r.note = "worst relative sup-error (model " + worst_model + "), h = 1e-4, dt = 1e-3";
    return r;
}

/// Criterion 4: M2_ours - M2_miron + (1/2) y^k R^i_jk vanishes (analytic 1e-8,
/// forced FD 1e-4) at 100 seeded states per model.
inline CheckResult criterion_4(std::uint64_t seed = 42) {
    CheckResult r{"criterion_4_miron_difference", "acceptance", "zoo"};
    std::mt19937_64 rng(seed ^ fnv1a(r.name));
    double worst_an = 0.0, worst_fd = 0.0;
    for (const auto& z : detail::zoo()) {
        const GeometryModel m = build_model(z.spec);
        const StateBox box = sampling_box(z.spec.kind);
        for (int trial = 0; trial < 100; ++trial) {
            const FirstOrderState s = sample_state(box, rng);
            const SecondOrderState s2{s.x, s.y, sample_vec(2, rng)};
            for (int mode = 0; mode < 2; ++mode) {
                const DiffStrategy d = mode ? detail::fd_strategy() : DiffStrategy{};
                const auto ours = our_dual_coefficients(m, zero_force(2), s2, d);
                const auto miron = miron_dual_coefficients(m, s2, d);
                const CubeField R = curvature_R(m, s, d);
                double res = 0.0;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        double yr = 0.0;
                        for (int k = 0; k < 2; ++k) yr += s.y[k] * R(i, j, k);
                        res = std::max(res,
                                       std::abs(ours.M2(i, j) - miron.M2(i, j) + 0.5 * yr));
                    }
                (mode ? worst_fd : worst_an) = std::max(mode ? worst_fd : worst_an, res);
            }
        }
    }
    r.sup_residual = worst_an;
    r.tolerance = 1e-8;
    r.pass = worst_an < 1e-8 && worst_fd < 1e-4;
    r.note = "analytic " + sci(worst_an) + " (tol 1e-8); forced FD " +
             sci(worst_fd) + " (tol 1e-4)";
    return r;
}

/// Criterion 5: drag closed forms; w1(1) = 1 - e^-1 within 1e-6 and the
/// locally Minkowski coefficient formulas to 1e-12.
inline CheckResult criterion_5(std::uint64_t seed = 42) {
    CheckResult r{"criterion_5_minkowski_drag_closed_forms", "acceptance", "minkowski_norm"};
    std::mt19937_64 rng(seed ^ fnv1a(r.name));
    const auto m = presets::minkowski_norm(2);
    const auto F = build_force({ForceKind::linear_drag, 2, 1.0});
    const Trajectory base =
        integrate_trajectory(m, F, {{0.0, 0.0}, {1.0, 0.0}}, {1e-3, 1.0});
    const Trajectory jac = integrate_jacobi(m, F, base, {0.0, 0.0}, {1.0, 0.0});
    const double w_err = std::abs(jac.w.back()[0] - (1.0 - std::exp(-1.0)));

    double m_err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const FirstOrderState s = sample_state(sampling_box(ModelKind::minkowski_norm), rng);
        const SecondOrderState s2{s.x, s.y, sample_vec(2, rng)};
        const auto dc = our_dual_coefficients(m, F, s2);
        const SquareField dFdy = F.dF_dy(s.x, s.y), dFdx = F.dF_dx(s.x, s.y);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                m_err = std::max(m_err, std::abs(dc.M1(i, j) + 0.5 * dFdy(i, j)));
                m_err = std::max(m_err, std::abs(dc.M2(i, j) + 0.5 * dFdx(i, j)));
            }
    }
    r.sup_residual = w_err;
    r.tolerance = 1e-6;
    r.pass = w_err < 1e-6 && m_err < 1e-12;
    r.note = "|w1(1) - (1-1/e)| = " + sci(w_err) + "; max |M + dF/2| = " +
             sci(m_err) + " (tol 1e-12)";
    return r;
}

/// Criterion 6: geodesic extensions are horizontal across the zoo; a
/// non-geodesic control is loudly non-horizontal.
inline CheckResult criterion_6(std::uint64_t seed = 42) {
    CheckResult r{"criterion_6_horizontality", "acceptance", "zoo"};
    std::mt19937_64 rng(seed ^ fnv1a(r.name));
    double worst = 0.0;
    std::string worst_model;
    for (const auto& z : detail::zoo()) {
        const GeometryModel m = build_model(z.spec);
        const auto provider = ours_provider(m, zero_force(2));
        const StateBox box = integration_box(z.spec.kind);
        for (int trial = 0; trial < 3; ++trial) {
            const FirstOrderState s = sample_state(box, rng);
            const Trajectory traj = integrate_trajectory(m, zero_force(2), s, {1e-3, 1.0});
            const auto [r1, r2] = horizontality_residual(traj, provider);
            const double sup = std::max(interior_sup(r1), interior_sup(r2));
            if (sup > worst) {
                worst = sup;
                worst_model = m.name;
            }
        }
    }
    // negative control: x(t) = (pi/2, t^2) on the sphere
    const Trajectory bad = detail::parabola_curve(1e-3, 2.0);
    const auto provider = ours_provider(presets::sphere(), zero_force(2));
    const auto [b1, b2] = horizontality_residual(bad, provider);
    double control = 0.0;
    for (std::size_t k = 2; k + 2 < bad.samples(); ++k)
        if (bad.t[k] >= 1.0) control = std::max(control, b1[k]);

    r.sup_residual = worst;
    r.tolerance = 1e-5;
    r.pass = worst < 1e-5 && control >= 1.0;
    r.note = "worst geodesic residual (model " + worst_model + "); parabola control " +
             sci(control) + " (must reach 1)";
    return r;
}

/// Criterion 7: Euler/homogeneity and contraction identities, analytic and FD.
inline CheckResult criterion_7(std::uint64_t seed = 42) {
    CheckResult r{"criterion_7_euler_contraction_identities", "acceptance", "zoo"};
    std::mt19937_64 rng(seed ^ fnv1a(r.name));
    double euler_an = 0.0, euler_fd = 0.0, contr_an = 0.0, contr_fd = 0.0;
    for (const auto& z : detail::zoo()) {
        const GeometryModel m = build_model(z.spec);
        const StateBox box = sampling_box(z.spec.kind);
        for (int trial = 0; trial < 100; ++trial) {
            const FirstOrderState s = sample_state(box, rng);
            for (int mode = 0; mode < 2; ++mode) {
                const DiffStrategy d = mode ? detail::fd_strategy() : DiffStrategy{};
                GeometryEngine eng(m, d);
                const Vec G = eng.spray(s.x, s.y);
                const SquareField N = eng.nonlinear(s.x, s.y);
                double res = 0.0;
                for (int i = 0; i < 2; ++i) {
                    double ny = 0.0;
                    for (int j = 0; j < 2; ++j) ny += N(i, j) * s.y[j];
                    res = std::max(res, std::abs(2.0 * G[i] - ny));
                }
                res /= 1.0 + norm_inf(G);
                (mode ? euler_fd : euler_an) = std::max(mode ? euler_fd : euler_an, res);
                const auto cd = berwald_curvatures(m, s, d);
                (mode ? contr_fd : contr_an) =
                    std::max(mode ? contr_fd : contr_an, cd.contraction_residual);
            }
        }
    }
    r.sup_residual = std::max(euler_an, contr_an);
    r.tolerance = 1e-7;
    r.pass = euler_an < 1e-7 && contr_an < 1e-7 && euler_fd < 1e-4 && contr_fd < 1e-4;
    r.note = "analytic euler " + sci(euler_an) + ", contraction " +
             sci(contr_an) + " (tol 1e-7); FD euler " + sci(euler_fd) +
             ", contraction " + sci(contr_fd) + " (tol 1e-4)";
    return r;
}

/// Criterion 8: halving dt cuts the sphere-geodesic endpoint error ~16x.
inline CheckResult criterion_8(std::uint64_t /*seed*/ = 42) {
    CheckResult r{"criterion_8_rk4_convergence_order", "acceptance", "sphere"};
    const auto m = presets::sphere();
    const FirstOrderState s{{detail::kPi / 3, 0.2}, {0.3, 0.9}};
    const double t_end = 1.0;
    auto endpoint_err = [&](double dt) {
        const Trajectory traj = integrate_trajectory(m, zero_force(2), s, {dt, t_end});
        const Vec exact = detail::sphere_great_circle(s.x, s.y, t_end);
        return norm2(vec_sub(traj.x.back(), exact));
    };
    const double e1 = endpoint_err(8e-3), e2 = endpoint_err(4e-3);
    const double ratio = e1 / e2;
    r.sup_residual = std::abs(ratio - 16.0);
    r.tolerance = 4.0;
    r.pass = ratio >= 12.0 && ratio <= 20.0;
    r.note = "error(8e-3)/error(4e-3) = " + sci(ratio) + " (nominal 16, accepted [12, 20])";
    return r;
}

/// Criterion 9: flat vs flat_polar verdicts for the theorem-4, oracle and
/// horizontality checks agree on the same (mapped) geodesic. Residual ratios
/// are clamped below at tol/10 before comparison: both charts sit at or below
/// their certification floor, where raw ratios are round-off noise.
inline CheckResult criterion_9(std::uint64_t /*seed*/ = 42) {
    CheckResult r{"criterion_9_chart_covariance", "acceptance", "flat_polar"};
    const auto mc = presets::euclidean(2);
    const auto mp = presets::flat_polar();
    const auto F = zero_force(2);
    const ChartMap c2p = cartesian_to_polar();

    const FirstOrderState sc{{1.0, 0.3}, {0.25, 0.55}};
    const FirstOrderState sp = push_state(c2p, sc);
    const Vec w0c{0.3, -0.2}, w0dotc{0.4, 0.1};
    const Vec w0p = push_vector(c2p, sc.x, w0c);
    // the pushforward of the rate of a deviation field picks up the chart
    // Hessian term along w; for the *initial-condition* comparison both charts
    // integrate their own Jacobi equation from consistently mapped data, which
    // the FD oracle provides by construction:
    const IntegratorConfig cfg{1e-3, 1.5};

    auto run = [&](const GeometryModel& m, const FirstOrderState& s, const Vec& w0,
                   const Vec& w0dot) {
        const Trajectory oracle = deviation_oracle(m, F, s, w0, w0dot, cfg);
        const Trajectory jac = integrate_jacobi(m, F, oracle, w0, w0dot);
        const auto provider = ours_provider(m, F);
        double rel = 0.0, supw = 0.0;
        for (std::size_t k = 0; k < jac.samples(); ++k) {
            supw = std::max(supw, norm2(jac.w[k]));
            rel = std::max(rel, norm2(vec_sub(oracle.w[k], jac.w[k])));
        }
        struct Out {
            double oracle_rel, v2_sup, h_sup;
        } o;
        o.oracle_rel = rel / (1.0 + supw);
        o.v2_sup = interior_sup(v2_residual(jac, provider));
        const auto [h1, h2] = horizontality_residual(jac, provider);
        o.h_sup = std::max(interior_sup(h1), interior_sup(h2));
        return o;
    };
    // polar deviation initial rate: d/du of y_p = J(x_c(u)) y_c(u) gives
    // w0dot_p = J w0dot_c + (dJ . w0_c) y_c; obtain it numerically from the map
    Vec w0dotp(2);
    {
        const double h = 1e-6;
        for (int i = 0; i < 2; ++i) {
            const FirstOrderState plus{vec_axpy(sc.x, h, w0c), vec_axpy(sc.y, h, w0dotc)};
            const FirstOrderState minus{vec_axpy(sc.x, -h, w0c), vec_axpy(sc.y, -h, w0dotc)};
            const FirstOrderState pp = push_state(c2p, plus), pm = push_state(c2p, minus);
            w0dotp[i] = (pp.y[i] - pm.y[i]) / (2.0 * h);
        }
    }
    const auto cart = run(mc, sc, w0c, w0dotc);
    const auto pol = run(mp, sp, w0p, w0dotp);

    auto clamped_ratio = [](double a, double b, double tol) {
        const double fa = std::max(a, tol / 10.0), fb = std::max(b, tol / 10.0);
        return std::max(fa / fb, fb / fa);
    };
    const double r2 = clamped_ratio(cart.v2_sup, pol.v2_sup, 1e-5);
    const double r3 = clamped_ratio(cart.oracle_rel, pol.oracle_rel, 1e-4);
    const double r6 = clamped_ratio(cart.h_sup, pol.h_sup, 1e-5);
    const bool verdicts = cart.v2_sup < 1e-5 && pol.v2_sup < 1e-5 && cart.oracle_rel < 1e-4 &&
                          pol.oracle_rel < 1e-4 && cart.h_sup < 1e-5 && pol.h_sup < 1e-5;
    r.sup_residual = std::max({r2, r3, r6});
    r.tolerance = 10.0;
    r.pass = verdicts && r.sup_residual <= 10.0;
    r.note = "clamped residual ratios: v2 " + sci(r2) + ", oracle " +
             sci(r3) + ", horizontality " + sci(r6) +
             (verdicts ? "; both charts pass" : "; verdicts DISAGREE");
    return r;
}

inline std::vector<CheckResult> acceptance_criteria(std::uint64_t seed = 42) {
    return {criterion_1(seed), criterion_2(seed), criterion_3(seed),
            criterion_4(seed), criterion_5(seed), criterion_6(seed),
            criterion_7(seed), criterion_8(seed), criterion_9(seed)};
}

// ---------------------------------------------------------------------------
// Supporting invariant checks
// ---------------------------------------------------------------------------

namespace checks {

inline CheckResult metric_homogeneity(std::uint64_t seed) {
    CheckResult r{"metric_homogeneity", "homogeneity", "zoo"};
    std::mt19937_64 rng(seed ^ fnv1a(r.name));
    double worst = 0.0;
    for (const auto& z : detail::zoo()) {
        const GeometryModel m = build_model(z.spec);
        if (!m.is_spray_homogeneous) continue;
        const StateBox box = sampling_box(z.spec.kind);
        for (int trial = 0; trial < 20; ++trial) {
            const FirstOrderState s = sample_state(box, rng);
            const SquareField g = metric_tensor(m, s);
            for (double lam : {0.5, 2.0, 10.0}) {
                const SquareField gl = metric_tensor(m, {s.x, vec_scale(lam, s.y)});
                worst = std::max(worst,
                                 field_sub(gl, g).max_abs() / (1.0 + g.max_abs()));
            }
        }
    }
    r.sup_residual = worst;
    r.tolerance = 1e-9;
    r.pass = worst < r.tolerance;
    r.note = "g(x, lam y) = g(x, y) at lam in {0.5, 2, 10}";
    return r;
}

/// 2 M1 = 2N - dF/dy and 2 M2 = 2 dG/dx - dF/dx on-extension: the direct
/// chain-rule variational coefficients. Pins every term of the assembly,
/// including the sign of the L.F term.
inline CheckResult variational_coefficients(std::uint64_t seed) {
    CheckResult r{"variational_coefficients", "dual", "zoo"};
    std::mt19937_64 rng(seed ^ fnv1a(r.name));
    double worst = 0.0;
    ForceSpec spring;
    spring.kind = ForceKind::position_spring;
    SquareField K(2);
    K(0, 0) = 1.5; K(0, 1) = -0.2; K(1, 0) = -0.2; K(1, 1) = 0.8;
    spring.spring_K = K;
    const ForceField forces[] = {zero_force(2), build_force({ForceKind::linear_drag, 2, 1.0}),
                                 build_force(spring)};
    for (const auto& z : detail::zoo()) {
        const GeometryModel m = build_model(z.spec);
        const StateBox box = sampling_box(z.spec.kind);
        GeometryEngine eng(m);
        for (const auto& F : forces)
            for (int trial = 0; trial < 20; ++trial) {
                const FirstOrderState s = sample_state(box, rng);
                const auto dc = our_dual_coefficients(m, F, on_extension_state(m, F, s));
                SquareField A = eng.nonlinear(s.x, s.y);
                for (double& v : A.a) v *= 2.0;
                SquareField B = eng.spray_dx(s.x, s.y);
                for (double& v : B.a) v *= 2.0;
                if (!F.is_zero()) {
                    const SquareField dFdy = F.dF_dy(s.x, s.y), dFdx = F.dF_dx(s.x, s.y);
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j) {
                            A(i, j) -= dFdy(i, j);
                            B(i, j) -= dFdx(i, j);
                        }
                }
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        worst = std::max(worst, std::abs(2.0 * dc.M1(i, j) - A(i, j)));
                        worst = std::max(worst, std::abs(2.0 * dc.M2(i, j) - B(i, j)));
                    }
            }
    }
    r.sup_residual = worst;
    r.tolerance = 1e-9;
    r.pass = worst < r.tolerance;
    r.note = "|2M - variational coefficients| on-extension, zero/drag/spring forces";
    return r;
}

/// Locally Minkowski reduction: spray family vanishes and (M1, M2) collapse to
/// (-dF/dy / 2, -dF/dx / 2) for minkowski_norm and randers presets.
inline CheckResult minkowski_reduction(std::uint64_t seed) {
    CheckResult r{"minkowski_reduction", "minkowski", "minkowski_norm+randers"};
    std::mt19937_64 rng(seed ^ fnv1a(r.name));
    double worst = 0.0;
    ForceSpec spring;
    spring.kind = ForceKind::position_spring;
    SquareField K(2);
    K(0, 0) = 2.0; K(0, 1) = 0.3; K(1, 0) = 0.3; K(1, 1) = 1.0;
    spring.spring_K = K;
    for (const auto& kind : {ModelKind::minkowski_norm, ModelKind::randers}) {
        ModelSpec spec{kind, 2};
        const GeometryModel m = build_model(spec);
        const StateBox box = sampling_box(kind);
        GeometryEngine eng(m);
        for (const auto& F :
             {build_force({ForceKind::linear_drag, 2, 1.0}), build_force(spring)})
            for (int trial = 0; trial < 20; ++trial) {
                const FirstOrderState s = sample_state(box, rng);
                worst = std::max(worst, norm_inf(eng.spray(s.x, s.y)));
                worst = std::max(worst, eng.nonlinear(s.x, s.y).max_abs());
                worst = std::max(worst, eng.berwald(s.x, s.y).max_abs());
                worst = std::max(worst, curvature_R(m, s).max_abs());
                const SecondOrderState s2{s.x, s.y, sample_vec(2, rng)};
                const auto dc = our_dual_coefficients(m, F, s2);
                const SquareField dFdy = F.dF_dy(s.x, s.y), dFdx = F.dF_dx(s.x, s.y);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        worst = std::max(worst, std::abs(dc.M1(i, j) + 0.5 * dFdy(i, j)));
                        worst = std::max(worst, std::abs(dc.M2(i, j) + 0.5 * dFdx(i, j)));
                    }
            }
    }
    r.sup_residual = worst;
    r.tolerance = 1e-9;
    r.pass = worst < r.tolerance;
    r.note = "G, N, L, R vanish; M1 = -dF/dy / 2, M2 = -dF/dx / 2";
    return r;
}

/// Oracle equivalence extended to forces on curved models; this is the
/// end-to-end pin of the force-term sign in the dual coefficients.
inline CheckResult oracle_forced_curved(std::uint64_t seed) {
    CheckResult r{"oracle_equivalence_forced_curved", "oracle", "sphere+flat_polar"};
    std::mt19937_64 rng(seed ^ fnv1a(r.name));
    ForceSpec spring;
    spring.kind = ForceKind::position_spring;
    SquareField K(2);
    K(0, 0) = 0.4; K(0, 1) = 0.1; K(1, 0) = 0.1; K(1, 1) = 0.3;
    spring.spring_K = K;
    struct Case {
        GeometryModel m;
        ForceField F;
        ModelKind kind;
    };
    const std::vector<Case> cases = {
        {presets::sphere(), build_force({ForceKind::linear_drag, 2, 0.5}), ModelKind::sphere},
        {presets::flat_polar(), build_force(spring), ModelKind::flat_polar}};
    double worst = 0.0;
    for (const auto& c : cases) {
        const StateBox box = integration_box(c.kind);
        for (int trial = 0; trial < 5; ++trial) {
            const FirstOrderState s = sample_state(box, rng);
            const Vec w0 = sample_vec(2, rng), w0dot = sample_vec(2, rng);
            worst = std::max(worst,
                             detail::oracle_vs_jacobi(c.m, c.F, s, w0, w0dot, {1e-3, 1.0}));
        }
    }
    r.sup_residual = worst;
    r.tolerance = 1e-4;
    r.pass = worst < r.tolerance;
    r.note = "FD deviation oracle vs Jacobi ODE with drag/spring on curved charts";
    return r;
}

/// Parallel transport: metric norm is conserved along geodesics, and transport
/// differs from the Jacobi flow exactly as the closed forms predict.
inline CheckResult transport(std::uint64_t /*seed*/) {
    CheckResult r{"parallel_transport", "transport", "sphere"};
    const auto m = presets::sphere();
    const Trajectory base = detail::equator_geodesic(1e-3, detail::kPi);
    const auto tr = parallel_transport(m, base, {1.0, 0.0});
    double drift = 0.0;
    const SquareField g0 = metric_tensor(m, {base.x[0], base.y[0]});
    const double n0 = dot(tr.traj.w[0], g0.apply(tr.traj.w[0]));
    for (std::size_t k = 0; k < base.samples(); ++k) {
        const SquareField g = metric_tensor(m, {base.x[k], base.y[k]});
        drift = std::max(drift, std::abs(dot(tr.traj.w[k], g.apply(tr.traj.w[k])) - n0));
    }
    // transport is not the Jacobi flow: difference at t = pi/2 is |w0| (cos
    // closed form) for w(0) = w0, wdot(0) = 0
    const Trajectory jac = integrate_jacobi(m, zero_force(2), base, {1.0, 0.0}, {0.0, 0.0});
    const std::size_t half = base.samples() / 2;
    const double diff = norm2(vec_sub(tr.traj.w[half], jac.w[half]));
    const double expect = 1.0 - std::cos(base.t[half]);

    r.sup_residual = std::max(drift, std::abs(diff - expect));
    r.tolerance = 1e-6;
    r.pass = drift < 1e-8 && std::abs(diff - expect) < 1e-6 &&
             tr.base_geodesic_residual < 1e-10;
    r.note = "g-norm drift " + sci(drift) + " over [0, pi]; |transport - jacobi| at pi/2 = " +
             sci(diff) + " (closed form " + sci(expect) + ")";
    return r;
}

/// Along extensions the adapted v1-rate equals the Berwald covariant rate and
/// the v2-rate equals half the second covariant rate.
inline CheckResult remark_rates(std::uint64_t seed) {
    CheckResult r{"remark_rate_equivalences", "remark", "sphere"};
    std::mt19937_64 rng(seed ^ fnv1a(r.name));
    const auto m = presets::sphere();
    const FirstOrderState s = sample_state(integration_box(ModelKind::sphere), rng);
    const Trajectory traj = integrate_trajectory(m, zero_force(2), s, {1e-3, 1.0});
    const auto provider = ours_provider(m, zero_force(2));

    const auto dx = fd::series_derivative(traj.x, traj.dt, 1);
    const auto dy = fd::series_derivative(traj.y, traj.dt, 1);
    const auto dy2 = fd::series_derivative(traj.y2, traj.dt, 1);

    double first = 0.0;
    std::vector<Vec> u(traj.samples());
    for (std::size_t k = 0; k < traj.samples(); ++k) {
        const auto blocks = adapted_components(dx[k], dy[k], dy2[k], provider(traj.state(k)));
        u[k] = berwald_covariant_rate(m, traj, k, traj.y[k], dy[k]);
        if (k >= 2 && k + 2 < traj.samples())
            first = std::max(first, norm_inf(vec_sub(blocks[1],
                                                     berwald_covariant_rate(m, traj, k, dx[k], dy[k]))));
    }
    const auto du = fd::series_derivative(u, traj.dt, 1);
    double second = 0.0;
    for (std::size_t k = 2; k + 2 < traj.samples(); ++k) {
        const auto blocks = adapted_components(dx[k], dy[k], dy2[k], provider(traj.state(k)));
        const Vec d2 = berwald_covariant_rate(m, traj, k, u[k], du[k]);
        second = std::max(second, norm_inf(vec_sub(vec_scale(2.0, blocks[2]), d2)));
    }
    r.sup_residual = std::max(first, second);
    r.tolerance = 1e-6;
    r.pass = first < 1e-10 && second < 1e-6;
    r.note = "v1-rate vs covariant rate " + sci(first) +
             " (tol 1e-10); 2 x v2-rate vs second covariant rate " + sci(second) +
             " (tol 1e-6; the factor 2 reflects y2 = x''/2)";
    return r;
}

inline CheckResult energy_conservation(std::uint64_t /*seed*/) {
    CheckResult r{"energy_conservation", "energy", "zoo"};
    struct Case {
        GeometryModel m;
        FirstOrderState s;
    };
    const std::vector<Case> cases = {
        {presets::sphere(), {{detail::kPi / 2, 0.0}, {0.28, 0.96}}},
        {presets::flat_polar(), {{1.0, 0.0}, {0.0, 0.5}}},
        {presets::hyperbolic_half_plane(), {{0.0, 1.0}, {0.14, 0.14}}},
        {presets::euclidean(2), {{0.0, 0.0}, {0.7, -0.2}}}};
    double worst = 0.0;
    for (const auto& c : cases) {
        const Trajectory traj = integrate_trajectory(c.m, zero_force(2), c.s, {1e-3, 10.0});
        const auto e = energies(c.m, traj);
        for (double v : e) worst = std::max(worst, std::abs(v - e.front()));
    }
    r.sup_residual = worst;
    r.tolerance = 1e-8;
    r.pass = worst < r.tolerance;
    r.note = "max |L(x, y) - L(x0, y0)| over t_end = 10, F = 0";
    return r;
}

/// Drag decay and equatorial closed forms of the base integrator.
inline CheckResult trajectory_closed_forms(std::uint64_t /*seed*/) {
    CheckResult r{"trajectory_closed_forms", "dynamics", "minkowski_norm+sphere"};
    const auto mink = presets::minkowski_norm(2);
    const auto F = build_force({ForceKind::linear_drag, 2, 1.0});
    const Trajectory drag =
        integrate_trajectory(mink, F, {{0.0, 0.0}, {1.0, 0.0}}, {1e-3, 1.0});
    const double e_drag = std::abs(drag.y.back()[0] - std::exp(-1.0));

    const Trajectory eq = detail::equator_geodesic(1e-3, detail::kPi / 2);
    double e_eq = 0.0;
    for (std::size_t k = 0; k < eq.samples(); ++k) {
        e_eq = std::max(e_eq, std::abs(eq.x[k][0] - detail::kPi / 2));
        e_eq = std::max(e_eq, std::abs(eq.x[k][1] - eq.t[k]));
    }
    const auto [rx, ry] = extension_residuals(eq);

    r.sup_residual = std::max(e_drag, e_eq);
    r.tolerance = 1e-8;
    r.pass = e_drag < 1e-8 && e_eq < 1e-10 && rx < 1e-5 && ry < 1e-5;
    r.note = "|y1(1) - exp(-1)| = " + sci(e_drag) + "; equator sup-error " +
             sci(e_eq) + "; extension identities (" + sci(rx) + ", " +
             sci(ry) + ")";
    return r;
}

/// Drag is a d-vector: its polar-chart trajectories map onto the Cartesian
/// ones under the chart change.
inline CheckResult force_covariance(std::uint64_t /*seed*/) {
    CheckResult r{"force_covariance", "models", "flat_polar"};
    const auto F = build_force({ForceKind::linear_drag, 2, 1.0});
    const FirstOrderState sc{{1.0, 0.3}, {0.25, 0.55}};
    const ChartMap c2p = cartesian_to_polar();
    const ChartMap p2c = polar_to_cartesian();
    const FirstOrderState sp = push_state(c2p, sc);
    const IntegratorConfig cfg{1e-3, 1.5};
    const Trajectory tc = integrate_trajectory(presets::euclidean(2), F, sc, cfg);
    const Trajectory tp = integrate_trajectory(presets::flat_polar(), F, sp, cfg);
    double worst = 0.0;
    for (std::size_t k = 0; k < tc.samples(); ++k)
        worst = std::max(worst, norm2(vec_sub(p2c.forward(tp.x[k]), tc.x[k])));
    r.sup_residual = worst;
    r.tolerance = 1e-9;
    r.pass = worst < r.tolerance;
    r.note = "drag trajectories agree across charts (d-vector transformation)";
    return r;
}

/// flat_polar geodesics are straight lines in the Cartesian image.
inline CheckResult polar_straight_lines(std::uint64_t seed) {
    CheckResult r{"flat_polar_straight_lines", "models", "flat_polar"};
    std::mt19937_64 rng(seed ^ fnv1a(r.name));
    const ChartMap p2c = polar_to_cartesian();
    const auto m = presets::flat_polar();
    double worst = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const FirstOrderState sp = sample_state(integration_box(ModelKind::flat_polar), rng);
        const Trajectory tp = integrate_trajectory(m, zero_force(2), sp, {1e-3, 1.0});
        const Vec p0 = p2c.forward(sp.x);
        const Vec v0 = push_vector(p2c, sp.x, sp.y);
        for (std::size_t k = 0; k < tp.samples(); ++k) {
            const Vec want = vec_axpy(p0, tp.t[k], v0);
            worst = std::max(worst, norm2(vec_sub(p2c.forward(tp.x[k]), want)));
        }
    }
    r.sup_residual = worst;
    r.tolerance = 1e-9;
    r.pass = worst < r.tolerance;
    r.note = "geodesics map to straight lines under (r, phi) -> (r cos phi, r sin phi)";
    return r;
}

inline CheckResult randers_positivity(std::uint64_t seed) {
    CheckResult r{"randers_positivity", "randers", "randers"};
    std::mt19937_64 rng(seed ^ fnv1a(r.name));
    double min_margin = std::numeric_limits<double>::infinity();
    for (double bnorm : {0.1, 0.5, 0.9}) {
        const auto m = presets::randers(2, {bnorm, 0.0});
        for (int trial = 0; trial < 50; ++trial) {
            const FirstOrderState s = sample_state(sampling_box(ModelKind::randers), rng);
            const double L = m.lagrangian(s.x, s.y);
            const SquareField g = metric_tensor(m, s);
            const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
            min_margin = std::min({min_margin, L, g(0, 0), det});
        }
    }
    r.sup_residual = std::max(0.0, -min_margin);  // violation depth, 0 when all positive
    r.tolerance = 1e-12;
    r.pass = min_margin > 0.0;
    r.note = "L > 0 and positive-definite metric for |b| in {0.1, 0.5, 0.9}";
    return r;
}

/// Analytic vs forced-FD agreement across the geometry stack.
inline CheckResult fd_cross_check(std::uint64_t seed) {
    CheckResult r{"fd_cross_check", "fdcross", "zoo"};
    std::mt19937_64 rng(seed ^ fnv1a(r.name));
    const DiffStrategy fd = detail::fd_strategy();
    double worst_ratio = 0.0;
    std::string worst_tag;
    for (const auto& z : detail::zoo()) {
        const GeometryModel m = build_model(z.spec);
        const StateBox box = sampling_box(z.spec.kind);
        GeometryEngine an(m), eng_fd(m, fd);
        for (int trial = 0; trial < 20; ++trial) {
            const FirstOrderState s = sample_state(box, rng);
            auto consider = [&](const std::string& tag, double diff, double tol) {
                if (diff / tol > worst_ratio) {
                    worst_ratio = diff / tol;
                    worst_tag = m.name + ":" + tag;
                }
            };
            // round-off floor of the pinned h2 = eps^(1/3) stencil is
            // ~ 2e-5 |L| at the box corners, so the metric budget is looser
            consider("metric", field_sub(metric_tensor(m, s), metric_tensor(m, s, fd)).max_abs(),
                     1e-4);
            consider("spray",
                     norm_inf(vec_sub(an.spray(s.x, s.y), eng_fd.spray(s.x, s.y))), 1e-9);
            consider("nonlinear",
                     field_sub(an.nonlinear(s.x, s.y), eng_fd.nonlinear(s.x, s.y)).max_abs(),
                     1e-6);
            {
                CubeField d1 = an.berwald(s.x, s.y), d2 = eng_fd.berwald(s.x, s.y);
                double diff = 0.0;
                for (std::size_t i = 0; i < d1.a.size(); ++i)
                    diff = std::max(diff, std::abs(d1.a[i] - d2.a[i]));
                consider("berwald", diff, 1e-5);
            }
            {
                CubeField d1 = curvature_R(m, s), d2 = curvature_R(m, s, fd);
                double diff = 0.0;
                for (std::size_t i = 0; i < d1.a.size(); ++i)
                    diff = std::max(diff, std::abs(d1.a[i] - d2.a[i]));
                consider("curvature", diff, 1e-4);
            }
        }
    }
    r.sup_residual = worst_ratio;
    r.tolerance = 1.0;
    r.pass = worst_ratio <= 1.0;
    r.note = "worst discrepancy/tolerance = " + sci(worst_ratio) + " at " + worst_tag +
             " (tols: g 1e-4, G 1e-9, N 1e-6, L 1e-5, R 1e-4)";
    return r;
}

/// Chart covariance in the absolute form: theorem-4 and horizontality sups for
/// the same geodesic agree between flat and flat_polar within 1e-5.
inline CheckResult chart_absolute_agreement(std::uint64_t /*seed*/) {
    CheckResult r{"chart_residual_agreement", "chart", "flat_polar"};
    const auto F = zero_force(2);
    const ChartMap c2p = cartesian_to_polar();
    const FirstOrderState sc{{1.0, 0.3}, {0.25, 0.55}};
    const FirstOrderState sp = push_state(c2p, sc);
    const IntegratorConfig cfg{1e-3, 1.5};
    auto run = [&](const GeometryModel& m, const FirstOrderState& s, const Vec& w0,
                   const Vec& w0dot) {
        const Trajectory base = integrate_trajectory(m, F, s, cfg);
        const Trajectory jac = integrate_jacobi(m, F, base, w0, w0dot);
        const auto provider = ours_provider(m, F);
        const double v2 = interior_sup(v2_residual(jac, provider));
        const auto [h1, h2] = horizontality_residual(base, provider);
        return std::make_pair(v2, std::max(interior_sup(h1), interior_sup(h2)));
    };
    const auto [v2c, hc] = run(presets::euclidean(2), sc, {0.3, -0.2}, {0.4, 0.1});
    const auto [v2p, hp] =
        run(presets::flat_polar(), sp, push_vector(c2p, sc.x, {0.3, -0.2}),
            push_vector(c2p, sc.x, {0.4, 0.1}));
    const double worst = std::max(std::abs(v2c - v2p), std::abs(hc - hp));
    r.sup_residual = worst;
    r.tolerance = 1e-5;
    r.pass = worst < r.tolerance;
    r.note = "|residual(flat) - residual(flat_polar)| for theorem-4 and horizontality sups";
    return r;
}

}  // namespace checks

// ---------------------------------------------------------------------------
// Runner and report
// ---------------------------------------------------------------------------

inline Report run_verify(const Options& opt = {}) {
    using Fn = CheckResult (*)(std::uint64_t);
    struct Entry {
        const char* suite;
        Fn fn;
    };
    const std::vector<Entry> entries = {
        {"acceptance", criterion_1},
        {"acceptance", criterion_2},
        {"acceptance", criterion_3},
        {"acceptance", criterion_4},
        {"acceptance", criterion_5},
        {"acceptance", criterion_6},
        {"acceptance", criterion_7},
        {"acceptance", criterion_8},
        {"acceptance", criterion_9},
        {"homogeneity", checks::metric_homogeneity},
        {"dual", checks::variational_coefficients},
        {"minkowski", checks::minkowski_reduction},
        {"oracle", checks::oracle_forced_curved},
        {"transport", checks::transport},
        {"remark", checks::remark_rates},
        {"energy", checks::energy_conservation},
        {"dynamics", checks::trajectory_closed_forms},
        {"models", checks::force_covariance},
        {"models", checks::polar_straight_lines},
        {"randers", checks::randers_positivity},
        {"fdcross", checks::fd_cross_check},
        {"chart", checks::chart_absolute_agreement},
    };
    Report rep;
    rep.seed = opt.seed;
    for (const auto& e : entries) {
        if (!opt.suite.empty() && opt.suite != e.suite) continue;
        CheckResult c = e.fn(opt.seed);
        c.suite = e.suite;
        if (opt.tolerance_scale != 1.0) {
            c.tolerance *= opt.tolerance_scale;
            c.pass = c.negative_control ? c.sup_residual > c.tolerance
                                        : c.sup_residual <= c.tolerance;
        }
        rep.checks.push_back(std::move(c));
    }
    if (rep.checks.empty() && !opt.suite.empty())
        throw InvalidSpec("unknown verify suite '" + opt.suite + "'");
    std::sort(rep.checks.begin(), rep.checks.end(),
              [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
    rep.overall_pass = true;
    for (const auto& c : rep.checks) rep.overall_pass = rep.overall_pass && c.pass;
    return rep;
}

inline json report_to_json(const Report& rep) {
    json j;
    j["seed"] = rep.seed;
    j["overall_pass"] = rep.overall_pass;
    j["checks"] = json::array();
    for (const auto& c : rep.checks) {
        json e;
        e["name"] = c.name;
        e["suite"] = c.suite;
        e["model"] = c.model;
        e["sup_residual"] = c.sup_residual;
        e["tolerance"] = c.tolerance;
        e["pass"] = c.pass;
        e["note"] = c.note;
        j["checks"].push_back(e);
    }
    return j;
}

inline void print_report(std::ostream& os, const Report& rep) {
    os << std::left << std::setw(44) << "check" << std::setw(10) << "result"
       << std::setw(14) << "residual" << "tolerance\n";
    for (const auto& c : rep.checks) {
        os << std::left << std::setw(44) << c.name << std::setw(10)
           << (c.pass ? "PASS" : "FAIL") << std::setw(14) << std::scientific
           << std::setprecision(3) << c.sup_residual << c.tolerance << "\n"
           << std::defaultfloat;
        if (!c.note.empty()) os << "    " << c.note << "\n";
    }
    os << (rep.overall_pass ? "overall: PASS" : "overall: FAIL") << " (" << rep.checks.size()
       << " checks, seed " << rep.seed << ")\n";
}

}  // namespace osc2::verify
