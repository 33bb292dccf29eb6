#pragma once

#include <array>
#include <type_traits>

#include "osc2/core.hpp"
#include "osc2/derivatives.hpp"
#include "osc2/model.hpp"

namespace osc2 {

// ---------------------------------------------------------------------------
// Value bundles
// ---------------------------------------------------------------------------

struct ConnectionPack {
    Vec G;          ///< spray coefficients G^i
    SquareField N;  ///< nonlinear connection N^i_j = dG^i/dy^j
    CubeField L;    ///< Berwald coefficients L^i_jk = dN^i_j/dy^k
    FirstOrderState evaluated_at;
};

struct CurvatureData {
    CubeField R_tor;  ///< R^i_jk = delta0_k N^i_j - delta0_j N^i_k  (antisymmetric in j,k)
    QuadField R_hh;   ///< [j][i][k][l] = R_j^i_kl  (hh-curvature)
    QuadField P_hv;   ///< [j][i][k][l] = P_j^i_kl = dL^i_jk/dy^l
    FirstOrderState evaluated_at;
    double contraction_residual = 0.0;  ///< max |y^h R_h^i_jk - R^i_jk|
    bool contraction_ok = true;
};

enum class Provenance { ours, miron, pde_supplied };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::ours: return "ours";
        case Provenance::miron: return "miron";
        default: return "pde-supplied";
    }
}

/// Dual coefficients (M1, M2) of a nonlinear connection on the second-order
/// bundle, evaluated at a point (x, y, y2).
struct DualCoefficients {
    SquareField M1, M2;
    SecondOrderState evaluated_at;
    Provenance provenance = Provenance::ours;
};

// ---------------------------------------------------------------------------
// First-order connection objects
// ---------------------------------------------------------------------------

inline Vec spray_coefficients(const GeometryModel& m, const FirstOrderState& s,
                              const DiffStrategy& d = {}) {
    return GeometryEngine(m, d).spray(s.x, s.y);
}

inline SquareField nonlinear_connection(const GeometryModel& m, const FirstOrderState& s,
                                        const DiffStrategy& d = {}) {
    return GeometryEngine(m, d).nonlinear(s.x, s.y);
}

inline CubeField berwald_coefficients(const GeometryModel& m, const FirstOrderState& s,
                                      const DiffStrategy& d = {}, double* pre_sym_asym = nullptr) {
    return GeometryEngine(m, d).berwald(s.x, s.y, pre_sym_asym);
}

inline ConnectionPack connection_pack(const GeometryModel& m, const FirstOrderState& s,
                                      const DiffStrategy& d = {}) {
    GeometryEngine eng(m, d);
    return {eng.spray(s.x, s.y), eng.nonlinear(s.x, s.y), eng.berwald(s.x, s.y), s};
}

/// delta0_i f = df/dx^i - N^j_i df/dy^j, componentwise for scalar, vector or
/// matrix valued f(x, y). The derivative index lands last.
template <class F>
auto delta0_derivative(F&& f, const FirstOrderState& s, const SquareField& N,
                       const DiffStrategy& d = {}) {
    using R = std::invoke_result_t<F&, const Vec&, const Vec&>;
    const int n = s.n();
    auto partial = [&](bool wrt_x, int idx) {
        const Vec& base = wrt_x ? s.x : s.y;
        const double h = d.step(1, base[idx]);
        if (wrt_x)
            return fd::central1([&](const Vec& xx) { return f(xx, s.y); }, s.x, idx, h);
        return fd::central1([&](const Vec& yy) { return f(s.x, yy); }, s.y, idx, h);
    };
    if constexpr (std::is_same_v<R, double>) {
        Vec out(n, 0.0);
        Vec dy(n);
        for (int j = 0; j < n; ++j)
            dy[j] = fd::central1_scalar([&](const Vec& yy) { return f(s.x, yy); }, s.y, j,
                                        d.step(1, s.y[j]));
        for (int i = 0; i < n; ++i) {
            double v = fd::central1_scalar([&](const Vec& xx) { return f(xx, s.y); }, s.x, i,
                                           d.step(1, s.x[i]));
            for (int j = 0; j < n; ++j) v -= N(j, i) * dy[j];
            out[i] = v;
        }
        return out;
    } else if constexpr (std::is_same_v<R, Vec>) {
        SquareField out(n);
        std::vector<Vec> dx(n), dy(n);
        for (int i = 0; i < n; ++i) dx[i] = partial(true, i);
        for (int j = 0; j < n; ++j) dy[j] = partial(false, j);
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < n; ++c) {
                double v = dx[i][c];
                for (int j = 0; j < n; ++j) v -= N(j, i) * dy[j][c];
                out(c, i) = v;
            }
        return out;
    } else {
        static_assert(std::is_same_v<R, SquareField>, "unsupported field shape");
        CubeField out(n);
        std::vector<SquareField> dx(n), dy(n);
        for (int i = 0; i < n; ++i) dx[i] = partial(true, i);
        for (int j = 0; j < n; ++j) dy[j] = partial(false, j);
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    double v = dx[i](a, b);
                    for (int j = 0; j < n; ++j) v -= N(j, i) * dy[j](a, b);
                    out(a, b, i) = v;
                }
        return out;
    }
}

namespace detail {

/// delta0_k N^i_j assembled from engine surfaces:
/// dN^i_j/dx^k - N^s_k L^i_js  (dN/dy = Berwald).
inline CubeField delta0_of_N(const SquareField& N, const CubeField& L3, const CubeField& dNdx) {
    const int n = N.n;
    CubeField D(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double v = dNdx(i, j, k);
                for (int s = 0; s < n; ++s) v -= N(s, k) * L3(i, j, s);
                D(i, j, k) = v;
            }
    return D;
}

inline CubeField curvature_from_parts(const SquareField& N, const CubeField& L3,
                                      const CubeField& dNdx) {
    const CubeField D = delta0_of_N(N, L3, dNdx);
    const int n = N.n;
    CubeField R(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) R(i, j, k) = D(i, j, k) - D(i, k, j);
    return R;
}

}  // namespace detail

/// Torsion curvature R^i_jk = delta0_k N^i_j - delta0_j N^i_k, antisymmetric
/// in (j, k) by construction.
inline CubeField curvature_R(const GeometryModel& m, const FirstOrderState& s,
                             const DiffStrategy& d = {}) {
    GeometryEngine eng(m, d);
    const SquareField N = eng.nonlinear(s.x, s.y);
    const CubeField L3 = eng.berwald(s.x, s.y);
    const CubeField dNdx = eng.nonlinear_dx(s.x, s.y);
    return detail::curvature_from_parts(N, L3, dNdx);
}

/// Berwald hh- and hv-curvature:
///   R_j^i_kl = delta0_l L^i_jk - delta0_k L^i_jl + L^m_jk L^i_ml - L^m_jl L^i_mk
///   P_j^i_kl = dL^i_jk/dy^l
/// The contraction y^h R_h^i_jk is compared against R^i_jk and flagged (not
/// fatal) when the residual exceeds 1e-4.
inline CurvatureData berwald_curvatures(const GeometryModel& m, const FirstOrderState& s,
                                        const DiffStrategy& d = {}) {
    GeometryEngine eng(m, d);
    const int n = eng.n();
    const SquareField N = eng.nonlinear(s.x, s.y);
    const CubeField L3 = eng.berwald(s.x, s.y);
    const CubeField dNdx = eng.nonlinear_dx(s.x, s.y);
    const QuadField dLdy = eng.berwald_dy(s.x, s.y);
    const QuadField dLdx = eng.berwald_dx(s.x, s.y);

    // delta0_l L^i_jk = dL^i_jk/dx^l - N^s_l dL^i_jk/dy^s
    QuadField d0L(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double v = dLdx(i, j, k, l);
                    for (int sidx = 0; sidx < n; ++sidx) v -= N(sidx, l) * dLdy(i, j, k, sidx);
                    d0L(i, j, k, l) = v;
                }

    CurvatureData out;
    out.evaluated_at = s;
    out.R_tor = detail::curvature_from_parts(N, L3, dNdx);
    out.R_hh = QuadField(n);
    out.P_hv = QuadField(n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double v = d0L(i, j, k, l) - d0L(i, j, l, k);
                    for (int mm = 0; mm < n; ++mm)
                        v += L3(mm, j, k) * L3(i, mm, l) - L3(mm, j, l) * L3(i, mm, k);
                    out.R_hh(j, i, k, l) = v;
                    out.P_hv(j, i, k, l) = dLdy(i, j, k, l);
                }

    double res = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double c = 0.0;
                for (int h = 0; h < n; ++h) c += s.y[h] * out.R_hh(h, i, j, k);
                res = std::max(res, std::abs(c - out.R_tor(i, j, k)));
            }
    out.contraction_residual = res;
    out.contraction_ok = res <= 1e-4;
    return out;
}

/// C = y^k d/dx^k + 2 y2^k d/dy^k applied entrywise to a matrix field of (x, y).
template <class FieldCb>
SquareField c_operator(FieldCb&& field, const SecondOrderState& s2, const DiffStrategy& d = {}) {
    const int n = s2.n();
    SquareField out(n);
    for (int k = 0; k < n; ++k) {
        if (s2.y[k] != 0.0) {
            SquareField dx = fd::central1([&](const Vec& xx) { return field(xx, s2.y); }, s2.x, k,
                                          d.step(1, s2.x[k]));
            for (std::size_t t = 0; t < out.a.size(); ++t) out.a[t] += s2.y[k] * dx.a[t];
        }
        if (s2.y2[k] != 0.0) {
            SquareField dy = fd::central1([&](const Vec& yy) { return field(s2.x, yy); }, s2.y, k,
                                          d.step(1, s2.y[k]));
            for (std::size_t t = 0; t < out.a.size(); ++t) out.a[t] += 2.0 * s2.y2[k] * dy.a[t];
        }
    }
    return out;
}

namespace detail {

struct ForceEval {
    Vec F;
    SquareField dFdx, dFdy;
};

inline ForceEval eval_force(const ForceField& F, const Vec& x, const Vec& y,
                            const DiffStrategy& d) {
    const int n = static_cast<int>(x.size());
    ForceEval e{Vec(n, 0.0), SquareField(n), SquareField(n)};
    if (F.is_zero()) return e;
    e.F = F.force(x, y);
    if (F.dF_dx && !d.forced_fd())
        e.dFdx = F.dF_dx(x, y);
    else
        for (int j = 0; j < n; ++j) {
            Vec c = fd::central1([&](const Vec& xx) { return F.force(xx, y); }, x, j,
                                 d.step(1, x[j]));
            for (int i = 0; i < n; ++i) e.dFdx(i, j) = c[i];
        }
    if (F.dF_dy && !d.forced_fd())
        e.dFdy = F.dF_dy(x, y);
    else
        for (int j = 0; j < n; ++j) {
            Vec c = fd::central1([&](const Vec& yy) { return F.force(x, yy); }, y, j,
                                 d.step(1, y[j]));
            for (int i = 0; i < n; ++i) e.dFdy(i, j) = c[i];
        }
    return e;
}

}  // namespace detail

/// Dual coefficients of the connection built from the second variation of the
/// trajectories  delta y/dt = F:
///   M1^i_j = N^i_j - (1/2) dF^i/dy^j
///   M2^i_j = (1/2) (C(N)^i_j + N^i_k N^k_j - y^k R^i_jk - L^i_jk F^k - dF^i/dx^j)
/// C(N) uses the state's own y2, so along extensions (y2 = -G + F/2) these
/// reproduce the variational coefficients of the flow exactly.
inline DualCoefficients our_dual_coefficients(const GeometryModel& m, const ForceField& F,
                                              const SecondOrderState& s2,
                                              const DiffStrategy& d = {}) {
    GeometryEngine eng(m, d);
    const int n = eng.n();
    const SquareField N = eng.nonlinear(s2.x, s2.y);
    const CubeField L3 = eng.berwald(s2.x, s2.y);
    const CubeField dNdx = eng.nonlinear_dx(s2.x, s2.y);
    const CubeField R = detail::curvature_from_parts(N, L3, dNdx);
    const detail::ForceEval fe = detail::eval_force(F, s2.x, s2.y, d);

    DualCoefficients out;
    out.evaluated_at = s2;
    out.provenance = Provenance::ours;
    out.M1 = SquareField(n);
    out.M2 = SquareField(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            out.M1(i, j) = N(i, j) - 0.5 * fe.dFdy(i, j);
            double cn = 0.0, nn = 0.0, yr = 0.0, lf = 0.0;
            for (int k = 0; k < n; ++k) {
                cn += s2.y[k] * dNdx(i, j, k) + 2.0 * s2.y2[k] * L3(i, j, k);
                nn += N(i, k) * N(k, j);
                yr += s2.y[k] * R(i, j, k);
                lf += L3(i, j, k) * fe.F[k];
            }
            out.M2(i, j) = 0.5 * (cn + nn - yr - lf - fe.dFdx(i, j));
        }
    return out;
}

/// Spray-only variant (second variation of the action, no curvature
/// correction):  M1 = N,  M2 = (1/2)(C(N) + N N).
inline DualCoefficients miron_dual_coefficients(const GeometryModel& m,
                                                const SecondOrderState& s2,
                                                const DiffStrategy& d = {}) {
    GeometryEngine eng(m, d);
    const int n = eng.n();
    const SquareField N = eng.nonlinear(s2.x, s2.y);
    const CubeField L3 = eng.berwald(s2.x, s2.y);
    const CubeField dNdx = eng.nonlinear_dx(s2.x, s2.y);

    DualCoefficients out;
    out.evaluated_at = s2;
    out.provenance = Provenance::miron;
    out.M1 = N;
    out.M2 = SquareField(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double cn = 0.0, nn = 0.0;
            for (int k = 0; k < n; ++k) {
                cn += s2.y[k] * dNdx(i, j, k) + 2.0 * s2.y2[k] * L3(i, j, k);
                nn += N(i, k) * N(k, j);
            }
            out.M2(i, j) = 0.5 * (cn + nn);
        }
    return out;
}

/// Dual coefficients read off a second-order PDE system with coefficient
/// blocks a, b:  M1 = a/2, M2 = b/2.
inline DualCoefficients from_pde_coefficients(const SquareField& a, const SquareField& b,
                                              const SecondOrderState& at = {}) {
    if (a.n != b.n) throw DimensionMismatch("PDE coefficient blocks differ in dimension");
    DualCoefficients out;
    out.evaluated_at = at;
    out.provenance = Provenance::pde_supplied;
    out.M1 = a;
    out.M2 = b;
    for (double& v : out.M1.a) v *= 0.5;
    for (double& v : out.M2.a) v *= 0.5;
    return out;
}

/// Adapted components of a rate triple along a curve on the second-order
/// bundle:
///   (dx/dt,  dy1/dt + M1 dx/dt,  dy2/dt + M1 dy1/dt + M2 dx/dt)
inline std::array<Vec, 3> adapted_components(const Vec& dxdt, const Vec& dy1dt, const Vec& dy2dt,
                                             const DualCoefficients& mc) {
    const int n = mc.M1.n;
    if (static_cast<int>(dxdt.size()) != n || static_cast<int>(dy1dt.size()) != n ||
        static_cast<int>(dy2dt.size()) != n)
        throw DimensionMismatch("adapted_components: rate blocks must match coefficient dimension");
    Vec v1 = vec_add(dy1dt, mc.M1.apply(dxdt));
    Vec v2 = vec_add(vec_add(dy2dt, mc.M1.apply(dy1dt)), mc.M2.apply(dxdt));
    return {dxdt, v1, v2};
}

/// Second-order lift of a first-order state along the flow of
/// delta y/dt = F:  y2 = -G + F/2.
inline SecondOrderState on_extension_state(const GeometryModel& m, const ForceField& F,
                                           const FirstOrderState& s, const DiffStrategy& d = {}) {
    Vec G = GeometryEngine(m, d).spray(s.x, s.y);
    Vec y2(G.size());
    if (!F.is_zero()) {
        Vec fv = F.force(s.x, s.y);
        for (std::size_t i = 0; i < y2.size(); ++i) y2[i] = -G[i] + 0.5 * fv[i];
    } else {
        for (std::size_t i = 0; i < y2.size(); ++i) y2[i] = -G[i];
    }
    return {s.x, s.y, y2};
}

}  // namespace osc2
