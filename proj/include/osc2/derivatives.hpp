#pragma once

#include <cmath>
#include <utility>

#include "osc2/core.hpp"
#include "osc2/model.hpp"

namespace osc2 {

/// Invert a (symmetric) metric by Gauss-Jordan elimination with partial
/// pivoting. Throws SingularMetric when the pivot collapses or the estimated
/// infinity-norm condition number exceeds 1e12.
inline SquareField invert_metric(const SquareField& g) {
    const int n = g.n;
    SquareField a(g), inv = SquareField::identity(n);
    auto row_norm = [](const SquareField& f) {
        double m = 0.0;
        for (int i = 0; i < f.n; ++i) {
            double s = 0.0;
            for (int j = 0; j < f.n; ++j) s += std::abs(f(i, j));
            m = std::max(m, s);
        }
        return m;
    };
    const double gnorm = row_norm(g);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (std::abs(a(piv, col)) < 1e-14 * std::max(1.0, gnorm))
            throw SingularMetric("metric is numerically singular (pivot collapse)");
        if (piv != col)
            for (int j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        const double p = a(col, col);
        for (int j = 0; j < n; ++j) {
            a(col, j) /= p;
            inv(col, j) /= p;
        }
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    const double cond = gnorm * row_norm(inv);
    if (cond > 1e12) throw SingularMetric("metric condition number " + std::to_string(cond) + " exceeds 1e12");
    return inv;
}

/// Layered derivative supplier for one (model, strategy) pair.
///
/// Every quantity prefers the model's analytic callback; a missing callback is
/// filled by a central stencil over the next-lower surface. forced_fd mode
/// bypasses each quantity's *own* callback but still differences the most
/// accurate available lower surface (stacking stencils blindly just amplifies
/// round-off). Surfaces that are themselves FD-built get noise-inflated steps.
class GeometryEngine {
public:
    explicit GeometryEngine(const GeometryModel& model, DiffStrategy d = {})
        : m_(&model), d_(d) {
        d_.validate();
        if (!m_->lagrangian) throw InvalidSpec("GeometryModel has no Lagrangian");
        if (m_->n < 1) throw InvalidSpec("GeometryModel dimension must be >= 1");
    }

    const GeometryModel& model() const { return *m_; }
    const DiffStrategy& strategy() const { return d_; }
    int n() const { return m_->n; }

    void check_velocity(const Vec& y) const {
        if (m_->y_min > 0.0 && norm2(y) < m_->y_min)
            throw SingularVelocity(m_->name + ": |y| below singular-cone radius y_min");
    }

    // ---- Lagrangian layer --------------------------------------------------

    double lagrangian(const Vec& x, const Vec& y) const { return m_->lagrangian(x, y); }

    Vec dL_dx(const Vec& x, const Vec& y) const {
        if (use_cb(m_->dL_dx)) return m_->dL_dx(x, y);
        return l_gradient(x, y, /*wrt_x=*/true);
    }

    Vec dL_dy(const Vec& x, const Vec& y) const {
        if (use_cb(m_->dL_dy)) return m_->dL_dy(x, y);
        return l_gradient(x, y, /*wrt_x=*/false);
    }

    SquareField d2L_dyy(const Vec& x, const Vec& y) const {
        if (use_cb(m_->d2L_dyy)) return m_->d2L_dyy(x, y);
        return l_hessian_yy(x, y);
    }

    /// (s, j) = d2L / dy^s dx^j
    SquareField d2L_dyx(const Vec& x, const Vec& y) const {
        if (use_cb(m_->d2L_dyx)) return m_->d2L_dyx(x, y);
        return l_hessian_yx(x, y);
    }

    // ---- metric ------------------------------------------------------------

    /// g_ij = (1/2) d2L/dy^i dy^j, symmetrized; optional pre-symmetrization
    /// asymmetry report.
    SquareField metric(const FirstOrderState& s, double* pre_sym_asym = nullptr) const {
        check_velocity(s.y);
        SquareField g = d2L_dyy(s.x, s.y);
        for (double& v : g.a) v *= 0.5;
        if (pre_sym_asym) *pre_sym_asym = g.max_asymmetry();
        g.symmetrize();
        return g;
    }

    SquareField metric_inverse(const FirstOrderState& s) const { return invert_metric(metric(s)); }

    // ---- spray layer ---------------------------------------------------------

    /// Canonical semispray: 2G^i = (1/2) g^{is} (d2L/dy^s dx^j y^j - dL/dx^s).
    Vec spray(const Vec& x, const Vec& y) const {
        check_velocity(y);
        if (use_cb(m_->spray)) return m_->spray(x, y);
        return assemble_spray(x, y);
    }

    /// N^i_j = dG^i/dy^j
    SquareField nonlinear(const Vec& x, const Vec& y) const {
        check_velocity(y);
        if (use_cb(m_->spray_dy)) return m_->spray_dy(x, y);
        return diff_vec_surface([this](const Vec& xx, const Vec& yy) { return best_spray(xx, yy); },
                                x, y, /*wrt_x=*/false, best_spray_exact());
    }

    /// dG^i/dx^j
    SquareField spray_dx(const Vec& x, const Vec& y) const {
        check_velocity(y);
        if (use_cb(m_->spray_dx)) return m_->spray_dx(x, y);
        return diff_vec_surface([this](const Vec& xx, const Vec& yy) { return best_spray(xx, yy); },
                                x, y, /*wrt_x=*/true, best_spray_exact());
    }

    /// Berwald coefficients L^i_jk = dN^i_j/dy^k, symmetrized in (j, k).
    CubeField berwald(const Vec& x, const Vec& y, double* pre_sym_asym = nullptr) const {
        check_velocity(y);
        CubeField L = raw_berwald(x, y);
        if (pre_sym_asym) *pre_sym_asym = L.max_asymmetry_jk();
        L.symmetrize_jk();
        return L;
    }

    /// dN^i_j/dx^k
    CubeField nonlinear_dx(const Vec& x, const Vec& y) const {
        check_velocity(y);
        if (use_cb(m_->spray_dyx)) return m_->spray_dyx(x, y);
        return diff_mat_surface([this](const Vec& xx, const Vec& yy) { return best_N(xx, yy); },
                                x, y, /*wrt_x=*/true, best_N_exact());
    }

    /// dL^i_jk/dy^l
    QuadField berwald_dy(const Vec& x, const Vec& y) const {
        check_velocity(y);
        if (use_cb(m_->spray_dyyy)) return m_->spray_dyyy(x, y);
        return diff_cube_surface([this](const Vec& xx, const Vec& yy) { return best_berwald(xx, yy); },
                                 x, y, /*wrt_x=*/false, best_berwald_exact());
    }

    /// dL^i_jk/dx^l
    QuadField berwald_dx(const Vec& x, const Vec& y) const {
        check_velocity(y);
        if (use_cb(m_->spray_dyyx)) return m_->spray_dyyx(x, y);
        return diff_cube_surface([this](const Vec& xx, const Vec& yy) { return best_berwald(xx, yy); },
                                 x, y, /*wrt_x=*/true, best_berwald_exact());
    }

private:
    bool use_cb(const auto& cb) const { return cb && !d_.forced_fd(); }

    // Differencing bases: callback when present (independent of mode), else
    // the assembled/FD surface one level down.
    Vec best_spray(const Vec& x, const Vec& y) const {
        return m_->spray ? m_->spray(x, y) : assemble_spray(x, y);
    }
    bool best_spray_exact() const {
        return static_cast<bool>(m_->spray) ||
               (m_->d2L_dyy && m_->d2L_dyx && m_->dL_dx);
    }

    SquareField best_N(const Vec& x, const Vec& y) const {
        if (m_->spray_dy) return m_->spray_dy(x, y);
        return diff_vec_surface([this](const Vec& xx, const Vec& yy) { return best_spray(xx, yy); },
                                x, y, false, best_spray_exact());
    }
    bool best_N_exact() const { return static_cast<bool>(m_->spray_dy); }

    CubeField best_berwald(const Vec& x, const Vec& y) const {
        if (m_->spray_dyy) return m_->spray_dyy(x, y);
        return raw_berwald_from_N(x, y);
    }
    bool best_berwald_exact() const { return static_cast<bool>(m_->spray_dyy); }

    CubeField raw_berwald(const Vec& x, const Vec& y) const {
        if (use_cb(m_->spray_dyy)) return m_->spray_dyy(x, y);
        return raw_berwald_from_N(x, y);
    }

    CubeField raw_berwald_from_N(const Vec& x, const Vec& y) const {
        const int nn = n();
        CubeField L(nn);
        const bool exact = best_N_exact();
        for (int k = 0; k < nn; ++k) {
            const double h = exact ? d_.step(1, y[k]) : d_.noisy_step(1, y[k]);
            SquareField dN = fd::central1(
                [&](const Vec& yy) { return best_N(x, yy); }, y, k, h);
            for (int i = 0; i < nn; ++i)
                for (int j = 0; j < nn; ++j) L(i, j, k) = dN(i, j);
        }
        return L;
    }

    Vec assemble_spray(const Vec& x, const Vec& y) const {
        check_velocity(y);
        const int nn = n();
        SquareField g = best_metric(x, y);
        SquareField ginv = invert_metric(g);
        const SquareField lyx = m_->d2L_dyx ? m_->d2L_dyx(x, y) : l_hessian_yx(x, y);
        const Vec lx = m_->dL_dx ? m_->dL_dx(x, y) : l_gradient(x, y, true);
        Vec G(nn, 0.0);
        for (int i = 0; i < nn; ++i) {
            double s = 0.0;
            for (int k = 0; k < nn; ++k) {
                double ak = -lx[k];
                for (int j = 0; j < nn; ++j) ak += lyx(k, j) * y[j];
                s += ginv(i, k) * ak;
            }
            G[i] = 0.25 * s;
        }
        return G;
    }

    SquareField best_metric(const Vec& x, const Vec& y) const {
        SquareField g = m_->d2L_dyy ? m_->d2L_dyy(x, y) : l_hessian_yy(x, y);
        for (double& v : g.a) v *= 0.5;
        g.symmetrize();
        return g;
    }

    // joint coordinate vector q = (x | y) for Lagrangian stencils
    double l_at(const Vec& q) const {
        const int nn = n();
        Vec x(q.begin(), q.begin() + nn), y(q.begin() + nn, q.end());
        return m_->lagrangian(x, y);
    }

    Vec l_gradient(const Vec& x, const Vec& y, bool wrt_x) const {
        const int nn = n();
        Vec q(x);
        q.insert(q.end(), y.begin(), y.end());
        auto f = [this](const Vec& qq) { return l_at(qq); };
        Vec r(nn);
        for (int i = 0; i < nn; ++i) {
            const int idx = wrt_x ? i : nn + i;
            r[i] = fd::central1_scalar(f, q, idx, d_.step(1, q[idx]));
        }
        return r;
    }

    SquareField l_hessian_yy(const Vec& x, const Vec& y) const {
        const int nn = n();
        Vec q(x);
        q.insert(q.end(), y.begin(), y.end());
        auto f = [this](const Vec& qq) { return l_at(qq); };
        SquareField h(nn);
        for (int i = 0; i < nn; ++i)
            for (int j = i; j < nn; ++j) {
                h(i, j) = fd::central2(f, q, nn + i, nn + j, d_.step(2, q[nn + i]),
                                       d_.step(2, q[nn + j]));
                h(j, i) = h(i, j);
            }
        return h;
    }

    SquareField l_hessian_yx(const Vec& x, const Vec& y) const {
        const int nn = n();
        Vec q(x);
        q.insert(q.end(), y.begin(), y.end());
        auto f = [this](const Vec& qq) { return l_at(qq); };
        SquareField h(nn);
        for (int s = 0; s < nn; ++s)
            for (int j = 0; j < nn; ++j)
                h(s, j) = fd::central2(f, q, nn + s, j, d_.step(2, q[nn + s]), d_.step(2, q[j]));
        return h;
    }

    /// d(surface^i)/d(x or y)^j for a Vec-valued surface.
    template <class S>
    SquareField diff_vec_surface(S&& surf, const Vec& x, const Vec& y, bool wrt_x,
                                 bool exact) const {
        const int nn = n();
        SquareField r(nn);
        const Vec& base = wrt_x ? x : y;
        for (int j = 0; j < nn; ++j) {
            const double h = exact ? d_.step(1, base[j]) : d_.noisy_step(1, base[j]);
            Vec dv = wrt_x
                         ? fd::central1([&](const Vec& xx) { return surf(xx, y); }, x, j, h)
                         : fd::central1([&](const Vec& yy) { return surf(x, yy); }, y, j, h);
            for (int i = 0; i < nn; ++i) r(i, j) = dv[i];
        }
        return r;
    }

    /// d(surface^i_j)/d(x or y)^k for a SquareField-valued surface.
    template <class S>
    CubeField diff_mat_surface(S&& surf, const Vec& x, const Vec& y, bool wrt_x,
                               bool exact) const {
        const int nn = n();
        CubeField r(nn);
        const Vec& base = wrt_x ? x : y;
        for (int k = 0; k < nn; ++k) {
            const double h = exact ? d_.step(1, base[k]) : d_.noisy_step(1, base[k]);
            SquareField dm = wrt_x
                                 ? fd::central1([&](const Vec& xx) { return surf(xx, y); }, x, k, h)
                                 : fd::central1([&](const Vec& yy) { return surf(x, yy); }, y, k, h);
            for (int i = 0; i < nn; ++i)
                for (int j = 0; j < nn; ++j) r(i, j, k) = dm(i, j);
        }
        return r;
    }

    /// d(surface^i_jk)/d(x or y)^l for a CubeField-valued surface.
    template <class S>
    QuadField diff_cube_surface(S&& surf, const Vec& x, const Vec& y, bool wrt_x,
                                bool exact) const {
        const int nn = n();
        QuadField r(nn);
        const Vec& base = wrt_x ? x : y;
        for (int l = 0; l < nn; ++l) {
            const double h = exact ? d_.step(1, base[l]) : d_.noisy_step(1, base[l]);
            CubeField dc = wrt_x
                               ? fd::central1([&](const Vec& xx) { return surf(xx, y); }, x, l, h)
                               : fd::central1([&](const Vec& yy) { return surf(x, yy); }, y, l, h);
            for (int i = 0; i < nn; ++i)
                for (int j = 0; j < nn; ++j)
                    for (int k = 0; k < nn; ++k) r(i, j, k, l) = dc(i, j, k);
        }
        return r;
    }

    const GeometryModel* m_;
    DiffStrategy d_;
};

/// g_ij = (1/2) d2L/dy^i dy^j at s (spec op surface).
inline SquareField metric_tensor(const GeometryModel& m, const FirstOrderState& s,
                                 const DiffStrategy& d = {}, double* pre_sym_asym = nullptr) {
    return GeometryEngine(m, d).metric(s, pre_sym_asym);
}

}  // namespace osc2
