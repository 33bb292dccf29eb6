#pragma once

#include <functional>
#include <string>
#include <utility>

#include "osc2/core.hpp"

namespace osc2 {

/// A geometry is defined by its Lagrangian L(x, y). Analytic derivative
/// callbacks are optional; anything missing is filled by central differences
/// (see GeometryEngine). The spray family follows the layout
///   spray      G^i
///   spray_dy   N^i_j       = dG^i/dy^j
///   spray_dx   dG^i/dx^j
///   spray_dyy  L^i_jk      = dN^i_j/dy^k
///   spray_dyx  dN^i_j/dx^k
///   spray_dyyy dL^i_jk/dy^l
///   spray_dyyx dL^i_jk/dx^l
struct GeometryModel {
    int n = 0;
    bool is_spray_homogeneous = false;
    double y_min = 0.0;  ///< singular-cone radius; 0 when L is smooth at y = 0
    std::string name;

    std::function<double(const Vec&, const Vec&)> lagrangian;

    std::function<Vec(const Vec&, const Vec&)> dL_dx;
    std::function<Vec(const Vec&, const Vec&)> dL_dy;
    std::function<SquareField(const Vec&, const Vec&)> d2L_dyy;
    std::function<SquareField(const Vec&, const Vec&)> d2L_dyx;  ///< (s, j) = d2L/dy^s dx^j

    std::function<Vec(const Vec&, const Vec&)> spray;
    std::function<SquareField(const Vec&, const Vec&)> spray_dy;
    std::function<SquareField(const Vec&, const Vec&)> spray_dx;
    std::function<CubeField(const Vec&, const Vec&)> spray_dyy;
    std::function<CubeField(const Vec&, const Vec&)> spray_dyx;
    std::function<QuadField(const Vec&, const Vec&)> spray_dyyy;
    std::function<QuadField(const Vec&, const Vec&)> spray_dyyx;

    /// Chart guard; integration aborts with DomainExit outside it.
    std::function<bool(const Vec&)> domain_ok;

    bool in_domain(const Vec& x) const { return !domain_ok || domain_ok(x); }
};

/// External force field F^i(x, y), a d-vector along the base manifold.
struct ForceField {
    int n = 0;
    std::string name;
    std::function<Vec(const Vec&, const Vec&)> force;
    std::function<SquareField(const Vec&, const Vec&)> dF_dx;
    std::function<SquareField(const Vec&, const Vec&)> dF_dy;

    bool is_zero() const { return !force; }
};

inline ForceField zero_force(int n) {
    ForceField f;
    f.n = n;
    f.name = "zero";
    return f;
}

}  // namespace osc2
