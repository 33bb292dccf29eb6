#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "osc2/connections.hpp"
#include "osc2/models.hpp"

using namespace osc2;
using Catch::Matchers::WithinAbs;

namespace {
const double kPi = 3.14159265358979323846;

DiffStrategy fd_mode() {
    DiffStrategy d;
    d.mode = DiffMode::forced_finite_difference;
    return d;
}

void check_field(const SquareField& got, const SquareField& want, double tol) {
    REQUIRE(got.n == want.n);
    for (std::size_t i = 0; i < got.a.size(); ++i) CHECK_THAT(got.a[i], WithinAbs(want.a[i], tol));
}
}  // namespace

TEST_CASE("spray vanishes on flat space") {
    const auto m = presets::euclidean(2);
    const Vec G = spray_coefficients(m, {{0.4, -0.2}, {1.0, 2.0}});
    CHECK_THAT(G[0], WithinAbs(0.0, 1e-14));
    CHECK_THAT(G[1], WithinAbs(0.0, 1e-14));
}

TEST_CASE("sphere spray and connection at the frozen state") {
    const auto m = presets::sphere();
    const FirstOrderState s{{kPi / 4, 0.0}, {0.0, 1.0}};
    for (const DiffStrategy& d : {DiffStrategy{}, fd_mode()}) {
        const double tol = d.forced_fd() ? 1e-6 : 1e-13;
        const Vec G = spray_coefficients(m, s, d);
        CHECK_THAT(G[0], WithinAbs(-0.25, tol));
        CHECK_THAT(G[1], WithinAbs(0.0, tol));
        const SquareField N = nonlinear_connection(m, s, d);
        CHECK_THAT(N(0, 0), WithinAbs(0.0, tol));
        CHECK_THAT(N(0, 1), WithinAbs(-0.5, tol));
        CHECK_THAT(N(1, 0), WithinAbs(1.0, tol));
        CHECK_THAT(N(1, 1), WithinAbs(0.0, tol));
    }
}

TEST_CASE("flat_polar and hyperbolic frozen values") {
    {
        const auto m = presets::flat_polar();
        const FirstOrderState s{{1.5, 0.7}, {0.3, -0.4}};
        const Vec G = spray_coefficients(m, s);
        CHECK_THAT(G[0], WithinAbs(-0.12, 1e-13));
        CHECK_THAT(G[1], WithinAbs(-0.08, 1e-13));
        const SquareField N = nonlinear_connection(m, s);
        CHECK_THAT(N(0, 0), WithinAbs(0.0, 1e-13));
        CHECK_THAT(N(0, 1), WithinAbs(0.6, 1e-13));
        CHECK_THAT(N(1, 0), WithinAbs(-0.26666666666666667, 1e-13));
        CHECK_THAT(N(1, 1), WithinAbs(0.2, 1e-13));
    }
    {
        const auto m = presets::hyperbolic_half_plane();
        const FirstOrderState s{{0.3, 1.2}, {0.4, -0.2}};
        const Vec G = spray_coefficients(m, s);
        CHECK_THAT(G[0], WithinAbs(0.066666666666666667, 1e-13));
        CHECK_THAT(G[1], WithinAbs(0.05, 1e-13));
        const SquareField N = nonlinear_connection(m, s);
        CHECK_THAT(N(0, 0), WithinAbs(1.0 / 6, 1e-13));
        CHECK_THAT(N(0, 1), WithinAbs(-1.0 / 3, 1e-13));
        CHECK_THAT(N(1, 0), WithinAbs(1.0 / 3, 1e-13));
        CHECK_THAT(N(1, 1), WithinAbs(1.0 / 6, 1e-13));
    }
}

TEST_CASE("spray matches the brute-force Christoffel oracle at random states") {
    std::mt19937_64 rng(23);
    struct Case {
        GeometryModel m;
        oracles::StateBox box;
    };
    const Case cases[] = {{presets::sphere(), oracles::sphere_box()},
                          {presets::flat_polar(), oracles::polar_box()},
                          {presets::hyperbolic_half_plane(), oracles::hyperbolic_box()}};
    for (const auto& c : cases) {
        for (int trial = 0; trial < 50; ++trial) {
            const FirstOrderState s = oracles::sample_state(c.box, rng);
            const CubeField Gam = oracles::christoffel_bruteforce(c.m, s.x);
            const Vec G_or = oracles::spray_from_christoffel(Gam, s.y);
            const Vec G = spray_coefficients(c.m, s);
            for (int i = 0; i < 2; ++i) CHECK_THAT(G[i], WithinAbs(G_or[i], 1e-6));
        }
    }
}

TEST_CASE("berwald coefficients") {
    SECTION("flat vanishes") {
        CHECK(berwald_coefficients(presets::euclidean(2), {{0.0, 0.0}, {1.0, 1.0}}).max_abs() ==
              0.0);
    }
    SECTION("riemannian Berwald = Christoffel") {
        const auto m = presets::sphere();
        std::mt19937_64 rng(29);
        for (int trial = 0; trial < 10; ++trial) {
            const FirstOrderState s = oracles::sample_state(oracles::sphere_box(), rng);
            const CubeField Gam = oracles::christoffel_bruteforce(m, s.x);
            for (const DiffStrategy& d : {DiffStrategy{}, fd_mode()}) {
                const CubeField L = berwald_coefficients(m, s, d);
                for (std::size_t i = 0; i < L.a.size(); ++i)
                    CHECK_THAT(L.a[i], WithinAbs(Gam.a[i], 1e-5));
            }
        }
    }
    SECTION("locally Minkowski vanishes") {
        const auto m = presets::randers(2, {0.3, 0.1});
        const FirstOrderState s{{0.1, 0.2}, {0.8, -0.5}};
        CHECK(berwald_coefficients(m, s).max_abs() == 0.0);
        CHECK(berwald_coefficients(m, s, fd_mode()).max_abs() < 1e-5);
        CHECK(nonlinear_connection(m, s, fd_mode()).max_abs() < 1e-6);
    }
    SECTION("symmetry in the trailing pair") {
        const auto m = presets::hyperbolic_half_plane();
        double asym = -1.0;
        const CubeField L =
            berwald_coefficients(m, {{0.3, 1.2}, {0.4, -0.2}}, fd_mode(), &asym);
        CHECK(asym < 1e-5);
        CHECK(L.max_asymmetry_jk() == 0.0);
    }
}

TEST_CASE("delta0 derivative") {
    const auto m = presets::sphere();
    const FirstOrderState s{{kPi / 3, 0.4}, {0.2, 0.7}};
    const SquareField N = nonlinear_connection(m, s);
    SECTION("constant field gives zero") {
        auto f = [](const Vec&, const Vec&) { return 3.25; };
        const Vec d0 = delta0_derivative(f, s, N);
        CHECK_THAT(d0[0], WithinAbs(0.0, 1e-9));
        CHECK_THAT(d0[1], WithinAbs(0.0, 1e-9));
    }
    SECTION("N = 0 reduces to d/dx") {
        auto f = [](const Vec& x, const Vec& y) { return x[0] * x[0] + y[1]; };
        const Vec d0 = delta0_derivative(f, s, SquareField(2));
        CHECK_THAT(d0[0], WithinAbs(2.0 * s.x[0], 1e-8));
        CHECK_THAT(d0[1], WithinAbs(0.0, 1e-8));
    }
    SECTION("matrix-valued fields work componentwise") {
        auto f = [](const Vec& x, const Vec& y) {
            SquareField r(2);
            r(0, 0) = x[0] * y[0];
            r(1, 1) = x[1];
            return r;
        };
        const CubeField d0 = delta0_derivative(f, s, SquareField(2));
        CHECK_THAT(d0(0, 0, 0), WithinAbs(s.y[0], 1e-8));
        CHECK_THAT(d0(1, 1, 1), WithinAbs(1.0, 1e-8));
    }
    SECTION("applied to N it reproduces the curvature assembly") {
        GeometryEngine eng(m);
        auto n_field = [&](const Vec& x, const Vec& y) { return eng.nonlinear(x, y); };
        const CubeField d0N = delta0_derivative(n_field, s, N);
        // R^i_jk = delta0_k N^i_j - delta0_j N^i_k, derivative index last
        const CubeField R = curvature_R(m, s);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k)
                    CHECK_THAT(d0N(i, j, k) - d0N(i, k, j), WithinAbs(R(i, j, k), 1e-6));
    }
}

TEST_CASE("curvature R") {
    SECTION("flat chart and polar chart both vanish") {
        CHECK(curvature_R(presets::euclidean(2), {{0.1, 0.2}, {1.0, 0.5}}).max_abs() < 1e-14);
        const auto mp = presets::flat_polar();
        const FirstOrderState sp{{1.5, 0.7}, {0.3, -0.4}};
        CHECK(curvature_R(mp, sp).max_abs() < 1e-12);
        CHECK(curvature_R(mp, sp, fd_mode()).max_abs() < 1e-5);
    }
    SECTION("antisymmetry is exact by construction") {
        const auto m = presets::sphere();
        std::mt19937_64 rng(31);
        const FirstOrderState s = oracles::sample_state(oracles::sphere_box(), rng);
        const CubeField R = curvature_R(m, s, fd_mode());
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) CHECK(R(i, j, k) == -R(i, k, j));
    }
    SECTION("equatorial Jacobi operator has eigenvalue -1 orthogonal to y") {
        const auto m = presets::sphere();
        const FirstOrderState s{{kPi / 2, 0.0}, {0.0, 1.0}};
        const CubeField R = curvature_R(m, s);
        // operator C^i_j = R^i_jk y^k on the theta direction
        CHECK_THAT(R(0, 0, 1) * s.y[1], WithinAbs(-1.0, 1e-10));
        CHECK_THAT(R(1, 1, 1) * s.y[1], WithinAbs(0.0, 1e-10));
    }
    SECTION("constant-curvature closed form, K = +1 and K = -1") {
        std::mt19937_64 rng(37);
        struct Case {
            GeometryModel m;
            oracles::StateBox box;
            double K;
        };
        const Case cases[] = {{presets::sphere(), oracles::sphere_box(), 1.0},
                              {presets::hyperbolic_half_plane(), oracles::hyperbolic_box(), -1.0}};
        for (const auto& c : cases)
            for (int trial = 0; trial < 25; ++trial) {
                const FirstOrderState s = oracles::sample_state(c.box, rng);
                const SquareField g = metric_tensor(c.m, s);
                const CubeField want = oracles::constant_curvature_R(c.K, g, s.y);
                const CubeField R = curvature_R(c.m, s);
                for (std::size_t i = 0; i < R.a.size(); ++i)
                    CHECK_THAT(R.a[i], WithinAbs(want.a[i], 1e-9));
            }
    }
}

TEST_CASE("berwald curvatures and the contraction identity") {
    SECTION("flat: everything zero") {
        const auto cd = berwald_curvatures(presets::euclidean(2), {{0.0, 0.0}, {1.0, 2.0}});
        CHECK(cd.R_tor.max_abs() == 0.0);
        CHECK(cd.R_hh.max_abs() == 0.0);
        CHECK(cd.P_hv.max_abs() == 0.0);
        CHECK(cd.contraction_ok);
    }
    SECTION("locally Minkowski: everything zero") {
        const auto cd =
            berwald_curvatures(presets::randers(2, {0.3, 0.1}), {{0.0, 0.0}, {0.8, -0.5}});
        CHECK(cd.R_hh.max_abs() == 0.0);
        CHECK(cd.P_hv.max_abs() == 0.0);
    }
    SECTION("sphere: y^h R_h contracts to R, P_hv vanishes") {
        const auto m = presets::sphere();
        std::mt19937_64 rng(41);
        for (int trial = 0; trial < 50; ++trial) {
            const FirstOrderState s = oracles::sample_state(oracles::sphere_box(), rng);
            const auto cd = berwald_curvatures(m, s);
            CHECK(cd.contraction_residual < 1e-9);
            CHECK(cd.P_hv.max_abs() < 1e-12);
            const auto cdf = berwald_curvatures(m, s, fd_mode());
            CHECK(cdf.contraction_residual < 1e-4);
        }
    }
}

TEST_CASE("c operator") {
    SECTION("constant field gives zero") {
        auto f = [](const Vec&, const Vec&) {
            SquareField r(2);
            r(0, 1) = 4.0;
            return r;
        };
        const SquareField c = c_operator(f, {{0.1, 0.2}, {0.5, 0.6}, {0.2, 0.1}});
        CHECK(c.max_abs() < 1e-9);
    }
    SECTION("N of the flat model gives zero") {
        const auto m = presets::euclidean(2);
        GeometryEngine eng(m);
        auto f = [&](const Vec& x, const Vec& y) { return eng.nonlinear(x, y); };
        CHECK(c_operator(f, {{0.0, 0.0}, {1.0, 1.0}, {0.3, 0.4}}).max_abs() < 1e-10);
    }
    SECTION("linear-in-x field with y2 = 0 is the directional derivative") {
        auto f = [](const Vec& x, const Vec&) {
            SquareField r(2);
            r(0, 0) = 2.0 * x[0] + x[1];
            r(1, 0) = -x[1];
            return r;
        };
        const SecondOrderState s2{{0.4, -0.3}, {0.7, 0.2}, {0.0, 0.0}};
        const SquareField c = c_operator(f, s2);
        CHECK_THAT(c(0, 0), WithinAbs(2.0 * 0.7 + 0.2, 1e-8));
        CHECK_THAT(c(1, 0), WithinAbs(-0.2, 1e-8));
        CHECK_THAT(c(1, 1), WithinAbs(0.0, 1e-8));
    }
}

TEST_CASE("dual coefficients: locally Minkowski closed forms") {
    SECTION("drag on the flat Minkowski norm") {
        const auto m = presets::minkowski_norm(2);
        const auto F = build_force({ForceKind::linear_drag, 2, 1.0});
        const SecondOrderState s2{{0.3, -0.1}, {0.8, 0.4}, {-0.4, -0.2}};
        const auto dc = our_dual_coefficients(m, F, s2);
        CHECK(dc.provenance == Provenance::ours);
        check_field(dc.M1, [] {
            SquareField w(2);
            w(0, 0) = w(1, 1) = 0.5;
            return w;
        }(), 1e-12);
        CHECK(dc.M2.max_abs() < 1e-12);
    }
    SECTION("position spring: M2 = K/2") {
        SquareField K(2);
        K(0, 0) = 2.0; K(0, 1) = 0.3; K(1, 0) = 0.3; K(1, 1) = 1.0;
        ForceSpec fs;
        fs.kind = ForceKind::position_spring;
        fs.spring_K = K;
        const auto F = build_force(fs);
        const auto m = presets::randers(2, {0.3, 0.1});  // also locally Minkowski
        const SecondOrderState s2{{0.3, -0.1}, {0.8, -0.5}, {0.1, 0.0}};
        const auto dc = our_dual_coefficients(m, F, s2);
        CHECK(dc.M1.max_abs() < 1e-12);
        SquareField want(K);
        for (double& v : want.a) v *= 0.5;
        check_field(dc.M2, want, 1e-12);
    }
    SECTION("flat with no force: all zero") {
        const auto dc = our_dual_coefficients(presets::euclidean(2), zero_force(2),
                                              {{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}});
        CHECK(dc.M1.max_abs() == 0.0);
        CHECK(dc.M2.max_abs() == 0.0);
    }
}

TEST_CASE("dual coefficients: frozen sphere values") {
    const auto m = presets::sphere();
    const auto F0 = zero_force(2);
    SECTION("generic state theta = pi/4, y = (0.3, 0.9)") {
        const FirstOrderState s{{kPi / 4, 0.0}, {0.3, 0.9}};
        const auto s2 = on_extension_state(m, F0, s);
        // frozen: G = (-0.2025, 0.27)
        CHECK_THAT(s2.y2[0], WithinAbs(0.2025, 1e-12));
        CHECK_THAT(s2.y2[1], WithinAbs(-0.27, 1e-12));
        const auto dc = our_dual_coefficients(m, F0, s2);
        CHECK_THAT(dc.M1(0, 1), WithinAbs(-0.45, 1e-12));
        CHECK_THAT(dc.M1(1, 0), WithinAbs(0.9, 1e-12));
        CHECK_THAT(dc.M2(0, 0), WithinAbs(0.0, 1e-10));
        CHECK_THAT(dc.M2(0, 1), WithinAbs(0.0, 1e-10));
        CHECK_THAT(dc.M2(1, 0), WithinAbs(-0.54, 1e-10));
        CHECK_THAT(dc.M2(1, 1), WithinAbs(0.0, 1e-10));
    }
    SECTION("equatorial unit state: M2 = diag(1/2, 0)") {
        const auto s2 = on_extension_state(m, F0, {{kPi / 2, 0.0}, {0.0, 1.0}});
        const auto dc = our_dual_coefficients(m, F0, s2);
        CHECK_THAT(dc.M2(0, 0), WithinAbs(0.5, 1e-10));
        CHECK_THAT(dc.M2(1, 1), WithinAbs(0.0, 1e-10));
        CHECK_THAT(dc.M2(0, 1), WithinAbs(0.0, 1e-10));
        CHECK_THAT(dc.M2(1, 0), WithinAbs(0.0, 1e-10));
        CHECK(dc.M1.max_abs() < 1e-12);
    }
}

TEST_CASE("dual coefficients reproduce the variational coefficients on-extension") {
    // 2 M1 = 2N - dF/dy and 2 M2 = 2 dG/dx - dF/dx when y2 = -G + F/2: the
    // sharpest check of term placement and of the sign of the L.F term.
    std::mt19937_64 rng(43);
    struct Case {
        GeometryModel m;
        oracles::StateBox box;
    };
    const Case cases[] = {{presets::sphere(), oracles::sphere_box()},
                          {presets::flat_polar(), oracles::polar_box()},
                          {presets::hyperbolic_half_plane(), oracles::hyperbolic_box()}};
    ForceSpec spring;
    spring.kind = ForceKind::position_spring;
    {
        SquareField K(2);
        K(0, 0) = 1.5; K(0, 1) = -0.2; K(1, 0) = -0.2; K(1, 1) = 0.8;
        spring.spring_K = K;
    }
    const ForceField forces[] = {zero_force(2), build_force({ForceKind::linear_drag, 2, 1.0}),
                                 build_force(spring)};
    for (const auto& c : cases)
        for (const auto& F : forces)
            for (int trial = 0; trial < 20; ++trial) {
                const FirstOrderState s = oracles::sample_state(c.box, rng);
                const auto vc = oracles::variational_coeffs(c.m, F, s.x, s.y);
                const auto dc = our_dual_coefficients(c.m, F, on_extension_state(c.m, F, s));
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        CHECK_THAT(2.0 * dc.M1(i, j), WithinAbs(vc.A(i, j), 1e-10));
                        CHECK_THAT(2.0 * dc.M2(i, j), WithinAbs(vc.B(i, j), 1e-9));
                    }
            }
}

TEST_CASE("miron comparison") {
    SECTION("flat gives (0, 0)") {
        const auto dc = miron_dual_coefficients(presets::euclidean(2),
                                                {{0.0, 0.0}, {1.0, 0.5}, {0.1, 0.2}});
        CHECK(dc.provenance == Provenance::miron);
        CHECK(dc.M1.max_abs() == 0.0);
        CHECK(dc.M2.max_abs() == 0.0);
    }
    SECTION("difference is exactly -(1/2) y^k R^i_jk") {
        std::mt19937_64 rng(47);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (const auto& which : {0, 1}) {
            const auto m = which == 0 ? presets::sphere() : presets::hyperbolic_half_plane();
            const auto box = which == 0 ? oracles::sphere_box() : oracles::hyperbolic_box();
            for (int trial = 0; trial < 50; ++trial) {
                const FirstOrderState s = oracles::sample_state(box, rng);
                const SecondOrderState s2{s.x, s.y, {u(rng), u(rng)}};
                const auto ours = our_dual_coefficients(m, zero_force(2), s2);
                const auto miron = miron_dual_coefficients(m, s2);
                const CubeField R = curvature_R(m, s);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) {
                        double yr = 0.0;
                        for (int k = 0; k < 2; ++k) yr += s.y[k] * R(i, j, k);
                        CHECK_THAT(ours.M2(i, j) - miron.M2(i, j) + 0.5 * yr, WithinAbs(0.0, 1e-5));
                    }
                CHECK(ours.M1.a == miron.M1.a);  // F = 0
            }
        }
    }
    SECTION("locally Minkowski: (0, 0)") {
        const auto dc = miron_dual_coefficients(presets::randers(2, {0.3, 0.1}),
                                                {{0.0, 0.0}, {0.8, -0.5}, {0.0, 0.1}});
        CHECK(dc.M1.max_abs() == 0.0);
        CHECK(dc.M2.max_abs() == 0.0);
    }
}

TEST_CASE("pde-supplied coefficients") {
    SquareField a(2), b(2);
    CHECK(from_pde_coefficients(a, b).M1.max_abs() == 0.0);
    a = SquareField::identity(2);
    for (double& v : a.a) v *= 2.0;
    const auto dc = from_pde_coefficients(a, b);
    CHECK(dc.provenance == Provenance::pde_supplied);
    check_field(dc.M1, SquareField::identity(2), 1e-15);
    CHECK(dc.M2.max_abs() == 0.0);

    // round-trip through 2*(M1, M2) of the sphere connection
    const auto m = presets::sphere();
    const auto ours = our_dual_coefficients(m, zero_force(2),
                                            on_extension_state(m, zero_force(2),
                                                               {{kPi / 3, 0.1}, {0.4, 0.8}}));
    SquareField a2(ours.M1), b2(ours.M2);
    for (double& v : a2.a) v *= 2.0;
    for (double& v : b2.a) v *= 2.0;
    const auto rt = from_pde_coefficients(a2, b2, ours.evaluated_at);
    CHECK(rt.M1.a == ours.M1.a);
    CHECK(rt.M2.a == ours.M2.a);

    SquareField bad(3);
    CHECK_THROWS_AS(from_pde_coefficients(a, bad), DimensionMismatch);
}

TEST_CASE("adapted components") {
    SECTION("zero coefficients return inputs unchanged") {
        DualCoefficients mc;
        mc.M1 = SquareField(2);
        mc.M2 = SquareField(2);
        const auto blocks = adapted_components({1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}, mc);
        CHECK(blocks[0] == Vec{1.0, 2.0});
        CHECK(blocks[1] == Vec{3.0, 4.0});
        CHECK(blocks[2] == Vec{5.0, 6.0});
    }
    SECTION("dimension mismatch throws") {
        DualCoefficients mc;
        mc.M1 = SquareField(2);
        mc.M2 = SquareField(2);
        CHECK_THROWS_AS(adapted_components({1.0}, {1.0, 2.0}, {1.0, 2.0}, mc), DimensionMismatch);
    }
}

TEST_CASE("euler identity and connection pack invariants") {
    std::mt19937_64 rng(53);
    const auto m = presets::sphere();
    for (int trial = 0; trial < 100; ++trial) {
        const FirstOrderState s = oracles::sample_state(oracles::sphere_box(), rng);
        const auto pack = connection_pack(m, s);
        double res = 0.0;
        for (int i = 0; i < 2; ++i) {
            double ny = 0.0;
            for (int j = 0; j < 2; ++j) ny += pack.N(i, j) * s.y[j];
            res = std::max(res, std::abs(2.0 * pack.G[i] - ny));
        }
        CHECK(res <= 1e-7 * (1.0 + norm_inf(pack.G)));
        CHECK(pack.L.max_asymmetry_jk() == 0.0);
    }
    // FD route
    for (int trial = 0; trial < 20; ++trial) {
        const FirstOrderState s = oracles::sample_state(oracles::sphere_box(), rng);
        const Vec G = spray_coefficients(m, s, fd_mode());
        const SquareField N = nonlinear_connection(m, s, fd_mode());
        for (int i = 0; i < 2; ++i) {
            double ny = 0.0;
            for (int j = 0; j < 2; ++j) ny += N(i, j) * s.y[j];
            CHECK_THAT(2.0 * G[i] - ny, WithinAbs(0.0, 1e-4));
        }
    }
}

TEST_CASE("spray homogeneity") {
    const auto m = presets::hyperbolic_half_plane();
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 20; ++trial) {
        const FirstOrderState s = oracles::sample_state(oracles::hyperbolic_box(), rng);
        const Vec G = spray_coefficients(m, s);
        for (double lam : {0.5, 2.0}) {
            const Vec Gl = spray_coefficients(m, {s.x, vec_scale(lam, s.y)});
            for (int i = 0; i < 2; ++i)
                CHECK_THAT(Gl[i], WithinAbs(lam * lam * G[i], 1e-10 * (1.0 + std::abs(G[i]))));
        }
    }
}
