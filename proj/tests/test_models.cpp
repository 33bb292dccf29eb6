#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "osc2/connections.hpp"
#include "osc2/dynamics.hpp"
#include "osc2/models.hpp"

using namespace osc2;
using Catch::Matchers::WithinAbs;

TEST_CASE("build_model rejects invalid specs with the violated constraint named") {
    ModelSpec bad{ModelKind::randers, 2};
    bad.randers_b = {0.8, 0.8};  // |b| > 1
    CHECK_THROWS_WITH(build_model(bad), Catch::Matchers::ContainsSubstring("|b|_a < 1"));

    ModelSpec sph{ModelKind::sphere, 3};
    CHECK_THROWS_AS(build_model(sph), InvalidSpec);
    sph.n = 2;
    sph.radius = -1.0;
    CHECK_THROWS_WITH(build_model(sph), Catch::Matchers::ContainsSubstring("radius"));

    ModelSpec cb{ModelKind::riemannian_callback, 2};
    CHECK_THROWS_WITH(build_model(cb), Catch::Matchers::ContainsSubstring("metric callback"));

    ModelSpec rb{ModelKind::randers, 3};
    rb.randers_b = {0.1, 0.1};  // size 2 != n
    CHECK_THROWS_AS(build_model(rb), InvalidSpec);
}

TEST_CASE("build_model presets") {
    CHECK(build_model({ModelKind::euclidean, 3}).n == 3);
    CHECK(build_model({ModelKind::sphere, 2}).name == "sphere");
    CHECK(build_model({ModelKind::minkowski_norm, 2}).is_spray_homogeneous);
    const auto randers = build_model({ModelKind::randers, 2});
    CHECK(randers.y_min == 1e-8);
    const auto sphere = build_model({ModelKind::sphere, 2});
    CHECK(sphere.domain_ok);
    CHECK_FALSE(sphere.in_domain({0.01, 0.0}));
    CHECK(sphere.in_domain({1.0, 0.0}));
}

TEST_CASE("sphere lagrangian scales with the radius") {
    ModelSpec spec{ModelKind::sphere, 2};
    spec.radius = 2.0;
    const auto m = build_model(spec);
    const double pi4 = 3.14159265358979323846 / 4.0;
    // L = r^2 (y_th^2 + sin^2 th y_ph^2)
    CHECK_THAT(m.lagrangian({pi4, 0.0}, {1.0, 1.0}), WithinAbs(4.0 * 1.5, 1e-12));
}

TEST_CASE("build_force presets carry analytic derivative blocks") {
    SECTION("zero") {
        const auto F = build_force({ForceKind::zero, 2});
        CHECK(F.is_zero());
    }
    SECTION("linear drag") {
        const auto F = build_force({ForceKind::linear_drag, 2, 1.5});
        const Vec f = F.force({0.0, 0.0}, {2.0, -1.0});
        CHECK_THAT(f[0], WithinAbs(-3.0, 1e-15));
        CHECK_THAT(f[1], WithinAbs(1.5, 1e-15));
        CHECK_THAT(F.dF_dy({0, 0}, {1, 1})(0, 0), WithinAbs(-1.5, 1e-15));
        CHECK(F.dF_dx({0, 0}, {1, 1}).max_abs() == 0.0);
        CHECK_THROWS_AS(build_force({ForceKind::linear_drag, 2, -1.0}), InvalidSpec);
    }
    SECTION("position spring") {
        ForceSpec fs;
        fs.kind = ForceKind::position_spring;
        SquareField K(2);
        K(0, 0) = 2.0; K(0, 1) = 0.5; K(1, 0) = 0.5; K(1, 1) = 1.0;
        fs.spring_K = K;
        const auto F = build_force(fs);
        const Vec f = F.force({1.0, -1.0}, {0.0, 0.0});
        CHECK_THAT(f[0], WithinAbs(-1.5, 1e-15));
        CHECK_THAT(f[1], WithinAbs(0.5, 1e-15));
        CHECK_THAT(F.dF_dx({0, 0}, {0, 0})(0, 1), WithinAbs(-0.5, 1e-15));
    }
    SECTION("callback requires the callback") {
        CHECK_THROWS_AS(build_force({ForceKind::callback, 2}), InvalidSpec);
    }
}

TEST_CASE("riemannian_callback agrees with the hand-coded sphere") {
    const auto hand = presets::sphere();
    const auto cb = presets::riemannian_callback(2, [](const Vec& x) {
        SquareField g(2);
        g(0, 0) = 1.0;
        g(1, 1) = std::sin(x[0]) * std::sin(x[0]);
        return g;
    });
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const FirstOrderState s = oracles::sample_state(oracles::sphere_box(), rng);
        const Vec Gh = spray_coefficients(hand, s);
        const Vec Gc = spray_coefficients(cb, s);
        CHECK_THAT(Gc[0], WithinAbs(Gh[0], 1e-7));
        CHECK_THAT(Gc[1], WithinAbs(Gh[1], 1e-7));
        const SquareField Nh = nonlinear_connection(hand, s);
        const SquareField Nc = nonlinear_connection(cb, s);
        for (std::size_t i = 0; i < Nh.a.size(); ++i) CHECK_THAT(Nc.a[i], WithinAbs(Nh.a[i], 1e-6));
        const CubeField Rh = curvature_R(hand, s);
        const CubeField Rc = curvature_R(cb, s);
        for (std::size_t i = 0; i < Rh.a.size(); ++i) CHECK_THAT(Rc.a[i], WithinAbs(Rh.a[i], 1e-4));
    }
}

TEST_CASE("flat_polar geodesics are straight lines in the cartesian image") {
    const auto m = presets::flat_polar();
    const ChartMap p2c = polar_to_cartesian();
    const FirstOrderState sp{{1.2, 0.4}, {0.25, -0.3}};
    const Trajectory tp = integrate_trajectory(m, zero_force(2), sp, {1e-3, 1.0});
    const Vec p0 = p2c.forward(sp.x);
    const Vec v0 = push_vector(p2c, sp.x, sp.y);
    double worst = 0.0;
    for (std::size_t k = 0; k < tp.samples(); ++k)
        worst = std::max(worst, norm2(vec_sub(p2c.forward(tp.x[k]), vec_axpy(p0, tp.t[k], v0))));
    CHECK(worst < 1e-9);
}

TEST_CASE("chart maps invert each other") {
    const ChartMap p2c = polar_to_cartesian();
    const ChartMap c2p = cartesian_to_polar();
    const Vec xp{1.3, 0.8};
    const Vec back = c2p.forward(p2c.forward(xp));
    CHECK_THAT(back[0], WithinAbs(xp[0], 1e-14));
    CHECK_THAT(back[1], WithinAbs(xp[1], 1e-14));
    // jacobians compose to the identity
    const SquareField J1 = p2c.jacobian(xp);
    const SquareField J2 = c2p.jacobian(p2c.forward(xp));
    const SquareField prod = J2.times(J1);
    CHECK_THAT(prod(0, 0), WithinAbs(1.0, 1e-13));
    CHECK_THAT(prod(1, 1), WithinAbs(1.0, 1e-13));
    CHECK_THAT(prod(0, 1), WithinAbs(0.0, 1e-13));
}

TEST_CASE("drag force transforms as a d-vector across charts") {
    const auto F = build_force({ForceKind::linear_drag, 2, 1.0});
    const ChartMap c2p = cartesian_to_polar();
    const ChartMap p2c = polar_to_cartesian();
    const FirstOrderState sc{{1.0, 0.3}, {0.25, 0.55}};
    const FirstOrderState sp = push_state(c2p, sc);
    // pushforward of F(cartesian state) equals F evaluated in the polar chart
    const Vec Fc = F.force(sc.x, sc.y);
    const Vec Fp = F.force(sp.x, sp.y);
    const Vec Fc_pushed = push_vector(c2p, sc.x, Fc);
    CHECK_THAT(Fp[0], WithinAbs(Fc_pushed[0], 1e-13));
    CHECK_THAT(Fp[1], WithinAbs(Fc_pushed[1], 1e-13));
    // and the trajectories correspond under the chart map
    const Trajectory tc = integrate_trajectory(presets::euclidean(2), F, sc, {1e-3, 1.5});
    const Trajectory tp = integrate_trajectory(presets::flat_polar(), F, sp, {1e-3, 1.5});
    double worst = 0.0;
    for (std::size_t k = 0; k < tc.samples(); ++k)
        worst = std::max(worst, norm2(vec_sub(p2c.forward(tp.x[k]), tc.x[k])));
    CHECK(worst < 1e-9);
}

TEST_CASE("preset Euler identity across the zoo") {
    std::mt19937_64 rng(79);
    struct Case {
        GeometryModel m;
        oracles::StateBox box;
    };
    const Case cases[] = {{presets::sphere(), oracles::sphere_box()},
                          {presets::flat_polar(), oracles::polar_box()},
                          {presets::hyperbolic_half_plane(), oracles::hyperbolic_box()},
                          {presets::randers(2, {0.3, 0.1}),
                           {{-1, -1}, {1, 1}, {-1.2, -1.2}, {1.2, 1.2}, 0.3}},
                          {presets::euclidean(2), oracles::euclidean_box()}};
    for (const auto& c : cases) {
        REQUIRE(c.m.is_spray_homogeneous);
        for (int trial = 0; trial < 100; ++trial) {
            const FirstOrderState s = oracles::sample_state(c.box, rng);
            GeometryEngine eng(c.m);
            const Vec G = eng.spray(s.x, s.y);
            const SquareField N = eng.nonlinear(s.x, s.y);
            for (int i = 0; i < 2; ++i) {
                double ny = 0.0;
                for (int j = 0; j < 2; ++j) ny += N(i, j) * s.y[j];
                CHECK(std::abs(2.0 * G[i] - ny) <= 1e-7 * (1.0 + norm_inf(G)));
            }
        }
    }
}
