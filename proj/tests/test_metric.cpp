#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "osc2/derivatives.hpp"
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
}  // namespace

TEST_CASE("euclidean metric is the identity") {
    const auto m = presets::euclidean(3);
    const FirstOrderState s{{0.2, -1.0, 4.0}, {1.0, 2.0, -0.5}};
    const SquareField g = metric_tensor(m, s);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK_THAT(g(i, j), WithinAbs(i == j ? 1.0 : 0.0, 1e-14));
}

TEST_CASE("sphere metric at theta = pi/4 is diag(1, 1/2)") {
    const auto m = presets::sphere();
    const FirstOrderState s{{kPi / 4, 0.0}, {0.3, 1.0}};
    const SquareField g = metric_tensor(m, s);
    CHECK_THAT(g(0, 0), WithinAbs(1.0, 1e-12));
    CHECK_THAT(g(1, 1), WithinAbs(0.5, 1e-12));
    CHECK_THAT(g(0, 1), WithinAbs(0.0, 1e-12));

    const SquareField gf = metric_tensor(m, s, fd_mode());
    CHECK_THAT(gf(0, 0), WithinAbs(1.0, 1e-5));
    CHECK_THAT(gf(1, 1), WithinAbs(0.5, 1e-5));
}

TEST_CASE("randers metric matches the symbolic oracle") {
    // frozen from an independent sympy derivation of g = (1/2) d2L/dy dy for
    // L = (|y| + b.y)^2, b = (0.3, 0.1), at y = (0.8, -0.5)
    const auto m = presets::randers(2, {0.3, 0.1});
    const FirstOrderState s{{0.0, 0.0}, {0.8, -0.5}};

    const double g00 = 1.6553719029651900;
    const double g01 = 0.046316821298974305;
    const double g11 = 1.0488268886384352;

    SECTION("analytic callbacks") {
        const SquareField g = metric_tensor(m, s);
        CHECK_THAT(g(0, 0), WithinAbs(g00, 1e-12));
        CHECK_THAT(g(0, 1), WithinAbs(g01, 1e-12));
        CHECK_THAT(g(1, 0), WithinAbs(g01, 1e-12));
        CHECK_THAT(g(1, 1), WithinAbs(g11, 1e-12));
        CHECK_THAT(m.lagrangian(s.x, s.y), WithinAbs(1.2845912830181509, 1e-14));
        const Vec ly = m.dL_dy(s.x, s.y);
        CHECK_THAT(ly[0], WithinAbs(2.6022782234453297, 1e-13));
        CHECK_THAT(ly[1], WithinAbs(-0.97471997456007632, 1e-13));
    }
    SECTION("forced finite differences") {
        const SquareField g = metric_tensor(m, s, fd_mode());
        CHECK_THAT(g(0, 0), WithinAbs(g00, 1e-5));
        CHECK_THAT(g(0, 1), WithinAbs(g01, 1e-5));
        CHECK_THAT(g(1, 1), WithinAbs(g11, 1e-5));
    }
}

TEST_CASE("metric of a 2-homogeneous Lagrangian is 0-homogeneous in y") {
    std::mt19937_64 rng(11);
    for (const auto& m : {presets::sphere(), presets::randers(2, {0.2, -0.4}),
                          presets::hyperbolic_half_plane()}) {
        auto box = m.name == "sphere" ? oracles::sphere_box()
                   : m.name == "hyperbolic_half_plane" ? oracles::hyperbolic_box()
                                                       : oracles::euclidean_box();
        for (int trial = 0; trial < 10; ++trial) {
            const FirstOrderState s = oracles::sample_state(box, rng);
            const SquareField g = metric_tensor(m, s);
            for (double lam : {0.5, 2.0, 10.0}) {
                const SquareField gl = metric_tensor(m, {s.x, vec_scale(lam, s.y)});
                for (std::size_t i = 0; i < g.a.size(); ++i)
                    CHECK_THAT(gl.a[i], WithinAbs(g.a[i], 1e-9 * (1.0 + g.max_abs())));
            }
        }
    }
}

TEST_CASE("singular-velocity guard") {
    const auto m = presets::randers(2, {0.3, 0.1});
    CHECK(m.y_min == 1e-8);
    CHECK_THROWS_AS(metric_tensor(m, {{0.0, 0.0}, {1e-9, 0.0}}), SingularVelocity);
    // smooth models have no cone
    CHECK_NOTHROW(metric_tensor(presets::euclidean(2), {{0.0, 0.0}, {0.0, 0.0}}));
}

TEST_CASE("FD metric of a quadratic Lagrangian carries round-off only") {
    const auto m = presets::euclidean(2);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        const FirstOrderState s{{u(rng), u(rng)}, {u(rng), u(rng)}};
        const SquareField g = metric_tensor(m, s, fd_mode());
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) CHECK_THAT(g(i, j), WithinAbs(i == j ? 1.0 : 0.0, 1e-4));
    }
}

TEST_CASE("pre-symmetrization asymmetry is tiny in FD mode") {
    const auto m = presets::randers(2, {0.3, 0.1});
    const FirstOrderState s{{0.0, 0.0}, {0.8, -0.5}};
    double asym = -1.0;
    const DiffStrategy d = fd_mode();
    (void)metric_tensor(m, s, d, &asym);
    CHECK(asym >= 0.0);
    CHECK(asym < 10.0 * d.h2 * d.h2);  // canonical stencil order makes it exactly 0
}

TEST_CASE("analytic vs FD metric cross-check") {
    const auto m = presets::hyperbolic_half_plane();
    std::mt19937_64 rng(5);
    auto box = oracles::hyperbolic_box();
    for (int trial = 0; trial < 10; ++trial) {
        const FirstOrderState s = oracles::sample_state(box, rng);
        const SquareField ga = metric_tensor(m, s);
        const SquareField gf = metric_tensor(m, s, fd_mode());
        for (std::size_t i = 0; i < ga.a.size(); ++i)
            CHECK_THAT(gf.a[i], WithinAbs(ga.a[i], 1e-5 * (1.0 + ga.max_abs())));
    }
}

TEST_CASE("randers with a non-euclidean base metric") {
    ModelSpec spec{ModelKind::randers, 2};
    spec.randers_b = {0.3, 0.0};
    SquareField a(2);
    a(0, 0) = 2.0;
    a(1, 1) = 1.0;
    spec.randers_a = a;
    const auto m = build_model(spec);
    // L = (sqrt(2 y1^2 + y2^2) + 0.3 y1)^2 at y = (1, 1)
    const double alpha = std::sqrt(3.0);
    CHECK_THAT(m.lagrangian({0.0, 0.0}, {1.0, 1.0}),
               WithinAbs((alpha + 0.3) * (alpha + 0.3), 1e-13));
    const SquareField g = metric_tensor(m, {{0.0, 0.0}, {1.0, 1.0}});
    CHECK(g.max_asymmetry() == 0.0);
    CHECK(g(0, 0) > 0.0);
    CHECK(g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0) > 0.0);
    // analytic metric agrees with the FD route
    const SquareField gf = metric_tensor(m, {{0.0, 0.0}, {1.0, 1.0}}, fd_mode());
    for (std::size_t i = 0; i < g.a.size(); ++i) CHECK_THAT(gf.a[i], WithinAbs(g.a[i], 1e-4));
}

TEST_CASE("randers positive definiteness across drift strengths") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double bnorm : {0.1, 0.5, 0.9}) {
        const auto m = presets::randers(2, {bnorm, 0.0});
        for (int trial = 0; trial < 50; ++trial) {
            Vec y{u(rng), u(rng)};
            if (norm2(y) < 0.2) continue;
            const FirstOrderState s{{0.0, 0.0}, y};
            CHECK(m.lagrangian(s.x, s.y) > 0.0);
            const SquareField g = metric_tensor(m, s);
            CHECK(g(0, 0) > 0.0);
            CHECK(g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0) > 0.0);
        }
    }
}
