#include <catch2/catch_amalgamated.hpp>

#include "osc2/verify.hpp"

using namespace osc2;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("suite filters select subsets") {
    verify::Options opt;
    opt.suite = "homogeneity";
    const auto rep = verify::run_verify(opt);
    REQUIRE(rep.checks.size() == 1);
    CHECK(rep.checks[0].name == "metric_homogeneity");
    CHECK(rep.checks[0].pass);

    opt.suite = "no_such_suite";
    CHECK_THROWS_WITH(verify::run_verify(opt), ContainsSubstring("unknown verify suite"));
}

TEST_CASE("corrupted tolerances force an overall failure") {
    verify::Options opt;
    opt.suite = "homogeneity";
    opt.tolerance_scale = 1e-12;
    const auto rep = verify::run_verify(opt);
    CHECK_FALSE(rep.overall_pass);
    for (const auto& c : rep.checks) CHECK_FALSE(c.pass);
}

TEST_CASE("reports are deterministic for a fixed seed and sorted by name") {
    verify::Options opt;
    opt.suite = "dual";
    const auto r1 = verify::run_verify(opt);
    const auto r2 = verify::run_verify(opt);
    REQUIRE(r1.checks.size() == r2.checks.size());
    for (std::size_t i = 0; i < r1.checks.size(); ++i) {
        CHECK(r1.checks[i].name == r2.checks[i].name);
        CHECK(r1.checks[i].sup_residual == r2.checks[i].sup_residual);
    }
    const auto j = verify::report_to_json(r1);
    CHECK(j["overall_pass"] == r1.overall_pass);
    CHECK(j["checks"].size() == r1.checks.size());

    // different seed still passes but may move the measured residuals
    verify::Options opt2;
    opt2.suite = "dual";
    opt2.seed = 7;
    const auto r3 = verify::run_verify(opt2);
    CHECK(r3.overall_pass);
}

TEST_CASE("overall pass iff every record passes") {
    verify::Report rep;
    rep.checks.push_back({"a", "s", "m", 0.0, 1.0, true});
    rep.checks.push_back({"b", "s", "m", 2.0, 1.0, false});
    rep.overall_pass = true;
    for (const auto& c : rep.checks) rep.overall_pass = rep.overall_pass && c.pass;
    CHECK_FALSE(rep.overall_pass);
}

TEST_CASE("supporting invariant checks pass on the shipped zoo") {
    // the acceptance suite itself runs in the dedicated binary; here we cover
    // the cheap supporting suites
    for (const char* suite : {"minkowski", "transport", "remark", "models", "randers", "chart"}) {
        verify::Options opt;
        opt.suite = suite;
        const auto rep = verify::run_verify(opt);
        INFO("suite " << suite);
        for (const auto& c : rep.checks) {
            INFO(c.name << ": residual " << c.sup_residual << " tol " << c.tolerance << " note "
                        << c.note);
            CHECK(c.pass);
        }
    }
}
