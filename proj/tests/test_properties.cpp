#include "doctest.h"
#include "shapelab/properties.hpp"

using namespace shapelab;

TEST_SUITE_BEGIN("properties");

TEST_CASE("monotone coupling holds on small runs") {
    ProcessSpec tmpl;
    tmpl.d = 1;
    tmpl.horizon = 10.0;
    tmpl.seed = MasterSeed{101};
    PropertyReport rep = check_monotone_coupling(tmpl, 10);
    CHECK(rep.passed());
    CHECK(rep.id == "monotone_coupling");
    // the report carries its sample size
    bool has_replicas = false;
    for (const auto& [k, v] : rep.evidence)
        if (k == "replicas" && v == "10") has_replicas = true;
    CHECK(has_replicas);
}

TEST_CASE("non-nested layer pairs are rejected") {
    ProcessSpec tmpl;
    tmpl.d = 1;
    tmpl.horizon = 2.0;
    tmpl.seed = MasterSeed{3};
    LayerPairGen bad = [](const InitialState& init) {
        LayerSpec a, b;
        a.initial_b = {0};
        b.initial_b = {init.ids.size() > 1 ? 1u : 0u};
        if (b.initial_b == a.initial_b) b.initial_b.clear();
        return std::make_pair(a, b);
    };
    CHECK_THROWS_AS(check_monotone_coupling(tmpl, 2, bad), ConfigError);
}

TEST_CASE("half-space nesting on small runs") {
    ProcessSpec tmpl;
    tmpl.d = 1;
    tmpl.horizon = 10.0;
    tmpl.seed = MasterSeed{202};
    PropertyReport rep =
        check_halfspace_nesting(tmpl, Direction{1.0}, 2.0, 8.0, 10);
    CHECK(rep.passed());
    CHECK_THROWS_AS(
        check_halfspace_nesting(tmpl, Direction{1.0}, 8.0, 2.0, 4),
        ConfigError);  // r1 > r2
}

TEST_CASE("nesting against the full-space process (r2 = infinity)") {
    ProcessSpec tmpl;
    tmpl.d = 1;
    tmpl.horizon = 8.0;
    tmpl.seed = MasterSeed{203};
    PropertyReport rep = check_halfspace_nesting(
        tmpl, Direction{1.0}, 3.0, std::numeric_limits<double>::infinity(), 8);
    CHECK(rep.passed());
}

TEST_CASE("poisson marginals at a short horizon") {
    ProcessSpec tmpl;
    tmpl.d = 2;
    tmpl.box_l = 32;
    tmpl.seed = MasterSeed{303};
    PropertyReport rep = check_poisson_marginals(tmpl, 4.0, 20);
    CHECK(rep.passed());
}

TEST_CASE("no A behind the front, vacuous and small cases") {
    ProcessSpec tmpl;
    tmpl.d = 1;
    tmpl.seed = MasterSeed{404};
    // radius < 1: vacuous pass by contract
    PropertyReport vac = check_no_A_behind_front(tmpl, 1.0, 0.5, 0.2, 2);
    CHECK(vac.passed());

    PropertyReport rep = check_no_A_behind_front(tmpl, 40.0, 0.4, 0.3, 10);
    CHECK(rep.passed());
}

TEST_CASE("superconvolutivity demands 200 replicas per bank") {
    ProcessSpec tmpl;
    tmpl.d = 1;
    tmpl.seed = MasterSeed{505};
    CHECK_THROWS_AS(
        check_superconvolutivity(tmpl, Direction{1.0}, 10.0, 10.0, 50),
        InsufficientReplicas);
}

TEST_CASE("superconvolutivity at desk scale") {
    ProcessSpec tmpl;
    tmpl.d = 1;
    tmpl.seed = MasterSeed{606};
    PropertyReport rep =
        check_superconvolutivity(tmpl, Direction{1.0}, 10.0, 10.0, 200);
    CHECK(rep.passed());
}

TEST_CASE("positive speed gates") {
    ProcessSpec tmpl;
    tmpl.d = 1;
    tmpl.seed = MasterSeed{707};
    Schedule s = geometric_schedule(1.0, 10, 2);  // [10,20,40]
    PropertyReport rep =
        check_positive_speed(tmpl, Direction{1.0}, s, 20, 2.0);
    CHECK(rep.passed());
}

TEST_CASE("reports render one line per evidence item") {
    PropertyReport rep;
    rep.id = "demo";
    rep.verdict = PropertyReport::Verdict::Fail;
    rep.config_echo = "d=1";
    rep.note("alpha", 1.5);
    rep.note("witness", "seed=9");
    std::string text = rep.to_text();
    CHECK(text.find("[demo] FAIL") != std::string::npos);
    CHECK(text.find("alpha: 1.5") != std::string::npos);
    CHECK(text.find("witness: seed=9") != std::string::npos);
    CHECK(!rep.passed());
}

TEST_SUITE_END();
