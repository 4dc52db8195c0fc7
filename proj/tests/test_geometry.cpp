#include "doctest.h"
#include "shapelab/geometry.hpp"

using namespace shapelab;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("perp component of (2,0) against the diagonal is (1,-1)") {
    // Frozen by hand: v - <v,u>u with u = (1,1)/sqrt(2), <v,u> = sqrt(2).
    Direction u{1.0, 1.0};
    Vec p = perp_component(Vec{2.0, 0.0}, u);
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("shell_sites(1,2) lists the 8 boundary sites in lex order") {
    auto sites = shell_sites(1, 2);
    REQUIRE(sites.size() == 8);  // (2k+1)^d - (2k-1)^d = 9 - 1
    CHECK(sites.front() == LatticePoint{-1, -1});
    CHECK(sites.back() == LatticePoint{1, 1});
    for (std::size_t i = 0; i + 1 < sites.size(); ++i)
        CHECK(lex_less(sites[i], sites[i + 1]));
    for (const auto& s : sites) CHECK(s.norm_inf() == 1);
}

TEST_CASE("shell_sites(0,d) is the origin alone") {
    auto s1 = shell_sites(0, 1);
    auto s3 = shell_sites(0, 3);
    REQUIRE(s1.size() == 1);
    REQUIRE(s3.size() == 1);
    CHECK(s1[0] == LatticePoint::origin(1));
    CHECK(s3[0] == LatticePoint::origin(3));
    CHECK(shell_sites(2, 2).size() == 25 - 9);
}

TEST_CASE("cylinder membership") {
    Cylinder g{4.0, 1.0, Vec::zero(2), Direction{1.0, 0.0}};
    CHECK(in_cylinder(LatticePoint{5, 0}, g));    // <x,u>=5, xperp=(0,0)
    CHECK(!in_cylinder(LatticePoint{3, 0}, g));   // <x,u>=3 < alpha
    CHECK(!in_cylinder(LatticePoint{5, 3}, g));   // ||xperp||=3 > beta
    CHECK(in_cylinder(LatticePoint{4, 1}, g));    // both boundaries closed
}

TEST_CASE("cylinder axis offset must be orthogonal") {
    CHECK_THROWS_AS(Cylinder(0, 1, Vec{1.0, 0.0}, Direction{1.0, 0.0}),
                    ConfigError);
    CHECK_NOTHROW(Cylinder(0, 1, Vec{0.0, 2.0}, Direction{1.0, 0.0}));
}

TEST_CASE("directions are unit vectors; zero input rejected") {
    Direction u{3.0, 4.0};
    CHECK(u[0] == doctest::Approx(0.6));
    CHECK(u[1] == doctest::Approx(0.8));
    CHECK(u.unit_within_tol());
    CHECK(u.negated()[0] == doctest::Approx(-0.6));
    CHECK_THROWS_AS(Direction(Vec{0.0, 0.0}), ConfigError);
}

TEST_CASE("parse_direction normalizes comma-separated components") {
    Direction u = parse_direction("1,1");
    CHECK(u.dim() == 2);
    CHECK(u[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK_THROWS_AS(parse_direction(""), ConfigError);
    CHECK_THROWS_AS(parse_direction("1,x"), ConfigError);
}

TEST_CASE("lex order is strict and dimension-checked") {
    CHECK(lex_less(LatticePoint{0, -1}, LatticePoint{1, 0}));
    CHECK(lex_less(LatticePoint{1, -1}, LatticePoint{1, 0}));
    CHECK(!lex_less(LatticePoint{1, 0}, LatticePoint{1, 0}));
    CHECK_THROWS_AS(lex_less(LatticePoint{0}, LatticePoint{0, 0}),
                    DimensionMismatch);
}

TEST_CASE("half-space and cube predicates are closed") {
    HalfSpace s{Direction{1.0, 0.0}, 2.0};
    CHECK(s.contains(LatticePoint{2, 5}));
    CHECK(!s.contains(LatticePoint{1, 5}));
    Cube c{2.5};
    CHECK(c.contains(LatticePoint{2, -2}));
    CHECK(!c.contains(LatticePoint{3, 0}));
}

TEST_CASE("unit_step follows the pinned direction order") {
    // (-e1, +e1, ..., -ed, +ed)
    CHECK(unit_step(0, 2) == LatticePoint{-1, 0});
    CHECK(unit_step(1, 2) == LatticePoint{1, 0});
    CHECK(unit_step(2, 2) == LatticePoint{0, -1});
    CHECK(unit_step(3, 2) == LatticePoint{0, 1});
}

TEST_SUITE_END();
