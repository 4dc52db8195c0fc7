#include <cmath>
#include <set>

#include "doctest.h"
#include "shapelab/rng.hpp"
#include "shapelab/stats.hpp"

using namespace shapelab;

TEST_SUITE_BEGIN("rng");

TEST_CASE("initial occupation counts match Poisson(1) moments over 1e5 sites") {
    MasterSeed s = substream(MasterSeed{42}, "init");
    std::vector<double> counts;
    counts.reserve(100001);
    for (int x = -50000; x <= 50000; ++x)
        counts.push_back(initial_count(s, LatticePoint{x}, 1.0));
    Moments m = moments(counts);
    CHECK(m.mean == doctest::Approx(1.0).epsilon(0.01));   // 3 sigma
    CHECK(m.var == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("pooled exponential waits have mean 1/D over 1e6 draws") {
    double total = 0;
    std::size_t n = 0;
    for (int p = 0; p < 100; ++p) {
        PathStream s = make_path_stream(MasterSeed{7},
                                        ParticleId{LatticePoint{p}, 0});
        for (int k = 0; k < 10000; ++k) {
            total += next_jump(s, 1.0, 1).wait;
            ++n;
        }
    }
    CHECK(total / n == doctest::Approx(1.0).epsilon(0.005));  // 3 sigma
}

TEST_CASE("d=2 direction frequencies are 1/4 each over 1e6 draws") {
    std::array<std::size_t, 4> freq{};
    for (int p = 0; p < 100; ++p) {
        PathStream s = make_path_stream(MasterSeed{11},
                                        ParticleId{LatticePoint{p, 0}, 0});
        for (int k = 0; k < 10000; ++k) ++freq[next_jump(s, 1.0, 2).dir_index];
    }
    for (int j = 0; j < 4; ++j)
        CHECK(freq[j] / 1e6 == doctest::Approx(0.25).epsilon(0.008));
}

TEST_CASE("substream labels do not collide over 1e4 seeds") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t s = 0; s < 10000; ++s) {
        MasterSeed seed{detail::mix64(s)};
        MasterSeed a = substream(seed, "init");
        MasterSeed b = substream(seed, "paths");
        CHECK(a.v != b.v);
        seen.insert(a.v);
        seen.insert(b.v);
    }
    CHECK(seen.size() == 20000);  // birthday check across all children
}

TEST_CASE("draws are pure functions of (key, counter)") {
    PathStream a = make_path_stream(MasterSeed{3}, ParticleId{LatticePoint{5}, 2});
    PathStream b = a;
    Jump peeked = peek_jump(a, 2.0, 1);
    CHECK(a.cursor == 0);  // peek does not advance
    Jump j1 = next_jump(a, 2.0, 1);
    Jump j2 = next_jump(b, 2.0, 1);
    CHECK(j1.wait == peeked.wait);
    CHECK(j1.dir_index == peeked.dir_index);
    CHECK(j1.wait == j2.wait);
    CHECK(j1.dir_index == j2.dir_index);
    CHECK(next_jump(a, 2.0, 1).wait != j1.wait);
}

TEST_CASE("particle keys are stable in the identity, not the ordinal") {
    ParticleId id{LatticePoint{-3, 7}, 1};
    CHECK(particle_key(MasterSeed{9}, id) == particle_key(MasterSeed{9}, id));
    CHECK(particle_key(MasterSeed{9}, id) !=
          particle_key(MasterSeed{9}, ParticleId{LatticePoint{-3, 7}, 2}));
    CHECK(particle_key(MasterSeed{9}, id) != particle_key(MasterSeed{10}, id));
}

TEST_CASE("wait times are strictly positive and finite") {
    PathStream s = make_path_stream(MasterSeed{1}, ParticleId{LatticePoint{0}, 0});
    for (int k = 0; k < 100000; ++k) {
        Jump j = next_jump(s, 4.0, 2);
        CHECK(j.wait > 0);
        CHECK(std::isfinite(j.wait));
        CHECK(j.dir_index >= 0);
        CHECK(j.dir_index < 4);
    }
}

TEST_CASE("site packing round-trips signed coordinates") {
    for (const auto& p :
         {LatticePoint{0, 0, 0}, LatticePoint{-5000, 4999, 1},
          LatticePoint{1, -1, 300}}) {
        CHECK(detail::unpack_site(detail::pack_site(p), 3) == p);
    }
}

TEST_SUITE_END();
