#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "shapelab/simulator.hpp"
#include "shapelab/stats.hpp"

using namespace shapelab;

TEST_SUITE_BEGIN("simulator");

TEST_CASE("guard box rule") {
    // ceil(4*50) + 10*ceil(sqrt(50)) = 200 + 80
    CHECK(guard_box(50.0) == 280);
    CHECK(guard_margin(50.0) == 80);
    CHECK(guard_box(7.0, 2.0) == 14 + 30);
}

TEST_CASE("spec validation") {
    ProcessSpec spec;
    spec.horizon = 50.0;
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.effective_box() == guard_box(50.0));
    spec.box_l = 10;  // explicit boxes are taken as-is
    CHECK_NOTHROW(spec.validate());
    spec.box_l = -1;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.box_l = 0;
    spec.mu_a = -1.0;
    CHECK_THROWS_AS(spec.validate(), ConfigError);
    spec.mu_a = 1.0;
    spec.mode = ProcessMode::half_space(Direction{1.0, 0.0}, 5.0);
    CHECK_THROWS_AS(spec.validate(), ConfigError);  // direction dim != d
}

TEST_CASE("nearest-occupied search: shell then lex") {
    // Occupied exactly at {(1,0),(0,-1)}: both on shell k=1 of the origin,
    // lex order picks (0,-1).
    auto occupied = [](const LatticePoint& x) {
        return x == LatticePoint{1, 0} || x == LatticePoint{0, -1};
    };
    LatticePoint hit = find_nearest_occupied(LatticePoint::origin(2), 5, occupied);
    CHECK(hit == LatticePoint{0, -1});
    CHECK_THROWS_AS(
        find_nearest_occupied(LatticePoint::origin(2), 2,
                              [](const LatticePoint&) { return false; }),
        NoOccupiedSite);
}

TEST_CASE("hand-trace oracle: theta(q) = 1.2") {
    // p fixed B at 0; q starts at 2, jumps 2->1 at 0.5, 1->0 at 1.2.
    std::vector<LatticePoint> pos0{LatticePoint{0}, LatticePoint{2}};
    std::vector<JumpEvent> events{
        {0.5, 1, LatticePoint{2}, LatticePoint{1}},
        {1.2, 1, LatticePoint{1}, LatticePoint{0}},
    };
    ReplayResult r = replay_infection(1, pos0, {0}, events);
    CHECK(r.theta[0] == 0.0);
    CHECK(r.theta[1] == 1.2);
    // B-tilde(2) = {0}: site 0 visited at time 0, nothing else ever.
    REQUIRE(r.visited.size() == 1);
    CHECK(r.visited[0].first == LatticePoint{0});
    CHECK(r.visited[0].second == 0.0);
}

TEST_CASE("hand-trace variant: B walks into a resting A") {
    std::vector<LatticePoint> pos0{LatticePoint{0}, LatticePoint{2}};
    std::vector<JumpEvent> events{
        {0.3, 0, LatticePoint{0}, LatticePoint{1}},
        {0.9, 0, LatticePoint{1}, LatticePoint{2}},
    };
    ReplayResult r = replay_infection(1, pos0, {0}, events);
    CHECK(r.theta[1] == 0.9);
}

TEST_CASE("expected event count identity and MC agreement") {
    ProcessSpec spec;
    spec.d = 1;
    spec.mu_a = 2.0;
    spec.rate = 1.0;
    spec.horizon = 5.0;
    spec.box_l = 10;
    CHECK(expected_event_count(spec) == doctest::Approx(210.0));  // 1*5*2*21

    std::vector<double> observed;
    for (int r = 0; r < 100; ++r) {
        spec.seed = substream(MasterSeed{500}, "evc-" + std::to_string(r));
        observed.push_back(static_cast<double>(run(spec).event_count));
    }
    Moments m = moments(observed);
    // var(total) = E[N] var(P(5)) + var(N) E[P(5)]^2 = 42*5 + 42*25 = 1260
    CHECK(std::abs(m.mean - 210.0) < 5 * std::sqrt(1260.0 / 100.0));
}

TEST_CASE("single-site box expected events") {
    // mu=1, L=0, d=2, D=1, horizon=7 -> one site, 7 expected events.
    CHECK(expected_event_count(2, 1.0, 1.0, 7.0, 0) == doctest::Approx(7.0));
    CHECK(expected_event_count(1, 2.0, 1.0, 5.0, 10) == doctest::Approx(210.0));
}

TEST_CASE("runs are bit-deterministic") {
    ProcessSpec spec;
    spec.d = 2;
    spec.horizon = 6.0;
    spec.seed = MasterSeed{123};
    RunResult a = run(spec);
    RunResult b = run(spec);
    CHECK(a.event_count == b.event_count);
    REQUIRE(a.final_pos.size() == b.final_pos.size());
    for (std::size_t i = 0; i < a.final_pos.size(); ++i)
        CHECK(a.final_pos[i] == b.final_pos[i]);
    REQUIRE(a.layers[0].theta.size() == b.layers[0].theta.size());
    for (std::size_t i = 0; i < a.layers[0].theta.size(); ++i)
        CHECK(a.layers[0].theta[i] == b.layers[0].theta[i]);
}

TEST_CASE("recorded event log replays to the same infection history") {
    ProcessSpec spec;
    spec.d = 1;
    spec.horizon = 5.0;
    spec.seed = MasterSeed{77};
    RunOptions opts;
    opts.record_events = true;
    InitialState init = build_initial_state(spec);
    LayerSpec layer;
    layer.initial_b = init.designated;
    RunResult res = run(spec, init, {layer}, {}, opts);
    REQUIRE(res.events.size() == res.event_count);
    CHECK(std::is_sorted(res.events.begin(), res.events.end(),
                         [](const JumpEvent& a, const JumpEvent& b) {
                             return a.time < b.time;
                         }));

    ReplayResult replay =
        replay_infection(1, init.pos0, layer.initial_b, res.events);
    REQUIRE(replay.theta.size() == res.layers[0].theta.size());
    for (std::size_t i = 0; i < replay.theta.size(); ++i)
        CHECK(replay.theta[i] == res.layers[0].theta[i]);

    auto sort_visited = [](std::vector<std::pair<LatticePoint, double>> v) {
        std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
            return lex_less(a.first, b.first);
        });
        return v;
    };
    auto va = sort_visited(replay.visited);
    auto vb = sort_visited(res.layers[0].visited);
    REQUIRE(va.size() == vb.size());
    for (std::size_t i = 0; i < va.size(); ++i) {
        CHECK(va[i].first == vb[i].first);
        CHECK(va[i].second == doctest::Approx(vb[i].second).epsilon(1e-15));
    }
}

TEST_CASE("designated B-particles propagate by coincidence at time zero") {
    ProcessSpec spec;
    spec.d = 1;
    spec.mu_a = 3.0;  // plenty of co-located particles
    spec.horizon = 1.0;
    spec.seed = MasterSeed{5};
    InitialState init = build_initial_state(spec);
    LayerSpec layer;
    layer.initial_b = init.designated;
    RunResult res = run(spec, init, {layer});
    REQUIRE(!init.designated.empty());
    const LatticePoint site = init.designated_sites.front();
    for (std::size_t i = 0; i < init.pos0.size(); ++i)
        if (init.pos0[i] == site) CHECK(res.layers[0].theta[i] == 0.0);
}

TEST_CASE("inactive particles never infect or get infected") {
    ProcessSpec spec;
    spec.d = 1;
    spec.mu_a = 2.0;
    spec.horizon = 8.0;
    spec.seed = MasterSeed{31};
    InitialState init = build_initial_state(spec);
    LayerSpec all, none;
    all.initial_b = init.designated;
    none.initial_b = init.designated;
    none.active.assign(init.ids.size(), 0);
    for (auto b : none.initial_b) none.active[b] = 1;  // only the seeds act
    RunResult res = run(spec, init, {all, none});
    bool designated_only = true;
    for (std::size_t i = 0; i < init.ids.size(); ++i) {
        bool is_seed = std::find(init.designated.begin(), init.designated.end(),
                                 i) != init.designated.end();
        if (!is_seed && res.layers[1].theta[i] < kNever)
            designated_only = false;
        // the masked layer can never infect more than the open one
        CHECK(res.layers[1].theta[i] >= res.layers[0].theta[i]);
    }
    CHECK(designated_only);
}

TEST_CASE("reset layers start at the reset time") {
    ProcessSpec spec;
    spec.d = 1;
    spec.horizon = 6.0;
    spec.seed = MasterSeed{21};
    InitialState init = build_initial_state(spec);
    LayerSpec base;
    base.initial_b = init.designated;
    RunResult res =
        run(spec, init, {base, reset_types_at(2.0, LatticePoint::origin(1))});
    const auto& tl = res.layers[1];
    REQUIRE(tl.designated_site.has_value());
    bool any_b = false;
    for (double th : tl.theta) {
        if (th < kNever) any_b = true;
        CHECK(th >= 2.0);
    }
    CHECK(any_b);
}

TEST_CASE("snapshot listeners fire at the requested times in order") {
    ProcessSpec spec;
    spec.d = 1;
    spec.horizon = 4.0;
    spec.seed = MasterSeed{2};
    std::vector<double> seen;
    SnapshotRequest snap;
    snap.times = {1.0, 2.5, 4.0};
    snap.fn = [&](double t, const SimView& view) {
        seen.push_back(t);
        CHECK(view.now() == t);
        CHECK(view.dim() == 1);
    };
    run(spec, {}, {snap});
    CHECK(seen == std::vector<double>{1.0, 2.5, 4.0});
}

TEST_CASE("half-space start leaves the far side empty at time zero") {
    ProcessSpec spec;
    spec.d = 1;
    spec.horizon = 4.0;
    spec.seed = MasterSeed{13};
    spec.mode = ProcessMode::half_space(Direction{1.0}, 3.0);  // x >= -3
    InitialState init = build_initial_state(spec);
    for (const auto& p : init.pos0) CHECK(p[0] >= -3);
    REQUIRE(!init.designated_sites.empty());
}

TEST_SUITE_END();
