#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "shapelab/io.hpp"

using namespace shapelab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

fs::path temp_dir(const char* tag) {
    fs::path p = fs::temp_directory_path() /
                 (std::string("shapelab_test_") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("g17 round-trips doubles exactly") {
    for (double v : {3.141592653589793, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
        CHECK(std::strtod(g17(v).c_str(), nullptr) == v);
    }
}

TEST_CASE("fnv1a64 known vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("manifest set/get/serialize and file round trip") {
    Manifest m;
    m.set("dim", 2);
    m.set("mu", 1.0);
    m.set("note", std::string("hello"));
    m.set("dim", 3);  // overwrite keeps position, updates value
    CHECK(m.get("dim") == std::string("3"));
    CHECK(!m.get("missing").has_value());
    CHECK(m.serialize() == "dim=3\nmu=1\nnote=hello\n");

    auto dir = temp_dir("manifest");
    m.write((dir / "m.txt").string());
    Manifest back = Manifest::read((dir / "m.txt").string());
    CHECK(back.serialize() == m.serialize());
    CHECK(back.hash() == m.hash());
    CHECK(slurp((dir / "m.txt").string()).find("manifest_hash=" + m.hash_hex()) !=
          std::string::npos);
}

TEST_CASE("spec round-trips through its manifest") {
    ProcessSpec spec;
    spec.d = 2;
    spec.mu_a = 1.5;
    spec.rate = 0.5;
    spec.horizon = 12.0;
    spec.box_l = 100;
    spec.seed = MasterSeed{987654321};
    spec.mode = ProcessMode::half_space(Direction{0.6, 0.8}, 5.0);
    Manifest m = make_manifest(spec);
    ProcessSpec back = spec_from_manifest(m);
    CHECK(back.d == spec.d);
    CHECK(back.mu_a == spec.mu_a);
    CHECK(back.rate == spec.rate);
    CHECK(back.horizon == spec.horizon);
    CHECK(back.effective_box() == spec.effective_box());
    CHECK(back.seed == spec.seed);
    CHECK(back.mode.kind == ProcessMode::Kind::HalfSpace);
    CHECK(back.mode.r == spec.mode.r);
    CHECK((*back.mode.u)[0] == doctest::Approx(0.6).epsilon(1e-15));
    // identical manifests hash identically
    CHECK(make_manifest(back).hash() == m.hash());
}

TEST_CASE("front CSV format is pinned") {
    auto dir = temp_dir("csv");
    std::vector<Direction> dirs{Direction{1.0}, Direction{-1.0}};
    std::vector<FrontRecord> recs{
        {1.5, {2.0, 0.5}, {1, 1}},
        {3.0, {4.0, 0.0}, {1, 0}},  // second extent undefined, skipped
    };
    write_front_csv((dir / "front.csv").string(), "deadbeef00000000", dirs,
                    recs);
    CHECK(slurp((dir / "front.csv").string()) ==
          "# schema front/v1\n"
          "# manifest deadbeef00000000\n"
          "t,dir_index,extent\n"
          "1.5,0,2\n"
          "1.5,1,0.5\n"
          "3,0,4\n");
}

TEST_CASE("lambda CSV carries the pinned column order") {
    auto dir = temp_dir("lambda");
    LambdaEstimate e;
    e.u = Direction{1.0, 0.0};
    e.point = 0.5;
    e.stderr_mean = 0.01;
    e.n_last = 100;
    e.replicas_used = 32;
    write_lambda_csv((dir / "l.csv").string(), "00", {e});
    std::string text = slurp((dir / "l.csv").string());
    CHECK(text.find("dir_index,u_components,lambda,stderr,n_last,replicas_used") !=
          std::string::npos);
    CHECK(text.find("0,1;0,0.5,0.01,100,32") != std::string::npos);
}

TEST_CASE("event log round trip") {
    auto dir = temp_dir("evlog");
    std::vector<JumpEvent> events{
        {0.5, 1, LatticePoint{2, 0}, LatticePoint{1, 0}},
        {1.2, 1, LatticePoint{1, 0}, LatticePoint{0, 0}},
        {2.0, 0, LatticePoint{0, 0}, LatticePoint{0, -1}},
    };
    const std::string path = (dir / "events.bin").string();
    write_event_log(path, 2, 0x1234abcdu, events);
    EventLog log = read_event_log(path);
    CHECK(log.d == 2);
    CHECK(log.spec_hash == 0x1234abcdu);
    CHECK(log.stream_algo_id == kStreamAlgoId);
    REQUIRE(log.events.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(log.events[i].time == events[i].time);
        CHECK(log.events[i].who == events[i].who);
        CHECK(log.events[i].from == events[i].from);
        CHECK(log.events[i].to == events[i].to);
    }

    std::ofstream bad((dir / "bad.bin").string(), std::ios::binary);
    bad << "not a log";
    bad.close();
    CHECK_THROWS_AS(read_event_log((dir / "bad.bin").string()), ConfigError);
}

TEST_CASE("config parsing: comments, trimming, validation") {
    auto dir = temp_dir("cfg");
    {
        std::ofstream f(dir / "good.cfg");
        f << "# header comment\n"
          << "dim = 2\n"
          << "mu=1.5  # trailing comment\n"
          << "\n"
          << "mode=half\n";
    }
    auto kv = parse_config((dir / "good.cfg").string());
    CHECK(kv.at("dim") == "2");
    CHECK(kv.at("mu") == "1.5");
    CHECK(kv.at("mode") == "half");
    CHECK(kv.size() == 3);

    {
        std::ofstream f(dir / "dup.cfg");
        f << "a=1\na=2\n";
    }
    CHECK_THROWS_AS(parse_config((dir / "dup.cfg").string()), ConfigError);
    {
        std::ofstream f(dir / "noeq.cfg");
        f << "just words\n";
    }
    CHECK_THROWS_AS(parse_config((dir / "noeq.cfg").string()), ConfigError);
}

TEST_CASE("simulation run directories are byte-reproducible") {
    ProcessSpec spec;
    spec.d = 1;
    spec.horizon = 10.0;
    spec.seed = MasterSeed{4242};
    auto d1 = temp_dir("rep1");
    auto d2 = temp_dir("rep2");
    auto files1 = write_simulation_run(spec, d1.string(), true);
    auto files2 = write_simulation_run(spec, d2.string(), true);
    REQUIRE(files1 == files2);
    for (const auto& name : files1)
        CHECK(slurp((d1 / name).string()) == slurp((d2 / name).string()));
    // the replayed spec from the manifest reproduces the same bytes
    ProcessSpec back =
        spec_from_manifest(Manifest::read((d1 / "manifest.txt").string()));
    auto d3 = temp_dir("rep3");
    write_simulation_run(back, d3.string(), true);
    CHECK(slurp((d1 / "front.csv").string()) ==
          slurp((d3 / "front.csv").string()));
}

TEST_CASE("shape SVG is planar only") {
    ShapeEstimate interval;
    interval.d = 1;
    auto dir = temp_dir("svg");
    CHECK_THROWS_AS(
        write_shape_svg((dir / "s.svg").string(), "00", interval, {}),
        DimensionUnsupported);

    ShapeEstimate square = build_shape(
        {Direction{1.0, 0.0}, Direction{0.0, 1.0}, Direction{-1.0, 0.0},
         Direction{0.0, -1.0}},
        {1.0, 1.0, 1.0, 1.0});
    write_shape_svg((dir / "s.svg").string(), "00", square,
                    {Vec{0.5, 0.5}, Vec{-0.2, 0.1}});
    std::string text = slurp((dir / "s.svg").string());
    CHECK(text.find("<svg") != std::string::npos);
    CHECK(text.find("<polygon") != std::string::npos);
    CHECK(text.find("<circle") != std::string::npos);
}

TEST_SUITE_END();
