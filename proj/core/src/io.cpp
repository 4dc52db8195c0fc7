#include "shapelab/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace shapelab {

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// --- Manifest ---------------------------------------------------------------

void Manifest::set(const std::string& key, const std::string& value) {
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = value;
            return;
        }
    }
    entries_.emplace_back(key, value);
}

std::optional<std::string> Manifest::get(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    return std::nullopt;
}

std::string Manifest::serialize() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::string Manifest::hash_hex() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(hash()));
    return buf;
}

void Manifest::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << serialize() << "manifest_hash=" << hash_hex() << "\n";
}

Manifest Manifest::read(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + path);
    Manifest m;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("malformed manifest line: " + line);
        std::string key = line.substr(0, eq);
        if (key == "manifest_hash") continue;
        m.entries_.emplace_back(key, line.substr(eq + 1));
    }
    return m;
}

namespace {

std::string mode_name(ProcessMode::Kind k) {
    switch (k) {
        case ProcessMode::Kind::Original: return "original";
        case ProcessMode::Kind::FullSpace: return "full";
        case ProcessMode::Kind::HalfSpace: return "half";
        case ProcessMode::Kind::StartedAt: return "started_at";
    }
    return "?";
}

std::string join_components(const Vec& v) {
    std::string out;
    for (int i = 0; i < v.dim; ++i) {
        if (i) out += ',';
        out += g17(v[i]);
    }
    return out;
}

}  // namespace

Manifest make_manifest(const ProcessSpec& spec) {
    Manifest m;
    m.set("artifact_version", std::string(kArtifactVersion));
    m.set("stream_algo_id", std::string(kStreamAlgoId));
    m.set("dim", spec.d);
    m.set("mu", spec.mu_a);
    m.set("rate", spec.rate);
    m.set("horizon", spec.horizon);
    m.set("box", spec.effective_box());
    m.set("c_guard", spec.c_guard);
    m.set("seed", std::to_string(spec.seed.v));
    m.set("mode", mode_name(spec.mode.kind));
    if (spec.mode.u) m.set("u", join_components(spec.mode.u->u));
    if (spec.mode.kind == ProcessMode::Kind::HalfSpace)
        m.set("r", spec.mode.r);
    return m;
}

namespace {

double need_double(const Manifest& m, const std::string& key) {
    auto v = m.get(key);
    if (!v) throw ConfigError("manifest missing key '" + key + "'");
    try {
        return std::stod(*v);
    } catch (const std::exception&) {
        throw ConfigError("manifest key '" + key + "': bad number " + *v);
    }
}

}  // namespace

ProcessSpec spec_from_manifest(const Manifest& m) {
    ProcessSpec spec;
    spec.d = static_cast<int>(need_double(m, "dim"));
    spec.mu_a = need_double(m, "mu");
    spec.rate = need_double(m, "rate");
    spec.horizon = need_double(m, "horizon");
    spec.box_l = static_cast<int>(need_double(m, "box"));
    if (auto g = m.get("c_guard")) spec.c_guard = std::stod(*g);
    auto seed = m.get("seed");
    if (!seed) throw ConfigError("manifest missing key 'seed'");
    spec.seed = MasterSeed{std::stoull(*seed)};
    auto mode = m.get("mode").value_or("full");
    if (mode == "full") {
        spec.mode = ProcessMode::full_space();
    } else if (mode == "half") {
        auto u = m.get("u");
        if (!u) throw ConfigError("half mode requires 'u'");
        spec.mode = ProcessMode::half_space(parse_direction(*u),
                                            need_double(m, "r"));
    } else if (mode == "original") {
        spec.mode = ProcessMode::original(
            {{LatticePoint::origin(spec.d), 1}});
    } else {
        throw ConfigError("manifest: unknown mode '" + mode + "'");
    }
    spec.validate();
    return spec;
}

std::vector<std::string> write_simulation_run(const ProcessSpec& spec,
                                              const std::string& out_dir,
                                              bool event_log) {
    std::filesystem::create_directories(out_dir);
    Manifest m = make_manifest(spec);
    const std::string hex = m.hash_hex();

    auto dirs = direction_grid(spec.d, 16);
    const int steps = 64;
    std::vector<double> times;
    times.reserve(steps);
    for (int i = 1; i <= steps; ++i)
        times.push_back(spec.horizon * i / steps);

    ExtentTracker tracker(0, dirs);
    RunOptions opts;
    opts.record_events = event_log;
    auto res = run(spec, {}, {tracker.request(times)}, opts);

    std::vector<std::string> written;
    auto emit = [&](const std::string& name) {
        written.push_back(name);
        return out_dir + "/" + name;
    };
    m.write(emit("manifest.txt"));
    write_direction_csv(emit("directions.csv"), hex, dirs);
    write_front_csv(emit("front.csv"), hex, dirs, tracker.records());

    BSets bsets(spec.d, res.layers[0].visited);
    std::size_t infected = 0;
    for (double th : res.layers[0].theta)
        if (th < kNever) ++infected;
    {
        std::ofstream f(emit("summary.txt"), std::ios::binary);
        f << "manifest=" << hex << "\nevent_count=" << res.event_count
          << "\nfinal_time=" << g17(res.final_time)
          << "\nparticles=" << res.init.ids.size()
          << "\ninfected=" << infected
          << "\nvisited_sites=" << res.layers[0].visited.size()
          << "\nb_tilde_radius=" << bsets.radius_inf(spec.horizon)
          << "\ninscribed_radius=" << bsets.inscribed_radius(spec.horizon)
          << "\ncontainment_ok=" << (res.containment_ok() ? 1 : 0) << '\n';
        if (event_log && res.events.size() < res.event_count)
            f << "event_log_skipped=too_many_events\n";
    }
    if (event_log && res.events.size() == res.event_count)
        write_event_log(emit("events.bin"), spec.d, m.hash(), res.events);
    return written;
}

// --- CSV emitters -----------------------------------------------------------

namespace {

std::ofstream open_csv(const std::string& path, const char* schema,
                       const std::string& manifest_hex) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << "# schema " << schema << "/v1\n# manifest " << manifest_hex << "\n";
    return f;
}

}  // namespace

void write_front_csv(const std::string& path, const std::string& manifest_hex,
                     const std::vector<Direction>& dirs,
                     const std::vector<FrontRecord>& records) {
    auto f = open_csv(path, "front", manifest_hex);
    f << "t,dir_index,extent\n";
    for (const auto& rec : records)
        for (std::size_t j = 0; j < dirs.size(); ++j)
            if (rec.defined[j])
                f << g17(rec.t) << ',' << j << ',' << g17(rec.extents[j])
                  << '\n';
}

void write_direction_csv(const std::string& path,
                         const std::string& manifest_hex,
                         const std::vector<Direction>& dirs) {
    auto f = open_csv(path, "directions", manifest_hex);
    f << "dir_index,u_components\n";
    for (std::size_t j = 0; j < dirs.size(); ++j) {
        f << j << ',';
        for (int i = 0; i < dirs[j].dim(); ++i)
            f << (i ? ";" : "") << g17(dirs[j][i]);
        f << '\n';
    }
}

void write_lambda_csv(const std::string& path, const std::string& manifest_hex,
                      const std::vector<LambdaEstimate>& estimates) {
    auto f = open_csv(path, "lambda", manifest_hex);
    f << "dir_index,u_components,lambda,stderr,n_last,replicas_used\n";
    for (std::size_t j = 0; j < estimates.size(); ++j) {
        const auto& e = estimates[j];
        f << j << ',';
        for (int i = 0; i < e.u.dim(); ++i)
            f << (i ? ";" : "") << g17(e.u[i]);
        f << ',' << g17(e.point) << ',' << g17(e.stderr_mean) << ','
          << e.n_last << ',' << e.replicas_used << '\n';
    }
}

void write_property_csv(const std::string& path,
                        const std::string& manifest_hex,
                        const std::vector<PropertyReport>& reports) {
    auto f = open_csv(path, "properties", manifest_hex);
    f << "id,verdict,evidence\n";
    for (const auto& r : reports) {
        f << r.id << ',';
        switch (r.verdict) {
            case PropertyReport::Verdict::Pass: f << "pass"; break;
            case PropertyReport::Verdict::Fail: f << "fail"; break;
            case PropertyReport::Verdict::Flagged: f << "flagged"; break;
        }
        f << ',';
        for (std::size_t i = 0; i < r.evidence.size(); ++i)
            f << (i ? ";" : "") << r.evidence[i].first << '='
              << r.evidence[i].second;
        f << '\n';
    }
}

void write_shape_document(const std::string& path,
                          const std::string& manifest_hex,
                          const ShapeEstimate& shape,
                          const std::vector<LambdaEstimate>& estimates) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << "shape_document=v1\nmanifest=" << manifest_hex
      << "\ndim=" << shape.d << "\ndirections=" << shape.directions.size()
      << "\n";
    for (std::size_t j = 0; j < shape.directions.size(); ++j) {
        f << "direction." << j << '=';
        for (int i = 0; i < shape.directions[j].dim(); ++i)
            f << (i ? "," : "") << g17(shape.directions[j][i]);
        f << "\nlambda." << j << '=' << g17(shape.lambdas[j]) << '\n';
        if (j < estimates.size())
            f << "stderr." << j << '=' << g17(estimates[j].stderr_mean)
              << '\n';
    }
    f << "vertices=" << shape.vertices.size() << '\n';
    for (std::size_t j = 0; j < shape.vertices.size(); ++j) {
        f << "vertex." << j << '=';
        for (int i = 0; i < shape.vertices[j].dim; ++i)
            f << (i ? "," : "") << g17(shape.vertices[j][i]);
        f << '\n';
    }
}

void write_shape_svg(const std::string& path, const std::string& manifest_hex,
                     const ShapeEstimate& shape,
                     const std::vector<Vec>& point_cloud) {
    if (shape.d != 2)
        throw DimensionUnsupported("write_shape_svg: d=2 figures only");
    double r = shape.bounding_radius();
    for (const auto& p : point_cloud) r = std::max(r, p.norm_inf());
    if (!(r > 0)) r = 1.0;
    const double view = 1.1 * r;
    const int px = 640;
    auto sx = [&](double x) { return (x + view) / (2 * view) * px; };
    auto sy = [&](double y) { return (view - y) / (2 * view) * px; };

    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px
      << "\" height=\"" << px << "\">\n"
      << "<!-- manifest " << manifest_hex << " -->\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (const auto& p : point_cloud)
        f << "<circle cx=\"" << g17(sx(p[0])) << "\" cy=\"" << g17(sy(p[1]))
          << "\" r=\"1.5\" fill=\"#4477aa\" fill-opacity=\"0.5\"/>\n";
    if (!shape.vertices.empty()) {
        f << "<polygon points=\"";
        for (std::size_t j = 0; j < shape.vertices.size(); ++j)
            f << (j ? " " : "") << g17(sx(shape.vertices[j][0])) << ','
              << g17(sy(shape.vertices[j][1]));
        f << "\" fill=\"none\" stroke=\"#cc3311\" stroke-width=\"2\"/>\n";
    }
    f << "</svg>\n";
}

// --- Binary event log ------------------------------------------------------

namespace {

constexpr char kLogMagic[8] = {'S', 'H', 'L', 'B', 'L', 'O', 'G', '1'};

template <class T>
void put(std::ofstream& f, T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));  // host is little-endian on all targets
    f.write(buf, sizeof(T));
}

template <class T>
T take(std::ifstream& f) {
    char buf[sizeof(T)];
    f.read(buf, sizeof(T));
    if (!f) throw ConfigError("event log truncated");
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

}  // namespace

void write_event_log(const std::string& path, int d, std::uint64_t spec_hash,
                     const std::vector<JumpEvent>& events) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path);
    f.write(kLogMagic, 8);
    put<std::uint32_t>(f, 1);  // format version
    put<std::uint32_t>(f, static_cast<std::uint32_t>(d));
    put<std::uint64_t>(f, spec_hash);
    const std::string algo = kStreamAlgoId;
    put<std::uint32_t>(f, static_cast<std::uint32_t>(algo.size()));
    f.write(algo.data(), static_cast<std::streamsize>(algo.size()));
    for (const auto& e : events) {
        put<double>(f, e.time);
        put<std::uint64_t>(f, e.who);
        for (int i = 0; i < d; ++i) put<std::int32_t>(f, e.from.c[i]);
        for (int i = 0; i < d; ++i) put<std::int32_t>(f, e.to.c[i]);
    }
}

EventLog read_event_log(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + path);
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, kLogMagic, 8) != 0)
        throw ConfigError("not an event log: " + path);
    if (take<std::uint32_t>(f) != 1)
        throw ConfigError("unsupported event log version");
    EventLog log;
    log.d = static_cast<int>(take<std::uint32_t>(f));
    if (log.d < 1 || log.d > kMaxDim)
        throw ConfigError("event log: bad dimension");
    log.spec_hash = take<std::uint64_t>(f);
    auto len = take<std::uint32_t>(f);
    log.stream_algo_id.resize(len);
    f.read(log.stream_algo_id.data(), len);
    if (!f) throw ConfigError("event log truncated");
    while (f.peek() != EOF) {
        JumpEvent e;
        e.time = take<double>(f);
        e.who = static_cast<std::uint32_t>(take<std::uint64_t>(f));
        e.from = LatticePoint::origin(log.d);
        e.to = LatticePoint::origin(log.d);
        for (int i = 0; i < log.d; ++i) e.from.c[i] = take<std::int32_t>(f);
        for (int i = 0; i < log.d; ++i) e.to.c[i] = take<std::int32_t>(f);
        log.events.push_back(e);
    }
    return log;
}

// --- Config files -----------------------------------------------------------

std::map<std::string, std::string> parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config " + path);
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        auto a = s.find_first_not_of(" \t\r");
        auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(f, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": empty key");
        if (!out.emplace(key, val).second)
            throw ConfigError("config: duplicate key '" + key + "'");
    }
    return out;
}

}  // namespace shapelab
