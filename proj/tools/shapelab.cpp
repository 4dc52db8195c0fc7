// shapelab: simulate / estimate / verify front ends over the core
// library.  Every run directory carries a manifest that doubles as a
// config file, so `--config <run>/manifest.txt` replays a run exactly.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "shapelab/estimators.hpp"
#include "shapelab/io.hpp"
#include "shapelab/properties.hpp"
#include "shapelab/workers.hpp"

using namespace shapelab;

namespace {

struct CommonArgs {
    int dim = 1;
    double mu = 1.0;
    double rate = 1.0;
    double horizon = 50.0;
    int box = 0;
    std::uint64_t seed = 1;
    std::string mode = "full";
    std::string u_text;
    double r = 0.0;
    double c_guard = 4.0;
    int workers = 0;
    std::string out = "run";
    std::string config_path;
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--dim", a.dim, "lattice dimension")
        ->check(CLI::Range(1, kMaxDim));
    cmd->add_option("--mu", a.mu, "Poisson density of A-particles");
    cmd->add_option("--rate", a.rate, "common jump rate D");
    cmd->add_option("--horizon", a.horizon, "run horizon (seconds)");
    cmd->add_option("--box", a.box, "box half-width L (0 = guard rule)");
    cmd->add_option("--seed", a.seed, "master seed");
    cmd->add_option("--mode", a.mode, "process variant")
        ->check(CLI::IsMember({"original", "full", "half"}));
    cmd->add_option("--u", a.u_text, "direction components, comma separated");
    cmd->add_option("--r", a.r, "half-space offset (mode=half)");
    cmd->add_option("--c-guard", a.c_guard, "containment guard constant");
    cmd->add_option("--workers", a.workers,
                    "worker threads (0 = SHAPELAB_WORKERS or hardware)");
    cmd->add_option("--out", a.out, "output directory");
    cmd->add_option("--config", a.config_path,
                    "flat key=value config; flags override");
}

/// Backfills options not given on the command line from a key=value
/// file; keys without a matching flag (manifest extras) are ignored.
void apply_config_file(CLI::App* cmd, const std::string& path) {
    for (const auto& [key, value] : parse_config(path)) {
        if (key == "config") continue;
        std::string name = "--" + key;
        for (auto& c : name)
            if (c == '_') c = '-';
        CLI::Option* opt = nullptr;
        try {
            opt = cmd->get_option(name);
        } catch (const CLI::OptionNotFound&) {
            continue;
        }
        if (opt->count() == 0) {
            opt->add_result(value);
            opt->run_callback();
        }
    }
}

ProcessSpec make_spec(const CommonArgs& a) {
    ProcessSpec spec;
    spec.d = a.dim;
    spec.mu_a = a.mu;
    spec.rate = a.rate;
    spec.horizon = a.horizon;
    spec.box_l = a.box;
    spec.c_guard = a.c_guard;
    spec.seed = MasterSeed{a.seed};
    if (a.mode == "full") {
        spec.mode = ProcessMode::full_space();
    } else if (a.mode == "half") {
        if (a.u_text.empty())
            throw ConfigError("--mode half requires --u");
        spec.mode = ProcessMode::half_space(parse_direction(a.u_text), a.r);
    } else {
        spec.mode = ProcessMode::original({{LatticePoint::origin(a.dim), 1}});
    }
    spec.validate();
    return spec;
}

int cmd_simulate(const CommonArgs& a, bool event_log) {
    ProcessSpec spec = make_spec(a);
    auto files = write_simulation_run(spec, a.out, event_log);
    std::cout << "wrote " << a.out << "/{";
    for (std::size_t i = 0; i < files.size(); ++i)
        std::cout << (i ? "," : "") << files[i];
    std::cout << "}\n";
    std::ifstream summary(a.out + "/summary.txt");
    std::string line;
    while (std::getline(summary, line)) {
        std::cout << "  " << line << '\n';
        if (line == "containment_ok=0")
            std::cerr << "warning: containment breach, run flagged\n";
    }
    return 0;
}

int cmd_estimate(const CommonArgs& a, double eta, int n0, int kmax,
                 int replicas, int grid_m) {
    Schedule schedule = geometric_schedule(eta, n0, kmax);
    CommonArgs args = a;
    args.horizon = schedule.times.back();
    ProcessSpec spec = make_spec(args);

    auto dirs = direction_grid(spec.d, grid_m);
    auto estimates = estimate_lambdas(dirs, spec, schedule, replicas,
                                      a.workers);

    std::filesystem::create_directories(a.out);
    Manifest m = make_manifest(spec);
    m.set("eta", eta);
    m.set("n0", n0);
    m.set("kmax", kmax);
    m.set("replicas", replicas);
    m.set("grid", grid_m);
    const std::string hex = m.hash_hex();
    m.write(a.out + "/manifest.txt");
    write_lambda_csv(a.out + "/lambda.csv", hex, estimates);

    std::vector<double> lambdas;
    for (const auto& e : estimates) lambdas.push_back(e.point);
    ShapeEstimate shape = build_shape(dirs, lambdas);
    write_shape_document(a.out + "/shape.txt", hex, shape, estimates);
    if (spec.d == 2)
        write_shape_svg(a.out + "/shape.svg", hex, shape, {});
    std::cout << "wrote " << a.out << "/{manifest.txt,lambda.csv,shape.txt"
              << (spec.d == 2 ? ",shape.svg" : "") << "}\n";
    for (std::size_t j = 0; j < estimates.size(); ++j)
        std::cout << "  lambda[" << j << "] = " << g17(estimates[j].point)
                  << " +- " << g17(estimates[j].stderr_mean) << '\n';
    return 0;
}

int cmd_verify(const CommonArgs& a, const std::string& only, double t,
               double s, double r1, double r2, double shrink,
               double lambda_min, double c5, double c6, int replicas,
               double eta, int n0, int kmax, double c_upper) {
    ProcessSpec tmpl = make_spec(a);
    Direction u = a.u_text.empty()
                      ? Direction(Vec::from(unit_step(1, a.dim)))
                      : parse_direction(a.u_text);

    std::vector<PropertyReport> reports;
    auto want = [&](const char* id) { return only == "all" || only == id; };
    if (want("coupling"))
        reports.push_back(
            check_monotone_coupling(tmpl, replicas, nullptr, a.workers));
    if (want("nesting"))
        reports.push_back(
            check_halfspace_nesting(tmpl, u, r1, r2, replicas, a.workers));
    if (want("poisson"))
        reports.push_back(
            check_poisson_marginals(tmpl, t, replicas, a.workers));
    if (want("noafront"))
        reports.push_back(check_no_A_behind_front(tmpl, t, shrink, lambda_min,
                                                  replicas, a.workers));
    if (want("superconv"))
        reports.push_back(check_superconvolutivity(tmpl, u, s, t, replicas, c5,
                                                   c6, a.workers));
    if (want("speed")) {
        Schedule schedule = geometric_schedule(eta, n0, kmax);
        reports.push_back(check_positive_speed(tmpl, u, schedule, replicas,
                                               c_upper, c5, a.workers));
    }
    if (reports.empty()) {
        std::cerr << "unknown property '" << only
                  << "' (coupling|nesting|poisson|noafront|superconv|speed|"
                     "all)\n";
        return 2;
    }

    bool all_pass = true;
    for (const auto& rep : reports) {
        std::cout << rep.to_text();
        all_pass = all_pass && rep.passed();
    }
    if (!a.out.empty()) {
        std::filesystem::create_directories(a.out);
        Manifest m = make_manifest(tmpl);
        m.set("suite", only);
        m.set("replicas", replicas);
        m.write(a.out + "/manifest.txt");
        write_property_csv(a.out + "/properties.csv", m.hash_hex(), reports);
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"event-driven A/B infection model laboratory"};
    app.require_subcommand(1);

    CommonArgs sim_args, est_args, ver_args;
    bool event_log = false;
    double eta = 1.0, s = 40.0, t = 8.0, r1 = 2.0, r2 = 8.0;
    double shrink = 0.5, lambda_min = 0.2, c5 = 1.0, c6 = 4.0, c_upper = 2.0;
    int n0 = 25, kmax = 3, replicas = 16, grid_m = 16;
    std::string only = "all";

    auto* sim = app.add_subcommand("simulate", "one run -> run directory");
    add_common(sim, sim_args);
    sim->add_flag("--event-log", event_log, "record the binary event log");

    auto* est = app.add_subcommand("estimate",
                                   "directional speeds and the limit shape");
    add_common(est, est_args);
    est->add_option("--eta", eta, "geometric schedule growth factor");
    est->add_option("--n0", n0, "first schedule time");
    est->add_option("--kmax", kmax, "last schedule index");
    est->add_option("--replicas", replicas, "replicas per direction");
    est->add_option("--grid", grid_m, "direction count (d=2)");

    auto* ver = app.add_subcommand("verify", "property suite");
    add_common(ver, ver_args);
    ver->add_option("--only", only, "property id or 'all'");
    ver->add_option("--replicas", replicas, "replicas per check");
    ver->add_option("--t", t, "snapshot / bank time");
    ver->add_option("--s", s, "superconvolutivity first bank time");
    ver->add_option("--r1", r1, "inner half-space offset");
    ver->add_option("--r2", r2, "outer half-space offset");
    ver->add_option("--shrink", shrink, "interior cube shrink factor");
    ver->add_option("--lambda-min", lambda_min, "front speed lower bound");
    ver->add_option("--c5", c5, "half-space offset constant");
    ver->add_option("--c6", c6, "superconvolutivity horizon constant");
    ver->add_option("--c-upper", c_upper, "upper speed gate constant");
    ver->add_option("--eta", eta, "geometric schedule growth factor");
    ver->add_option("--n0", n0, "first schedule time");
    ver->add_option("--kmax", kmax, "last schedule index");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed() && !sim_args.config_path.empty())
            apply_config_file(sim, sim_args.config_path);
        if (est->parsed() && !est_args.config_path.empty())
            apply_config_file(est, est_args.config_path);
        if (ver->parsed() && !ver_args.config_path.empty())
            apply_config_file(ver, ver_args.config_path);
        if (sim->parsed()) return cmd_simulate(sim_args, event_log);
        if (est->parsed())
            return cmd_estimate(est_args, eta, n0, kmax, replicas, grid_m);
        return cmd_verify(ver_args, only, t, s, r1, r2, shrink, lambda_min, c5,
                          c6, replicas, eta, n0, kmax, c_upper);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
}
