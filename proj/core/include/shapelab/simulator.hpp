#pragma once

// Event-driven core.  A run advances one shared ensemble of particle
// paths by exponential-clock jump events and propagates infection types
// through any number of "type layers" riding the same event stream.
// Runs are bit-deterministic given (spec, layers).

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "shapelab/geometry.hpp"
#include "shapelab/rng.hpp"

namespace shapelab {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

struct ProcessMode {
    enum class Kind { Original, FullSpace, HalfSpace, StartedAt };

    Kind kind = Kind::FullSpace;

    // Original: B-particles appended at these sites at time 0.
    std::vector<std::pair<LatticePoint, int>> added_b;

    // HalfSpace (and StartedAt over a half-space base): initial field
    // restricted to S(u,-r).  Standalone half-space starts require r >= 0.
    std::optional<Direction> u;
    double r = 0;

    // StartedAt: type reset at (start_x, start_time) over the base field.
    Kind base = Kind::FullSpace;
    LatticePoint start_x;
    double start_time = 0;

    static ProcessMode original(std::vector<std::pair<LatticePoint, int>> b) {
        ProcessMode m;
        m.kind = Kind::Original;
        m.added_b = std::move(b);
        return m;
    }
    static ProcessMode full_space() { return ProcessMode{}; }
    static ProcessMode half_space(Direction dir, double r) {
        ProcessMode m;
        m.kind = Kind::HalfSpace;
        m.u = dir;
        m.r = r;
        return m;
    }
    static ProcessMode started_at(ProcessMode base, LatticePoint x, double t) {
        ProcessMode m = base;
        m.base = base.kind;
        m.kind = Kind::StartedAt;
        m.start_x = x;
        m.start_time = t;
        return m;
    }
};

/// L >= ceil(c_guard * horizon) + 10 * ceil(sqrt(horizon)).
int guard_box(double horizon, double c_guard = 4.0);
/// Width of the monitored boundary band, 10 * ceil(sqrt(horizon)).
int guard_margin(double horizon);

struct ProcessSpec {
    int d = 1;
    double mu_a = 1.0;
    double rate = 1.0;      // common jump rate D (D_A = D_B by construction)
    double horizon = 1.0;   // seconds
    int box_l = 0;          // 0 = materialize the guard rule default
    ProcessMode mode;
    MasterSeed seed;
    double c_guard = 4.0;

    int effective_box() const {
        return box_l > 0 ? box_l : guard_box(horizon, c_guard);
    }
    /// Throws ConfigError on invalid fields (including box < guard rule).
    void validate() const;
};

struct InitialState {
    int d = 0;
    std::vector<ParticleId> ids;        // ordinal -> stable identity
    std::vector<LatticePoint> pos0;     // ordinal -> site at time 0
    std::vector<std::uint32_t> designated;       // ordinals typed B at time 0
    std::vector<LatticePoint> designated_sites;  // their sites (deduplicated)
};

/// Places particles per initial_count over C(L) (intersected with the
/// mode's half-space restriction) and resolves the designated B site(s).
/// Throws NoOccupiedSite if the shell search exhausts C(L).
InitialState build_initial_state(const ProcessSpec& spec);

/// Type reset a la "started at (x,t)": at `time`, the occupants of the
/// site nearest to `x` (shell + lex rule, restricted to particles whose
/// origin lies in `origin_restriction` when present) become B, every
/// other particle becomes A.
struct ResetSpec {
    double time = 0;
    LatticePoint x;
    std::optional<HalfSpace> origin_restriction;
};

struct LayerSpec {
    std::vector<std::uint32_t> initial_b;
    // Per-ordinal participation mask; empty = all particles participate.
    // Inactive particles neither infect nor get infected in this layer.
    std::vector<std::uint8_t> active;
    std::optional<ResetSpec> reset;
};

inline LayerSpec reset_types_at(double time, LatticePoint x,
                                std::optional<HalfSpace> restriction = {}) {
    LayerSpec l;
    l.reset = ResetSpec{time, x, std::move(restriction)};
    return l;
}

struct JumpEvent {
    double time;
    std::uint32_t who;
    LatticePoint from, to;
};

struct TypeTimeline {
    std::vector<double> theta;  // switching times, kNever if never infected
    std::vector<std::pair<LatticePoint, double>> visited;  // first B-visit
    bool containment_ok = true;
    std::optional<LatticePoint> designated_site;  // resolved for reset layers
};

namespace detail {
struct Sim;
}

/// Read-only view of the live simulation, handed to snapshot listeners.
class SimView {
  public:
    int dim() const;
    double now() const;
    std::size_t particle_count() const;
    LatticePoint position(std::uint32_t i) const;
    const ParticleId& id(std::uint32_t i) const;
    int layer_count() const;
    std::span<const double> theta(int layer) const;
    bool active(int layer, std::uint32_t i) const;
    bool layer_started(int layer) const;  // false before a reset layer fires
    /// First B-visit time of a site in a layer, if any.
    std::optional<double> visited_time(int layer, const LatticePoint& x) const;
    /// Occupants of one site at the current time.
    std::vector<std::uint32_t> occupants(const LatticePoint& x) const;
    void for_each_occupied_site(
        const std::function<void(const LatticePoint&,
                                 const std::vector<std::uint32_t>&)>& fn) const;

    explicit SimView(const detail::Sim* s) : sim_(s) {}

  private:
    const detail::Sim* sim_;
};

struct SnapshotRequest {
    std::vector<double> times;  // must be sorted ascending, <= horizon
    std::function<void(double, const SimView&)> fn;
};

struct RunOptions {
    bool record_events = false;
    std::size_t max_recorded_events = 1'000'000;
};

struct RunResult {
    InitialState init;
    std::vector<LatticePoint> final_pos;
    double final_time = 0;
    std::vector<TypeTimeline> layers;
    std::uint64_t event_count = 0;
    std::vector<JumpEvent> events;  // populated when record_events

    bool containment_ok() const {
        for (const auto& l : layers)
            if (!l.containment_ok) return false;
        return true;
    }
};

/// Runs with an explicit prebuilt initial state (layer ordinals refer to it).
RunResult run(const ProcessSpec& spec, const InitialState& init,
              std::vector<LayerSpec> layers,
              std::vector<SnapshotRequest> snapshots = {},
              const RunOptions& options = {});

/// Convenience: builds the initial state and, when `layers` is empty,
/// derives the single default layer from the process mode.
RunResult run(const ProcessSpec& spec, std::vector<LayerSpec> layers = {},
              std::vector<SnapshotRequest> snapshots = {},
              const RunOptions& options = {});

/// D * horizon * mu_A * |C(L) cap restriction| (diagnostic).
double expected_event_count(const ProcessSpec& spec);
/// Same identity over an explicit unrestricted box (L = 0 is one site).
double expected_event_count(int d, double mu_a, double rate, double horizon,
                            int box_l);

/// Shell-then-lex nearest-occupied search around x.  `occupied` decides
/// site eligibility; throws NoOccupiedSite past max_shell.
LatticePoint find_nearest_occupied(
    const LatticePoint& x, int max_shell,
    const std::function<bool(const LatticePoint&)>& occupied);

/// Infection propagation over an explicit, time-sorted event list.
/// Shares the infection rule with the live loop; used by the hand-trace
/// oracle and by event-log tooling.
struct ReplayResult {
    std::vector<double> theta;
    std::vector<std::pair<LatticePoint, double>> visited;
};
ReplayResult replay_infection(int d, const std::vector<LatticePoint>& pos0,
                              const std::vector<std::uint32_t>& initial_b,
                              const std::vector<JumpEvent>& events);

}  // namespace shapelab
