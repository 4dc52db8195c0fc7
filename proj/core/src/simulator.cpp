#include "shapelab/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "shapelab/site_map.hpp"

namespace shapelab {

namespace detail {

struct Sim {
    int d = 1;
    double rate = 1, horizon = 0;
    int box_l = 0, margin = 0;
    double now = 0;
    const InitialState* init = nullptr;

    std::vector<std::int32_t> pos;  // d per particle
    std::vector<std::uint64_t> pkey;
    std::vector<std::uint64_t> cursor;
    std::vector<std::uint8_t> pending_dir;

    SiteMap<std::int32_t> heads{1024};  // packed site -> first occupant or -1
    std::vector<std::int32_t> next_in_site;

    struct Layer {
        std::vector<double> theta;
        SiteMap<std::int32_t> bcount{256};
        SiteMap<double> visited{256};
        std::vector<std::uint8_t> active;  // empty = all
        bool containment_ok = true;
        std::optional<ResetSpec> reset;
        bool started = false;
        std::optional<LatticePoint> designated;
    };
    std::vector<Layer> layers;

    std::size_t n() const { return pos.size() / d; }

    LatticePoint site_of(std::uint32_t i) const {
        LatticePoint p = LatticePoint::origin(d);
        for (int k = 0; k < d; ++k) p.c[k] = pos[i * d + k];
        return p;
    }
    std::uint64_t key_of(std::uint32_t i) const {
        return pack_coords(&pos[i * d], d);
    }
    bool layer_active(const Layer& l, std::uint32_t i) const {
        return l.active.empty() || l.active[i];
    }
};

}  // namespace detail

using detail::Sim;

// ---------------------------------------------------------------------------
// SimView

int SimView::dim() const { return sim_->d; }
double SimView::now() const { return sim_->now; }
std::size_t SimView::particle_count() const { return sim_->n(); }
LatticePoint SimView::position(std::uint32_t i) const { return sim_->site_of(i); }
const ParticleId& SimView::id(std::uint32_t i) const { return sim_->init->ids[i]; }
int SimView::layer_count() const { return static_cast<int>(sim_->layers.size()); }
std::span<const double> SimView::theta(int layer) const {
    return sim_->layers[layer].theta;
}
bool SimView::active(int layer, std::uint32_t i) const {
    return sim_->layer_active(sim_->layers[layer], i);
}
bool SimView::layer_started(int layer) const { return sim_->layers[layer].started; }
std::optional<double> SimView::visited_time(int layer, const LatticePoint& x) const {
    const double* t = sim_->layers[layer].visited.find(
        detail::pack_coords(x.c.data(), sim_->d));
    if (!t) return std::nullopt;
    return *t;
}
std::vector<std::uint32_t> SimView::occupants(const LatticePoint& x) const {
    std::vector<std::uint32_t> out;
    const std::int32_t* head =
        sim_->heads.find(detail::pack_coords(x.c.data(), sim_->d));
    if (!head) return out;
    for (std::int32_t j = *head; j >= 0; j = sim_->next_in_site[j])
        out.push_back(static_cast<std::uint32_t>(j));
    return out;
}
void SimView::for_each_occupied_site(
    const std::function<void(const LatticePoint&,
                             const std::vector<std::uint32_t>&)>& fn) const {
    std::vector<std::uint32_t> occ;
    sim_->heads.for_each([&](std::uint64_t key, const std::int32_t& head) {
        if (head < 0) return;
        occ.clear();
        for (std::int32_t j = head; j >= 0; j = sim_->next_in_site[j])
            occ.push_back(static_cast<std::uint32_t>(j));
        fn(detail::unpack_site(key, sim_->d), occ);
    });
}

// ---------------------------------------------------------------------------
// Spec validation and initial state

int guard_box(double horizon, double c_guard) {
    return static_cast<int>(std::ceil(c_guard * horizon)) +
           10 * static_cast<int>(std::ceil(std::sqrt(horizon)));
}

int guard_margin(double horizon) {
    return 10 * static_cast<int>(std::ceil(std::sqrt(horizon)));
}

void ProcessSpec::validate() const {
    if (d < 1 || d > kMaxDim) throw ConfigError("spec: dimension out of range");
    if (!(mu_a > 0)) throw ConfigError("spec: mu_a must be positive");
    if (!(rate > 0)) throw ConfigError("spec: rate must be positive");
    if (!(horizon >= 0)) throw ConfigError("spec: horizon must be nonnegative");
    // box_l == 0 materializes the guard rule; an explicit box is taken
    // as-is (the containment monitor flags any breach).
    if (box_l < 0) throw ConfigError("spec: box must be positive");
    if (mode.kind == ProcessMode::Kind::HalfSpace) {
        if (!mode.u) throw ConfigError("spec: half-space mode needs a direction");
        if (mode.r < 0)
            throw ConfigError("spec: standalone half-space starts need r >= 0");
        if (mode.u->dim() != d) throw ConfigError("spec: direction dimension");
    }
    if (mode.kind == ProcessMode::Kind::StartedAt &&
        mode.base == ProcessMode::Kind::HalfSpace && !mode.u)
        throw ConfigError("spec: half-space base needs a direction");
}

namespace {

std::optional<HalfSpace> field_restriction(const ProcessSpec& spec) {
    const auto& m = spec.mode;
    bool half = m.kind == ProcessMode::Kind::HalfSpace ||
                (m.kind == ProcessMode::Kind::StartedAt &&
                 m.base == ProcessMode::Kind::HalfSpace);
    if (!half) return std::nullopt;
    return HalfSpace{*m.u, -m.r};
}

/// Iterate all sites of C(L) in lex order.
template <class Fn>
void for_each_box_site(int box_l, int d, Fn&& fn) {
    LatticePoint p = LatticePoint::origin(d);
    for (int i = 0; i < d; ++i) p.c[i] = -box_l;
    while (true) {
        fn(p);
        int i = d - 1;
        while (i >= 0 && p.c[i] == box_l) {
            p.c[i] = -box_l;
            --i;
        }
        if (i < 0) return;
        ++p.c[i];
    }
}

}  // namespace

LatticePoint find_nearest_occupied(
    const LatticePoint& x, int max_shell,
    const std::function<bool(const LatticePoint&)>& occupied) {
    for (int k = 0; k <= max_shell; ++k) {
        for (const auto& off : shell_sites(k, x.dim)) {
            LatticePoint site = x + off;
            if (occupied(site)) return site;
        }
    }
    throw NoOccupiedSite("no occupied site within shell bound " +
                         std::to_string(max_shell) + " of " + x.to_string());
}

InitialState build_initial_state(const ProcessSpec& spec) {
    spec.validate();
    const int d = spec.d;
    const int box = spec.effective_box();
    const auto restr = field_restriction(spec);
    const MasterSeed init_seed = substream(spec.seed, "init");

    InitialState st;
    st.d = d;
    // first ordinal and Poisson count per occupied site
    detail::SiteMap<std::pair<std::int32_t, std::int32_t>> placed(1 << 12);

    for_each_box_site(box, d, [&](const LatticePoint& x) {
        if (restr && !restr->contains(x)) return;
        int n = initial_count(init_seed, x, spec.mu_a);
        if (n == 0) return;
        placed.get_or_insert(detail::pack_coords(x.c.data(), d)) = {
            static_cast<std::int32_t>(st.ids.size()), n};
        for (int k = 0; k < n; ++k) {
            st.ids.push_back(ParticleId{x, static_cast<std::uint32_t>(k)});
            st.pos0.push_back(x);
        }
    });

    auto occupied = [&](const LatticePoint& s) {
        if (s.norm_inf() > box) return false;
        if (restr && !restr->contains(s)) return false;
        return placed.find(detail::pack_coords(s.c.data(), d)) != nullptr;
    };

    switch (spec.mode.kind) {
        case ProcessMode::Kind::Original: {
            for (const auto& [site, count] : spec.mode.added_b) {
                auto* p = placed.find(detail::pack_coords(site.c.data(), d));
                std::uint32_t base = p ? static_cast<std::uint32_t>(p->second) : 0;
                for (int k = 0; k < count; ++k) {
                    st.designated.push_back(
                        static_cast<std::uint32_t>(st.ids.size()));
                    st.ids.push_back(ParticleId{site, base + k});
                    st.pos0.push_back(site);
                }
                if (std::find(st.designated_sites.begin(),
                              st.designated_sites.end(),
                              site) == st.designated_sites.end())
                    st.designated_sites.push_back(site);
            }
            break;
        }
        case ProcessMode::Kind::FullSpace:
        case ProcessMode::Kind::HalfSpace: {
            LatticePoint x0 =
                find_nearest_occupied(LatticePoint::origin(d), box, occupied);
            auto* p = placed.find(detail::pack_coords(x0.c.data(), d));
            for (std::int32_t k = 0; k < p->second; ++k)
                st.designated.push_back(static_cast<std::uint32_t>(p->first + k));
            st.designated_sites.push_back(x0);
            break;
        }
        case ProcessMode::Kind::StartedAt:
            break;  // resolved at the reset time
    }
    return st;
}

double expected_event_count(const ProcessSpec& spec) {
    const auto restr = field_restriction(spec);
    const int box = spec.effective_box();
    std::uint64_t sites = 0;
    for_each_box_site(box, spec.d, [&](const LatticePoint& x) {
        if (restr && !restr->contains(x)) return;
        ++sites;
    });
    return spec.rate * spec.horizon * spec.mu_a * static_cast<double>(sites);
}

double expected_event_count(int d, double mu_a, double rate, double horizon,
                            int box_l) {
    double sites = 1;
    for (int i = 0; i < d; ++i) sites *= 2.0 * box_l + 1.0;
    return rate * horizon * mu_a * sites;
}

// ---------------------------------------------------------------------------
// Event loop

namespace {

struct HeapEntry {
    double t;
    std::uint32_t i;
};
// min-heap on (t, i); the ordinal tie-break pins determinism
inline bool heap_after(const HeapEntry& a, const HeapEntry& b) {
    return a.t > b.t || (a.t == b.t && a.i > b.i);
}

struct Action {
    double time;
    int kind;  // 0 = layer reset, 1 = snapshot
    int layer = -1;
    int snap = -1;
    std::function<void(double, const SimView&)>* fn = nullptr;
};

void record_visit(Sim::Layer& l, std::uint64_t key, double t) {
    double& v = l.visited.get_or_insert(key, kNever);
    if (t < v) v = t;
}

void check_containment(Sim& sim, Sim::Layer& l, const std::int32_t* coords) {
    std::int32_t m = 0;
    for (int k = 0; k < sim.d; ++k) m = std::max(m, std::abs(coords[k]));
    if (m > sim.box_l - sim.margin) l.containment_ok = false;
}

/// Make the initial B assignment of a layer consistent: every particle
/// co-located with a B at time t becomes B (coincidence at start).
void seed_layer(Sim& sim, Sim::Layer& l, const std::vector<std::uint32_t>& bs,
                double t) {
    for (std::uint32_t b : bs) l.theta[b] = t;
    for (std::uint32_t b : bs) {
        std::uint64_t key = sim.key_of(b);
        if (l.visited.find(key)) continue;  // site already swept
        record_visit(l, key, t);
        std::int32_t& count = l.bcount.get_or_insert(key, 0);
        const std::int32_t* head = sim.heads.find(key);
        for (std::int32_t j = *head; j >= 0; j = sim.next_in_site[j]) {
            if (!sim.layer_active(l, static_cast<std::uint32_t>(j))) continue;
            if (l.theta[j] <= t) {
                ++count;
            } else {
                l.theta[j] = t;
                ++count;
            }
        }
        check_containment(sim, l, &sim.pos[b * sim.d]);
    }
}

void fire_reset(Sim& sim, int layer_idx) {
    Sim::Layer& l = sim.layers[layer_idx];
    const ResetSpec& rs = *l.reset;
    auto eligible_site = [&](const LatticePoint& s) {
        std::uint64_t key = detail::pack_coords(s.c.data(), sim.d);
        const std::int32_t* head = sim.heads.find(key);
        if (!head) return false;
        for (std::int32_t j = *head; j >= 0; j = sim.next_in_site[j])
            if (sim.layer_active(l, static_cast<std::uint32_t>(j))) return true;
        return false;
    };
    int bound = sim.box_l + 4 * sim.margin;
    LatticePoint site = find_nearest_occupied(rs.x, bound, eligible_site);
    l.designated = site;
    std::vector<std::uint32_t> bs;
    std::uint64_t key = detail::pack_coords(site.c.data(), sim.d);
    for (std::int32_t j = *sim.heads.find(key); j >= 0; j = sim.next_in_site[j])
        if (sim.layer_active(l, static_cast<std::uint32_t>(j)))
            bs.push_back(static_cast<std::uint32_t>(j));
    seed_layer(sim, l, bs, rs.time);
    l.started = true;
}

}  // namespace

RunResult run(const ProcessSpec& spec, const InitialState& init,
              std::vector<LayerSpec> layer_specs,
              std::vector<SnapshotRequest> snapshots, const RunOptions& options) {
    spec.validate();
    const int d = spec.d;
    const std::size_t n = init.ids.size();

    Sim sim;
    sim.d = d;
    sim.rate = spec.rate;
    sim.horizon = spec.horizon;
    sim.box_l = spec.effective_box();
    sim.margin = guard_margin(spec.horizon);
    sim.init = &init;

    // positions + site lists
    sim.pos.resize(n * d);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) sim.pos[i * d + k] = init.pos0[i].c[k];
    sim.next_in_site.assign(n, -1);
    sim.heads = detail::SiteMap<std::int32_t>(n * 2 + 64);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t key = sim.key_of(static_cast<std::uint32_t>(i));
        std::int32_t& head = sim.heads.get_or_insert(key, -1);
        sim.next_in_site[i] = head;
        head = static_cast<std::int32_t>(i);
    }

    // per-particle streams
    const MasterSeed paths_seed = substream(spec.seed, "paths");
    sim.pkey.resize(n);
    sim.cursor.assign(n, 0);
    sim.pending_dir.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        sim.pkey[i] = particle_key(paths_seed, init.ids[i]);

    // layers
    if (layer_specs.empty()) throw ConfigError("run: no layers given");
    sim.layers.resize(layer_specs.size());
    for (std::size_t li = 0; li < layer_specs.size(); ++li) {
        auto& ls = layer_specs[li];
        auto& l = sim.layers[li];
        l.theta.assign(n, kNever);
        l.active = ls.active;
        if (!l.active.empty() && l.active.size() != n)
            throw ConfigError("run: active mask size mismatch");
        l.reset = ls.reset;
        if (l.reset && l.reset->origin_restriction && l.active.empty()) {
            l.active.assign(n, 0);
            for (std::size_t i = 0; i < n; ++i)
                l.active[i] =
                    l.reset->origin_restriction->contains(init.ids[i].origin);
        }
        for (std::uint32_t b : ls.initial_b)
            if (b >= n) throw ConfigError("run: initial_b ordinal out of range");
        if (!l.reset) {
            seed_layer(sim, l, ls.initial_b, 0.0);
            l.started = true;
        } else if (!ls.initial_b.empty()) {
            throw ConfigError("run: reset layer cannot carry initial_b");
        }
    }

    // merged action list: resets and snapshots, resets first on ties
    std::vector<Action> actions;
    for (std::size_t li = 0; li < sim.layers.size(); ++li)
        if (sim.layers[li].reset)
            actions.push_back(
                {sim.layers[li].reset->time, 0, static_cast<int>(li), -1, nullptr});
    for (std::size_t si = 0; si < snapshots.size(); ++si) {
        for (double t : snapshots[si].times) {
            if (t > spec.horizon + 1e-12)
                throw ConfigError("run: snapshot time past horizon");
            actions.push_back({t, 1, -1, static_cast<int>(si), &snapshots[si].fn});
        }
    }
    std::stable_sort(actions.begin(), actions.end(),
                     [](const Action& a, const Action& b) {
                         return a.time < b.time ||
                                (a.time == b.time && a.kind < b.kind);
                     });

    // event heap: every particle's first jump
    std::vector<HeapEntry> heap;
    heap.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        PathStream ps{sim.pkey[i], 0};
        Jump j = next_jump(ps, spec.rate, d);
        sim.cursor[i] = ps.cursor;
        sim.pending_dir[i] = static_cast<std::uint8_t>(j.dir_index);
        heap.push_back({j.wait, static_cast<std::uint32_t>(i)});
    }
    std::make_heap(heap.begin(), heap.end(), heap_after);

    RunResult result;
    result.init = init;
    SimView view(&sim);
    std::size_t ai = 0;
    auto run_action = [&](const Action& a) {
        sim.now = a.time;
        if (a.kind == 0)
            fire_reset(sim, a.layer);
        else
            (*a.fn)(a.time, view);
    };

    const std::size_t n_layers = sim.layers.size();
    while (!heap.empty()) {
        if (heap.front().t > spec.horizon) break;
        const double t = heap.front().t;
        const std::uint32_t i = heap.front().i;
        while (ai < actions.size() && actions[ai].time < t) run_action(actions[ai++]);
        std::pop_heap(heap.begin(), heap.end(), heap_after);
        heap.pop_back();
        sim.now = t;

        // move: unlink from the old site, link into the new one
        const std::uint64_t from_key = sim.key_of(i);
        std::int32_t* head = sim.heads.find(from_key);
        if (*head == static_cast<std::int32_t>(i)) {
            *head = sim.next_in_site[i];
        } else {
            std::int32_t j = *head;
            while (sim.next_in_site[j] != static_cast<std::int32_t>(i))
                j = sim.next_in_site[j];
            sim.next_in_site[j] = sim.next_in_site[i];
        }
        LatticePoint from;
        if (options.record_events) from = sim.site_of(i);
        const int axis = sim.pending_dir[i] / 2;
        sim.pos[i * d + axis] += (sim.pending_dir[i] % 2 == 0) ? -1 : 1;
        const std::uint64_t to_key = sim.key_of(i);
        std::int32_t& to_head = sim.heads.get_or_insert(to_key, -1);
        sim.next_in_site[i] = to_head;
        to_head = static_cast<std::int32_t>(i);

        // infection, per layer
        for (std::size_t li = 0; li < n_layers; ++li) {
            Sim::Layer& l = sim.layers[li];
            if (!l.started) continue;
            if (!sim.layer_active(l, i)) continue;
            if (l.theta[i] <= t) {
                // B mover: carry the type, infect co-located A's
                --l.bcount.get_or_insert(from_key, 0);
                std::int32_t& bc = l.bcount.get_or_insert(to_key, 0);
                ++bc;
                record_visit(l, to_key, t);
                for (std::int32_t j = to_head; j >= 0; j = sim.next_in_site[j]) {
                    if (j == static_cast<std::int32_t>(i)) continue;
                    if (l.theta[j] != kNever) continue;
                    if (!sim.layer_active(l, static_cast<std::uint32_t>(j)))
                        continue;
                    l.theta[j] = t;
                    ++bc;
                }
                if (l.containment_ok) check_containment(sim, l, &sim.pos[i * d]);
            } else {
                const std::int32_t* bc = l.bcount.find(to_key);
                if (bc && *bc > 0) {
                    l.theta[i] = t;
                    ++l.bcount.get_or_insert(to_key, 0);
                    record_visit(l, to_key, t);
                    if (l.containment_ok)
                        check_containment(sim, l, &sim.pos[i * d]);
                }
            }
        }

        if (options.record_events &&
            result.events.size() < options.max_recorded_events)
            result.events.push_back({t, i, from, sim.site_of(i)});
        ++result.event_count;

        // schedule the particle's next jump
        PathStream ps{sim.pkey[i], sim.cursor[i]};
        Jump jmp = next_jump(ps, spec.rate, d);
        sim.cursor[i] = ps.cursor;
        sim.pending_dir[i] = static_cast<std::uint8_t>(jmp.dir_index);
        heap.push_back({t + jmp.wait, i});
        std::push_heap(heap.begin(), heap.end(), heap_after);
    }
    while (ai < actions.size()) run_action(actions[ai++]);
    sim.now = spec.horizon;

    // package timelines
    result.final_time = spec.horizon;
    result.final_pos.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        result.final_pos[i] = sim.site_of(static_cast<std::uint32_t>(i));
    result.layers.resize(n_layers);
    for (std::size_t li = 0; li < n_layers; ++li) {
        auto& out = result.layers[li];
        out.theta = std::move(sim.layers[li].theta);
        out.containment_ok = sim.layers[li].containment_ok;
        out.designated_site = sim.layers[li].designated;
        sim.layers[li].visited.for_each([&](std::uint64_t key, const double& t) {
            out.visited.emplace_back(detail::unpack_site(key, d), t);
        });
    }
    return result;
}

RunResult run(const ProcessSpec& spec, std::vector<LayerSpec> layers,
              std::vector<SnapshotRequest> snapshots, const RunOptions& options) {
    InitialState init = build_initial_state(spec);
    if (layers.empty()) {
        LayerSpec l;
        if (spec.mode.kind == ProcessMode::Kind::StartedAt)
            l.reset = ResetSpec{spec.mode.start_time, spec.mode.start_x, {}};
        else
            l.initial_b = init.designated;
        layers.push_back(std::move(l));
    }
    return run(spec, init, std::move(layers), std::move(snapshots), options);
}

// ---------------------------------------------------------------------------
// Replay

ReplayResult replay_infection(int d, const std::vector<LatticePoint>& pos0,
                              const std::vector<std::uint32_t>& initial_b,
                              const std::vector<JumpEvent>& events) {
    const std::size_t n = pos0.size();
    ReplayResult out;
    out.theta.assign(n, kNever);

    detail::SiteMap<std::int32_t> bcount(64);
    detail::SiteMap<double> visited(64);
    std::vector<LatticePoint> pos = pos0;

    auto key_at = [&](const LatticePoint& p) {
        return detail::pack_coords(p.c.data(), d);
    };
    auto visit = [&](std::uint64_t key, double t) {
        double& v = visited.get_or_insert(key, kNever);
        if (t < v) v = t;
    };

    for (std::uint32_t b : initial_b) out.theta[b] = 0.0;
    for (std::uint32_t b : initial_b) {
        std::uint64_t key = key_at(pos[b]);
        std::int32_t& bc = bcount.get_or_insert(key, 0);
        visit(key, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (!(pos[j] == pos[b])) continue;
            if (out.theta[j] == kNever) out.theta[j] = 0.0;
        }
        bc = 0;  // recounted below to avoid double counting shared sites
    }
    for (std::size_t j = 0; j < n; ++j)
        if (out.theta[j] == 0.0) ++bcount.get_or_insert(key_at(pos[j]), 0);

    double last_t = 0;
    for (const auto& ev : events) {
        if (ev.time < last_t)
            throw ConfigError("replay_infection: events out of order");
        last_t = ev.time;
        if (!(pos[ev.who] == ev.from))
            throw ConfigError("replay_infection: inconsistent event log");
        pos[ev.who] = ev.to;
        std::uint64_t to_key = key_at(ev.to);
        if (out.theta[ev.who] <= ev.time) {
            --bcount.get_or_insert(key_at(ev.from), 0);
            std::int32_t& bc = bcount.get_or_insert(to_key, 0);
            ++bc;
            visit(to_key, ev.time);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == ev.who || out.theta[j] != kNever) continue;
                if (pos[j] == ev.to) {
                    out.theta[j] = ev.time;
                    ++bc;
                }
            }
        } else {
            const std::int32_t* bc = bcount.find(to_key);
            if (bc && *bc > 0) {
                out.theta[ev.who] = ev.time;
                ++bcount.get_or_insert(to_key, 0);
                visit(to_key, ev.time);
            }
        }
    }
    visited.for_each([&](std::uint64_t key, const double& t) {
        out.visited.emplace_back(detail::unpack_site(key, d), t);
    });
    return out;
}

}  // namespace shapelab
