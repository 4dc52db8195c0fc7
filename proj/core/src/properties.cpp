#include "shapelab/properties.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "shapelab/observables.hpp"
#include "shapelab/stats.hpp"
#include "shapelab/workers.hpp"

namespace shapelab {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string echo_spec(const ProcessSpec& s) {
    return "d=" + std::to_string(s.d) + " mu_a=" + fmt(s.mu_a) +
           " rate=" + fmt(s.rate) + " box=" + std::to_string(s.effective_box()) +
           " seed=" + std::to_string(s.seed.v);
}

}  // namespace

void PropertyReport::note(const std::string& key, double value) {
    evidence.emplace_back(key, fmt(value));
}

std::string PropertyReport::to_text() const {
    std::string out = "[" + id + "] ";
    switch (verdict) {
        case Verdict::Pass: out += "PASS"; break;
        case Verdict::Fail: out += "FAIL"; break;
        case Verdict::Flagged: out += "FLAGGED"; break;
    }
    out += "\n  config: " + config_echo + "\n";
    for (const auto& [k, v] : evidence) out += "  " + k + ": " + v + "\n";
    return out;
}

// ---------------------------------------------------------------------------

namespace {

/// Nearest occupied site to the origin other than `exclude`, by the same
/// shell-then-lex order the designated-site rule uses.
std::optional<LatticePoint> second_occupied_site(const InitialState& init,
                                                 const LatticePoint& exclude) {
    std::optional<LatticePoint> best;
    for (const auto& p : init.pos0) {
        if (p == exclude) continue;
        if (!best || p.norm_inf() < best->norm_inf() ||
            (p.norm_inf() == best->norm_inf() && lex_less(p, *best)))
            best = p;
    }
    return best;
}

std::vector<std::uint32_t> ordinals_at(const InitialState& init,
                                       const LatticePoint& site) {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < init.pos0.size(); ++i)
        if (init.pos0[i] == site) out.push_back(i);
    return out;
}

bool is_subset(std::vector<std::uint32_t> a, std::vector<std::uint32_t> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

PropertyReport check_monotone_coupling(const ProcessSpec& tmpl, int replicas,
                                       LayerPairGen gen, int workers) {
    PropertyReport rep;
    rep.id = "monotone_coupling";
    rep.config_echo = echo_spec(tmpl) + " replicas=" + std::to_string(replicas);

    if (!gen) {
        gen = [](const InitialState& init) {
            LayerSpec small, large;
            small.initial_b = init.designated;
            large.initial_b = init.designated;
            if (!init.designated_sites.empty()) {
                auto second =
                    second_occupied_site(init, init.designated_sites.front());
                if (second) {
                    auto extra = ordinals_at(init, *second);
                    large.initial_b.insert(large.initial_b.end(), extra.begin(),
                                           extra.end());
                }
            }
            return std::make_pair(small, large);
        };
    }

    struct Out {
        bool ok = true;
        bool strict = false;
        bool flagged = false;
        std::string witness;
    };
    std::vector<Out> outs(replicas);
    parallel_for(
        static_cast<std::size_t>(replicas),
        [&](std::size_t r) {
            ProcessSpec spec = tmpl;
            spec.seed = substream(tmpl.seed, "coupling-" + std::to_string(r));
            InitialState init = build_initial_state(spec);
            auto [small, large] = gen(init);
            if (!is_subset(small.initial_b, large.initial_b))
                throw ConfigError("check_monotone_coupling: pair not nested");
            auto res = run(spec, init, {small, large});
            outs[r].flagged = !res.containment_ok();
            const auto& t1 = res.layers[0].theta;
            const auto& t2 = res.layers[1].theta;
            for (std::size_t i = 0; i < t1.size(); ++i) {
                if (t2[i] > t1[i]) {
                    outs[r].ok = false;
                    outs[r].witness = "seed=" + std::to_string(spec.seed.v) +
                                      " particle=" + init.ids[i].origin.to_string() +
                                      "#" + std::to_string(init.ids[i].index) +
                                      " theta1=" + fmt(t1[i]) +
                                      " theta2=" + fmt(t2[i]);
                    break;
                }
                if (t2[i] < t1[i]) outs[r].strict = true;
            }
        },
        workers);

    int strict = 0, flagged = 0;
    bool all_ok = true;
    for (const auto& o : outs) {
        if (!o.ok) {
            all_ok = false;
            rep.note("witness", o.witness);
        }
        if (o.strict) ++strict;
        if (o.flagged) ++flagged;
    }
    rep.note("replicas", static_cast<double>(replicas));
    rep.note("strict_inequality_replicas", static_cast<double>(strict));
    rep.note("containment_flagged", static_cast<double>(flagged));
    rep.verdict = all_ok ? PropertyReport::Verdict::Pass
                         : PropertyReport::Verdict::Fail;
    return rep;
}

PropertyReport check_halfspace_nesting(const ProcessSpec& tmpl,
                                       const Direction& u, double r1, double r2,
                                       int replicas, int workers) {
    if (!(0 <= r1 && r1 <= r2))
        throw ConfigError("check_halfspace_nesting: need 0 <= r1 <= r2");
    PropertyReport rep;
    rep.id = "halfspace_nesting";
    rep.config_echo = echo_spec(tmpl) + " r1=" + fmt(r1) + " r2=" + fmt(r2) +
                      " replicas=" + std::to_string(replicas);

    struct Out {
        bool eligible = false;
        bool ok = true;
        bool flagged = false;
        std::string witness;
    };
    const int max_attempts = 2 * replicas;
    std::vector<Out> outs(max_attempts);
    std::atomic<int> eligible_count{0};

    parallel_for(
        static_cast<std::size_t>(max_attempts),
        [&](std::size_t r) {
            if (eligible_count.load() >= replicas) return;
            ProcessSpec spec = tmpl;
            spec.seed = substream(tmpl.seed, "nesting-" + std::to_string(r));
            spec.mode = std::isinf(r2) ? ProcessMode::full_space()
                                       : ProcessMode::half_space(u, r2);
            InitialState init = build_initial_state(spec);
            const LatticePoint x0 = init.designated_sites.front();
            if (x0.norm_inf() > r1 / std::sqrt(spec.d)) return;  // skipped
            outs[r].eligible = true;
            eligible_count.fetch_add(1);

            LayerSpec inner, outer;
            outer.initial_b = init.designated;
            inner.initial_b = init.designated;
            inner.active.assign(init.ids.size(), 0);
            HalfSpace s1{u, -r1};
            for (std::size_t i = 0; i < init.ids.size(); ++i)
                inner.active[i] = s1.contains(init.ids[i].origin);
            auto res = run(spec, init, {inner, outer});
            outs[r].flagged = !res.containment_ok();
            const auto& t1 = res.layers[0].theta;
            const auto& t2 = res.layers[1].theta;
            for (std::size_t i = 0; i < t1.size(); ++i) {
                if (t2[i] > t1[i]) {
                    outs[r].ok = false;
                    outs[r].witness =
                        "seed=" + std::to_string(spec.seed.v) + " particle=" +
                        init.ids[i].origin.to_string() + "#" +
                        std::to_string(init.ids[i].index);
                    break;
                }
            }
        },
        workers);

    int eligible = 0, flagged = 0, attempts = 0;
    bool all_ok = true;
    for (const auto& o : outs) {
        ++attempts;
        if (!o.eligible) continue;
        if (!o.ok) {
            all_ok = false;
            rep.note("witness", o.witness);
        }
        if (o.flagged) ++flagged;
        ++eligible;
        if (eligible >= replicas) break;
    }
    rep.note("eligible_replicas", static_cast<double>(eligible));
    rep.note("attempts", static_cast<double>(attempts));
    rep.note("skip_rate", attempts > 0
                              ? 1.0 - static_cast<double>(eligible) / attempts
                              : 0.0);
    rep.note("containment_flagged", static_cast<double>(flagged));
    rep.verdict = (all_ok && eligible >= replicas)
                      ? PropertyReport::Verdict::Pass
                      : PropertyReport::Verdict::Fail;
    return rep;
}

PropertyReport check_poisson_marginals(const ProcessSpec& tmpl, double t,
                                       int replicas, int workers) {
    PropertyReport rep;
    rep.id = "poisson_marginals";
    ProcessSpec base = tmpl;
    base.mode = ProcessMode::full_space();
    base.horizon = t;
    rep.config_echo =
        echo_spec(base) + " t=" + fmt(t) + " replicas=" + std::to_string(replicas);

    const int window = base.effective_box() / 2;
    struct Out {
        double pvalue = 0;
        double corr = 0;
        std::size_t npairs = 0;
        bool flagged = false;
    };
    std::vector<Out> outs(replicas);

    parallel_for(
        static_cast<std::size_t>(replicas),
        [&](std::size_t r) {
            ProcessSpec spec = base;
            spec.seed = substream(base.seed, "poisson-" + std::to_string(r));
            SnapshotRequest snap;
            snap.times = {t};
            snap.fn = [&, window](double, const SimView& view) {
                CountField field = count_fields(view, 0);
                const int d = view.dim();
                std::vector<int> counts;
                std::vector<double> left, right;
                LatticePoint p = LatticePoint::origin(d);
                for (int i = 0; i < d; ++i) p.c[i] = -window;
                while (true) {
                    auto [na, nb] = field.at(p);
                    counts.push_back(na + nb);
                    if (p.c[0] < window) {
                        LatticePoint q = p;
                        ++q.c[0];
                        auto [qa, qb] = field.at(q);
                        left.push_back(na + nb);
                        right.push_back(qa + qb);
                    }
                    int i = d - 1;
                    while (i >= 0 && p.c[i] == window) {
                        p.c[i] = -window;
                        --i;
                    }
                    if (i < 0) break;
                    ++p.c[i];
                }
                outs[r].pvalue = poisson_gof_pvalue(counts, spec.mu_a);
                outs[r].corr = correlation(left, right);
                outs[r].npairs = left.size();
            };
            auto res = run(spec, {}, {snap});
            outs[r].flagged = !res.containment_ok();
        },
        workers);

    int clean = 0, p_ok = 0, corr_ok = 0, flagged = 0;
    for (const auto& o : outs) {
        if (o.flagged) {
            ++flagged;
            continue;
        }
        ++clean;
        if (o.pvalue > 1e-3) ++p_ok;
        if (std::abs(o.corr) <= 3.0 / std::sqrt(static_cast<double>(o.npairs)))
            ++corr_ok;
    }
    rep.note("clean_replicas", static_cast<double>(clean));
    rep.note("containment_flagged", static_cast<double>(flagged));
    rep.note("pvalue_pass_fraction", clean ? static_cast<double>(p_ok) / clean : 0);
    rep.note("corr_pass_fraction", clean ? static_cast<double>(corr_ok) / clean : 0);
    rep.note("significance", 1e-3);
    rep.verdict = (clean > 0 && p_ok >= 0.95 * clean && corr_ok >= 0.95 * clean)
                      ? PropertyReport::Verdict::Pass
                      : PropertyReport::Verdict::Fail;
    return rep;
}

PropertyReport check_no_A_behind_front(const ProcessSpec& tmpl, double t,
                                       double shrink, double lambda_min,
                                       int replicas, int workers) {
    PropertyReport rep;
    rep.id = "no_a_behind_front";
    ProcessSpec base = tmpl;
    base.mode = ProcessMode::full_space();
    base.horizon = t;
    const double radius = shrink * lambda_min * t / std::sqrt(base.d);
    rep.config_echo = echo_spec(base) + " t=" + fmt(t) + " shrink=" + fmt(shrink) +
                      " lambda_min=" + fmt(lambda_min) +
                      " cube_radius=" + fmt(radius);

    if (radius < 1.0) {
        rep.note("vacuous", "cube radius < 1");
        rep.verdict = PropertyReport::Verdict::Pass;
        return rep;
    }

    struct Out {
        int a_inside = 0;
        bool flagged = false;
    };
    std::vector<Out> outs(replicas);
    parallel_for(
        static_cast<std::size_t>(replicas),
        [&](std::size_t r) {
            ProcessSpec spec = base;
            spec.seed = substream(base.seed, "noA-" + std::to_string(r));
            SnapshotRequest snap;
            snap.times = {t};
            snap.fn = [&](double now, const SimView& view) {
                auto theta = view.theta(0);
                int count = 0;
                for (std::uint32_t i = 0; i < view.particle_count(); ++i)
                    if (theta[i] > now && view.position(i).norm_inf() <= radius)
                        ++count;
                outs[r].a_inside = count;
            };
            auto res = run(spec, {}, {snap});
            outs[r].flagged = !res.containment_ok();
        },
        workers);

    int clean = 0, zero = 0, flagged = 0;
    for (const auto& o : outs) {
        if (o.flagged) {
            ++flagged;
            continue;
        }
        ++clean;
        if (o.a_inside == 0) ++zero;
    }
    rep.note("clean_replicas", static_cast<double>(clean));
    rep.note("containment_flagged", static_cast<double>(flagged));
    rep.note("zero_fraction", clean ? static_cast<double>(zero) / clean : 0);
    rep.note("threshold", 0.90);
    rep.verdict = (clean > 0 && zero >= 0.90 * clean)
                      ? PropertyReport::Verdict::Pass
                      : PropertyReport::Verdict::Fail;
    return rep;
}

namespace {

/// Bank of h*(horizon, u) samples in P^h(u, -offset); flagged replicas
/// come back as NaN.
std::vector<double> hstar_bank(const ProcessSpec& tmpl, const Direction& u,
                               double horizon, double offset,
                               const std::string& label, int replicas,
                               int workers) {
    std::vector<double> out(replicas,
                            std::numeric_limits<double>::quiet_NaN());
    parallel_for(
        static_cast<std::size_t>(replicas),
        [&](std::size_t r) {
            ProcessSpec spec = tmpl;
            spec.horizon = horizon;
            spec.box_l = 0;  // re-derive the guard box for this horizon
            spec.mode = ProcessMode::half_space(u, offset);
            spec.seed = substream(tmpl.seed, label + "-" + std::to_string(r));
            double extent = 0;
            SnapshotRequest snap;
            snap.times = {horizon};
            snap.fn = [&](double, const SimView& view) {
                extent = directional_extent(view, 0, u);
            };
            auto res = run(spec, {}, {snap});
            if (res.containment_ok()) out[r] = extent;
        },
        workers);
    return out;
}

}  // namespace

PropertyReport check_superconvolutivity(const ProcessSpec& tmpl,
                                        const Direction& u, double s, double t,
                                        int replicas_per_bank, double c5,
                                        double c6, int workers) {
    if (!(s <= t)) throw ConfigError("check_superconvolutivity: need s <= t");
    if (replicas_per_bank < 200)
        throw InsufficientReplicas("check_superconvolutivity: < 200 per bank");
    PropertyReport rep;
    rep.id = "superconvolutivity";
    const double big_t = s + t + c6 * kappa(t);
    rep.config_echo = echo_spec(tmpl) + " s=" + fmt(s) + " t=" + fmt(t) +
                      " c5=" + fmt(c5) + " c6=" + fmt(c6) +
                      " T=" + fmt(big_t) +
                      " bank=" + std::to_string(replicas_per_bank);

    auto lhs = hstar_bank(tmpl, u, big_t, c5 * kappa(big_t), "sc-lhs",
                          replicas_per_bank, workers);
    auto b1 = hstar_bank(tmpl, u, s, c5 * kappa(s), "sc-b1", replicas_per_bank,
                         workers);
    auto b2 = hstar_bank(tmpl, u, t, c5 * kappa(t), "sc-b2", replicas_per_bank,
                         workers);

    std::vector<double> left, sums;
    for (double v : lhs)
        if (!std::isnan(v)) left.push_back(v);
    for (int i = 0; i < replicas_per_bank; ++i)
        if (!std::isnan(b1[i]) && !std::isnan(b2[i]))
            sums.push_back(b1[i] + b2[i]);
    if (left.empty() || sums.empty())
        throw AllReplicasFlagged("check_superconvolutivity: empty bank");

    double lo = std::min(*std::min_element(left.begin(), left.end()),
                         *std::min_element(sums.begin(), sums.end()));
    double hi = std::max(*std::max_element(left.begin(), left.end()),
                         *std::max_element(sums.begin(), sums.end()));
    auto survival = [](const std::vector<double>& xs, double alpha) {
        std::size_t c = 0;
        for (double x : xs)
            if (x >= alpha) ++c;
        return static_cast<double>(c) / xs.size();
    };
    const int grid = 41;
    bool ok = true;
    double worst_margin = kNever;
    for (int g = 0; g < grid; ++g) {
        double alpha = lo + (hi - lo) * g / (grid - 1);
        double sl = survival(left, alpha);
        double sr = survival(sums, alpha);
        double se_l = std::sqrt(sl * (1 - sl) / left.size());
        double se_r = std::sqrt(sr * (1 - sr) / sums.size());
        double margin = (sl + 2 * se_l) - (sr - 2 * se_r);
        worst_margin = std::min(worst_margin, margin);
        if (margin < 0) ok = false;
    }
    rep.note("lhs_samples", static_cast<double>(left.size()));
    rep.note("sum_samples", static_cast<double>(sums.size()));
    rep.note("grid_points", grid);
    rep.note("worst_margin", worst_margin);
    rep.note("lhs_mean", moments(left).mean);
    rep.note("sum_mean", moments(sums).mean);
    rep.verdict =
        ok ? PropertyReport::Verdict::Pass : PropertyReport::Verdict::Fail;
    return rep;
}

PropertyReport check_positive_speed(const ProcessSpec& tmpl, const Direction& u,
                                    const Schedule& schedule, int replicas,
                                    double c_upper, double c5, int workers) {
    PropertyReport rep;
    rep.id = "positive_speed";
    const double n_last = schedule.times.back();
    rep.config_echo = echo_spec(tmpl) + " n_last=" + fmt(n_last) +
                      " c5=" + fmt(c5) + " c_upper=" + fmt(c_upper);

    auto bank = hstar_bank(tmpl, u, n_last, c5 * kappa(n_last), "speed",
                           replicas, workers);
    std::vector<double> speeds;
    int flagged = 0;
    for (double v : bank) {
        if (std::isnan(v))
            ++flagged;
        else
            speeds.push_back(v / n_last);
    }
    if (speeds.empty())
        throw AllReplicasFlagged("check_positive_speed: no clean replica");
    double p5 = percentile(speeds, 0.05);
    double p95 = percentile(speeds, 0.95);
    double upper_gate = 2.0 * std::sqrt(tmpl.d) * c_upper;
    rep.note("clean_replicas", static_cast<double>(speeds.size()));
    rep.note("containment_flagged", static_cast<double>(flagged));
    rep.note("p5", p5);
    rep.note("p95", p95);
    rep.note("upper_gate", upper_gate);
    rep.verdict = (p5 > 0 && p95 < upper_gate) ? PropertyReport::Verdict::Pass
                                               : PropertyReport::Verdict::Fail;
    return rep;
}

}  // namespace shapelab
