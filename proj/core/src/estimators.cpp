#include "shapelab/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "shapelab/stats.hpp"
#include "shapelab/workers.hpp"

namespace shapelab {

Schedule geometric_schedule(double eta, int n0, int k_max) {
    if (!(eta > 0) || n0 < 1 || k_max < 1)
        throw ScheduleInfeasible("geometric_schedule: bad parameters");
    if (n0 * eta < 2.0)
        throw ScheduleInfeasible("geometric_schedule: n0*eta < 2");
    Schedule s;
    s.eta = eta;
    s.n0 = n0;
    double v = n0;
    for (int k = 0; k <= k_max; ++k) {
        int n = static_cast<int>(std::floor(v));
        if (s.times.empty() || n > s.times.back()) s.times.push_back(n);
        v *= (1.0 + eta);
    }
    for (std::size_t j = 0; j + 1 < s.times.size(); ++j) {
        double ratio = static_cast<double>(s.times[j + 1]) / s.times[j];
        if (!(ratio > 1.0) || ratio > 1.0 + eta + 1e-12)
            throw ScheduleInfeasible("geometric_schedule: ratio outside (1,1+eta]");
    }
    return s;
}

std::vector<LambdaEstimate> estimate_lambdas(const std::vector<Direction>& dirs,
                                             const ProcessSpec& tmpl,
                                             const Schedule& schedule,
                                             int replicas, int workers) {
    if (replicas < 8)
        throw InsufficientReplicas("estimate_lambda: need >= 8 replicas");
    if (schedule.times.empty()) throw ConfigError("estimate_lambda: empty schedule");
    const int n_last = schedule.times.back();
    if (tmpl.horizon + 1e-12 < n_last)
        throw ConfigError("estimate_lambda: horizon below last schedule time");

    std::vector<double> snap_times(schedule.times.begin(), schedule.times.end());
    struct ReplicaOut {
        std::vector<FrontRecord> records;
        bool flagged = false;
    };
    std::vector<ReplicaOut> outs(replicas);

    parallel_for(
        static_cast<std::size_t>(replicas),
        [&](std::size_t r) {
            ProcessSpec spec = tmpl;
            spec.mode = ProcessMode::full_space();
            spec.seed = substream(tmpl.seed, "replica-" + std::to_string(r));
            ExtentTracker tracker(0, dirs);
            auto result = run(spec, {}, {tracker.request(snap_times)});
            outs[r].records = tracker.records();
            outs[r].flagged = !result.containment_ok();
        },
        workers);

    // the index of the schedule time closest to n_last/2, for the Cauchy diag
    std::size_t mid = 0;
    for (std::size_t j = 0; j < schedule.times.size(); ++j)
        if (std::abs(schedule.times[j] - n_last / 2.0) <
            std::abs(schedule.times[mid] - n_last / 2.0))
            mid = j;

    std::vector<LambdaEstimate> estimates;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        LambdaEstimate est;
        est.u = dirs[k];
        est.n_last = n_last;
        std::vector<double> finals, gaps;
        for (int r = 0; r < replicas; ++r) {
            if (outs[r].flagged) {
                est.flagged_replicas.push_back(r);
                continue;
            }
            for (const auto& rec : outs[r].records) {
                if (!rec.defined[k]) continue;
                est.samples.push_back({r, rec.t, rec.extents[k] / rec.t});
            }
            const auto& last = outs[r].records.back();
            if (last.defined[k]) finals.push_back(last.extents[k] / last.t);
            const auto& m = outs[r].records[mid];
            if (last.defined[k] && m.defined[k] && mid + 1 < outs[r].records.size())
                gaps.push_back(
                    std::abs(last.extents[k] / last.t - m.extents[k] / m.t));
        }
        if (finals.empty())
            throw AllReplicasFlagged("estimate_lambda: no clean replica");
        Moments mo = moments(finals);
        est.point = mo.mean;
        est.stderr_mean = mo.stderr_mean;
        est.replicas_used = static_cast<int>(finals.size());
        est.cauchy_gap = gaps.empty() ? 0.0 : moments(gaps).mean;
        estimates.push_back(std::move(est));
    }
    return estimates;
}

LambdaEstimate estimate_lambda(const Direction& u, const ProcessSpec& tmpl,
                               const Schedule& schedule, int replicas,
                               int workers) {
    return estimate_lambdas({u}, tmpl, schedule, replicas, workers)[0];
}

// ---------------------------------------------------------------------------
// Convex kernel

bool ShapeEstimate::contains(const Vec& z, double scale) const {
    for (std::size_t i = 0; i < directions.size(); ++i)
        if (dot(z, directions[i].u) > scale * lambdas[i]) return false;
    return true;
}

double ShapeEstimate::bounding_radius() const {
    if (!vertices.empty()) {
        double r = 0;
        for (const auto& v : vertices) r = std::max(r, v.norm_inf());
        return r;
    }
    double r = 0;
    for (double l : lambdas) r = std::max(r, l);
    return r;
}

namespace {

void check_positively_spanning(const std::vector<Direction>& dirs, int d) {
    if (d == 1) {
        bool pos = false, neg = false;
        for (const auto& u : dirs) {
            if (u[0] > 0) pos = true;
            if (u[0] < 0) neg = true;
        }
        if (!pos || !neg) throw Unbounded("build_shape: directions miss a sign");
        return;
    }
    if (d == 2) {
        std::vector<double> angles;
        for (const auto& u : dirs) angles.push_back(std::atan2(u[1], u[0]));
        std::sort(angles.begin(), angles.end());
        double max_gap = angles.front() + 2 * M_PI - angles.back();
        for (std::size_t i = 0; i + 1 < angles.size(); ++i)
            max_gap = std::max(max_gap, angles[i + 1] - angles[i]);
        if (max_gap >= M_PI - 1e-9)
            throw Unbounded("build_shape: angular gap >= pi");
        return;
    }
    // d >= 3: probe a fixed direction sample; sufficient for the grids this
    // artifact uses (axes and sign-vector families)
    for (const auto& probe : direction_grid(d, 0)) {
        double best = -1;
        for (const auto& u : dirs) best = std::max(best, dot(probe.u, u.u));
        if (best <= 1e-9)
            throw Unbounded("build_shape: directions fail to positively span");
    }
}

std::vector<Vec> clip_polygon(const std::vector<Vec>& poly, const Direction& u,
                              double lambda) {
    std::vector<Vec> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec& a = poly[i];
        const Vec& b = poly[(i + 1) % n];
        double fa = dot(a, u.u) - lambda;
        double fb = dot(b, u.u) - lambda;
        bool ina = fa <= 1e-12, inb = fb <= 1e-12;
        if (ina) out.push_back(a);
        if (ina != inb) {
            double s = fa / (fa - fb);
            Vec p = Vec::zero(2);
            p.v[0] = a.v[0] + s * (b.v[0] - a.v[0]);
            p.v[1] = a.v[1] + s * (b.v[1] - a.v[1]);
            out.push_back(p);
        }
    }
    return out;
}

std::vector<Vec> dedup_polygon(std::vector<Vec> poly, double tol) {
    std::vector<Vec> out;
    for (const auto& p : poly) {
        if (!out.empty() && (p - out.back()).norm_inf() <= tol) continue;
        out.push_back(p);
    }
    while (out.size() > 1 && (out.front() - out.back()).norm_inf() <= tol)
        out.pop_back();
    // remove collinear vertices
    bool changed = true;
    while (changed && out.size() > 2) {
        changed = false;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const Vec& a = out[(i + out.size() - 1) % out.size()];
            const Vec& b = out[i];
            const Vec& c = out[(i + 1) % out.size()];
            double cross = (b.v[0] - a.v[0]) * (c.v[1] - a.v[1]) -
                           (b.v[1] - a.v[1]) * (c.v[0] - a.v[0]);
            if (std::abs(cross) <= tol) {
                out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    return out;
}

}  // namespace

ShapeEstimate build_shape(const std::vector<Direction>& dirs,
                          const std::vector<double>& lambdas) {
    if (dirs.empty() || dirs.size() != lambdas.size())
        throw ConfigError("build_shape: direction/lambda mismatch");
    const int d = dirs[0].dim();
    for (double l : lambdas)
        if (!(l > 0)) throw EmptyInterior("build_shape: lambda <= 0");
    check_positively_spanning(dirs, d);

    ShapeEstimate shape;
    shape.d = d;
    shape.directions = dirs;
    shape.lambdas = lambdas;

    if (d == 1) {
        double hi = kNever, lo = kNever;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            if (dirs[i][0] > 0) hi = std::min(hi, lambdas[i] / dirs[i][0]);
            if (dirs[i][0] < 0) lo = std::min(lo, -lambdas[i] / dirs[i][0]);
        }
        shape.vertices = {Vec{-lo}, Vec{hi}};
        return shape;
    }
    if (d == 2) {
        double big = 0;
        for (double l : lambdas) big = std::max(big, l);
        big *= 1e3;
        std::vector<Vec> poly = {Vec{big, big}, Vec{-big, big}, Vec{-big, -big},
                                 Vec{big, -big}};
        // process directions in a canonical (angular) order so the vertex
        // set is invariant under permutations of the input list
        std::vector<std::size_t> order(dirs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            double aa = std::atan2(dirs[a][1], dirs[a][0]);
            double ab = std::atan2(dirs[b][1], dirs[b][0]);
            if (aa != ab) return aa < ab;
            return lambdas[a] < lambdas[b];
        });
        for (std::size_t i : order) {
            poly = clip_polygon(poly, dirs[i], lambdas[i]);
            if (poly.empty()) break;
        }
        poly = dedup_polygon(std::move(poly), 1e-9);
        // orient counterclockwise
        double area2 = 0;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            const Vec& a = poly[i];
            const Vec& b = poly[(i + 1) % poly.size()];
            area2 += a.v[0] * b.v[1] - b.v[0] * a.v[1];
        }
        if (area2 < 0) std::reverse(poly.begin(), poly.end());
        // start at the lex-least vertex for a canonical representation
        std::size_t start = 0;
        for (std::size_t i = 1; i < poly.size(); ++i)
            if (poly[i].v[0] < poly[start].v[0] - 1e-12 ||
                (std::abs(poly[i].v[0] - poly[start].v[0]) <= 1e-12 &&
                 poly[i].v[1] < poly[start].v[1]))
                start = i;
        std::rotate(poly.begin(), poly.begin() + static_cast<std::ptrdiff_t>(start),
                    poly.end());
        for (const auto& v : poly)
            if (v.norm_inf() >= big / 2)
                throw Unbounded("build_shape: intersection unbounded");
        shape.vertices = std::move(poly);
        return shape;
    }
    return shape;  // d >= 3: support-function representation only
}

std::pair<bool, bool> shape_sandwich_check(const BSets& bsets, double t,
                                           const ShapeEstimate& shape,
                                           double eps) {
    if (!(eps >= 0 && eps < 1))
        throw ConfigError("shape_sandwich_check: eps outside [0,1)");
    const int d = shape.d;
    const double inner_scale = t * (1.0 - eps);
    const double outer_scale = t * (1.0 + eps);

    bool inner = true;
    int bound = static_cast<int>(std::ceil(inner_scale * shape.bounding_radius()));
    LatticePoint p = LatticePoint::origin(d);
    for (int i = 0; i < d; ++i) p.c[i] = -bound;
    while (inner) {
        if (shape.contains(Vec::from(p), inner_scale) && !bsets.in_tilde(p, t))
            inner = false;
        int i = d - 1;
        while (i >= 0 && p.c[i] == bound) {
            p.c[i] = -bound;
            --i;
        }
        if (i < 0) break;
        ++p.c[i];
    }

    bool outer = true;
    for (const auto& [x, vt] : bsets.sites()) {
        if (vt > t) continue;
        for (std::size_t i = 0; i < shape.directions.size() && outer; ++i) {
            double slack = 0.5 * shape.directions[i].u.norm1();
            if (dot(x, shape.directions[i].u) >
                outer_scale * shape.lambdas[i] + slack)
                outer = false;
        }
        if (!outer) break;
    }
    return {inner, outer};
}

GrowthFit growth_fit(const std::vector<double>& times,
                     const std::vector<double>& outer_radius,
                     const std::vector<double>& inner_radius, double burnin) {
    if (times.size() != outer_radius.size() || times.size() != inner_radius.size())
        throw ConfigError("growth_fit: size mismatch");
    std::vector<double> ts, ro, ri;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < burnin) continue;
        ts.push_back(times[i]);
        ro.push_back(outer_radius[i]);
        ri.push_back(inner_radius[i]);
    }
    if (ts.size() < 10)
        throw ConfigError("growth_fit: need >= 10 points past burn-in");
    GrowthFit f;
    f.c_upper = 0;
    f.c_lower = kNever;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        f.c_upper = std::max(f.c_upper, ro[i] / ts[i]);
        f.c_lower = std::min(f.c_lower, ri[i] / ts[i]);
    }
    if (f.c_lower < 0) f.c_lower = 0;  // empty inscribed cube reads as radius -1
    f.r_squared = linear_fit(ts, ro).r_squared;
    return f;
}

std::vector<Vec> exposed_points(const ShapeEstimate& shape) {
    if (shape.d >= 3)
        throw DimensionUnsupported("exposed_points: d >= 3 unsupported");
    return shape.vertices;
}

std::vector<Direction> direction_grid(int d, int m) {
    std::vector<Direction> dirs;
    if (d == 1) {
        dirs.push_back(Direction{Vec{1.0}});
        dirs.push_back(Direction{Vec{-1.0}});
        return dirs;
    }
    if (d == 2) {
        if (m <= 0) m = 64;
        for (int k = 0; k < m; ++k) {
            double a = 2.0 * M_PI * k / m;
            dirs.push_back(Direction{Vec{std::cos(a), std::sin(a)}});
        }
        return dirs;
    }
    if (d == 3) {
        for (int sx = -1; sx <= 1; ++sx)
            for (int sy = -1; sy <= 1; ++sy)
                for (int sz = -1; sz <= 1; ++sz) {
                    if (sx == 0 && sy == 0 && sz == 0) continue;
                    dirs.push_back(Direction{
                        Vec{static_cast<double>(sx), static_cast<double>(sy),
                            static_cast<double>(sz)}});
                }
        return dirs;
    }
    throw DimensionUnsupported("direction_grid: d > 3");
}

}  // namespace shapelab
