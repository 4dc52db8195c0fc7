#include "shapelab/observables.hpp"

#include <algorithm>
#include <cmath>

namespace shapelab {

double kappa(double s) { return std::sqrt((s + 1.0) * std::log(s + 1.0)); }

namespace {

/// Visit every B-occupied site of a layer at the current time.
template <class Fn>
bool for_each_b_site(const SimView& view, int layer, Fn&& fn) {
    auto theta = view.theta(layer);
    const double now = view.now();
    bool any = false;
    // iterate particles and deduplicate per event: a site is reported once
    // per B-particle; callers fold with max/any so duplicates are harmless
    for (std::uint32_t i = 0; i < view.particle_count(); ++i) {
        if (theta[i] > now) continue;
        if (!view.active(layer, i)) continue;
        any = true;
        fn(view.position(i));
    }
    return any;
}

}  // namespace

double directional_extent(const SimView& view, int layer, const Direction& u) {
    double best = -kNever;
    bool any = for_each_b_site(view, layer, [&](const LatticePoint& x) {
        best = std::max(best, dot(x, u.u));
    });
    if (!any) throw NoBParticles("directional_extent: layer has no B-particle");
    return best;
}

ArgmaxRecord argmax_site(const SimView& view, int layer, const Direction& u) {
    bool any = false;
    double best = -kNever;
    LatticePoint best_site;
    for_each_b_site(view, layer, [&](const LatticePoint& x) {
        double v = dot(x, u.u);
        if (!any || v > best + kExtentTieTol) {
            best = std::max(best, v);
            best_site = x;
            any = true;
        } else if (v >= best - kExtentTieTol) {
            best = std::max(best, v);
            if (lex_less(x, best_site)) best_site = x;
        }
    });
    if (!any) throw NoBParticles("argmax_site: layer has no B-particle");
    ArgmaxRecord rec;
    rec.site = best_site;
    rec.h_star = dot(best_site, u.u);
    rec.m_star = perp_component(Vec::from(best_site), u);
    return rec;
}

bool cylinder_hit(const SimView& view, int layer, const Cylinder& g) {
    bool hit = false;
    for_each_b_site(view, layer, [&](const LatticePoint& x) {
        if (!hit && in_cylinder(x, g)) hit = true;
    });
    return hit;
}

std::pair<int, int> CountField::at(const LatticePoint& x) const {
    auto it = counts.find(detail::pack_coords(x.c.data(), d));
    return it == counts.end() ? std::pair<int, int>{0, 0} : it->second;
}

std::vector<std::pair<LatticePoint, std::pair<int, int>>> CountField::entries()
    const {
    std::vector<std::pair<LatticePoint, std::pair<int, int>>> out;
    out.reserve(counts.size());
    for (const auto& [key, c] : counts)
        out.emplace_back(detail::unpack_site(key, d), c);
    return out;
}

CountField count_fields(const SimView& view, int layer) {
    CountField f;
    f.d = view.dim();
    auto theta = view.theta(layer);
    const double now = view.now();
    for (std::uint32_t i = 0; i < view.particle_count(); ++i) {
        if (!view.active(layer, i)) continue;
        auto key = detail::pack_coords(view.position(i).c.data(), f.d);
        auto& c = f.counts[key];
        if (theta[i] <= now)
            ++c.second;
        else
            ++c.first;
    }
    return f;
}

BSets::BSets(int d, const std::vector<std::pair<LatticePoint, double>>& visited)
    : d_(d), visited_(visited), lookup_(visited.size() * 2 + 64) {
    for (const auto& [x, t] : visited_)
        lookup_.get_or_insert(detail::pack_coords(x.c.data(), d_)) = t;
    // completion time of each full cube C(k)
    int rmax = 0;
    for (const auto& [x, t] : visited_)
        rmax = std::max(rmax, static_cast<int>(x.norm_inf()));
    shell_complete_.assign(rmax + 2, kNever);
    double running = 0;
    for (int k = 0; k <= rmax + 1 && running < kNever; ++k) {
        double worst = running;
        for (const auto& off : shell_sites(k, d_)) {
            const double* t = lookup_.find(detail::pack_coords(off.c.data(), d_));
            if (!t) {
                worst = kNever;
                break;
            }
            worst = std::max(worst, *t);
        }
        if (k < static_cast<int>(shell_complete_.size()))
            shell_complete_[k] = worst;
        running = worst;
    }
}

bool BSets::in_tilde(const LatticePoint& x, double t) const {
    const double* v = lookup_.find(detail::pack_coords(x.c.data(), d_));
    return v && *v <= t;
}

bool BSets::in_fattened(const Vec& p, double t) const {
    // nearest lattice point in l-infinity is the coordinatewise rounding;
    // ties within the half-unit band mean several candidates, so scan the
    // small neighborhood of floor/ceil per axis
    std::array<std::array<std::int32_t, 2>, kMaxDim> cand{};
    std::array<int, kMaxDim> ncand{};
    for (int i = 0; i < d_; ++i) {
        std::int32_t lo = static_cast<std::int32_t>(std::floor(p.v[i]));
        std::int32_t hi = static_cast<std::int32_t>(std::ceil(p.v[i]));
        cand[i][0] = lo;
        ncand[i] = (hi != lo) ? 2 : 1;
        cand[i][1] = hi;
    }
    std::array<int, kMaxDim> pick{};
    while (true) {
        LatticePoint x = LatticePoint::origin(d_);
        bool close = true;
        for (int i = 0; i < d_; ++i) {
            x.c[i] = cand[i][pick[i]];
            if (std::abs(p.v[i] - x.c[i]) > 0.5) close = false;
        }
        if (close && in_tilde(x, t)) return true;
        int i = d_ - 1;
        while (i >= 0 && pick[i] + 1 >= ncand[i]) pick[i--] = 0;
        if (i < 0) return false;
        ++pick[i];
    }
}

std::vector<LatticePoint> BSets::tilde(double t) const {
    std::vector<LatticePoint> out;
    for (const auto& [x, v] : visited_)
        if (v <= t) out.push_back(x);
    return out;
}

int BSets::radius_inf(double t) const {
    int r = -1;
    for (const auto& [x, v] : visited_)
        if (v <= t) r = std::max(r, static_cast<int>(x.norm_inf()));
    return r;
}

int BSets::inscribed_radius(double t) const {
    int best = -1;
    for (std::size_t k = 0; k < shell_complete_.size(); ++k) {
        if (shell_complete_[k] <= t)
            best = static_cast<int>(k);
        else
            break;
    }
    return best;
}

SnapshotRequest ExtentTracker::request(std::vector<double> times) {
    SnapshotRequest req;
    req.times = std::move(times);
    req.fn = [this](double t, const SimView& view) {
        FrontRecord rec;
        rec.t = t;
        rec.extents.resize(dirs_.size(), 0.0);
        rec.defined.assign(dirs_.size(), 1);
        for (std::size_t k = 0; k < dirs_.size(); ++k) {
            try {
                rec.extents[k] = directional_extent(view, layer_, dirs_[k]);
            } catch (const NoBParticles&) {
                rec.defined[k] = 0;
            }
        }
        records_.push_back(std::move(rec));
    };
    return req;
}

}  // namespace shapelab
