#pragma once

// Read-only functionals of timelines and snapshots: directional extents,
// argmax sites, visited sets and their fattening, count fields, and
// cylinder-hit events.

#include <map>
#include <optional>
#include <vector>

#include "shapelab/geometry.hpp"
#include "shapelab/simulator.hpp"
#include "shapelab/site_map.hpp"

namespace shapelab {

/// kappa(s) = sqrt((s+1) log(s+1)).
double kappa(double s);

/// Extent tie tolerance on <x,u> before lex tie-breaking.
inline constexpr double kExtentTieTol = 1e-9;

/// max <x,u> over sites holding a B-particle of the layer at the current
/// snapshot time.  Throws NoBParticles when the layer has none alive.
double directional_extent(const SimView& view, int layer, const Direction& u);

struct ArgmaxRecord {
    LatticePoint site;  // l*(s,u)
    double h_star;
    Vec m_star;
};

/// Lex-least site among the (tie-tolerant) maximizers of <x,u> over
/// B-occupied sites, decomposed as l* = h* u + m*.
ArgmaxRecord argmax_site(const SimView& view, int layer, const Direction& u);

/// True iff some B-occupied site at the snapshot time lies in g.
bool cylinder_hit(const SimView& view, int layer, const Cylinder& g);

struct CountField {
    std::map<std::uint64_t, std::pair<int, int>> counts;  // packed -> (N_A, N_B)
    int d = 0;

    std::pair<int, int> at(const LatticePoint& x) const;
    std::vector<std::pair<LatticePoint, std::pair<int, int>>> entries() const;
};

/// N_A(., t) and N_B(., t) over occupied sites at the snapshot time.
CountField count_fields(const SimView& view, int layer);

/// B-tilde(t) and its half-unit fattening B(t), built from a layer's
/// visited-site record; queryable at any t <= horizon.
class BSets {
  public:
    BSets(int d, const std::vector<std::pair<LatticePoint, double>>& visited);

    bool in_tilde(const LatticePoint& x, double t) const;
    /// Membership in B(t) = B-tilde(t) + [-1/2,1/2]^d (l-infinity fattening).
    bool in_fattened(const Vec& p, double t) const;
    std::vector<LatticePoint> tilde(double t) const;
    /// max ||x||_inf over B-tilde(t); -1 when empty.
    int radius_inf(double t) const;
    /// Largest k with every lattice point of C(k) visited by t; -1 if the
    /// origin itself is unvisited.
    int inscribed_radius(double t) const;

    const std::vector<std::pair<LatticePoint, double>>& sites() const {
        return visited_;
    }

  private:
    int d_;
    std::vector<std::pair<LatticePoint, double>> visited_;
    detail::SiteMap<double> lookup_;
    std::vector<double> shell_complete_;  // completion time of C(k), index k
};

struct FrontRecord {
    double t;
    std::vector<double> extents;       // by direction index
    std::vector<std::uint8_t> defined; // extent well-defined (B alive)
};

/// Snapshot listener recording directional extents of one layer on a
/// time grid; rows come out sorted by time.
class ExtentTracker {
  public:
    ExtentTracker(int layer, std::vector<Direction> dirs) noexcept
        : layer_(layer), dirs_(std::move(dirs)) {}

    SnapshotRequest request(std::vector<double> times);
    const std::vector<FrontRecord>& records() const { return records_; }
    const std::vector<Direction>& directions() const { return dirs_; }

  private:
    int layer_;
    std::vector<Direction> dirs_;
    std::vector<FrontRecord> records_;
};

}  // namespace shapelab
