#pragma once

// Statistical estimation of directional speeds and the limit shape,
// plus the small convex-geometry kernel (half-space intersection in the
// plane, exposed points, sandwich inclusion tests).

#include <vector>

#include "shapelab/observables.hpp"
#include "shapelab/simulator.hpp"

namespace shapelab {

struct Schedule {
    double eta = 0;
    int n0 = 0;
    std::vector<int> times;  // strictly increasing, ratio in (1, 1+eta]
};

/// n_k = floor(n0 * (1+eta)^k), k = 0..k_max, deduplicated.
/// Throws ScheduleInfeasible when n0*eta < 2 or a ratio leaves (1, 1+eta].
Schedule geometric_schedule(double eta, int n0, int k_max);

struct LambdaEstimate {
    Direction u;
    double point = 0;        // lattice units / second
    double stderr_mean = 0;
    struct Sample {
        int replica;
        double time;
        double speed;  // extent / time
    };
    std::vector<Sample> samples;
    std::vector<int> flagged_replicas;
    double cauchy_gap = 0;  // |H(T)/T - H(T')/T'| at T' ~ T/2, convergence diag
    int n_last = 0;
    int replicas_used = 0;
};

/// Full-space replicas with derived seeds; the point estimate is the mean
/// of H(n_last, u)/n_last over containment-clean replicas.
std::vector<LambdaEstimate> estimate_lambdas(const std::vector<Direction>& dirs,
                                             const ProcessSpec& tmpl,
                                             const Schedule& schedule,
                                             int replicas, int workers = 0);

LambdaEstimate estimate_lambda(const Direction& u, const ProcessSpec& tmpl,
                               const Schedule& schedule, int replicas,
                               int workers = 0);

struct ShapeEstimate {
    int d = 0;
    std::vector<Direction> directions;
    std::vector<double> lambdas;
    std::vector<Vec> vertices;  // d <= 2: counterclockwise closed polygon

    /// All <z, u_i> <= scale * lambda_i.
    bool contains(const Vec& z, double scale = 1.0) const;
    /// l-infinity bound on the polytope, for lattice enumeration.
    double bounding_radius() const;
};

/// Intersection of {z : <z,u_i> <= lambda_i}.  Throws EmptyInterior when
/// some lambda_i <= 0, Unbounded when the directions fail to positively
/// span R^d.
ShapeEstimate build_shape(const std::vector<Direction>& dirs,
                          const std::vector<double>& lambdas);

/// Theorem-style sandwich at time t: inner = every lattice point of
/// t(1-eps)*shape is in B-tilde(t); outer = every visited site satisfies
/// <x,u_i> <= t(1+eps) lambda_i + 0.5 ||u_i||_1 for all i.
std::pair<bool, bool> shape_sandwich_check(const BSets& bsets, double t,
                                           const ShapeEstimate& shape,
                                           double eps);

struct GrowthFit {
    double c_lower = 0;
    double c_upper = 0;
    double r_squared = 0;
};

/// Radius-versus-time fit past burn-in; needs >= 10 points with t >= burnin.
GrowthFit growth_fit(const std::vector<double>& times,
                     const std::vector<double>& outer_radius,
                     const std::vector<double>& inner_radius, double burnin);

/// Strict polygon vertices (d = 2) / interval endpoints (d = 1).
/// Throws DimensionUnsupported for d >= 3.
std::vector<Vec> exposed_points(const ShapeEstimate& shape);

/// Default estimation grids: {+-1} (d=1), m equally spaced angles (d=2),
/// the 26 sign-vector directions (d=3).
std::vector<Direction> direction_grid(int d, int m = 64);

}  // namespace shapelab
