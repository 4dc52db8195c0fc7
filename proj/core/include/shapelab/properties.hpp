#pragma once

// Executable renditions of the model's theorems over seeded run batches.
// Deterministic laws (coupling, nesting) admit zero tolerance; statistical
// laws publish their test statistics, thresholds, and sample sizes.

#include <functional>
#include <string>
#include <vector>

#include "shapelab/estimators.hpp"
#include "shapelab/simulator.hpp"

namespace shapelab {

struct PropertyReport {
    enum class Verdict { Pass, Fail, Flagged };

    std::string id;
    Verdict verdict = Verdict::Fail;
    std::vector<std::pair<std::string, std::string>> evidence;
    std::string config_echo;

    bool passed() const { return verdict == Verdict::Pass; }
    void note(const std::string& key, const std::string& value) {
        evidence.emplace_back(key, value);
    }
    void note(const std::string& key, double value);
    std::string to_text() const;
};

/// Builds the (smaller, larger) layer pair for one replica; the harness
/// rejects pairs whose initial_B sets are not nested.
using LayerPairGen =
    std::function<std::pair<LayerSpec, LayerSpec>(const InitialState&)>;

/// theta_2 <= theta_1 pointwise on every replica, exactly.  The default
/// generator pairs the designated start against the designated start plus
/// the occupants of the next-nearest occupied site.
PropertyReport check_monotone_coupling(const ProcessSpec& tmpl, int replicas,
                                       LayerPairGen gen = nullptr,
                                       int workers = 0);

/// Half-space nesting: coupled (u,-r1) and (u,-r2) layers, 0 <= r1 <= r2
/// (r2 may be +infinity for the full-space process).  Replicas whose
/// designated start fails ||x0|| <= r1/sqrt(d) are skipped.
PropertyReport check_halfspace_nesting(const ProcessSpec& tmpl,
                                       const Direction& u, double r1, double r2,
                                       int replicas, int workers = 0);

/// Chi-square fit of pooled N_A+N_B counts at time t over C(L/2) against
/// Poisson(mu_A), plus an adjacent-site correlation spot check.
PropertyReport check_poisson_marginals(const ProcessSpec& tmpl, double t,
                                       int replicas, int workers = 0);

/// Zero A-particles inside C(shrink * lambda_min * t / sqrt(d)) at time t
/// in at least 90% of replicas.
PropertyReport check_no_A_behind_front(const ProcessSpec& tmpl, double t,
                                       double shrink, double lambda_min,
                                       int replicas, int workers = 0);

/// ECDF dominance of h*(s+t+C6 kappa(t), u) over the independent sum
/// h1*(s,u) + h2*(t,u), with two-sided binomial CI slack.
PropertyReport check_superconvolutivity(const ProcessSpec& tmpl,
                                        const Direction& u, double s, double t,
                                        int replicas_per_bank, double c5 = 1.0,
                                        double c6 = 4.0, int workers = 0);

/// 5th percentile of h*(n_last,u)/n_last strictly positive, 95th percentile
/// below 2 sqrt(d) * c_upper.
PropertyReport check_positive_speed(const ProcessSpec& tmpl, const Direction& u,
                                    const Schedule& schedule, int replicas,
                                    double c_upper, double c5 = 1.0,
                                    int workers = 0);

}  // namespace shapelab
