#pragma once

#include <cstddef>
#include <vector>

namespace shapelab {

/// Upper regularized incomplete gamma Q(a,x).
double gamma_q(double a, double x);

/// Survival of the chi-square distribution: P(X >= stat | dof).
double chi_square_pvalue(double stat, int dof);

struct Moments {
    double mean = 0;
    double var = 0;    // unbiased
    double stderr_mean = 0;
    std::size_t n = 0;
};
Moments moments(const std::vector<double>& xs);

/// Empirical q-quantile (linear interpolation between order statistics).
double percentile(std::vector<double> xs, double q);

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Pearson correlation of paired samples.
double correlation(const std::vector<double>& x, const std::vector<double>& y);

/// Chi-square goodness of fit of integer counts against Poisson(mu),
/// binning the upper tail so every expected count is >= 5.
/// Returns the p-value; dof = bins - 1 (mu is fixed, not fitted).
double poisson_gof_pvalue(const std::vector<int>& counts, double mu);

}  // namespace shapelab
