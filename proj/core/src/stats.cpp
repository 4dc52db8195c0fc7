#include "shapelab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shapelab {

namespace {

// Lower incomplete gamma by series, upper by Lentz continued fraction.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 500; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_pvalue(double stat, int dof) {
    if (dof <= 0) throw std::invalid_argument("chi_square_pvalue: dof");
    return gamma_q(dof / 2.0, stat / 2.0);
}

Moments moments(const std::vector<double>& xs) {
    Moments m;
    m.n = xs.size();
    if (m.n == 0) return m;
    double s = 0;
    for (double x : xs) s += x;
    m.mean = s / m.n;
    if (m.n > 1) {
        double ss = 0;
        for (double x : xs) ss += (x - m.mean) * (x - m.mean);
        m.var = ss / (m.n - 1);
        m.stderr_mean = std::sqrt(m.var / m.n);
    }
    return m;
}

double percentile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("percentile: empty sample");
    std::sort(xs.begin(), xs.end());
    double idx = q * (xs.size() - 1);
    std::size_t lo = static_cast<std::size_t>(idx);
    std::size_t hi = std::min(lo + 1, xs.size() - 1);
    double frac = idx - lo;
    return xs[lo] * (1 - frac) + xs[hi] * frac;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need paired samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    double den = n * sxx - sx * sx;
    LinearFit f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_tot = syy - sy * sy / n;
    double ss_res = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += r * r;
    }
    f.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

double correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("correlation: need paired samples");
    Moments mx = moments(x), my = moments(y);
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += (x[i] - mx.mean) * (y[i] - my.mean);
    double den = std::sqrt(mx.var * my.var) * (x.size() - 1);
    return den > 0 ? s / den : 0.0;
}

double poisson_gof_pvalue(const std::vector<int>& counts, double mu) {
    if (counts.empty()) throw std::invalid_argument("poisson_gof: empty");
    const double n = static_cast<double>(counts.size());
    int kmax = 0;
    for (int c : counts) kmax = std::max(kmax, c);

    // expected per value, tail merged until every bin expects >= 5
    std::vector<double> expected;
    double p = std::exp(-mu);
    double cum = 0;
    for (int k = 0;; ++k) {
        if (k > 0) p *= mu / k;
        expected.push_back(n * p);
        cum += p;
        if (k >= kmax && n * (1 - cum) < 5.0) break;
        if (k > kmax + 200) break;
    }
    // fold the residual tail into the last bin
    expected.back() += n * std::max(0.0, 1.0 - cum);
    // merge from the top until the last bin expects >= 5
    while (expected.size() > 1 && expected.back() < 5.0) {
        expected[expected.size() - 2] += expected.back();
        expected.pop_back();
    }
    // merge from the bottom as well (tiny mu)
    std::size_t first = 0;
    while (first + 1 < expected.size() && expected[first] < 5.0) {
        expected[first + 1] += expected[first];
        ++first;
    }

    std::vector<double> observed(expected.size(), 0.0);
    for (int c : counts) {
        std::size_t bin = std::min<std::size_t>(c, expected.size() - 1);
        bin = std::max(bin, first);
        observed[bin] += 1.0;
    }
    double stat = 0;
    int bins = 0;
    for (std::size_t b = first; b < expected.size(); ++b) {
        double diff = observed[b] - expected[b];
        stat += diff * diff / expected[b];
        ++bins;
    }
    if (bins < 2) return 1.0;
    return chi_square_pvalue(stat, bins - 1);
}

}  // namespace shapelab
