#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace testhelpers {

// Regularized upper incomplete gamma Q(a, x), series/continued-fraction split
// at x = a + 1 (Lentz's method for the fraction).
inline double gamma_q(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;

    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) by series, Q = 1 - P.
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(log_prefix);
    }
    // Q(a,x) by continued fraction.
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(log_prefix);
}

// P-value of a chi-square statistic with df degrees of freedom.
inline double chi_square_pvalue(double statistic, int df) {
    return gamma_q(0.5 * df, 0.5 * statistic);
}

struct MonteCarloSummary {
    double mean = 0.0;
    double stddev = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
};

inline MonteCarloSummary summarize(const std::vector<double>& values) {
    MonteCarloSummary s;
    s.trials = static_cast<std::int64_t>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size()));
    s.std_error = s.stddev / std::sqrt(static_cast<double>(values.size()));
    return s;
}

inline MonteCarloSummary run_mc(std::int64_t trials, const std::function<double()>& draw) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(trials));
    for (std::int64_t i = 0; i < trials; ++i) values.push_back(draw());
    return summarize(values);
}

}  // namespace testhelpers
