#pragma once

#include <cstdint>
#include <utility>

namespace diforge {

/// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1].
double reg_inc_beta(double a, double b, double x);

/// CDF of Binomial(trials, p) at k, i.e. P[X <= k].
double binomial_cdf(std::int64_t k, std::int64_t trials, double p);

struct ConfidenceInterval {
    double lo = 0.0;
    double hi = 1.0;
    double level = 0.99;
};

/// Clopper-Pearson two-sided interval for a binomial proportion.
/// failures = 0 gives lo = 0; failures = trials gives hi = 1.
ConfidenceInterval clopper_pearson(std::int64_t failures, std::int64_t trials,
                                   double level = 0.99);

/// Two-sided exact-style p-value for observing `failures` successes out of
/// `trials` under H0: rate = p. Sums the tail containing the observation and
/// doubles it, capped at 1.
double binomial_two_sided_pvalue(std::int64_t failures, std::int64_t trials, double p);

} // namespace diforge
