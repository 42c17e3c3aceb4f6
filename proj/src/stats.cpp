#include "diforge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace diforge {

namespace {

// Continued fraction for the incomplete beta, modified Lentz method.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3.0e-15;
    constexpr double kFpMin = 1.0e-300;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace

double reg_inc_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("reg_inc_beta: parameters must be positive");
    }
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                   a * std::log(x) + b * std::log1p(-x);
    double bt = std::exp(ln_bt);
    // Symmetry keeps the continued fraction in its fast-converging region.
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return bt * betacf(a, b, x) / a;
    }
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double binomial_cdf(std::int64_t k, std::int64_t trials, double p) {
    if (k < 0) return 0.0;
    if (k >= trials) return 1.0;
    // P[X <= k] = I_{1-p}(n - k, k + 1).
    return reg_inc_beta(static_cast<double>(trials - k), static_cast<double>(k + 1), 1.0 - p);
}

ConfidenceInterval clopper_pearson(std::int64_t failures, std::int64_t trials, double level) {
    if (trials <= 0 || failures < 0 || failures > trials) {
        throw std::invalid_argument("clopper_pearson: bad counts");
    }
    double alpha = 1.0 - level;
    ConfidenceInterval ci;
    ci.level = level;

    // Bisection on p; both tail probabilities are monotone in p.
    auto bisect = [](auto pred) {
        double lo = 0.0, hi = 1.0;
        for (int iter = 0; iter < 200; ++iter) {
            double mid = 0.5 * (lo + hi);
            if (pred(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    if (failures == 0) {
        ci.lo = 0.0;
    } else {
        // Largest p with P[X >= failures] <= alpha/2.
        ci.lo = bisect([&](double p) {
            return 1.0 - binomial_cdf(failures - 1, trials, p) < alpha / 2.0;
        });
    }

    if (failures == trials) {
        ci.hi = 1.0;
    } else {
        // Smallest p with P[X <= failures] <= alpha/2.
        ci.hi = bisect([&](double p) {
            return binomial_cdf(failures, trials, p) > alpha / 2.0;
        });
    }
    return ci;
}

double binomial_two_sided_pvalue(std::int64_t failures, std::int64_t trials, double p) {
    if (trials <= 0 || failures < 0 || failures > trials) {
        throw std::invalid_argument("binomial_two_sided_pvalue: bad counts");
    }
    p = std::clamp(p, 0.0, 1.0);
    double mean = static_cast<double>(trials) * p;
    double lower_tail = binomial_cdf(failures, trials, p);
    double upper_tail = 1.0 - binomial_cdf(failures - 1, trials, p);
    double one_sided = (static_cast<double>(failures) <= mean) ? lower_tail : upper_tail;
    return std::min(1.0, 2.0 * one_sided);
}

} // namespace diforge
