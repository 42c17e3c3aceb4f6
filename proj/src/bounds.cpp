#include "diforge/bounds.hpp"

#include "diforge/errors.hpp"

#include <cmath>
#include <limits>

namespace diforge {

double bernoulli_tail_bound(double t) {
    return 2.0 * std::exp(-2.0 * t * t);
}

double poisson_tail_bound(double t, double A) {
    return 2.0 * std::exp(-1.5 * t + 2.25 * A);
}

std::vector<double> capacity_radii(int n, int L, double delta) {
    std::vector<double> r(static_cast<std::size_t>(L));
    double expo = (1.0 - delta) / 2.0;
    for (int l = 0; l < L; ++l) {
        r[static_cast<std::size_t>(l)] = std::pow(static_cast<double>(n), expo);
        expo /= 2.0;
    }
    return r;
}

std::vector<double> rr_radii_closed(int n, int L, double delta, double E) {
    double t = std::sqrt(static_cast<double>(n) * E);
    double c = t / (6.0 * L);
    double base = std::pow(static_cast<double>(n), 1.0 - delta) / (c * c);
    std::vector<double> r(static_cast<std::size_t>(L));
    for (int l = 1; l <= L; ++l) {
        r[static_cast<std::size_t>(l - 1)] = c * std::pow(base, std::ldexp(1.0, -l));
    }
    return r;
}

std::vector<double> rr_radii_recursive(int n, int L, double delta, double E) {
    double t = std::sqrt(static_cast<double>(n) * E);
    std::vector<double> r(static_cast<std::size_t>(L));
    r[0] = std::pow(static_cast<double>(n), (1.0 - delta) / 2.0);
    for (int l = 1; l < L; ++l) {
        r[static_cast<std::size_t>(l)] =
            std::sqrt(t * r[static_cast<std::size_t>(l - 1)] / (6.0 * L));
    }
    return r;
}

double rr_regime_limit(int n, double delta) {
    return 1.0 / (delta * std::log(static_cast<double>(n)));
}

double eta_of(int L) {
    double s = 0.0;
    for (int l = 1; l <= L; ++l) s += std::ldexp(1.0, -l);
    return 1.0 - s;
}

double linearithmic_rate_bound_of(int L, double delta) {
    double s = 0.0;
    for (int l = 1; l <= L; ++l) s += (1.0 - delta) * std::ldexp(1.0, -l);
    return 0.5 * s;
}

double rr_lower_bound_bits(int n, int L, double delta, double E) {
    double eta = eta_of(L);
    return (1.0 - eta) / 2.0 *
           (std::log2(1.0 / E) - delta * std::log2(static_cast<double>(n)));
}

double rr_converse_bound_bits(double E) {
    return std::log2(2.0 / std::sqrt(1.0 - std::exp(-E / 2.0)));
}

namespace {

BoundCatalog base_catalog(int n, int L, double delta, double t, double d,
                          std::vector<double> radii) {
    BoundCatalog c;
    c.n = n;
    c.L = L;
    c.delta = delta;
    c.t = t;
    c.d = d;
    c.radii = std::move(radii);
    c.Delta_bound = std::sqrt(2.0 * L * d);
    c.eta_L = eta_of(L);
    c.linearithmic_rate_bound = linearithmic_rate_bound_of(L, delta);
    c.vertex_distance_sq = static_cast<double>(n) / 4.0;

    c.theta.resize(static_cast<std::size_t>(L));
    c.prop4_log2N.resize(static_cast<std::size_t>(L));
    for (int l = 1; l <= L; ++l) {
        double r = c.radii[static_cast<std::size_t>(l - 1)];
        c.theta[static_cast<std::size_t>(l - 1)] =
            d <= 2.0 * r ? 2.0 * std::asin(std::sqrt(d / (2.0 * r)))
                         : std::numeric_limits<double>::quiet_NaN();
        c.prop4_log2N[static_cast<std::size_t>(l - 1)] =
            (static_cast<double>(n - l + 1) / 2.0) * std::log2(2.0 * r / d);
        c.R_sq += r * r;
    }
    return c;
}

} // namespace

BoundCatalog capacity_catalog(int n, int L, double delta) {
    if (n < 2 || L < 1) throw UsageError("catalog: need n >= 2, L >= 1");
    double ln_n = std::log(static_cast<double>(n));
    BoundCatalog c = base_catalog(n, L, delta, ln_n, 3.0 * ln_n,
                                  capacity_radii(n, L, delta));
    c.lambda = 2.0 * std::exp(-2.0 * ln_n * ln_n);
    c.lambda1 = static_cast<double>(L) * c.lambda;
    c.lambda2 = c.lambda;
    return c;
}

BoundCatalog poisson_catalog(int n, int L, double delta, double A) {
    if (n < 2 || L < 1) throw UsageError("catalog: need n >= 2, L >= 1");
    if (!(A > 0.0)) throw UsageError("catalog: A must be positive");
    double ln_n = std::log(static_cast<double>(n));
    BoundCatalog c = base_catalog(n, L, delta, A * ln_n, 3.0 * ln_n,
                                  capacity_radii(n, L, delta));
    c.lambda = std::exp(1.5 * A * (1.5 - ln_n));
    c.lambda1 = static_cast<double>(L) * c.lambda;
    c.lambda2 = c.lambda;
    return c;
}

BoundCatalog rr_catalog(int n, int L, double delta, double E) {
    if (n < 2 || L < 1) throw UsageError("catalog: need n >= 2, L >= 1");
    if (!(E > 0.0)) throw UsageError("catalog: E must be positive");
    if (E >= rr_regime_limit(n, delta)) {
        throw RegimeViolation("rate-reliability regime requires E < 1/(delta ln n)");
    }
    double t = std::sqrt(static_cast<double>(n) * E);
    BoundCatalog c = base_catalog(n, L, delta, t, 3.0 * t,
                                  rr_radii_closed(n, L, delta, E));
    c.lambda = std::exp2(-static_cast<double>(n) * E);
    c.lambda1 = static_cast<double>(L) * c.lambda;
    c.lambda2 = c.lambda;
    c.E = E;
    c.E1 = E - std::log2(static_cast<double>(L)) / static_cast<double>(n);
    c.E2 = E;
    c.rr_lower_bound = rr_lower_bound_bits(n, L, delta, E);
    c.rr_converse_bound = rr_converse_bound_bits(E);
    return c;
}

} // namespace diforge
