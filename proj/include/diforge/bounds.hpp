#pragma once

#include <optional>
#include <vector>

namespace diforge {

/// Evaluated closed-form quantities used as oracles: error bounds, layer
/// angles, separation slack, packing floors, and rate bounds. Construction
/// parameters take natural logarithms; rates are in bits.
struct BoundCatalog {
    int n = 0;
    int L = 0;
    double delta = 0.0;

    double t = 0.0;
    double d = 0.0;
    std::vector<double> radii;

    double lambda = 0.0;  // per-layer error bound
    double lambda1 = 0.0; // missed identification, L * lambda
    double lambda2 = 0.0; // false identification, lambda

    std::vector<double> theta;      // layer angles; NaN where d > 2 r_l
    double Delta_bound = 0.0;       // sqrt(2 L d)
    std::vector<double> prop4_log2N; // (n - l + 1)/2 * log2(2 r_l / d)
    double linearithmic_rate_bound = 0.0; // (1/2) sum (1 - delta)/2^l
    double eta_L = 0.0;                   // 1 - sum 2^-l
    double R_sq = 0.0;                    // sum r_l^2
    double vertex_distance_sq = 0.0;      // n/4

    std::optional<double> E;  // error exponent, when in the linear regime
    std::optional<double> E1; // E - log2(L)/n
    std::optional<double> E2; // E
    std::optional<double> rr_lower_bound;    // bits
    std::optional<double> rr_converse_bound; // bits, evaluated at eta = 0
};

double bernoulli_tail_bound(double t);           // 2 exp(-2 t^2)
double poisson_tail_bound(double t, double A);   // 2 exp(-(3/2) t + (9/4) A)

std::vector<double> capacity_radii(int n, int L, double delta);

/// Closed form r_l = c (n^{1-delta} / c^2)^{2^-l} with c = t / (6L).
std::vector<double> rr_radii_closed(int n, int L, double delta, double E);
/// Same radii by iterating r_{l+1} = sqrt(t r_l / (6L)) from r_1 = n^{(1-delta)/2}.
std::vector<double> rr_radii_recursive(int n, int L, double delta, double E);

double rr_regime_limit(int n, double delta); // 1 / (delta ln n)

double eta_of(int L);                             // 1 - sum_{l<=L} 2^-l
double linearithmic_rate_bound_of(int L, double delta);

/// (1 - eta(L))/2 * (log2(1/E) - delta log2 n).
double rr_lower_bound_bits(int n, int L, double delta, double E);
/// log2(2 / sqrt(1 - e^{-E/2})), the converse at eta = 0.
double rr_converse_bound_bits(double E);

BoundCatalog capacity_catalog(int n, int L, double delta);
BoundCatalog poisson_catalog(int n, int L, double delta, double A);
BoundCatalog rr_catalog(int n, int L, double delta, double E);

} // namespace diforge
