#pragma once

#include "diforge/bounds.hpp"
#include "diforge/channels.hpp"
#include "diforge/codebook.hpp"
#include "diforge/decoder.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace diforge {

/// A Monte Carlo probability estimate with its Clopper-Pearson interval and
/// the closed-form bound it is judged against. `consistent` is the one-sided
/// verdict: either the point estimate is below the bound, or the bound is
/// not excluded by the interval. When the bound is below what the trial
/// budget can resolve (~1e-8), `zero_failure_regime` flags that the check
/// degenerates to "no failures observed".
struct ErrorEstimate {
    double p_hat = 0.0;
    long long trials = 0;
    long long failures = 0;
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    double level = 0.99;
    double bound = 0.0;
    bool zero_failure_regime = false;
    bool consistent = false;
};

ErrorEstimate make_estimate(long long failures, long long trials, double bound);

/// Worker cap: DI_FORGE_THREADS when set, hardware concurrency otherwise.
/// Results never depend on the worker count; trial k always draws from the
/// stream keyed by (seed, k).
int worker_count();

/// Fraction of trials where |<noise, direction/|direction|>| > t, against
/// the channel's concentration bound at t (Hoeffding for Bernoulli kinds,
/// the Chernoff form for Poisson).
ErrorEstimate concentration_experiment(const ChannelModel& ch, const Vec& x,
                                       const Vec& direction, double t,
                                       long long trials, std::uint64_t seed);

/// One pass over the trials serving several thresholds at once; estimates
/// for each t share the same noise draws.
std::vector<ErrorEstimate> concentration_experiment_multi(
    const ChannelModel& ch, const Vec& x, const Vec& direction,
    const std::vector<double>& ts, long long trials, std::uint64_t seed);

/// Transmit the codeword of a sampled id, test the same id; failures are
/// rejections. Bound: L times the per-layer error bound implied by the
/// decoder mode and channel (see per_layer_lambda).
ErrorEstimate estimate_missed_id(const PrimitiveCodebook& cb, const ChannelModel& ch,
                                 const DecoderParams& params,
                                 const std::vector<CodewordId>& ids, long long trials,
                                 std::uint64_t seed);

enum class PairSampling { Random, AdversarialMinSep, Explicit };

struct FalseIdOptions {
    PairSampling sampling = PairSampling::AdversarialMinSep;
    /// (tested, transmitted); required for Explicit, ignored otherwise.
    std::optional<std::pair<CodewordId, CodewordId>> pair;
};

/// Transmit codeword j, test id i != j; failures are acceptances. The
/// adversarial mode fixes the ordered pair realizing the minimum projective
/// separation among the given ids.
ErrorEstimate estimate_false_id(const PrimitiveCodebook& cb, const ChannelModel& ch,
                                const DecoderParams& params,
                                const std::vector<CodewordId>& ids,
                                const FalseIdOptions& options, long long trials,
                                std::uint64_t seed);

/// Per-layer error bound matched to the decoder mode: 2 exp(-2t^2) for
/// Bernoulli-type channels, the Poisson catalog form for the Poisson
/// decoder, 2^{-nE} in rate-reliability mode.
double per_layer_lambda(const ChannelModel& ch, const DecoderParams& params, int n,
                        int L);

struct RateReport {
    int n = 0;
    int L = 0;
    long long N_retained = 0;
    double linear_rate = 0.0;        // log2(N)/n, bits
    double linearithmic_rate = 0.0;  // linear_rate / log2(n)
    double theoretical_primitive_log2N = 0.0; // packing floor, summed layers
    std::optional<double> rr_lower_bound;
    std::optional<double> rr_upper_bound;
};

RateReport rate_report(const PrimitiveCodebook& cb, const ExpurgationReport& expurgation,
                       std::optional<double> E = std::nullopt);

/// One input point of the reduction demo: the Poisson-plus-postprocessing
/// pipeline and direct Bernoulli(e^-x) sampling, each tested two-sided
/// against the common law.
struct ReductionCheck {
    double x = 0.0;
    double p0 = 0.0; // e^{-x}
    long long trials = 0;
    long long pipeline_ones = 0;
    long long direct_ones = 0;
    double pipeline_pvalue = 0.0;
    double direct_pvalue = 0.0;
};

ReductionCheck reduction_check(double A, double x, long long trials,
                               std::uint64_t seed);

struct RrBuild {
    PrimitiveCodebook codebook;
    BoundCatalog catalog;
};

/// Rate-reliability construction: t = sqrt(nE), radii from the recursion
/// r_{l+1} = sqrt(t r_l / 6L) off r_1 = n^{(1-delta)/2}. Guards the regime
/// E < 1/(delta ln n). The generation separation defaults to the analysis
/// value d = 3t; `gen_separation` overrides what the builder enforces while
/// the catalog keeps the theoretical value.
RrBuild rr_build(int n, int L, double delta, double E, std::vector<int> branching,
                 std::uint64_t seed,
                 std::optional<double> gen_separation = std::nullopt);

} // namespace diforge
