#pragma once

#include "diforge/codebook.hpp"
#include "diforge/geometry.hpp"
#include "diforge/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace diforge {

enum class ChannelKind { Bernoulli, RestrictedBernoulli, Poisson };

std::string to_string(ChannelKind k);

struct ChannelModel {
    ChannelKind kind = ChannelKind::Bernoulli;
    int n = 0;
    double a = 0.0; // restricted-Bernoulli lower edge
    double b = 1.0; // restricted-Bernoulli upper edge
    double A = 0.0; // Poisson peak constraint

    InputBox input_box() const;
};

ChannelModel bernoulli_channel(int n);
ChannelModel restricted_bernoulli_channel(int n, double a, double b);
ChannelModel poisson_channel(int n, double A);

/// One channel use on the block x. Coordinate i draws from the stream keyed
/// by (seed, i), so a block transmission is reproducible coordinatewise and
/// trials can shard across workers by deriving per-trial seeds.
Vec transmit(const ChannelModel& ch, const Vec& x, std::uint64_t seed);

struct NoiseSample {
    Vec z;
};

/// z = y - x componentwise.
NoiseSample noise_of(const Vec& y, const Vec& x);

/// Bernoulli(p) as a 64-bit threshold compare: the draw is (u < threshold).
/// Quantization bias is at most 2^-64.
std::uint64_t bernoulli_threshold(double p);

inline int draw_bernoulli(std::uint64_t threshold, Stream& rng) {
    return rng.next_u64() < threshold ? 1 : 0;
}

/// Seed-deterministic Poisson sampler. Inversion by sequential search for
/// small intensity, transformed rejection beyond it. Parameter setup is
/// hoisted so hot loops can reuse one sampler across trials.
class PoissonSampler {
public:
    explicit PoissonSampler(double lambda);

    long draw(Stream& rng) const;

    /// True when draws run by CDF inversion and consume exactly one uniform.
    bool single_uniform() const { return small_; }

    /// Inversion walk on a caller-supplied uniform from [0, 1).
    /// Only valid when single_uniform() is true.
    long draw_from_unit(double u) const;

private:
    double lambda_;
    double exp_neg_lambda_ = 0.0; // inversion path
    double b_ = 0.0, a_ = 0.0, vr_ = 0.0, inv_alpha_ = 0.0; // rejection path
    double log_lambda_ = 0.0;
    bool small_ = true;
};

struct ReductionSpec {
    double A = 0.0;

    double induced_param(double x) const { return std::exp(-x); }
    double interval_lo() const { return std::exp(-A); }
    static constexpr double interval_hi = 1.0;
    double post_process(double raw) const { return raw == 0.0 ? 1.0 : 0.0; }
};

///// Lemma-style reduction: mark only the zero-count output. The induced
/// binary channel is Bernoulli(e^-x), covering [e^-A, 1] over the input box.
ReductionSpec poisson_to_bernoulli_reduction(double A);

Vec apply_reduction(const ReductionSpec& spec, const Vec& raw_y);

} // namespace diforge
