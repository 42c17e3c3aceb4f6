#include "diforge/channels.hpp"

#include <cmath>

namespace diforge {

std::string to_string(ChannelKind k) {
    switch (k) {
        case ChannelKind::Bernoulli: return "bernoulli";
        case ChannelKind::RestrictedBernoulli: return "restricted-bernoulli";
        default: return "poisson";
    }
}

InputBox ChannelModel::input_box() const {
    switch (kind) {
        case ChannelKind::Bernoulli: return {0.0, 1.0, n};
        case ChannelKind::RestrictedBernoulli: return {a, b, n};
        default: return {0.0, A, n};
    }
}

ChannelModel bernoulli_channel(int n) {
    if (n < 1) throw UsageError("channel: n must be >= 1");
    ChannelModel ch;
    ch.kind = ChannelKind::Bernoulli;
    ch.n = n;
    return ch;
}

ChannelModel restricted_bernoulli_channel(int n, double a, double b) {
    if (n < 1) throw UsageError("channel: n must be >= 1");
    if (!(0.0 <= a && a < b && b <= 1.0)) {
        throw UsageError("channel: need 0 <= a < b <= 1");
    }
    ChannelModel ch;
    ch.kind = ChannelKind::RestrictedBernoulli;
    ch.n = n;
    ch.a = a;
    ch.b = b;
    return ch;
}

ChannelModel poisson_channel(int n, double A) {
    if (n < 1) throw UsageError("channel: n must be >= 1");
    if (!(A > 0.0)) throw UsageError("channel: Poisson peak A must be positive");
    ChannelModel ch;
    ch.kind = ChannelKind::Poisson;
    ch.n = n;
    ch.A = A;
    return ch;
}

std::uint64_t bernoulli_threshold(double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return ~0ull;
    // ldexp keeps the full 53-bit mantissa; the cast truncates toward zero.
    long double scaled = std::ldexp(static_cast<long double>(p), 64);
    if (scaled >= 18446744073709551615.0L) return ~0ull;
    return static_cast<std::uint64_t>(scaled);
}

PoissonSampler::PoissonSampler(double lambda) : lambda_(lambda) {
    if (lambda < 0.0) throw UsageError("poisson: intensity must be nonnegative");
    small_ = lambda <= 30.0;
    if (small_) {
        exp_neg_lambda_ = std::exp(-lambda);
    } else {
        // Transformed rejection with squeeze (PTRS), valid for lambda >= 10.
        b_ = 0.931 + 2.53 * std::sqrt(lambda);
        a_ = -0.059 + 0.02483 * b_;
        inv_alpha_ = 1.1239 + 1.1328 / (b_ - 3.4);
        vr_ = 0.9277 - 3.6224 / (b_ - 2.0);
        log_lambda_ = std::log(lambda);
    }
}

long PoissonSampler::draw_from_unit(double u) const {
    if (lambda_ == 0.0) return 0;
    double p = exp_neg_lambda_;
    double cum = p;
    long k = 0;
    while (u >= cum) {
        ++k;
        p *= lambda_ / static_cast<double>(k);
        cum += p;
        if (k > 2000) break; // u within rounding of 1; mass below 1e-300
    }
    return k;
}

long PoissonSampler::draw(Stream& rng) const {
    if (lambda_ == 0.0) return 0;
    if (small_) return draw_from_unit(rng.next_unit());
    while (true) {
        double u = rng.next_unit() - 0.5;
        double v = rng.next_unit_pos();
        double us = 0.5 - std::fabs(u);
        auto k = static_cast<long>(std::floor((2.0 * a_ / us + b_) * u + lambda_ + 0.43));
        if (us >= 0.07 && v <= vr_) return k;
        if (k < 0 || (us < 0.013 && v > us)) continue;
        double lhs = std::log(v * inv_alpha_ / (a_ / (us * us) + b_));
        double rhs = -lambda_ + static_cast<double>(k) * log_lambda_ -
                     std::lgamma(static_cast<double>(k) + 1.0);
        if (lhs <= rhs) return k;
    }
}

Vec transmit(const ChannelModel& ch, const Vec& x, std::uint64_t seed) {
    if (static_cast<int>(x.size()) != ch.n) {
        throw DimMismatch("transmit: input dimension != n");
    }
    InputBox box = ch.input_box();
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < box.lo || x[i] > box.hi) {
            throw InputOutOfBox("transmit: coordinate " + std::to_string(i) +
                                " outside [" + std::to_string(box.lo) + ", " +
                                std::to_string(box.hi) + "]");
        }
    }

    Vec y(x.size());
    if (ch.kind == ChannelKind::Poisson) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            Stream s = stream_for(seed, static_cast<std::uint64_t>(i));
            y[i] = static_cast<double>(PoissonSampler(x[i]).draw(s));
        }
    } else {
        for (std::size_t i = 0; i < x.size(); ++i) {
            Stream s = stream_for(seed, static_cast<std::uint64_t>(i));
            y[i] = static_cast<double>(draw_bernoulli(bernoulli_threshold(x[i]), s));
        }
    }
    return y;
}

NoiseSample noise_of(const Vec& y, const Vec& x) {
    return {sub(y, x)};
}

ReductionSpec poisson_to_bernoulli_reduction(double A) {
    if (!(A > 0.0)) throw UsageError("reduction: A must be positive");
    return ReductionSpec{A};
}

Vec apply_reduction(const ReductionSpec& spec, const Vec& raw_y) {
    Vec out(raw_y.size());
    for (std::size_t i = 0; i < raw_y.size(); ++i) out[i] = spec.post_process(raw_y[i]);
    return out;
}

} // namespace diforge
