#pragma once

#include <cstdint>
#include <cmath>

namespace diforge {

// Counter-based pseudorandomness built on the SplitMix64 finalizer.
//
// Every consumer of randomness in this library owns a Stream keyed by
// (user seed, stream index). Streams with distinct keys are statistically
// independent for Monte Carlo purposes, and a given key always replays the
// same sequence, so trial i of an experiment produces identical bits no
// matter how trials are sharded across workers.

namespace detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

class Stream {
public:
    explicit Stream(std::uint64_t key) : state_(detail::mix64(key + detail::kGolden)) {}

    std::uint64_t next_u64() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    /// Uniform double in [0, 1).
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1]; safe to take logarithms of.
    double next_unit_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller. Draws are generated in pairs and
    /// the spare is cached, so a Stream is not safe to share across threads.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u = next_unit_pos();
        double v = next_unit();
        double rad = std::sqrt(-2.0 * std::log(u));
        double ang = 6.283185307179586476925286766559 * v;
        spare_ = rad * std::sin(ang);
        have_spare_ = true;
        return rad * std::cos(ang);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Derives the key of a child stream from a parent seed and an index
/// (trial number, coordinate, node ordinal and so on). Chaining calls
/// splits further: stream_key(stream_key(s, a), b).
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index) {
    return detail::mix64(seed ^ detail::mix64(index + detail::kGolden));
}

inline Stream stream_for(std::uint64_t seed, std::uint64_t index) {
    return Stream(stream_key(seed, index));
}

} // namespace diforge
