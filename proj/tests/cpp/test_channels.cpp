#include <doctest.h>

#include "diforge/channels.hpp"

#include <cmath>
#include <vector>

using namespace diforge;

TEST_CASE("channel factories and input boxes") {
    auto bern = bernoulli_channel(8);
    CHECK(bern.input_box().lo == 0.0);
    CHECK(bern.input_box().hi == 1.0);

    auto rb = restricted_bernoulli_channel(8, 0.2, 0.8);
    CHECK(rb.input_box().lo == 0.2);
    CHECK(rb.input_box().hi == 0.8);
    CHECK_THROWS_AS(restricted_bernoulli_channel(8, 0.8, 0.2), UsageError);
    CHECK_THROWS_AS(restricted_bernoulli_channel(8, -0.1, 0.5), UsageError);

    auto poi = poisson_channel(8, 2.0);
    CHECK(poi.input_box().hi == 2.0);
    CHECK_THROWS_AS(poisson_channel(8, 0.0), UsageError);
}

TEST_CASE("transmit guards its inputs") {
    auto ch = bernoulli_channel(4);
    CHECK_THROWS_AS(transmit(ch, {0.5, 0.5}, 1), DimMismatch);
    CHECK_THROWS_AS(transmit(ch, {0.5, 0.5, 0.5, 1.5}, 1), InputOutOfBox);
    // closed box: the endpoints are legal
    CHECK_NOTHROW(transmit(ch, {0.0, 1.0, 0.5, 0.5}, 1));
}

TEST_CASE("bernoulli outputs are deterministic per seed and exact at the edges") {
    auto ch = bernoulli_channel(64);
    Vec x(64, 0.3);
    Vec y1 = transmit(ch, x, 7);
    Vec y2 = transmit(ch, x, 7);
    CHECK(y1 == y2);
    Vec y3 = transmit(ch, x, 8);
    CHECK(y1 != y3);
    for (double v : y1) CHECK((v == 0.0 || v == 1.0));

    Vec zeros(64, 0.0), ones(64, 1.0);
    CHECK(transmit(ch, zeros, 3) == Vec(64, 0.0));
    CHECK(transmit(ch, ones, 3) == Vec(64, 1.0));
}

TEST_CASE("bernoulli empirical rate matches the input level") {
    auto ch = bernoulli_channel(1000);
    Vec x(1000, 0.3);
    double total = 0;
    const int reps = 200;
    for (int k = 0; k < reps; ++k) {
        Vec y = transmit(ch, x, 1000 + static_cast<std::uint64_t>(k));
        for (double v : y) total += v;
    }
    CHECK(total / (1000.0 * reps) == doctest::Approx(0.3).epsilon(0.01));
}

TEST_CASE("bernoulli threshold edge cases") {
    CHECK(bernoulli_threshold(0.0) == 0);
    CHECK(bernoulli_threshold(-0.5) == 0);
    CHECK(bernoulli_threshold(1.0) == ~0ull);
    CHECK(bernoulli_threshold(0.5) == (1ull << 63));
}

TEST_CASE("poisson sampler matches mean and variance in both regimes") {
    for (double lambda : {0.7, 3.0, 50.0}) {
        PoissonSampler sampler(lambda);
        Stream rng(17);
        const int N = 200000;
        double s = 0, s2 = 0;
        for (int i = 0; i < N; ++i) {
            double k = static_cast<double>(sampler.draw(rng));
            s += k;
            s2 += k * k;
        }
        double mean = s / N;
        double var = s2 / N - mean * mean;
        CHECK(mean == doctest::Approx(lambda).epsilon(0.02));
        CHECK(var == doctest::Approx(lambda).epsilon(0.05));
    }
}

TEST_CASE("poisson intensity zero is identically zero") {
    PoissonSampler sampler(0.0);
    Stream rng(5);
    for (int i = 0; i < 100; ++i) CHECK(sampler.draw(rng) == 0);

    auto ch = poisson_channel(16, 1.0);
    CHECK(transmit(ch, Vec(16, 0.0), 9) == Vec(16, 0.0));
}

TEST_CASE("noise is output minus input") {
    auto ch = bernoulli_channel(8);
    Vec x(8, 0.4);
    Vec y = transmit(ch, x, 2);
    auto noise = noise_of(y, x);
    for (int i = 0; i < 8; ++i)
        CHECK(noise.z[static_cast<std::size_t>(i)] ==
              doctest::Approx(y[static_cast<std::size_t>(i)] - 0.4));
}

TEST_CASE("reduction spec covers the documented interval") {
    auto spec = poisson_to_bernoulli_reduction(1.0);
    CHECK(spec.interval_lo() == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(ReductionSpec::interval_hi == 1.0);
    CHECK(spec.induced_param(0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    CHECK(spec.induced_param(0.0) == 1.0);

    // the post-processing marks exactly the zero-count outputs
    CHECK(spec.post_process(0.0) == 1.0);
    CHECK(spec.post_process(1.0) == 0.0);
    CHECK(spec.post_process(7.0) == 0.0);

    Vec raw = {0.0, 3.0, 0.0, 1.0};
    Vec reduced = apply_reduction(spec, raw);
    CHECK(reduced == Vec{1.0, 0.0, 1.0, 0.0});
}

TEST_CASE("reduced poisson pipeline is Bernoulli(e^{-x}) empirically") {
    auto ch = poisson_channel(1000, 1.0);
    auto spec = poisson_to_bernoulli_reduction(1.0);
    Vec x(1000, 0.5);
    double ones = 0;
    const int reps = 100;
    for (int k = 0; k < reps; ++k) {
        Vec y = apply_reduction(spec, transmit(ch, x, 400 + static_cast<std::uint64_t>(k)));
        for (double v : y) ones += v;
    }
    CHECK(ones / (1000.0 * reps) ==
          doctest::Approx(std::exp(-0.5)).epsilon(0.01));
}
