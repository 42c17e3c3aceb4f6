#include <doctest.h>

#include "diforge/rng.hpp"
#include "diforge/stats.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

using namespace diforge;

TEST_CASE("stream replays the same sequence for the same key") {
    Stream a(42), b(42);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("streams with different keys diverge") {
    Stream a(1), b(2);
    int agree = 0;
    for (int i = 0; i < 64; ++i) agree += (a.next_u64() == b.next_u64());
    CHECK(agree == 0);
}

TEST_CASE("stream_key separates seed and index") {
    CHECK(stream_key(7, 0) != stream_key(7, 1));
    CHECK(stream_key(7, 0) != stream_key(8, 0));
    // chaining splits further
    CHECK(stream_key(stream_key(7, 0), 1) != stream_key(stream_key(7, 1), 0));
}

TEST_CASE("next_unit lies in [0,1), next_unit_pos in (0,1]") {
    Stream s(11);
    for (int i = 0; i < 10000; ++i) {
        double u = s.next_unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        double v = s.next_unit_pos();
        CHECK(v > 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("uniform and gaussian moments") {
    Stream s(123);
    const int N = 200000;
    double su = 0, su2 = 0, sg = 0, sg2 = 0;
    for (int i = 0; i < N; ++i) {
        double u = s.next_unit();
        su += u;
        su2 += u * u;
        double g = s.next_gaussian();
        sg += g;
        sg2 += g * g;
    }
    CHECK(su / N == doctest::Approx(0.5).epsilon(0.01));
    CHECK(su2 / N == doctest::Approx(1.0 / 3.0).epsilon(0.01));
    CHECK(sg / N == doctest::Approx(0.0).epsilon(1.0).scale(0.01));
    CHECK(sg2 / N == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("regularized incomplete beta oracle values") {
    // I_x(1,1) = x
    CHECK(reg_inc_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    // I_x(1,b) = 1 - (1-x)^b
    CHECK(reg_inc_beta(1, 4, 0.2) ==
          doctest::Approx(1.0 - std::pow(0.8, 4)).epsilon(1e-12));
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
    CHECK(reg_inc_beta(3.5, 2.25, 0.4) ==
          doctest::Approx(1.0 - reg_inc_beta(2.25, 3.5, 0.6)).epsilon(1e-12));
    CHECK(reg_inc_beta(2, 2, 0.0) == 0.0);
    CHECK(reg_inc_beta(2, 2, 1.0) == 1.0);
}

TEST_CASE("binomial cdf exact small cases") {
    // n=3, p=0.5: P[X<=0]=1/8, P[X<=1]=1/2, P[X<=3]=1
    CHECK(binomial_cdf(0, 3, 0.5) == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(binomial_cdf(1, 3, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(binomial_cdf(3, 3, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    // n=5, p=0.2: P[X<=1] = 0.8^5 + 5*0.2*0.8^4
    double expect = std::pow(0.8, 5) + 5 * 0.2 * std::pow(0.8, 4);
    CHECK(binomial_cdf(1, 5, 0.2) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(binomial_cdf(-1, 5, 0.2) == 0.0);
}

TEST_CASE("clopper-pearson endpoints") {
    // zero failures: lo = 0, hi = 1 - (alpha/2)^(1/n)
    auto ci = clopper_pearson(0, 100, 0.99);
    CHECK(ci.lo == 0.0);
    CHECK(ci.hi == doctest::Approx(1.0 - std::pow(0.005, 0.01)).epsilon(1e-6));
    // all failures: hi = 1, lo mirrors the zero case
    auto ci2 = clopper_pearson(100, 100, 0.99);
    CHECK(ci2.hi == 1.0);
    CHECK(ci2.lo == doctest::Approx(std::pow(0.005, 0.01)).epsilon(1e-6));
    // interior: interval brackets the point estimate and the endpoints
    // satisfy the defining tail equations
    auto ci3 = clopper_pearson(10, 1000, 0.99);
    CHECK(ci3.lo < 0.01);
    CHECK(ci3.hi > 0.01);
    // P[X >= 10 | p = lo] = alpha/2  <=>  1 - cdf(9) = 0.005
    CHECK(1.0 - binomial_cdf(9, 1000, ci3.lo) == doctest::Approx(0.005).epsilon(1e-4));
    CHECK(binomial_cdf(10, 1000, ci3.hi) == doctest::Approx(0.005).epsilon(1e-4));
}

TEST_CASE("two-sided binomial p-value") {
    // symmetric null at the mode: p-value capped at 1
    CHECK(binomial_two_sided_pvalue(5, 10, 0.5) == doctest::Approx(1.0));
    // far tail is tiny
    CHECK(binomial_two_sided_pvalue(0, 50, 0.9) < 1e-40);
    // doubling of the containing tail
    double lower_tail = binomial_cdf(2, 20, 0.5);
    CHECK(binomial_two_sided_pvalue(2, 20, 0.5) ==
          doctest::Approx(2.0 * lower_tail).epsilon(1e-12));
}
