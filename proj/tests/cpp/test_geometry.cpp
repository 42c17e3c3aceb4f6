#include <doctest.h>

#include "diforge/geometry.hpp"

#include <cmath>
#include <vector>

using namespace diforge;

namespace {

constexpr double kPi = 3.14159265358979323846;

Subspace plane3d() {
    Subspace sub;
    sub.ambient_dim = 3;
    sub.basis = {{1, 0, 0}, {0, 1, 0}};
    sub.base_point = {0, 0, 0};
    return sub;
}

// Determinant via Gaussian elimination with partial pivoting; independent of
// the library's own sign computation.
double det_of(const Rotation& R) {
    int n = R.n;
    std::vector<double> a = R.a;
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(a[r * n + c]) > std::fabs(a[piv * n + c])) piv = r;
        if (piv != c) {
            for (int k = 0; k < n; ++k) std::swap(a[c * n + k], a[piv * n + k]);
            det = -det;
        }
        det *= a[c * n + c];
        for (int r = c + 1; r < n; ++r) {
            double f = a[r * n + c] / a[c * n + c];
            for (int k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
        }
    }
    return det;
}

} // namespace

TEST_CASE("projection of (3,4) onto (1,1)") {
    auto [coeff, proj_norm] = project_onto({3, 4}, {1, 1});
    CHECK(coeff == doctest::Approx(7.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(proj_norm == doctest::Approx(4.949747468305833).epsilon(1e-12));
}

TEST_CASE("projection properties") {
    CHECK_THROWS_AS(project_onto({1, 2}, {0, 0}), ZeroDirection);
    CHECK_THROWS_AS(project_onto({1, 2, 3}, {1, 1}), DimMismatch);

    // linearity in z and the contraction |proj| <= |z|
    Stream s(5);
    for (int rep = 0; rep < 50; ++rep) {
        Vec z = random_unit_vector(6, s);
        Vec w = random_unit_vector(6, s);
        Vec v = random_unit_vector(6, s);
        auto [cz, pz] = project_onto(z, v);
        auto [cw, pw] = project_onto(w, v);
        auto [czw, pzw] = project_onto(add(z, w), v);
        CHECK(czw == doctest::Approx(cz + cw).epsilon(1e-10));
        CHECK(pz <= norm(z) + 1e-12);
        (void)pw;
        (void)pzw;
    }
}

TEST_CASE("minimum separation angles") {
    CHECK(min_separation_angle(1.0, 1.0) == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(min_separation_angle(2.0, 1.0) == doctest::Approx(kPi / 3).epsilon(1e-12));
    // r(1 - cos theta) = d is an identity of the definition
    double theta = min_separation_angle(1.7, 0.9);
    CHECK(1.7 * (1.0 - std::cos(theta)) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK_THROWS_AS(min_separation_angle(1.0, 2.5), Infeasible);
}

TEST_CASE("four points at d = r fill the circle; a fifth cannot fit") {
    ArrangementSpec spec;
    spec.radius = 1.0;
    spec.min_proj_dist = 1.0;
    spec.count = 4;
    spec.max_attempts = 20000;

    auto pts = generate_angle_dense(plane3d(), spec, 99);
    REQUIRE(pts.size() == 4);
    for (const auto& p : pts) {
        CHECK(norm(p) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(p[2] == doctest::Approx(0.0).epsilon(1e-12));
    }
    auto check = verify_angle_dense({0, 0, 0}, pts, spec.min_proj_dist);
    CHECK(check.ok);
    CHECK(check.min_sep == doctest::Approx(1.0).epsilon(1e-9));

    spec.count = 5;
    CHECK_THROWS_AS(generate_angle_dense(plane3d(), spec, 99), PlacementExhausted);
}

TEST_CASE("complement generation stays orthogonal to forbidden directions") {
    Vec base(8, 0.5);
    std::vector<Vec> forbidden = {{1, 0, 0, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0, 0, 0}};
    ArrangementSpec spec;
    spec.radius = 2.0;
    spec.min_proj_dist = 1.0;
    spec.count = 5;

    auto pts = generate_angle_dense_complement(base, forbidden, spec, 7);
    REQUIRE(pts.size() == 5);
    for (const auto& p : pts) {
        Vec v = sub(p, base);
        CHECK(norm(v) == doctest::Approx(2.0).epsilon(1e-9));
        for (const auto& f : forbidden)
            CHECK(std::fabs(dot(v, f)) < 1e-10);
    }
    CHECK(verify_angle_dense(base, pts, spec.min_proj_dist).ok);
}

TEST_CASE("verify_angle_dense flags violations") {
    // two coincident points: projective separation 0
    std::vector<Vec> pts = {{1, 0, 0}, {1, 0, 0}};
    auto check = verify_angle_dense({0, 0, 0}, pts, 0.5);
    CHECK(!check.ok);
    REQUIRE(check.violating_pair.has_value());
    CHECK(check.min_sep == doctest::Approx(0.0));

    // orthogonal pair on the unit sphere: separation r(1-cos) = 1
    std::vector<Vec> ortho = {{1, 0, 0}, {0, 1, 0}};
    CHECK(verify_angle_dense({0, 0, 0}, ortho, 1.0).ok);
    CHECK(!verify_angle_dense({0, 0, 0}, ortho, 1.1).ok);
}

TEST_CASE("subspace validation") {
    Subspace bad = plane3d();
    bad.basis[1] = {0.6, 0.8, 0}; // unit but not orthogonal to e1
    CHECK_THROWS_AS(bad.validate(), UsageError);

    Subspace good = plane3d();
    CHECK_NOTHROW(good.validate());
}

TEST_CASE("haar rotation is orthogonal, oriented, and deterministic") {
    const int n = 6;
    Rotation R = haar_rotation(n, 31);
    // rows orthonormal
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double ip = 0;
            for (int k = 0; k < n; ++k) ip += R.a[i * n + k] * R.a[j * n + k];
            CHECK(ip == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
        }
    }
    CHECK(det_of(R) == doctest::Approx(1.0).epsilon(1e-8));

    // isometry and inverse
    Stream s(77);
    Vec x = random_unit_vector(n, s);
    Vec y = R.apply(x);
    CHECK(norm(y) == doctest::Approx(norm(x)).epsilon(1e-12));
    Vec back = R.apply_transpose(y);
    for (int i = 0; i < n; ++i) CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-10));

    Rotation R2 = haar_rotation(n, 31);
    CHECK(R.a == R2.a);
    Rotation R3 = haar_rotation(n, 32);
    CHECK(R.a != R3.a);
}

TEST_CASE("random unit vectors have unit norm") {
    Stream s(3);
    for (int d : {2, 3, 17, 100}) {
        Vec u = random_unit_vector(d, s);
        CHECK(static_cast<int>(u.size()) == d);
        CHECK(norm(u) == doctest::Approx(1.0).epsilon(1e-12));
    }
}
