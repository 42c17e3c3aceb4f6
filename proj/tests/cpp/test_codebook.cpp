#include <doctest.h>

#include "diforge/codebook.hpp"

#include <cmath>
#include <set>
#include <vector>

using namespace diforge;

namespace {

CodebookParams small_params() {
    CodebookParams p;
    p.n = 16;
    p.L = 2;
    p.delta = 0.2;
    p.radii = {0.6, 0.35};
    p.min_proj_dist = 0.2;
    p.branching = {3, 5};
    p.seed = 21;
    p.mode = BuildMode::Custom;
    return p;
}

} // namespace

TEST_CASE("parameter validation") {
    CodebookParams p = small_params();
    CHECK_NOTHROW(p.validate());
    CHECK(p.leaf_count() == 15);

    CodebookParams bad = p;
    bad.delta = 1.5;
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = p;
    bad.radii = {0.35, 0.6}; // not decreasing
    CHECK_THROWS_AS(bad.validate(), UsageError);
    bad = p;
    bad.L = 16; // needs L <= n-1
    bad.radii.assign(16, 1.0);
    bad.branching.assign(16, 2);
    CHECK_THROWS_AS(bad.validate(), DimensionUnderflow);
    bad = p;
    bad.branching = {3}; // length mismatch with L
    CHECK_THROWS_AS(bad.validate(), UsageError);
}

TEST_CASE("capacity parameters follow the halving-exponent schedule") {
    auto p = capacity_params(100, 2, 0.2, {4, 4}, 9);
    CHECK(p.radii.size() == 2);
    CHECK(p.radii[0] == doctest::Approx(std::pow(100.0, 0.4)).epsilon(1e-12));
    CHECK(p.radii[1] == doctest::Approx(std::pow(100.0, 0.2)).epsilon(1e-12));
    CHECK(p.min_proj_dist == doctest::Approx(3.0 * std::log(100.0)).epsilon(1e-12));
    CHECK(p.mode == BuildMode::Capacity);
}

TEST_CASE("a built codebook satisfies every structural invariant") {
    auto cb = build_primitive(small_params());
    CHECK(cb.params.n == 16);
    CHECK(cb.center == Vec(16, 0.5));
    CHECK(cb.leaf_ids.size() == 15);

    // distinct ids, each of length L with indices inside branching
    std::set<std::vector<int>> seen;
    for (const auto& id : cb.leaf_ids) {
        REQUIRE(id.indices.size() == 2);
        CHECK(id.indices[0] >= 0);
        CHECK(id.indices[0] < 3);
        CHECK(id.indices[1] >= 0);
        CHECK(id.indices[1] < 5);
        seen.insert(id.indices);
    }
    CHECK(seen.size() == 15);

    auto check = verify_codebook(cb);
    CHECK(check.ok);
    CHECK(check.max_path_inner <= 1e-10);
    CHECK(check.max_radius_rel_err <= 1e-9);
    CHECK(check.max_word_radius_rel_err <= 1e-9);
    CHECK(check.leaf_count_ok);

    // codeword = center + layer-1 direction + layer-2 direction
    for (const auto& id : cb.leaf_ids) {
        Vec w = codeword_vector(cb, id);
        int leaf = cb.node_of(id);
        const auto& node = cb.nodes[static_cast<std::size_t>(leaf)];
        for (int i = 0; i < 16; ++i)
            CHECK(w[static_cast<std::size_t>(i)] ==
                  doctest::Approx(node.center[static_cast<std::size_t>(i)])
                      .epsilon(1e-12));
        double r = norm(sub(w, cb.center));
        CHECK(r == doctest::Approx(std::sqrt(0.6 * 0.6 + 0.35 * 0.35)).epsilon(1e-9));
    }

    CHECK_THROWS_AS(cb.node_of(CodewordId{{0, 99}}), UnknownId);
    CHECK_THROWS_AS(cb.node_of(CodewordId{{0}}), UnknownId);
}

TEST_CASE("builds are bit-reproducible per seed") {
    auto a = build_primitive(small_params());
    auto b = build_primitive(small_params());
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i)
        CHECK(a.nodes[i].direction == b.nodes[i].direction);

    CodebookParams other = small_params();
    other.seed = 22;
    auto c = build_primitive(other);
    CHECK(a.nodes[1].direction != c.nodes[1].direction);
}

TEST_CASE("pairwise projective separation is exhaustive on small books") {
    auto cb = build_primitive(small_params());
    auto rep = pairwise_projective_separation(cb);
    CHECK(rep.exhaustive);
    CHECK(rep.pairs_checked == 15 * 14);
    CHECK(rep.min_sep > 0.0);
    CHECK(rep.bound ==
          doctest::Approx(0.2 - std::sqrt(2.0 * 2 * 0.2)).epsilon(1e-12));
    CHECK(rep.min_sep >= rep.bound);
    CHECK(rep.tested != rep.transmitted);
}

TEST_CASE("expurgation against a box, with and without rotation") {
    auto cb = build_primitive(small_params());
    InputBox box{0.0, 1.0, 16};

    auto [plain_ids, plain_rep] = expurgate(cb, box, 0, false);
    CHECK(plain_rep.total == 15);
    CHECK(plain_rep.retained == static_cast<long long>(plain_ids.size()));
    CHECK(!plain_rep.used_rotation);
    CHECK(plain_rep.fraction_out ==
          doctest::Approx(1.0 - plain_rep.retained / 15.0).epsilon(1e-12));
    for (const auto& id : plain_ids) CHECK(box.contains(codeword_vector(cb, id)));

    // rotating the codebook first, then expurgating without rotation, agrees
    // with rotating inside expurgate
    auto [rot_ids, rot_rep] = expurgate(cb, box, 5, true);
    CHECK(rot_rep.used_rotation);
    CHECK(rot_rep.rotation_seed == 5);
    auto rotated = rotated_copy(cb, 5);
    auto [rot_ids2, rot_rep2] = expurgate(rotated, box, 0, false);
    CHECK(rot_ids == rot_ids2);
    CHECK(rot_rep.retained == rot_rep2.retained);

    // rotation preserves radii and separations
    auto check = verify_codebook(rotated);
    CHECK(check.ok);
    auto sep_a = pairwise_projective_separation(cb);
    auto sep_b = pairwise_projective_separation(rotated);
    CHECK(sep_a.min_sep == doctest::Approx(sep_b.min_sep).epsilon(1e-9));
}

TEST_CASE("tight box rejects everything") {
    auto cb = build_primitive(small_params());
    InputBox box{0.49, 0.51, 16};
    auto [ids, rep] = expurgate(cb, box, 0, false);
    CHECK(ids.empty());
    CHECK(rep.fraction_out == 1.0);
}

TEST_CASE("affine map rescales and recenters") {
    auto cb = build_primitive(small_params());
    Vec new_center(16, 0.5);
    auto mapped = affine_map(cb, 0.5, new_center);
    CHECK(mapped.params.mode == BuildMode::Custom);
    CHECK(mapped.params.radii[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(mapped.params.radii[1] == doctest::Approx(0.175).epsilon(1e-12));
    CHECK(mapped.params.min_proj_dist == doctest::Approx(0.1).epsilon(1e-12));

    for (const auto& id : cb.leaf_ids) {
        Vec w = codeword_vector(cb, id);
        Vec m = codeword_vector(mapped, id);
        for (int i = 0; i < 16; ++i) {
            double expect = new_center[static_cast<std::size_t>(i)] +
                            0.5 * (w[static_cast<std::size_t>(i)] - 0.5);
            CHECK(m[static_cast<std::size_t>(i)] ==
                  doctest::Approx(expect).epsilon(1e-12));
        }
    }
    CHECK(verify_codebook(mapped).ok);
    CHECK_THROWS_AS(affine_map(cb, -1.0, new_center), UsageError);
    CHECK_THROWS_AS(affine_map(cb, 1.0, Vec(7, 0.0)), DimMismatch);
}

TEST_CASE("deep layers exhaust the ambient dimension") {
    CodebookParams p;
    p.n = 3;
    p.L = 3;
    p.delta = 0.2;
    p.radii = {0.3, 0.2, 0.1};
    p.min_proj_dist = 0.05;
    p.branching = {2, 2, 2};
    p.seed = 4;
    CHECK_THROWS_AS(p.validate(), DimensionUnderflow);
}

TEST_CASE("build mode names round-trip") {
    for (auto m : {BuildMode::Custom, BuildMode::Capacity, BuildMode::RateReliability})
        CHECK(build_mode_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(build_mode_from_string("bogus"), UsageError);
}
