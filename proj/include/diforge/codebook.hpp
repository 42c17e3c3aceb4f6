#pragma once

#include "diforge/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace diforge {

enum class BuildMode { Custom, Capacity, RateReliability };

std::string to_string(BuildMode m);
BuildMode build_mode_from_string(const std::string& s);

struct CodebookParams {
    int n = 0;
    int L = 0;
    double delta = 0.0;
    std::vector<double> radii;   // r_1 > r_2 > ... > r_L
    double min_proj_dist = 0.0;  // d
    std::vector<int> branching;  // N_1..N_L
    std::uint64_t seed = 0;
    BuildMode mode = BuildMode::Custom;
    long max_attempts = 1'000'000;

    void validate() const; // throws UsageError
    long long leaf_count() const;
};

/// radii r_l = n^((1-delta)/2^l), d = 3 ln n.
CodebookParams capacity_params(int n, int L, double delta, std::vector<int> branching,
                               std::uint64_t seed);

/// Layer index string naming one codeword. Indices are 0-based.
struct CodewordId {
    std::vector<int> indices;

    bool operator==(const CodewordId& o) const { return indices == o.indices; }
    bool operator!=(const CodewordId& o) const { return !(*this == o); }
    std::string str() const;
};

struct CodebookNode {
    int layer = 0;            // 0 for the root
    int sibling = 0;          // index among the parent's children
    int parent = -1;          // node index, -1 for the root
    Vec direction;            // v from the parent center; empty at the root
    Vec center;               // o at this node
    std::vector<int> children;
};

struct PrimitiveCodebook {
    CodebookParams params;
    Vec center;
    std::vector<CodebookNode> nodes; // nodes[0] is the root; BFS order
    std::vector<CodewordId> leaf_ids;

    /// Node index of the layer-|prefix| node along the id path.
    int node_of_prefix(const std::vector<int>& prefix) const; // throws UnknownId
    int node_of(const CodewordId& id) const;
};

/// Builds the layered codebook: layer-1 arrangement on the radius-r_1 sphere
/// around `center`, each deeper arrangement in the orthogonal complement of
/// all ancestor directions. Default center is (1/2, ..., 1/2).
PrimitiveCodebook build_primitive(const CodebookParams& params,
                                  const std::optional<Vec>& center = std::nullopt);

/// center + sum of the L path directions (the leaf's stored center).
Vec codeword_vector(const PrimitiveCodebook& cb, const CodewordId& id);

struct SeparationReport {
    double min_sep = 0.0;
    double bound = 0.0;        // d - sqrt(2Ld)
    CodewordId tested;         // id whose layer test the minimum is against
    CodewordId transmitted;    // id of the interfering codeword
    long long pairs_checked = 0;
    bool exhaustive = true;
};

/// Minimum over ordered leaf pairs (tested, transmitted) of the projected
/// distance at the first differing layer. Exhaustive when the leaf count is
/// at most 1000, otherwise `sample_pairs` random pairs (default 10^4).
SeparationReport pairwise_projective_separation(
    const PrimitiveCodebook& cb, std::optional<long long> sample_pairs = std::nullopt);

/// Same scan restricted to a subset of leaf ids.
SeparationReport pairwise_projective_separation(
    const PrimitiveCodebook& cb, const std::vector<CodewordId>& ids,
    std::optional<long long> sample_pairs);

struct InputBox {
    double lo = 0.0;
    double hi = 1.0;
    int n = 0;

    bool contains(const Vec& x) const; // closed intervals
};

struct ExpurgationReport {
    long long total = 0;
    long long retained = 0;
    double fraction_out = 0.0;
    std::uint64_t rotation_seed = 0;
    bool used_rotation = false;
};

/// Retains the ids whose codeword, optionally Haar-rotated about the
/// codebook center, lies inside the box coordinatewise.
std::pair<std::vector<CodewordId>, ExpurgationReport>
expurgate(const PrimitiveCodebook& cb, const InputBox& box, std::uint64_t rotation_seed,
          bool use_rotation);

/// Codebook with every direction rotated about the center by the same Haar
/// rotation expurgate() applies; radii and separations are preserved.
PrimitiveCodebook rotated_copy(const PrimitiveCodebook& cb, std::uint64_t rotation_seed);

/// Directions scaled, center replaced; radii and d in params scale along.
/// The result is a Custom-mode codebook (formula-mode radii no longer apply).
PrimitiveCodebook affine_map(const PrimitiveCodebook& cb, double scale,
                             const Vec& new_center);

struct CodebookCheck {
    bool ok = true;
    double max_path_inner = 0.0;       // worst |<v_i, v_j>| over normalized path pairs
    double max_radius_rel_err = 0.0;   // worst | |v| - r_l | / r_l
    double max_word_radius_rel_err = 0.0; // worst | |w-c|^2 - R^2 | / R^2
    double min_sibling_sep = 0.0;
    double min_projective_sep = 0.0;
    double projective_bound = 0.0;
    bool leaf_count_ok = true;
    std::vector<std::string> failures;
};

/// Runs every construction invariant: path orthogonality, per-layer radius,
/// sphere radius identity, sibling angle-density, and the projective
/// separation floor d - sqrt(2Ld).
CodebookCheck verify_codebook(const PrimitiveCodebook& cb);

} // namespace diforge
