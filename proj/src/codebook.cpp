#include "diforge/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace diforge {

std::string to_string(BuildMode m) {
    switch (m) {
        case BuildMode::Capacity: return "capacity";
        case BuildMode::RateReliability: return "rate-reliability";
        default: return "custom";
    }
}

BuildMode build_mode_from_string(const std::string& s) {
    if (s == "capacity") return BuildMode::Capacity;
    if (s == "rate-reliability") return BuildMode::RateReliability;
    if (s == "custom") return BuildMode::Custom;
    throw UsageError("unknown codebook mode '" + s + "'");
}

void CodebookParams::validate() const {
    if (n < 2) throw UsageError("codebook: n must be >= 2");
    if (L < 1) throw UsageError("codebook: L must be >= 1");
    if (L > n - 1) throw DimensionUnderflow("codebook: L <= n - 1 required");
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw UsageError("codebook: delta must lie in (0, 1)");
    }
    if (static_cast<int>(radii.size()) != L) {
        throw UsageError("codebook: need exactly L radii");
    }
    if (static_cast<int>(branching.size()) != L) {
        throw UsageError("codebook: need exactly L branching factors");
    }
    for (int l = 0; l < L; ++l) {
        if (!(radii[static_cast<std::size_t>(l)] > 0.0)) {
            throw UsageError("codebook: radii must be positive");
        }
        if (l > 0 && !(radii[static_cast<std::size_t>(l)] <
                       radii[static_cast<std::size_t>(l - 1)])) {
            throw UsageError("codebook: radii must be strictly decreasing");
        }
        if (branching[static_cast<std::size_t>(l)] < 1) {
            throw UsageError("codebook: branching factors must be >= 1");
        }
    }
    if (!(min_proj_dist > 0.0)) {
        throw UsageError("codebook: min_proj_dist must be positive");
    }
    if (max_attempts < 1) throw UsageError("codebook: max_attempts must be >= 1");
}

long long CodebookParams::leaf_count() const {
    long long c = 1;
    for (int b : branching) c *= b;
    return c;
}

CodebookParams capacity_params(int n, int L, double delta, std::vector<int> branching,
                               std::uint64_t seed) {
    CodebookParams p;
    p.n = n;
    p.L = L;
    p.delta = delta;
    p.branching = std::move(branching);
    p.seed = seed;
    p.mode = BuildMode::Capacity;
    p.min_proj_dist = 3.0 * std::log(static_cast<double>(n));
    p.radii.resize(static_cast<std::size_t>(L));
    double expo = (1.0 - delta) / 2.0;
    for (int l = 0; l < L; ++l) {
        p.radii[static_cast<std::size_t>(l)] = std::pow(static_cast<double>(n), expo);
        expo /= 2.0;
    }
    p.validate();
    return p;
}

std::string CodewordId::str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(indices[i]);
    }
    return s + ")";
}

int PrimitiveCodebook::node_of_prefix(const std::vector<int>& prefix) const {
    if (static_cast<int>(prefix.size()) > params.L) {
        throw UnknownId("id path longer than L");
    }
    int node = 0;
    for (std::size_t l = 0; l < prefix.size(); ++l) {
        int s = prefix[l];
        const auto& kids = nodes[static_cast<std::size_t>(node)].children;
        if (s < 0 || s >= static_cast<int>(kids.size())) {
            throw UnknownId("index " + std::to_string(s) + " out of range at layer " +
                            std::to_string(l + 1));
        }
        node = kids[static_cast<std::size_t>(s)];
    }
    return node;
}

int PrimitiveCodebook::node_of(const CodewordId& id) const {
    if (static_cast<int>(id.indices.size()) != params.L) {
        throw UnknownId("id has " + std::to_string(id.indices.size()) +
                        " indices, want " + std::to_string(params.L));
    }
    return node_of_prefix(id.indices);
}

PrimitiveCodebook build_primitive(const CodebookParams& params,
                                  const std::optional<Vec>& center) {
    params.validate();
    PrimitiveCodebook cb;
    cb.params = params;
    if (center) {
        if (static_cast<int>(center->size()) != params.n) {
            throw DimMismatch("build_primitive: center dimension != n");
        }
        cb.center = *center;
    } else {
        cb.center.assign(static_cast<std::size_t>(params.n), 0.5);
    }

    CodebookNode root;
    root.layer = 0;
    root.parent = -1;
    root.center = cb.center;
    cb.nodes.push_back(std::move(root));

    // BFS: complements never materialize; children are sampled ambient with
    // the normalized ancestor directions projected out. Each arrangement's
    // seed is keyed by the parent's node index, so the tree is a pure
    // function of params and the chosen center.
    std::vector<std::vector<Vec>> path_dirs(1); // per node, normalized ancestors
    for (std::size_t idx = 0; idx < cb.nodes.size(); ++idx) {
        int layer = cb.nodes[idx].layer;
        if (layer == params.L) continue;

        ArrangementSpec spec;
        spec.radius = params.radii[static_cast<std::size_t>(layer)];
        spec.min_proj_dist = params.min_proj_dist;
        spec.count = params.branching[static_cast<std::size_t>(layer)];
        spec.max_attempts = params.max_attempts;

        Vec parent_center = cb.nodes[idx].center;
        auto points = generate_angle_dense_complement(
            parent_center, path_dirs[idx], spec,
            stream_key(params.seed, static_cast<std::uint64_t>(idx)));

        for (int s = 0; s < spec.count; ++s) {
            CodebookNode child;
            child.layer = layer + 1;
            child.sibling = s;
            child.parent = static_cast<int>(idx);
            child.center = points[static_cast<std::size_t>(s)];
            child.direction = sub(child.center, parent_center);
            int child_idx = static_cast<int>(cb.nodes.size());
            cb.nodes[idx].children.push_back(child_idx);

            auto dirs = path_dirs[idx];
            dirs.push_back(scaled(child.direction, 1.0 / norm(child.direction)));
            path_dirs.push_back(std::move(dirs));
            cb.nodes.push_back(std::move(child));
        }
    }

    // Leaf ids in lexicographic order (BFS appends siblings in order).
    for (std::size_t idx = 0; idx < cb.nodes.size(); ++idx) {
        if (cb.nodes[idx].layer != params.L) continue;
        CodewordId id;
        int cur = static_cast<int>(idx);
        while (cur != 0) {
            id.indices.push_back(cb.nodes[static_cast<std::size_t>(cur)].sibling);
            cur = cb.nodes[static_cast<std::size_t>(cur)].parent;
        }
        std::reverse(id.indices.begin(), id.indices.end());
        cb.leaf_ids.push_back(std::move(id));
    }
    return cb;
}

Vec codeword_vector(const PrimitiveCodebook& cb, const CodewordId& id) {
    return cb.nodes[static_cast<std::size_t>(cb.node_of(id))].center;
}

namespace {

// Projected distance the decoder for `tested` sees at the first differing
// layer when `transmitted` is on the channel: |<w - o_parent, e> - r_l|.
double ordered_pair_separation(const PrimitiveCodebook& cb, const CodewordId& tested,
                               const CodewordId& transmitted) {
    int l = 0;
    while (l < cb.params.L && tested.indices[static_cast<std::size_t>(l)] ==
                                  transmitted.indices[static_cast<std::size_t>(l)]) {
        ++l;
    }
    std::vector<int> prefix(tested.indices.begin(), tested.indices.begin() + l + 1);
    const auto& node = cb.nodes[static_cast<std::size_t>(cb.node_of_prefix(prefix))];
    const auto& parent = cb.nodes[static_cast<std::size_t>(node.parent)];
    Vec w = codeword_vector(cb, transmitted);
    double r = norm(node.direction);
    double coeff = dot(sub(w, parent.center), node.direction) / r;
    return std::fabs(coeff - r);
}

} // namespace

SeparationReport pairwise_projective_separation(const PrimitiveCodebook& cb,
                                                const std::vector<CodewordId>& ids,
                                                std::optional<long long> sample_pairs) {
    long long total = static_cast<long long>(ids.size());
    if (total < 2) throw TooFewWords("projective separation needs >= 2 codewords");

    SeparationReport rep;
    rep.bound = cb.params.min_proj_dist -
                std::sqrt(2.0 * cb.params.L * cb.params.min_proj_dist);
    rep.min_sep = std::numeric_limits<double>::infinity();

    auto consider = [&](long long i, long long j) {
        double sep = ordered_pair_separation(cb, ids[static_cast<std::size_t>(i)],
                                             ids[static_cast<std::size_t>(j)]);
        ++rep.pairs_checked;
        if (sep < rep.min_sep) {
            rep.min_sep = sep;
            rep.tested = ids[static_cast<std::size_t>(i)];
            rep.transmitted = ids[static_cast<std::size_t>(j)];
        }
    };

    if (total <= 1000) {
        rep.exhaustive = true;
        for (long long i = 0; i < total; ++i) {
            for (long long j = 0; j < total; ++j) {
                if (i != j) consider(i, j);
            }
        }
    } else {
        rep.exhaustive = false;
        long long want = sample_pairs.value_or(10'000);
        Stream rng = stream_for(cb.params.seed, 0x5e9a11ce);
        for (long long k = 0; k < want; ++k) {
            auto i = static_cast<long long>(rng.next_unit() * static_cast<double>(total));
            auto j = static_cast<long long>(rng.next_unit() * static_cast<double>(total));
            i = std::min(i, total - 1);
            j = std::min(j, total - 1);
            if (i == j) j = (j + 1) % total;
            consider(i, j);
        }
    }
    return rep;
}

SeparationReport pairwise_projective_separation(const PrimitiveCodebook& cb,
                                                std::optional<long long> sample_pairs) {
    return pairwise_projective_separation(cb, cb.leaf_ids, sample_pairs);
}

bool InputBox::contains(const Vec& x) const {
    if (static_cast<int>(x.size()) != n) return false;
    for (double c : x) {
        if (c < lo || c > hi) return false;
    }
    return true;
}

std::pair<std::vector<CodewordId>, ExpurgationReport>
expurgate(const PrimitiveCodebook& cb, const InputBox& box, std::uint64_t rotation_seed,
          bool use_rotation) {
    if (box.n != cb.params.n) throw DimMismatch("expurgate: box dimension != n");
    if (!(box.lo < box.hi)) throw UsageError("expurgate: box.lo must be < box.hi");

    Rotation rot;
    if (use_rotation) rot = haar_rotation(cb.params.n, rotation_seed);

    std::vector<CodewordId> retained;
    for (const auto& id : cb.leaf_ids) {
        Vec w = codeword_vector(cb, id);
        if (use_rotation) {
            w = add(cb.center, rot.apply(sub(w, cb.center)));
        }
        if (box.contains(w)) retained.push_back(id);
    }

    ExpurgationReport rep;
    rep.total = static_cast<long long>(cb.leaf_ids.size());
    rep.retained = static_cast<long long>(retained.size());
    rep.fraction_out = rep.total == 0
                           ? 0.0
                           : static_cast<double>(rep.total - rep.retained) /
                                 static_cast<double>(rep.total);
    rep.rotation_seed = rotation_seed;
    rep.used_rotation = use_rotation;
    return {std::move(retained), rep};
}

PrimitiveCodebook rotated_copy(const PrimitiveCodebook& cb, std::uint64_t rotation_seed) {
    Rotation rot = haar_rotation(cb.params.n, rotation_seed);
    PrimitiveCodebook out = cb;
    for (auto& node : out.nodes) {
        if (node.parent < 0) continue;
        node.direction = rot.apply(node.direction);
    }
    for (auto& node : out.nodes) {
        if (node.parent < 0) {
            node.center = out.center;
        } else {
            node.center = add(out.nodes[static_cast<std::size_t>(node.parent)].center,
                              node.direction);
        }
    }
    return out;
}

PrimitiveCodebook affine_map(const PrimitiveCodebook& cb, double scale,
                             const Vec& new_center) {
    if (!(scale > 0.0)) throw UsageError("affine_map: scale must be positive");
    if (static_cast<int>(new_center.size()) != cb.params.n) {
        throw DimMismatch("affine_map: center dimension != n");
    }
    PrimitiveCodebook out = cb;
    out.center = new_center;
    out.params.mode = BuildMode::Custom;
    out.params.min_proj_dist *= scale;
    for (auto& r : out.params.radii) r *= scale;
    for (auto& node : out.nodes) {
        if (node.parent >= 0) node.direction = scaled(node.direction, scale);
    }
    for (auto& node : out.nodes) {
        if (node.parent < 0) {
            node.center = out.center;
        } else {
            node.center = add(out.nodes[static_cast<std::size_t>(node.parent)].center,
                              node.direction);
        }
    }
    return out;
}

CodebookCheck verify_codebook(const PrimitiveCodebook& cb) {
    CodebookCheck check;
    const auto& p = cb.params;
    double r_sq = 0.0;
    for (double r : p.radii) r_sq += r * r;

    check.leaf_count_ok =
        static_cast<long long>(cb.leaf_ids.size()) == p.leaf_count();
    if (!check.leaf_count_ok) check.failures.push_back("leaf count != product of branching");

    check.min_sibling_sep = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < cb.nodes.size(); ++idx) {
        const auto& node = cb.nodes[idx];
        if (node.children.empty()) continue;
        std::vector<Vec> pts;
        pts.reserve(node.children.size());
        for (int c : node.children) {
            pts.push_back(cb.nodes[static_cast<std::size_t>(c)].center);
        }
        // A loaded book may violate even the preconditions of the sibling
        // check (unequal radii, a child on top of its parent). Those are
        // verification failures here, not caller mistakes.
        try {
            auto sib = verify_angle_dense(node.center, pts, p.min_proj_dist);
            check.min_sibling_sep = std::min(check.min_sibling_sep, sib.min_sep);
            if (!sib.ok) {
                check.failures.push_back("siblings of node " + std::to_string(idx) +
                                         " below min separation");
            }
        } catch (const Error& e) {
            check.failures.push_back("siblings of node " + std::to_string(idx) +
                                     ": " + e.what());
        }
    }

    for (const auto& id : cb.leaf_ids) {
        // Collect the path directions.
        std::vector<const Vec*> dirs;
        int node = 0;
        Vec sum(static_cast<std::size_t>(p.n), 0.0);
        for (int l = 0; l < p.L; ++l) {
            node = cb.nodes[static_cast<std::size_t>(node)]
                       .children[static_cast<std::size_t>(
                           id.indices[static_cast<std::size_t>(l)])];
            const auto& nd = cb.nodes[static_cast<std::size_t>(node)];
            dirs.push_back(&nd.direction);
            for (int i = 0; i < p.n; ++i) {
                sum[static_cast<std::size_t>(i)] +=
                    nd.direction[static_cast<std::size_t>(i)];
            }
            double r = norm(nd.direction);
            double want = p.radii[static_cast<std::size_t>(l)];
            check.max_radius_rel_err = std::max(check.max_radius_rel_err,
                                                std::fabs(r - want) / want);
        }
        for (std::size_t i = 0; i < dirs.size(); ++i) {
            for (std::size_t j = i + 1; j < dirs.size(); ++j) {
                double c = std::fabs(dot(*dirs[i], *dirs[j])) /
                           (norm(*dirs[i]) * norm(*dirs[j]));
                check.max_path_inner = std::max(check.max_path_inner, c);
            }
        }
        double wsq = dot(sum, sum);
        check.max_word_radius_rel_err =
            std::max(check.max_word_radius_rel_err, std::fabs(wsq - r_sq) / r_sq);
    }
    if (check.max_path_inner > kTolOrth) {
        check.failures.push_back("path directions not orthogonal within 1e-10");
    }
    if (check.max_radius_rel_err > kTolRadiusRel) {
        check.failures.push_back("layer radius off by more than 1e-9 relative");
    }
    if (check.max_word_radius_rel_err > 1e-9) {
        check.failures.push_back("codeword sphere radius identity violated");
    }

    if (cb.leaf_ids.size() >= 2) {
        try {
            auto sep = pairwise_projective_separation(cb);
            check.min_projective_sep = sep.min_sep;
            check.projective_bound = sep.bound;
            if (sep.min_sep < sep.bound * (1.0 - kSepSlackRel)) {
                check.failures.push_back("projective separation below d - sqrt(2Ld)");
            }
        } catch (const Error& e) {
            check.failures.push_back(std::string("pairwise separation: ") + e.what());
        }
    } else {
        check.min_projective_sep = std::numeric_limits<double>::infinity();
        check.projective_bound = p.min_proj_dist -
                                 std::sqrt(2.0 * p.L * p.min_proj_dist);
    }

    check.ok = check.failures.empty();
    return check;
}

} // namespace diforge
