#include "diforge/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace diforge {

using nlohmann::json;

namespace {

json nan_safe(double v) {
    // JSON has no NaN/Inf literal; the catalog's infeasible angles serialize
    // as null.
    if (std::isnan(v) || std::isinf(v)) return nullptr;
    return v;
}

} // namespace

json codebook_to_json(const PrimitiveCodebook& cb) {
    json j;
    j["schema_version"] = 1;
    j["params"] = {
        {"n", cb.params.n},
        {"L", cb.params.L},
        {"delta", cb.params.delta},
        {"radii", cb.params.radii},
        {"d", cb.params.min_proj_dist},
        {"branching", cb.params.branching},
        {"seed", cb.params.seed},
        {"mode", to_string(cb.params.mode)},
    };
    j["center"] = cb.center;

    json nodes = json::array();
    for (std::size_t idx = 1; idx < cb.nodes.size(); ++idx) {
        const auto& node = cb.nodes[idx];
        std::vector<int> id_path;
        int cur = static_cast<int>(idx);
        while (cur != 0) {
            id_path.push_back(cb.nodes[static_cast<std::size_t>(cur)].sibling);
            cur = cb.nodes[static_cast<std::size_t>(cur)].parent;
        }
        std::reverse(id_path.begin(), id_path.end());
        nodes.push_back({{"id_path", id_path}, {"direction", node.direction}});
    }
    j["nodes"] = std::move(nodes);
    return j;
}

PrimitiveCodebook codebook_from_json(const json& j) {
    if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1) {
        throw UsageError("codebook json: unsupported schema_version");
    }
    const auto& jp = j.at("params");

    PrimitiveCodebook cb;
    cb.params.n = jp.at("n").get<int>();
    cb.params.L = jp.at("L").get<int>();
    cb.params.delta = jp.at("delta").get<double>();
    cb.params.radii = jp.at("radii").get<std::vector<double>>();
    cb.params.min_proj_dist = jp.at("d").get<double>();
    cb.params.branching = jp.at("branching").get<std::vector<int>>();
    cb.params.seed = jp.at("seed").get<std::uint64_t>();
    cb.params.mode = build_mode_from_string(jp.at("mode").get<std::string>());
    cb.params.validate();
    cb.center = j.at("center").get<Vec>();
    if (static_cast<int>(cb.center.size()) != cb.params.n) {
        throw UsageError("codebook json: center dimension != n");
    }

    CodebookNode root;
    root.layer = 0;
    root.parent = -1;
    root.center = cb.center;
    cb.nodes.push_back(std::move(root));

    // Nodes arrive in the order they were written (BFS, siblings ascending);
    // rebuild by walking each id_path from the root.
    for (const auto& jn : j.at("nodes")) {
        auto id_path = jn.at("id_path").get<std::vector<int>>();
        if (id_path.empty() || static_cast<int>(id_path.size()) > cb.params.L) {
            throw UsageError("codebook json: bad id_path length");
        }
        std::vector<int> parent_path(id_path.begin(), id_path.end() - 1);
        int parent = cb.node_of_prefix(parent_path);
        auto& parent_node = cb.nodes[static_cast<std::size_t>(parent)];
        if (id_path.back() != static_cast<int>(parent_node.children.size())) {
            throw UsageError("codebook json: node order broken at " +
                             std::to_string(id_path.back()));
        }

        CodebookNode node;
        node.layer = static_cast<int>(id_path.size());
        node.sibling = id_path.back();
        node.parent = parent;
        node.direction = jn.at("direction").get<Vec>();
        if (static_cast<int>(node.direction.size()) != cb.params.n) {
            throw UsageError("codebook json: direction dimension != n");
        }
        node.center = add(parent_node.center, node.direction);
        int node_idx = static_cast<int>(cb.nodes.size());
        parent_node.children.push_back(node_idx);
        cb.nodes.push_back(std::move(node));
    }

    for (std::size_t idx = 0; idx < cb.nodes.size(); ++idx) {
        if (cb.nodes[idx].layer != cb.params.L) continue;
        CodewordId id;
        int cur = static_cast<int>(idx);
        while (cur != 0) {
            id.indices.push_back(cb.nodes[static_cast<std::size_t>(cur)].sibling);
            cur = cb.nodes[static_cast<std::size_t>(cur)].parent;
        }
        std::reverse(id.indices.begin(), id.indices.end());
        cb.leaf_ids.push_back(std::move(id));
    }
    if (static_cast<long long>(cb.leaf_ids.size()) != cb.params.leaf_count()) {
        throw UsageError("codebook json: leaf count != product of branching");
    }
    return cb;
}

void atomic_write(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw UsageError("cannot open " + tmp + " for writing");
        out << content;
        if (!out.flush()) throw UsageError("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw UsageError("cannot rename " + tmp + " to " + path);
    }
}

void save_codebook(const PrimitiveCodebook& cb, const std::string& path) {
    atomic_write(path, codebook_to_json(cb).dump(2) + "\n");
}

PrimitiveCodebook load_codebook(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& ex) {
        throw UsageError("cannot parse " + path + ": " + ex.what());
    }
    return codebook_from_json(j);
}

json to_json(const ErrorEstimate& e) {
    return {
        {"p_hat", e.p_hat},
        {"trials", e.trials},
        {"failures", e.failures},
        {"ci", {e.ci_lo, e.ci_hi}},
        {"ci_level", e.level},
        {"bound", e.bound},
        {"zero_failure_regime", e.zero_failure_regime},
        {"verdict", e.consistent ? "ok" : "violation"},
    };
}

json to_json(const ExpurgationReport& r) {
    return {
        {"total", r.total},
        {"retained", r.retained},
        {"fraction_out", r.fraction_out},
        {"rotation_seed", r.rotation_seed},
        {"used_rotation", r.used_rotation},
    };
}

json to_json(const RateReport& r) {
    json j = {
        {"n", r.n},
        {"L", r.L},
        {"N_retained", r.N_retained},
        {"linear_rate", r.linear_rate},
        {"linearithmic_rate", r.linearithmic_rate},
        {"theoretical_primitive_log2N", r.theoretical_primitive_log2N},
    };
    if (r.rr_lower_bound) j["rr_lower_bound"] = *r.rr_lower_bound;
    if (r.rr_upper_bound) j["rr_upper_bound"] = *r.rr_upper_bound;
    return j;
}

json to_json(const BoundCatalog& c) {
    json theta = json::array();
    for (double th : c.theta) theta.push_back(nan_safe(th));
    json j = {
        {"n", c.n},
        {"L", c.L},
        {"delta", c.delta},
        {"t", c.t},
        {"d", c.d},
        {"radii", c.radii},
        {"lambda", c.lambda},
        {"lambda1", c.lambda1},
        {"lambda2", c.lambda2},
        {"theta", std::move(theta)},
        {"Delta_bound", c.Delta_bound},
        {"prop4_log2N", c.prop4_log2N},
        {"linearithmic_rate_bound", c.linearithmic_rate_bound},
        {"eta_L", c.eta_L},
        {"R_sq", c.R_sq},
        {"vertex_distance_sq", c.vertex_distance_sq},
    };
    if (c.E) j["E"] = *c.E;
    if (c.E1) j["E1"] = *c.E1;
    if (c.E2) j["E2"] = *c.E2;
    if (c.rr_lower_bound) j["rr_lower_bound"] = *c.rr_lower_bound;
    if (c.rr_converse_bound) j["rr_converse_bound"] = *c.rr_converse_bound;
    return j;
}

json to_json(const CodebookCheck& c) {
    return {
        {"ok", c.ok},
        {"max_path_inner", c.max_path_inner},
        {"max_radius_rel_err", c.max_radius_rel_err},
        {"max_word_radius_rel_err", c.max_word_radius_rel_err},
        {"min_sibling_sep", c.min_sibling_sep},
        {"min_projective_sep", c.min_projective_sep},
        {"projective_bound", c.projective_bound},
        {"leaf_count_ok", c.leaf_count_ok},
        {"failures", c.failures},
    };
}

} // namespace diforge
