#pragma once

#include "diforge/bounds.hpp"
#include "diforge/codebook.hpp"
#include "diforge/experiments.hpp"

#include <json.hpp>

#include <string>

namespace diforge {

/// Schema: {schema_version, params{n, L, delta, radii, d, branching, seed,
/// mode}, center, nodes: [{id_path, direction}, ...]}. Node centers and
/// complements are implied by the directions and recomputed on load.
nlohmann::json codebook_to_json(const PrimitiveCodebook& cb);
PrimitiveCodebook codebook_from_json(const nlohmann::json& j);

void save_codebook(const PrimitiveCodebook& cb, const std::string& path);
PrimitiveCodebook load_codebook(const std::string& path);

/// Writes content to path via a temp file in the same directory + rename.
void atomic_write(const std::string& path, const std::string& content);

nlohmann::json to_json(const ErrorEstimate& e);
nlohmann::json to_json(const ExpurgationReport& r);
nlohmann::json to_json(const RateReport& r);
nlohmann::json to_json(const BoundCatalog& c);
nlohmann::json to_json(const CodebookCheck& c);

} // namespace diforge
