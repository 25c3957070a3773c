#pragma once
// Operator-spec documents (JSON). See README for the schema.

#include <filesystem>

#include <json.hpp>

#include "vsum/examples.hpp"

namespace vsum {

// Accepts an inline document or {"file": "path"} (relative to `base`).
OperatorSpec operator_from_json(const nlohmann::json& doc, const std::filesystem::path& base = {});
GridSpec grid_from_json(const nlohmann::json& doc);
PotentialSpec potential_from_json(const nlohmann::json& doc, int dim);
Vector vector_from_json(const nlohmann::json& doc, std::optional<GridMeta> grid = std::nullopt);

nlohmann::json load_json_file(const std::filesystem::path& path);

}  // namespace vsum
