#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "projrigid/chart.hpp"
#include "projrigid/fields.hpp"

namespace projrigid {

class SceneError : public std::runtime_error {
 public:
  explicit SceneError(const std::string& what) : std::runtime_error(what) {}
};

/// Parse an expression in a chart context: coordinates, scene parameters and
/// the reserved aliases x0..x9 (which resolve to the chart's coordinates).
Expr parse_in_chart(const std::string& text, const Chart& chart,
                    const std::map<std::string, double>& params);

/// Load and validate a scene file (JSON). Validation covers chart shape,
/// boundary conventions (the first coordinate defines the boundary and stays
/// nonnegative), symmetric-pair consistency of connection entries, parseable
/// expressions, resolvable transitions and maps, and boundary compatibility
/// of transitions between boundary charts.
Scene load_scene(const std::string& path);
Scene scene_from_json(const nlohmann::json& j, const std::string& origin = "<memory>");

nlohmann::ordered_json scene_to_json(const Scene& scene);
void save_scene(const Scene& scene, const std::string& path);

/// FNV-1a hash of the scene's canonical serialization (or of raw bytes).
std::string hash_bytes(const std::string& bytes);
std::string scene_hash(const Scene& scene);

}  // namespace projrigid
