#pragma once

#include "disscat/model.hpp"

#include <json.hpp>

#include <string>

namespace disscat {

/// Complex matrices are nested row arrays of [re, im] pairs.
nlohmann::json matrix_to_json(const CMatrix& a);
CMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json fiber_map_to_json(const FiberMap& map);
/// The domain is not part of a fiber map document; it is supplied by the
/// enclosing model.
FiberMap fiber_map_from_json(const nlohmann::json& j, const Interval& domain);

nlohmann::json model_to_json(const Model& model);

/// Throws InvalidInput on malformed documents.
Model model_from_json(const nlohmann::json& j);

Model load_model(const std::string& path);

}  // namespace disscat
