#pragma once

#include "forest.hpp"

#include <filesystem>

#include <json.hpp>

namespace hostscope {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json model_to_json(const ForestModel& model);

/// Inverse of model_to_json. Throws errc::version for an unknown
/// format_version, errc::schema when the labels or feature schema do not
/// belong to the declared stage, and errc::corrupt for structural damage.
ForestModel model_from_json(const nlohmann::json& j);

/// Writes through a temporary file so a failed save leaves no partial model.
void save_model(const ForestModel& model, const std::filesystem::path& path);
ForestModel load_model(const std::filesystem::path& path);

/// Training summary: params, OOB error, ranked importances, tree sizes.
nlohmann::json model_report_json(const ForestModel& model);

} // namespace hostscope
