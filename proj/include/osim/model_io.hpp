#pragma once

#include <filesystem>
#include <optional>

#include <nlohmann/json.hpp>

#include "osim/detectors.hpp"
#include "osim/trainer.hpp"

namespace osim {

inline constexpr std::string_view kModelFormat = "osim-model";
inline constexpr int kModelFormatVersion = 1;

nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

nlohmann::json openmax_to_json(const OpenMaxModel& model);
OpenMaxModel openmax_from_json(const nlohmann::json& j);

/// A trained network and, optionally, the OpenMax model fitted on it.
struct SavedModel {
  TrainedModel model;
  std::optional<OpenMaxModel> openmax;
};

/// Writes compact sorted-key JSON; save -> load -> save is byte-identical.
void save_model(const std::filesystem::path& path, const SavedModel& saved);
SavedModel load_model(const std::filesystem::path& path);

}  // namespace osim
