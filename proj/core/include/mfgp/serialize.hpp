#pragma once

#include <string>
#include <string_view>

#include "mfgp/csv.hpp"
#include "mfgp/model.hpp"

namespace mfgp {

inline constexpr int kModelFormatVersion = 1;

/// Canonical compact JSON (sorted keys) of fit settings.
std::string settings_to_json(const FitSettings& settings);
/// Missing keys keep the values from `defaults`. Throws InvalidArgument.
FitSettings settings_from_json(std::string_view text, const FitSettings& defaults = {});

/// Self-describing model document: metadata, method, settings, level data and
/// the hyperparameters from which every cached factor is rebuilt on load.
std::string model_to_json(const MultiLevelModel& model, const FitSettings& settings,
                          const Metadata& metadata);

struct LoadedModel {
  MultiLevelModel model;
  FitSettings settings;
  Metadata metadata;
};

/// Rebuilds the posterior with the stored hyperparameters; predictions equal
/// those of the saved model bitwise. Unknown format versions raise DataError.
LoadedModel model_from_json(std::string_view text, const std::string& source);
LoadedModel load_model(const std::string& path);

}  // namespace mfgp
