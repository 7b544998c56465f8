#pragma once

#include <nlohmann/json.hpp>
#include <string>

#include "mfgp/csv.hpp"
#include "mfgp/model.hpp"

namespace mfgp::detail {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

Json settings_json(const FitSettings& s);
FitSettings settings_from(const Json& j, const FitSettings& defaults);

Json vector_json(const Vector& v);
Vector vector_from(const Json& j);
Json matrix_json(const Matrix& m);
Matrix matrix_from(const Json& j, Eigen::Index cols);

Json hp_json(const Hyperparams& hp);
Hyperparams hp_from(const Json& j);

OrderedJson metadata_json(const Metadata& m);
Metadata metadata_from(const Json& j);

}  // namespace mfgp::detail
