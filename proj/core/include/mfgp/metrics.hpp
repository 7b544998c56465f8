#pragma once

#include <string>
#include <string_view>

#include "mfgp/types.hpp"

namespace mfgp {

/// Standard:     sqrt(sum e^2 / N)
/// PaperLiteral: sqrt(sum e^2) / N
enum class RmseVariant { Standard, PaperLiteral };

double rmse(const Vector& pred, const Vector& truth, RmseVariant variant = RmseVariant::Standard);

/// "standard" or "paper".
std::string to_string(RmseVariant variant);
RmseVariant parse_rmse_variant(std::string_view text);

}  // namespace mfgp
