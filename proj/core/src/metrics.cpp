#include "mfgp/metrics.hpp"

#include <cmath>
#include <string>

#include "mfgp/error.hpp"

namespace mfgp {

double rmse(const Vector& pred, const Vector& truth, RmseVariant variant) {
  if (pred.size() != truth.size()) {
    throw InvalidArgument("rmse: " + std::to_string(pred.size()) + " predictions vs " +
                          std::to_string(truth.size()) + " true values");
  }
  if (pred.size() == 0) throw InvalidArgument("rmse: no points");
  const double sse = (pred - truth).squaredNorm();
  const double n = static_cast<double>(pred.size());
  return variant == RmseVariant::Standard ? std::sqrt(sse / n) : std::sqrt(sse) / n;
}

std::string to_string(RmseVariant variant) {
  return variant == RmseVariant::Standard ? "standard" : "paper";
}

RmseVariant parse_rmse_variant(std::string_view text) {
  if (text == "standard") return RmseVariant::Standard;
  if (text == "paper") return RmseVariant::PaperLiteral;
  throw InvalidArgument("unknown rmse variant '" + std::string(text) +
                        "' (expected standard|paper)");
}

}  // namespace mfgp
