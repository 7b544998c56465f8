#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mfgp/gp.hpp"
#include "mfgp/multilevel.hpp"

namespace mfgp {

enum class Method { SingleGP, BayHEm, KO, HK };

/// "single", "bayhem", "ko", "hk".
std::string to_string(Method method);
Method parse_method(std::string_view text);
/// Title used in report columns: "Single GP", "BayHEm", "K&O", "HK".
std::string display_name(Method method);

/// Everything needed to fit one model besides the data.
struct FitSettings {
  Method method = Method::BayHEm;
  MeanSpec mean{};
  KernelSpec kernel{};
  OptimizerConfig optimizer{};
  BayHEmOptions bayhem{};
  RhoSpec rho{};
};

/// A fitted emulator of the top level, whatever the method.
class MultiLevelModel {
 public:
  using Variant = std::variant<FittedGP, BayHEmModel, KOModel, HKModel>;

  explicit MultiLevelModel(Variant model) : model_(std::move(model)) {}

  Method method() const noexcept;
  Prediction predict(const DesignMatrix& Xnew, bool want_cov = false) const;
  std::size_t dim() const;
  double log_lik() const;
  std::vector<std::string> warnings() const;

  const Variant& variant() const noexcept { return model_; }
  template <class T>
  const T& as() const {
    return std::get<T>(model_);
  }

 private:
  Variant model_;
};

/// SingleGP fits the top level alone; the other methods use every level.
/// K&O needs at least two levels.
MultiLevelModel fit_model(const MultiLevelData& data, const FitSettings& settings);

}  // namespace mfgp
