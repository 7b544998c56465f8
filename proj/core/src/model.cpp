#include "mfgp/model.hpp"

#include <string>

#include "mfgp/error.hpp"

namespace mfgp {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::SingleGP: return "single";
    case Method::BayHEm: return "bayhem";
    case Method::KO: return "ko";
    case Method::HK: return "hk";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "single") return Method::SingleGP;
  if (text == "bayhem") return Method::BayHEm;
  if (text == "ko") return Method::KO;
  if (text == "hk") return Method::HK;
  throw InvalidArgument("unknown method '" + std::string(text) +
                        "' (expected single|bayhem|ko|hk)");
}

std::string display_name(Method method) {
  switch (method) {
    case Method::SingleGP: return "Single GP";
    case Method::BayHEm: return "BayHEm";
    case Method::KO: return "K&O";
    case Method::HK: return "HK";
  }
  return "unknown";
}

Method MultiLevelModel::method() const noexcept {
  return std::visit(Overloaded{[](const FittedGP&) { return Method::SingleGP; },
                               [](const BayHEmModel&) { return Method::BayHEm; },
                               [](const KOModel&) { return Method::KO; },
                               [](const HKModel&) { return Method::HK; }},
                    model_);
}

Prediction MultiLevelModel::predict(const DesignMatrix& Xnew, bool want_cov) const {
  return std::visit([&](const auto& m) { return m.predict(Xnew, want_cov); }, model_);
}

std::size_t MultiLevelModel::dim() const {
  return std::visit([](const auto& m) { return m.dim(); }, model_);
}

double MultiLevelModel::log_lik() const {
  return std::visit([](const auto& m) { return m.log_lik(); }, model_);
}

std::vector<std::string> MultiLevelModel::warnings() const {
  if (const auto* ko = std::get_if<KOModel>(&model_)) return ko->warnings();
  return {};
}

MultiLevelModel fit_model(const MultiLevelData& data, const FitSettings& s) {
  data.validate();
  switch (s.method) {
    case Method::SingleGP:
      return MultiLevelModel(fit_gp(data.top(), MeanFunction(s.mean), s.kernel, s.optimizer));
    case Method::BayHEm:
      return MultiLevelModel(fit_bayhem(data, s.bayhem, s.mean, s.kernel, s.optimizer));
    case Method::KO:
      if (data.num_levels() < 2) throw InvalidArgument("K&O requires ≥ 2 levels");
      return MultiLevelModel(fit_ko(data, s.rho, s.mean, s.kernel, s.optimizer));
    case Method::HK:
      return MultiLevelModel(fit_hk(data, s.mean, s.kernel, s.optimizer));
  }
  throw InvalidArgument("unknown method");
}

}  // namespace mfgp
