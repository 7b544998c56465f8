#include <string>

#include "mfgp/error.hpp"
#include "mfgp/multilevel.hpp"

namespace mfgp {

HKModel HKModel::condition(MultiLevelData data, std::vector<Hyperparams> hps, MeanSpec mean,
                           KernelSpec kernel) {
  data.validate();
  if (hps.size() != data.num_levels()) {
    throw InvalidArgument("hierarchical kriging needs one hyperparameter set per level");
  }
  HKModel m;
  m.mean_ = mean;
  m.kernel_ = kernel;
  m.data_ = std::move(data);
  for (std::size_t l = 0; l < hps.size(); ++l) {
    MeanFunction trend = l == 0 ? MeanFunction(mean) : MeanFunction::scaled_predictor(m.gps_.back());
    m.gps_.push_back(std::make_shared<const FittedGP>(
        FittedGP::condition(m.data_.levels[l], hps[l], std::move(trend), kernel)));
  }
  return m;
}

HKModel fit_hk(const MultiLevelData& data, const MeanSpec& mean, const KernelSpec& kernel,
               const OptimizerConfig& opt) {
  data.validate();
  HKModel m;
  m.mean_ = mean;
  m.kernel_ = kernel;
  m.data_ = data;
  m.gps_.push_back(
      std::make_shared<const FittedGP>(fit_gp(m.data_.levels[0], MeanFunction(mean), kernel, opt)));
  for (std::size_t l = 1; l < m.data_.num_levels(); ++l) {
    m.gps_.push_back(std::make_shared<const FittedGP>(
        fit_gp(m.data_.levels[l], MeanFunction::scaled_predictor(m.gps_.back()), kernel,
               opt.substream(static_cast<std::uint64_t>(l + 1)))));
  }
  return m;
}

Prediction HKModel::predict(const DesignMatrix& Xnew, bool want_cov) const {
  return gps_.back()->predict(Xnew, want_cov);
}

std::vector<double> HKModel::scales() const {
  std::vector<double> out;
  for (std::size_t l = 1; l < gps_.size(); ++l) out.push_back(gps_[l]->hp().beta(0));
  return out;
}

double HKModel::log_lik() const {
  double total = 0.0;
  for (const auto& gp : gps_) total += gp->log_lik();
  return total;
}

}  // namespace mfgp
