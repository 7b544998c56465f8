#include <cmath>
#include <string>

#include "mfgp/error.hpp"
#include "mfgp/multilevel.hpp"

namespace mfgp {

namespace {

// Row i of X matched bitwise against the rows of `lower`; -1 when absent.
std::vector<Eigen::Index> match_rows(const DesignMatrix& X, const DesignMatrix& lower) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(X.rows()), -1);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < lower.rows(); ++j) {
      if (X.row(i) == lower.row(j)) {
        idx[static_cast<std::size_t>(i)] = j;
        break;
      }
    }
  }
  return idx;
}

struct LowerValues {
  Vector values;
  bool nested = false;
};

// f^(l-1) at X^(l): exact runs when the design is nested, otherwise the
// level-(l-1) emulator built so far.
LowerValues lower_values(const KOModel& partial, std::size_t level) {
  const auto& lvl = partial.data().levels[level - 1];
  const auto& prev = partial.data().levels[level - 2];
  const auto idx = match_rows(lvl.X, prev.X);
  bool nested = true;
  for (auto j : idx) nested = nested && j >= 0;
  LowerValues out;
  out.nested = nested;
  if (nested) {
    out.values.resize(lvl.X.rows());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      out.values(static_cast<Eigen::Index>(i)) = prev.y(idx[i]);
    }
  } else {
    out.values = partial.predict_level(level - 1, lvl.X).mean;
  }
  return out;
}

double ols_slope(const Vector& x, const Vector& y, std::size_t level) {
  const double n = static_cast<double>(x.size());
  const double mx = x.sum() / n;
  const double my = y.sum() / n;
  const double sxx = (x.array() - mx).square().sum();
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  if (x.size() < 2 || !(sxx > 0.0)) {
    throw FitError("cannot estimate rho at level " + std::to_string(level) +
                       ": lower-level values have no spread",
                   level);
  }
  return sxy / sxx;
}

}  // namespace

KOModel KOModel::condition(MultiLevelData data, std::vector<Hyperparams> hps,
                           std::vector<double> rho, MeanSpec mean, KernelSpec kernel,
                           RhoSpec rho_spec) {
  data.validate();
  const auto L = data.num_levels();
  if (hps.size() != L) throw InvalidArgument("K&O needs one hyperparameter set per level");
  if (rho.size() + 1 != L) throw InvalidArgument("K&O needs one rho per level above the first");

  KOModel m;
  m.mean_ = mean;
  m.kernel_ = kernel;
  m.rho_spec_ = rho_spec;
  m.data_ = std::move(data);
  m.gps_.push_back(FittedGP::condition(m.data_.levels[0], hps[0], MeanFunction(mean), kernel));
  for (std::size_t l = 2; l <= L; ++l) {
    const LowerValues lower = lower_values(m, l);
    const auto& lvl = m.data_.levels[l - 1];
    LevelData disc{lvl.X, lvl.y - rho[l - 2] * lower.values, lvl.level_index};
    m.rho_.push_back(rho[l - 2]);
    m.nested_.push_back(lower.nested);
    m.discrepancies_.push_back(disc.y);
    if (!lower.nested) {
      m.warnings_.push_back("level " + std::to_string(lvl.level_index) +
                            " design is not nested in level " +
                            std::to_string(m.data_.levels[l - 2].level_index) +
                            "; discrepancies use the lower-level posterior mean");
    }
    m.gps_.push_back(FittedGP::condition(std::move(disc), hps[l - 1], MeanFunction(mean), kernel));
  }
  return m;
}

KOModel fit_ko(const MultiLevelData& data, const RhoSpec& rho, const MeanSpec& mean,
               const KernelSpec& kernel, const OptimizerConfig& opt) {
  data.validate();
  const auto L = data.num_levels();
  KOModel m;
  m.mean_ = mean;
  m.kernel_ = kernel;
  m.rho_spec_ = rho;
  m.data_ = data;
  m.gps_.push_back(fit_gp(m.data_.levels[0], MeanFunction(mean), kernel, opt));
  for (std::size_t l = 2; l <= L; ++l) {
    const LowerValues lower = lower_values(m, l);
    const auto& lvl = m.data_.levels[l - 1];
    const double r = rho.kind == RhoSpec::Kind::Fixed ? rho.value
                                                      : ols_slope(lower.values, lvl.y, lvl.level_index);
    LevelData disc{lvl.X, lvl.y - r * lower.values, lvl.level_index};
    m.rho_.push_back(r);
    m.nested_.push_back(lower.nested);
    m.discrepancies_.push_back(disc.y);
    if (!lower.nested) {
      m.warnings_.push_back("level " + std::to_string(lvl.level_index) +
                            " design is not nested in level " +
                            std::to_string(m.data_.levels[l - 2].level_index) +
                            "; discrepancies use the lower-level posterior mean");
    }
    m.gps_.push_back(fit_gp(disc, MeanFunction(mean), kernel,
                            opt.substream(static_cast<std::uint64_t>(l))));
  }
  return m;
}

Prediction KOModel::predict_level(std::size_t level, const DesignMatrix& Xnew,
                                  bool want_cov) const {
  if (level < 1 || level > gps_.size()) {
    throw InvalidArgument("K&O model has levels 1.." + std::to_string(gps_.size()) +
                          ", requested " + std::to_string(level));
  }
  Prediction out = gps_[0].predict(Xnew, want_cov);
  for (std::size_t l = 2; l <= level; ++l) {
    const double r = rho_[l - 2];
    const Prediction d = gps_[l - 1].predict(Xnew, want_cov);
    out.mean = r * out.mean + d.mean;
    out.variance = r * r * out.variance + d.variance;
    if (want_cov) out.covariance = r * r * (*out.covariance) + *d.covariance;
  }
  return out;
}

Prediction KOModel::predict(const DesignMatrix& Xnew, bool want_cov) const {
  return predict_level(gps_.size(), Xnew, want_cov);
}

std::vector<FittedGP> KOModel::discrepancy_gps() const {
  return {gps_.begin() + 1, gps_.end()};
}

double KOModel::log_lik() const {
  double total = 0.0;
  for (const auto& gp : gps_) total += gp.log_lik();
  return total;
}

}  // namespace mfgp
