#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "mfgp/kernels.hpp"
#include "mfgp/optimizer.hpp"
#include "mfgp/random.hpp"
#include "mfgp/types.hpp"

namespace mfgp {

/// Runs of one fidelity level: design X (n x p) and outputs y (n).
struct LevelData {
  DesignMatrix X;
  Vector y;
  std::size_t level_index = 1;

  std::size_t size() const noexcept { return static_cast<std::size_t>(y.size()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(X.cols()); }

  /// Sizes agree, values finite, design rows distinct. Throws InvalidArgument.
  void validate() const;
};

/// First pair (i, j), i < j, of bitwise-identical rows.
std::optional<std::pair<std::size_t, std::size_t>> find_duplicate_rows(const DesignMatrix& X);

/// Per-dimension extent of a design; dimensions with zero extent report 1.
Vector design_ranges(const DesignMatrix& X);

/// Latin hypercube of starting log-lengthscales over
/// [log(lower_factor * range_j), log(upper_factor * range_j)].
std::vector<Vector> lengthscale_starts(const Vector& ranges, const OptimizerConfig& config,
                                       Rng& rng);

class FittedGP;

/// Regression basis for the prior mean. Either a fixed MeanSpec basis or, for
/// hierarchical kriging, the posterior mean of a lower-level GP used as a
/// single scaled trend column.
class MeanFunction {
 public:
  MeanFunction() = default;
  explicit MeanFunction(MeanSpec spec) : spec_(spec) {}

  static MeanFunction scaled_predictor(std::shared_ptr<const FittedGP> lower);

  Matrix basis(const DesignMatrix& X) const;
  std::size_t size(std::size_t dim) const;

  const MeanSpec& spec() const noexcept { return spec_; }
  const std::shared_ptr<const FittedGP>& predictor() const noexcept { return predictor_; }
  bool is_predictor() const noexcept { return predictor_ != nullptr; }

 private:
  MeanSpec spec_{};
  std::shared_ptr<const FittedGP> predictor_;
};

struct Prediction {
  Vector mean;
  Vector variance;
  std::optional<Matrix> covariance;
};

/// Immutable single-level posterior: K = sigma2 (R(X, X) + jitter I) = chol chol^T,
/// alpha = K^{-1} (y - m(X)).
class FittedGP {
 public:
  /// Posterior for fixed hyperparameters; no optimization.
  static FittedGP condition(LevelData data, Hyperparams hp, MeanFunction mean, KernelSpec kernel);

  Prediction predict(const DesignMatrix& Xnew, bool want_cov = false) const;
  Vector predict_mean(const DesignMatrix& Xnew) const;

  const Hyperparams& hp() const noexcept { return hp_; }
  const MeanFunction& mean_function() const noexcept { return mean_; }
  const MeanSpec& mean_spec() const noexcept { return mean_.spec(); }
  const KernelSpec& kernel_spec() const noexcept { return kernel_; }
  const LevelData& data() const noexcept { return data_; }
  const DesignMatrix& X() const noexcept { return data_.X; }
  const Matrix& chol() const noexcept { return chol_; }
  const Vector& alpha() const noexcept { return alpha_; }
  double log_lik() const noexcept { return log_lik_; }
  std::size_t dim() const noexcept { return data_.dim(); }

  /// Per-start optimizer trace; empty for fixed-hyperparameter models.
  const std::vector<RestartTrace>& restarts() const noexcept { return restarts_; }

 private:
  friend FittedGP fit_gp(const LevelData&, const MeanFunction&, const KernelSpec&,
                         const OptimizerConfig&);

  LevelData data_;
  Hyperparams hp_;
  MeanFunction mean_;
  KernelSpec kernel_;
  Matrix chol_;
  Vector alpha_;
  double log_lik_ = 0.0;
  std::vector<RestartTrace> restarts_;
};

/// log N(y; m(X), K) with K = sigma2 (R + jitter I) at the given hyperparameters.
double log_marginal_likelihood(const LevelData& data, const Hyperparams& hp,
                               const MeanFunction& mean, const KernelSpec& kernel);
double log_marginal_likelihood(const LevelData& data, const Hyperparams& hp, const MeanSpec& mean,
                               const KernelSpec& kernel);

/// Maximum marginal likelihood fit. beta (GLS) and sigma2 (MLE) are profiled,
/// log-lengthscales are searched by multi-start Nelder-Mead.
FittedGP fit_gp(const LevelData& data, const MeanFunction& mean, const KernelSpec& kernel,
                const OptimizerConfig& opt);
FittedGP fit_gp(const LevelData& data, const MeanSpec& mean, const KernelSpec& kernel,
                const OptimizerConfig& opt);

inline Prediction predict(const FittedGP& model, const DesignMatrix& Xnew, bool want_cov = false) {
  return model.predict(Xnew, want_cov);
}

}  // namespace mfgp
