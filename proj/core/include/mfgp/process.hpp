#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "mfgp/gp.hpp"
#include "mfgp/kernels.hpp"
#include "mfgp/types.hpp"

namespace mfgp {

/// A Gaussian process given by mean and covariance functions evaluated in batch.
class Process {
 public:
  virtual ~Process() = default;

  virtual std::size_t dim() const = 0;
  virtual Vector mean(const DesignMatrix& X) const = 0;
  virtual Matrix cov(const DesignMatrix& A, const DesignMatrix& B) const = 0;
  virtual Vector variance(const DesignMatrix& X) const = 0;

  /// Every design point this process has been conditioned on, oldest first.
  virtual std::vector<DesignMatrix> conditioned_designs() const { return {}; }
};

/// m(x) = h(x)^T beta, k(x, x') = sigma2 exp(-sum ((x_j - x'_j) / delta_j)^2).
class PriorProcess final : public Process {
 public:
  PriorProcess(MeanFunction mean, Hyperparams hp);

  std::size_t dim() const override { return hp_.dim(); }
  Vector mean(const DesignMatrix& X) const override;
  Matrix cov(const DesignMatrix& A, const DesignMatrix& B) const override;
  Vector variance(const DesignMatrix& X) const override;

  const Hyperparams& hp() const noexcept { return hp_; }

 private:
  MeanFunction mean_;
  Hyperparams hp_;
};

/// Observations y_i = f(x_i) + offset_i + e_i, e_i ~ N(0, noise_i), of the
/// process f being conditioned. Empty offset / noise vectors mean zero.
struct Observations {
  DesignMatrix X;
  Vector y;
  Vector offset;
  Vector noise;
  std::size_t level_index = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(y.size()); }
};

/// Posterior of a prior process after one set of observations:
///   m*(x)    = m(x) + k(x, X) C^{-1} (y - m(X) - offset)
///   k*(x,x') = k(x, x') - k(x, X) C^{-1} k(X, x'),   C = k(X, X) + diag(noise)
class ConditionedProcess final : public Process {
 public:
  ConditionedProcess(std::shared_ptr<const Process> prior, Observations obs);

  std::size_t dim() const override { return prior_->dim(); }
  Vector mean(const DesignMatrix& X) const override;
  Matrix cov(const DesignMatrix& A, const DesignMatrix& B) const override;
  Vector variance(const DesignMatrix& X) const override;
  std::vector<DesignMatrix> conditioned_designs() const override;

  const Process& prior() const noexcept { return *prior_; }
  const Observations& observations() const noexcept { return obs_; }
  /// Lower Cholesky factor of C.
  const Matrix& chol() const noexcept { return chol_; }
  const Vector& alpha() const noexcept { return alpha_; }

 private:
  std::shared_ptr<const Process> prior_;
  Observations obs_;
  Matrix chol_;
  Vector alpha_;
};

/// One recursion step: the posterior given `obs` becomes the returned process.
/// Empty observations return `prior` unchanged. Throws NumericalError naming
/// coincident design points when the conditioned covariance is singular.
std::shared_ptr<const Process> condition_level(std::shared_ptr<const Process> prior,
                                               Observations obs);

/// Mean and clamped variance (and optionally covariance) of a process.
Prediction predict_process(const Process& process, const DesignMatrix& X, bool want_cov = false);

}  // namespace mfgp
