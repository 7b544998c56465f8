#pragma once

#include <optional>

#include "mfgp/types.hpp"

namespace mfgp::detail {

/// Gaussian log-likelihood with the regression coefficients (GLS) and the
/// signal variance (MLE) profiled out.
struct Profile {
  double log_lik = 0.0;
  Vector beta;
  double sigma2 = 0.0;
};

/// `R` is the unit-variance covariance of y including every diagonal term
/// (jitter, nuggets) in units of sigma2. Rows [conditional_from, n) form the
/// scored block: 0 gives the full marginal likelihood, s > 0 gives
/// log p(y[s:] | y[:s]) with beta and sigma2 still estimated from all rows.
/// Returns nullopt when R is not numerically positive definite.
std::optional<Profile> profile_likelihood(const Matrix& R, const Matrix& H, const Vector& y,
                                          Eigen::Index conditional_from = 0);

/// Lengthscales exp(t) with each log-lengthscale clamped to
/// [log(1e-3 range_j), log(1e3 range_j)].
Vector lengthscales_from_log(const Vector& t, const Vector& ranges);

/// Lower bound on profiled sigma2 so zero-residual data keep a proper density.
double sigma2_floor(const Vector& y);

}  // namespace mfgp::detail
