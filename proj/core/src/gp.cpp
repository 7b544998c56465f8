#include "mfgp/gp.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "likelihood.hpp"
#include "mfgp/design.hpp"
#include "mfgp/error.hpp"

namespace mfgp {

namespace {

std::string describe(const Hyperparams& hp) {
  std::string out = "sigma2=" + std::to_string(hp.sigma2) + " lengthscales=(";
  for (Eigen::Index j = 0; j < hp.lengthscales.size(); ++j) {
    if (j > 0) out += ",";
    out += std::to_string(hp.lengthscales(j));
  }
  return out + ")";
}

}  // namespace

void LevelData::validate() const {
  if (X.rows() != y.size()) {
    throw InvalidArgument("level " + std::to_string(level_index) + ": design has " +
                          std::to_string(X.rows()) + " rows but " + std::to_string(y.size()) +
                          " outputs");
  }
  if (!X.allFinite() || !y.allFinite()) {
    throw InvalidArgument("level " + std::to_string(level_index) + ": non-finite data");
  }
  if (auto dup = find_duplicate_rows(X)) {
    throw InvalidArgument("level " + std::to_string(level_index) + ": duplicate design rows " +
                          std::to_string(dup->first + 1) + " and " +
                          std::to_string(dup->second + 1));
  }
}

std::optional<std::pair<std::size_t, std::size_t>> find_duplicate_rows(const DesignMatrix& X) {
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < X.rows(); ++j) {
      if (X.row(i) == X.row(j)) {
        return std::make_pair(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
  }
  return std::nullopt;
}

Vector design_ranges(const DesignMatrix& X) {
  Vector r = Vector::Ones(X.cols());
  if (X.rows() == 0) return r;
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double extent = X.col(j).maxCoeff() - X.col(j).minCoeff();
    if (extent > 0.0) r(j) = extent;
  }
  return r;
}

std::vector<Vector> lengthscale_starts(const Vector& ranges, const OptimizerConfig& config,
                                       Rng& rng) {
  const auto p = static_cast<std::size_t>(ranges.size());
  const std::size_t k = config.restarts == 0 ? 1 : config.restarts;
  const DesignMatrix unit = lhs_sample(k, p, rng);
  std::vector<Vector> starts;
  starts.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    Vector t(ranges.size());
    for (Eigen::Index j = 0; j < ranges.size(); ++j) {
      const double lo = std::log(config.lower_factor * ranges(j));
      const double hi = std::log(config.upper_factor * ranges(j));
      t(j) = lo + unit(static_cast<Eigen::Index>(i), j) * (hi - lo);
    }
    starts.push_back(std::move(t));
  }
  return starts;
}

MeanFunction MeanFunction::scaled_predictor(std::shared_ptr<const FittedGP> lower) {
  if (!lower) throw InvalidArgument("scaled_predictor needs a lower-level model");
  MeanFunction m;
  m.predictor_ = std::move(lower);
  return m;
}

Matrix MeanFunction::basis(const DesignMatrix& X) const {
  if (predictor_) {
    if (static_cast<std::size_t>(X.cols()) != predictor_->dim()) {
      throw InvalidArgument("trend predictor dimension mismatch");
    }
    return predictor_->predict_mean(X);
  }
  return regression_basis(X, spec_);
}

std::size_t MeanFunction::size(std::size_t dim) const {
  return predictor_ ? 1 : spec_.basis_size(dim);
}

FittedGP FittedGP::condition(LevelData data, Hyperparams hp, MeanFunction mean,
                             KernelSpec kernel) {
  data.validate();
  if (data.size() == 0) throw InvalidArgument("cannot condition on an empty level");
  const auto p = data.dim();
  if (static_cast<std::size_t>(hp.beta.size()) != mean.size(p)) {
    throw InvalidArgument("beta has " + std::to_string(hp.beta.size()) +
                          " entries, mean basis needs " + std::to_string(mean.size(p)));
  }
  if (hp.dim() != p) throw InvalidArgument("lengthscale count does not match input dimension");
  if (!(hp.sigma2 > 0.0)) throw InvalidArgument("sigma2 must be positive");

  FittedGP gp;
  const Matrix K = cov_matrix(data.X, data.X, hp, kernel, true);
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Cholesky factorization failed at level " +
                         std::to_string(data.level_index) + " with " + describe(hp));
  }
  gp.chol_ = llt.matrixL();
  const Vector resid = data.y - mean.basis(data.X) * hp.beta;
  gp.alpha_ = llt.solve(resid);
  gp.data_ = std::move(data);
  gp.hp_ = std::move(hp);
  gp.mean_ = std::move(mean);
  gp.kernel_ = kernel;
  gp.log_lik_ = log_marginal_likelihood(gp.data_, gp.hp_, gp.mean_, gp.kernel_);
  return gp;
}

Vector FittedGP::predict_mean(const DesignMatrix& Xnew) const {
  if (static_cast<std::size_t>(Xnew.cols()) != dim()) {
    throw InvalidArgument("predict: points have " + std::to_string(Xnew.cols()) +
                          " columns, model expects " + std::to_string(dim()));
  }
  if (Xnew.rows() == 0) return Vector(0);
  const Matrix Kxs = cov_matrix(data_.X, Xnew, hp_, kernel_, false);
  return mean_.basis(Xnew) * hp_.beta + Kxs.transpose() * alpha_;
}

Prediction FittedGP::predict(const DesignMatrix& Xnew, bool want_cov) const {
  if (static_cast<std::size_t>(Xnew.cols()) != dim()) {
    throw InvalidArgument("predict: points have " + std::to_string(Xnew.cols()) +
                          " columns, model expects " + std::to_string(dim()));
  }
  Prediction out;
  if (Xnew.rows() == 0) {
    out.mean = Vector(0);
    out.variance = Vector(0);
    if (want_cov) out.covariance = Matrix(0, 0);
    return out;
  }
  const Matrix Kxs = cov_matrix(data_.X, Xnew, hp_, kernel_, false);
  out.mean = mean_.basis(Xnew) * hp_.beta + Kxs.transpose() * alpha_;
  const Matrix V = chol_.triangularView<Eigen::Lower>().solve(Kxs);
  out.variance = (hp_.sigma2 - V.colwise().squaredNorm().array()).matrix().transpose();
  for (Eigen::Index i = 0; i < out.variance.size(); ++i) {
    assert(out.variance(i) >= -1e-10 * std::max(1.0, hp_.sigma2));
    if (out.variance(i) < 0.0) out.variance(i) = 0.0;
  }
  if (want_cov) {
    Matrix C = cov_matrix(Xnew, Xnew, hp_, kernel_, false) - V.transpose() * V;
    out.covariance = std::move(C);
  }
  return out;
}

double log_marginal_likelihood(const LevelData& data, const Hyperparams& hp,
                               const MeanFunction& mean, const KernelSpec& kernel) {
  const auto n = data.y.size();
  if (n == 0) return 0.0;
  if (data.X.rows() != n) throw InvalidArgument("design and output sizes differ");
  if (static_cast<std::size_t>(hp.beta.size()) != mean.size(data.dim())) {
    throw InvalidArgument("beta size does not match mean basis");
  }
  const Matrix K = cov_matrix(data.X, data.X, hp, kernel, true);
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Cholesky factorization failed in log_marginal_likelihood with " +
                         describe(hp));
  }
  const Vector r = data.y - mean.basis(data.X) * hp.beta;
  const Vector w = llt.matrixL().solve(r);
  const Matrix& L = llt.matrixLLT();
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(L(i, i));
  return -0.5 * w.squaredNorm() - log_det -
         0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

double log_marginal_likelihood(const LevelData& data, const Hyperparams& hp, const MeanSpec& mean,
                               const KernelSpec& kernel) {
  return log_marginal_likelihood(data, hp, MeanFunction(mean), kernel);
}

FittedGP fit_gp(const LevelData& data, const MeanFunction& mean, const KernelSpec& kernel,
                const OptimizerConfig& opt) {
  data.validate();
  if (data.size() < 2) {
    throw InvalidArgument("fit_gp needs at least 2 points at level " +
                          std::to_string(data.level_index) + ", got " +
                          std::to_string(data.size()));
  }
  const Vector ranges = design_ranges(data.X);
  const Matrix H = mean.basis(data.X);
  auto objective = [&](const Vector& t) {
    const Vector ls = detail::lengthscales_from_log(t, ranges);
    Matrix R = correlation_matrix(data.X, data.X, ls);
    R.diagonal().array() += kernel.jitter;
    const auto prof = detail::profile_likelihood(R, H, data.y);
    return prof ? prof->log_lik : -std::numeric_limits<double>::infinity();
  };

  Rng rng(opt.seed);
  const auto starts = lengthscale_starts(ranges, opt, rng);
  MultiStartResult best;
  try {
    best = multistart_maximize(objective, starts, opt);
  } catch (const NumericalError& e) {
    throw FitError("all " + std::to_string(starts.size()) + " restarts failed at level " +
                       std::to_string(data.level_index) + ": " + e.what(),
                   data.level_index);
  }

  Hyperparams hp;
  hp.lengthscales = detail::lengthscales_from_log(best.x, ranges);
  Matrix R = correlation_matrix(data.X, data.X, hp.lengthscales);
  R.diagonal().array() += kernel.jitter;
  const auto prof = detail::profile_likelihood(R, H, data.y);
  if (!prof) {
    throw FitError("optimum is not positive definite at level " +
                       std::to_string(data.level_index),
                   data.level_index);
  }
  hp.beta = prof->beta;
  hp.sigma2 = prof->sigma2;

  FittedGP gp = FittedGP::condition(data, std::move(hp), mean, kernel);
  gp.restarts_ = std::move(best.restarts);
  return gp;
}

FittedGP fit_gp(const LevelData& data, const MeanSpec& mean, const KernelSpec& kernel,
                const OptimizerConfig& opt) {
  return fit_gp(data, MeanFunction(mean), kernel, opt);
}

}  // namespace mfgp
