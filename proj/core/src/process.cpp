#include "mfgp/process.hpp"

#include <sstream>
#include <string>
#include <utility>

#include "mfgp/error.hpp"

namespace mfgp {

namespace {

std::string format_point(const Eigen::Ref<const Vector>& x) {
  std::ostringstream os;
  os.precision(6);
  os << "(";
  for (Eigen::Index j = 0; j < x.size(); ++j) os << (j ? ", " : "") << x(j);
  os << ")";
  return os.str();
}

std::string describe_collisions(const Observations& obs, const std::vector<DesignMatrix>& earlier) {
  constexpr double tol = 1e-12;
  std::ostringstream os;
  std::size_t found = 0;
  for (Eigen::Index i = 0; i < obs.X.rows() && found < 5; ++i) {
    const Vector xi = obs.X.row(i).transpose();
    for (Eigen::Index j = i + 1; j < obs.X.rows(); ++j) {
      if ((obs.X.row(j).transpose() - xi).cwiseAbs().maxCoeff() <= tol) {
        os << " observation " << i + 1 << " and " << j + 1 << " at " << format_point(xi) << ";";
        ++found;
      }
    }
    for (std::size_t d = 0; d < earlier.size(); ++d) {
      for (Eigen::Index j = 0; j < earlier[d].rows(); ++j) {
        if ((earlier[d].row(j).transpose() - xi).cwiseAbs().maxCoeff() <= tol) {
          os << " observation " << i + 1 << " coincides with conditioned point " << j + 1
             << " of set " << d + 1 << " at " << format_point(xi) << ";";
          ++found;
        }
      }
    }
  }
  const std::string text = os.str();
  return text.empty() ? std::string(" no coincident points found (near-singular design)") : text;
}

}  // namespace

PriorProcess::PriorProcess(MeanFunction mean, Hyperparams hp)
    : mean_(std::move(mean)), hp_(std::move(hp)) {
  if (static_cast<std::size_t>(hp_.beta.size()) != mean_.size(hp_.dim())) {
    throw InvalidArgument("PriorProcess: beta size does not match mean basis");
  }
  if (!(hp_.sigma2 > 0.0)) throw InvalidArgument("PriorProcess: sigma2 must be positive");
}

Vector PriorProcess::mean(const DesignMatrix& X) const {
  if (X.rows() == 0) return Vector(0);
  return mean_.basis(X) * hp_.beta;
}

Matrix PriorProcess::cov(const DesignMatrix& A, const DesignMatrix& B) const {
  return hp_.sigma2 * correlation_matrix(A, B, hp_.lengthscales);
}

Vector PriorProcess::variance(const DesignMatrix& X) const {
  if (static_cast<std::size_t>(X.cols()) != dim()) throw InvalidArgument("dimension mismatch");
  return Vector::Constant(X.rows(), hp_.sigma2);
}

ConditionedProcess::ConditionedProcess(std::shared_ptr<const Process> prior, Observations obs)
    : prior_(std::move(prior)), obs_(std::move(obs)) {
  if (!prior_) throw InvalidArgument("ConditionedProcess needs a prior");
  const auto n = obs_.y.size();
  if (obs_.X.rows() != n) throw InvalidArgument("observations: design and output sizes differ");
  if (static_cast<std::size_t>(obs_.X.cols()) != prior_->dim()) {
    throw InvalidArgument("observations: dimension does not match the prior");
  }
  if (obs_.offset.size() == 0) obs_.offset = Vector::Zero(n);
  if (obs_.noise.size() == 0) obs_.noise = Vector::Zero(n);
  if (obs_.offset.size() != n || obs_.noise.size() != n) {
    throw InvalidArgument("observations: offset/noise length must equal the number of points");
  }
  if ((obs_.noise.array() < 0.0).any()) throw InvalidArgument("observation noise must be >= 0");

  Matrix C = prior_->cov(obs_.X, obs_.X);
  C.diagonal() += obs_.noise;
  Eigen::LLT<Matrix> llt(C);
  bool ok = llt.info() == Eigen::Success;
  if (ok) {
    const Matrix& L = llt.matrixLLT();
    for (Eigen::Index i = 0; i < n && ok; ++i) ok = L(i, i) > 0.0 && std::isfinite(L(i, i));
  }
  if (!ok) {
    throw NumericalError("conditioned covariance is singular at level " +
                         std::to_string(obs_.level_index) + ":" +
                         describe_collisions(obs_, prior_->conditioned_designs()));
  }
  chol_ = llt.matrixL();
  alpha_ = llt.solve(obs_.y - prior_->mean(obs_.X) - obs_.offset);
}

Vector ConditionedProcess::mean(const DesignMatrix& X) const {
  if (X.rows() == 0) return Vector(0);
  return prior_->mean(X) + prior_->cov(X, obs_.X) * alpha_;
}

Matrix ConditionedProcess::cov(const DesignMatrix& A, const DesignMatrix& B) const {
  const auto lower = chol_.triangularView<Eigen::Lower>();
  const Matrix VA = lower.solve(prior_->cov(obs_.X, A));
  const Matrix VB = lower.solve(prior_->cov(obs_.X, B));
  return prior_->cov(A, B) - VA.transpose() * VB;
}

Vector ConditionedProcess::variance(const DesignMatrix& X) const {
  const Matrix V = chol_.triangularView<Eigen::Lower>().solve(prior_->cov(obs_.X, X));
  return prior_->variance(X) - V.colwise().squaredNorm().transpose();
}

std::vector<DesignMatrix> ConditionedProcess::conditioned_designs() const {
  auto out = prior_->conditioned_designs();
  out.push_back(obs_.X);
  return out;
}

std::shared_ptr<const Process> condition_level(std::shared_ptr<const Process> prior,
                                               Observations obs) {
  if (!prior) throw InvalidArgument("condition_level needs a prior");
  if (obs.size() == 0) return prior;
  return std::make_shared<const ConditionedProcess>(std::move(prior), std::move(obs));
}

Prediction predict_process(const Process& process, const DesignMatrix& X, bool want_cov) {
  if (static_cast<std::size_t>(X.cols()) != process.dim()) {
    throw InvalidArgument("predict: points have " + std::to_string(X.cols()) +
                          " columns, model expects " + std::to_string(process.dim()));
  }
  Prediction out;
  out.mean = process.mean(X);
  out.variance = X.rows() > 0 ? process.variance(X) : Vector(0);
  out.variance = out.variance.cwiseMax(0.0);
  if (want_cov) out.covariance = process.cov(X, X);
  return out;
}

}  // namespace mfgp
