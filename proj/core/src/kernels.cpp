#include "mfgp/kernels.hpp"

#include <cmath>

#include "mfgp/error.hpp"

namespace mfgp {

namespace {

void check_lengthscales(const Vector& lengthscales) {
  for (Eigen::Index j = 0; j < lengthscales.size(); ++j) {
    if (!(lengthscales(j) > 0.0) || !std::isfinite(lengthscales(j))) {
      throw InvalidArgument("lengthscale " + std::to_string(j) +
                            " must be finite and positive, got " +
                            std::to_string(lengthscales(j)));
    }
  }
}

// Shared by eval_cov and correlation_matrix so both see the same summation order.
double scaled_sq_distance(const double* a, Eigen::Index stride_a, const double* b,
                          Eigen::Index stride_b, const Vector& lengthscales) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < lengthscales.size(); ++j) {
    const double d = (a[j * stride_a] - b[j * stride_b]) / lengthscales(j);
    sum += d * d;
  }
  return sum;
}

}  // namespace

std::size_t MeanSpec::basis_size(std::size_t dim) const noexcept {
  switch (form) {
    case MeanForm::Zero:
      return 0;
    case MeanForm::Constant:
      return 1;
    case MeanForm::Linear:
      return dim + 1;
  }
  return 0;
}

void Hyperparams::validate(std::size_t expected_dim, const MeanSpec& mean) const {
  if (dim() != expected_dim) {
    throw InvalidArgument("expected " + std::to_string(expected_dim) +
                          " lengthscales, got " + std::to_string(dim()));
  }
  check_lengthscales(lengthscales);
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
    throw InvalidArgument("sigma2 must be finite and positive, got " + std::to_string(sigma2));
  }
  const auto q = mean.basis_size(expected_dim);
  if (static_cast<std::size_t>(beta.size()) != q) {
    throw InvalidArgument("mean basis has " + std::to_string(q) + " terms but beta has " +
                          std::to_string(beta.size()));
  }
}

std::string to_string(MeanForm form) {
  switch (form) {
    case MeanForm::Zero:
      return "zero";
    case MeanForm::Constant:
      return "constant";
    case MeanForm::Linear:
      return "linear";
  }
  return "unknown";
}

MeanForm parse_mean_form(std::string_view text) {
  if (text == "zero") return MeanForm::Zero;
  if (text == "constant") return MeanForm::Constant;
  if (text == "linear") return MeanForm::Linear;
  throw InvalidArgument("unknown mean form '" + std::string(text) + "'");
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::SquaredExponential:
      return "squared_exponential";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view text) {
  if (text == "squared_exponential" || text == "se") return KernelFamily::SquaredExponential;
  throw InvalidArgument("unknown kernel family '" + std::string(text) + "'");
}

Matrix regression_basis(const DesignMatrix& X, const MeanSpec& spec) {
  const auto n = X.rows();
  const auto p = X.cols();
  Matrix H(n, static_cast<Eigen::Index>(spec.basis_size(static_cast<std::size_t>(p))));
  if (spec.form == MeanForm::Zero) return H;
  H.col(0).setOnes();
  if (spec.form == MeanForm::Linear) H.rightCols(p) = X;
  return H;
}

double eval_mean(const Eigen::Ref<const Vector>& x, const MeanSpec& spec, const Vector& beta) {
  const auto p = static_cast<std::size_t>(x.size());
  if (static_cast<std::size_t>(beta.size()) != spec.basis_size(p)) {
    throw InvalidArgument("beta has " + std::to_string(beta.size()) + " entries, basis needs " +
                          std::to_string(spec.basis_size(p)));
  }
  switch (spec.form) {
    case MeanForm::Zero:
      return 0.0;
    case MeanForm::Constant:
      return beta(0);
    case MeanForm::Linear:
      return beta(0) + beta.tail(x.size()).dot(x);
  }
  return 0.0;
}

double eval_cov(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& xp,
                const Hyperparams& hp) {
  if (x.size() != xp.size() || x.size() != hp.lengthscales.size()) {
    throw InvalidArgument("eval_cov: point dimensions " + std::to_string(x.size()) + "/" +
                          std::to_string(xp.size()) + " do not match " +
                          std::to_string(hp.lengthscales.size()) + " lengthscales");
  }
  check_lengthscales(hp.lengthscales);
  return hp.sigma2 *
         std::exp(-scaled_sq_distance(x.data(), 1, xp.data(), 1, hp.lengthscales));
}

Matrix correlation_matrix(const DesignMatrix& A, const DesignMatrix& B,
                          const Vector& lengthscales) {
  if (A.cols() != B.cols() || A.cols() != lengthscales.size()) {
    throw InvalidArgument("correlation_matrix: dimension mismatch (" + std::to_string(A.cols()) +
                          ", " + std::to_string(B.cols()) + ", " +
                          std::to_string(lengthscales.size()) + ")");
  }
  check_lengthscales(lengthscales);
  Matrix R(A.rows(), B.rows());
  const auto sa = A.outerStride();
  const auto sb = B.outerStride();
  for (Eigen::Index j = 0; j < B.rows(); ++j) {
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      R(i, j) = std::exp(-scaled_sq_distance(&A(i, 0), sa, &B(j, 0), sb, lengthscales));
    }
  }
  return R;
}

Matrix cov_matrix(const DesignMatrix& A, const DesignMatrix& B, const Hyperparams& hp,
                  const KernelSpec& kernel, bool add_jitter) {
  if (kernel.jitter < 0.0) throw InvalidArgument("jitter must be non-negative");
  Matrix K = hp.sigma2 * correlation_matrix(A, B, hp.lengthscales);
  if (add_jitter) {
    if (A.rows() != B.rows()) throw InvalidArgument("cov_matrix: jitter needs a square matrix");
    K.diagonal().array() += kernel.jitter * hp.sigma2;
  }
  return K;
}

}  // namespace mfgp
