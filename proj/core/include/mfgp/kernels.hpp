#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "mfgp/types.hpp"

namespace mfgp {

enum class MeanForm { Zero, Constant, Linear };

/// Regression basis h(x) of the prior mean m(x) = h(x)^T beta.
///   Zero     -> h(x) = ()
///   Constant -> h(x) = (1)
///   Linear   -> h(x) = (1, x_1, ..., x_p)
struct MeanSpec {
  MeanForm form = MeanForm::Constant;

  std::size_t basis_size(std::size_t dim) const noexcept;

  friend bool operator==(const MeanSpec&, const MeanSpec&) = default;
};

enum class KernelFamily { SquaredExponential };

struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  // Diagonal inflation, as a multiple of sigma2.
  double jitter = 1e-8;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

/// theta = (beta, sigma2, lengthscales).
struct Hyperparams {
  Vector beta;
  double sigma2 = 1.0;
  Vector lengthscales;

  std::size_t dim() const noexcept { return static_cast<std::size_t>(lengthscales.size()); }

  /// Throws InvalidArgument unless sigma2 > 0, every lengthscale > 0 and the
  /// sizes agree with `dim` and the mean basis.
  void validate(std::size_t dim, const MeanSpec& mean) const;
};

std::string to_string(MeanForm form);
MeanForm parse_mean_form(std::string_view text);
std::string to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view text);

/// Basis matrix with one row h(x_i)^T per design point.
Matrix regression_basis(const DesignMatrix& X, const MeanSpec& spec);

double eval_mean(const Eigen::Ref<const Vector>& x, const MeanSpec& spec, const Vector& beta);

/// sigma2 * exp(-sum_j ((x_j - x'_j) / delta_j)^2)
double eval_cov(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& xp,
                const Hyperparams& hp);

/// Unit-variance squared-exponential correlation between the rows of A and B.
Matrix correlation_matrix(const DesignMatrix& A, const DesignMatrix& B,
                          const Vector& lengthscales);

/// Entry (i, j) = eval_cov(a_i, b_j). With `add_jitter` the matrix must be square
/// and jitter * sigma2 is added to the diagonal.
Matrix cov_matrix(const DesignMatrix& A, const DesignMatrix& B, const Hyperparams& hp,
                  const KernelSpec& kernel, bool add_jitter);

}  // namespace mfgp
