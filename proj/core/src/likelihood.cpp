#include "likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mfgp::detail {

Vector lengthscales_from_log(const Vector& t, const Vector& ranges) {
  Vector ls(t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    const double lo = std::log(1e-3 * ranges(j));
    const double hi = std::log(1e3 * ranges(j));
    ls(j) = std::exp(std::clamp(t(j), lo, hi));
  }
  return ls;
}

double sigma2_floor(const Vector& y) {
  const double scale = y.size() > 0 ? y.squaredNorm() / static_cast<double>(y.size()) : 1.0;
  return 1e-12 * std::max(1.0, scale);
}

std::optional<Profile> profile_likelihood(const Matrix& R, const Matrix& H, const Vector& y,
                                          Eigen::Index conditional_from) {
  const auto n = y.size();
  const auto s = conditional_from;
  if (n == 0 || s >= n) return std::nullopt;

  Eigen::LLT<Matrix> llt(R);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Matrix& L = llt.matrixLLT();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(L(i, i) > 0.0) || !std::isfinite(L(i, i))) return std::nullopt;
  }

  const auto lower = llt.matrixL();
  const Vector yw = lower.solve(y);
  Profile out;
  Vector rw = yw;
  if (H.cols() > 0) {
    const Matrix Hw = lower.solve(H);
    out.beta = Hw.completeOrthogonalDecomposition().solve(yw);
    rw -= Hw * out.beta;
  } else {
    out.beta = Vector(0);
  }
  if (!rw.allFinite()) return std::nullopt;

  // sigma2 comes from every row, like beta. Profiling it on the scored block
  // alone lets sigma2 grow until the relative jitter acts as a fitted nugget.
  const auto m = n - s;
  const double quad = rw.tail(m).squaredNorm();
  out.sigma2 = std::max(rw.squaredNorm() / static_cast<double>(n), sigma2_floor(y));

  double log_det = 0.0;
  for (Eigen::Index i = s; i < n; ++i) log_det += std::log(L(i, i));
  const double md = static_cast<double>(m);
  out.log_lik = -0.5 * md * std::log(2.0 * std::numbers::pi * out.sigma2) - log_det -
                0.5 * quad / out.sigma2;
  if (!std::isfinite(out.log_lik)) return std::nullopt;
  return out;
}

}  // namespace mfgp::detail
