#include "mfgp/design.hpp"

#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "mfgp/error.hpp"

namespace mfgp {

DesignMatrix lhs_sample(std::size_t n, std::size_t p, Rng& rng) {
  if (n < 1 || p < 1) throw InvalidArgument("lhs_sample needs n >= 1 and p >= 1");
  DesignMatrix X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < p; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    // Fisher-Yates with the portable bounded draw.
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.below(i + 1)]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (static_cast<double>(perm[i]) + rng.uniform_open()) / static_cast<double>(n);
    }
  }
  return X;
}

DesignMatrix scale_to_box(const DesignMatrix& unit, const Vector& lower, const Vector& upper) {
  if (lower.size() != unit.cols() || upper.size() != unit.cols()) {
    throw InvalidArgument("scale_to_box: box dimension does not match design");
  }
  DesignMatrix X(unit.rows(), unit.cols());
  for (Eigen::Index j = 0; j < unit.cols(); ++j) {
    X.col(j) = (lower(j) + (upper(j) - lower(j)) * unit.col(j).array()).matrix();
  }
  return X;
}

DesignMatrix linspace(double a, double b, std::size_t n) {
  if (n < 2) throw InvalidArgument("linspace needs at least 2 points");
  DesignMatrix X(static_cast<Eigen::Index>(n), 1);
  const double step = (b - a) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) X(static_cast<Eigen::Index>(i), 0) = a + step * static_cast<double>(i);
  X(static_cast<Eigen::Index>(n - 1), 0) = b;
  return X;
}

DesignMatrix regular_grid(const Vector& lower, const Vector& upper, std::size_t resolution) {
  if (resolution < 2) {
    throw InvalidArgument("grid resolution must be at least 2 per axis, got " +
                          std::to_string(resolution));
  }
  if (lower.size() != upper.size() || lower.size() < 1) {
    throw InvalidArgument("regular_grid: malformed box");
  }
  const auto p = static_cast<std::size_t>(lower.size());
  std::size_t total = 1;
  for (std::size_t j = 0; j < p; ++j) total *= resolution;

  std::vector<DesignMatrix> axes;
  for (std::size_t j = 0; j < p; ++j) {
    axes.push_back(linspace(lower(static_cast<Eigen::Index>(j)),
                            upper(static_cast<Eigen::Index>(j)), resolution));
  }
  DesignMatrix X(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(p));
  for (std::size_t row = 0; row < total; ++row) {
    std::size_t rest = row;
    for (std::size_t j = p; j-- > 0;) {
      X(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j)) =
          axes[j](static_cast<Eigen::Index>(rest % resolution), 0);
      rest /= resolution;
    }
  }
  return X;
}

}  // namespace mfgp
