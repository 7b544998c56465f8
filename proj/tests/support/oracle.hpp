#pragma once

// Reference Gaussian conditioning written directly from the joint normal, for
// comparison against the library's factorized and sequential code paths.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "mfgp/design.hpp"
#include "mfgp/kernels.hpp"
#include "mfgp/multilevel.hpp"
#include "mfgp/random.hpp"

namespace mfgp::oracle {

inline double se(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b,
                 double sigma2, const Vector& ls) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) s += std::pow((a(j) - b(j)) / ls(j), 2);
  return sigma2 * std::exp(-s);
}

// h(x)^T beta for the constant and linear bases, written out by hand.
inline Vector mean_at(const DesignMatrix& X, const MeanSpec& spec, const Vector& beta) {
  Vector out = Vector::Zero(X.rows());
  if (spec.form == MeanForm::Zero) return out;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out(i) = beta(0);
    if (spec.form == MeanForm::Linear) {
      for (Eigen::Index j = 0; j < X.cols(); ++j) out(i) += beta(j + 1) * X(i, j);
    }
  }
  return out;
}

struct Joint {
  Vector mean;
  Vector variance;
};

// Conditions f ~ GP(prior_mean, se) on y = f(X) + mu_shift + e, e ~ N(0, diag(noise)).
// `prior_at_X` and `prior_at_T` are the prior means at the design and targets.
inline Joint condition(const DesignMatrix& X, const Vector& y, const Vector& prior_at_X,
                       const Vector& noise, const DesignMatrix& T, const Vector& prior_at_T,
                       double sigma2, const Vector& ls) {
  const auto n = X.rows(), m = T.rows();
  Matrix K(n, n), Kt(m, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      K(i, j) = se(X.row(i).transpose(), X.row(j).transpose(), sigma2, ls) + (i == j ? noise(i) : 0);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) Kt(i, j) = se(T.row(i).transpose(), X.row(j).transpose(), sigma2, ls);
  Eigen::FullPivLU<Matrix> lu(K);
  const Vector w = lu.solve(y - prior_at_X);
  const Matrix V = lu.solve(Kt.transpose());
  Joint out;
  out.mean = prior_at_T + Kt * w;
  out.variance.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) out.variance(i) = sigma2 - Kt.row(i).dot(V.col(i));
  return out;
}

// A random two-level instance inside the limits n1 <= 15, n2 <= 8, p <= 2.
struct Instance {
  MultiLevelData data;
  Hyperparams hp;
  MeanSpec mean;
  DesignMatrix test;
};

inline Instance random_instance(std::uint64_t seed) {
  Rng rng(seed);
  const auto p = 1 + rng.below(2);
  const auto n1 = 3 + rng.below(13);
  const auto n2 = 1 + rng.below(8);
  Instance inst;
  inst.mean = MeanSpec{rng.below(2) ? MeanForm::Linear : MeanForm::Constant};
  LevelData l1{lhs_sample(n1, p, rng), Vector(), 1};
  LevelData l2{lhs_sample(n2, p, rng), Vector(), 2};
  auto f = [&](const DesignMatrix& X, double shift) {
    Vector y(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) y(i) = std::sin(5 * X(i, 0)) + X.row(i).sum() + shift;
    return y;
  };
  l1.y = f(l1.X, 0.0);
  l2.y = f(l2.X, 0.3);
  inst.data = MultiLevelData::from_levels({l1, l2});
  inst.hp.sigma2 = 0.5 + rng.uniform_open();
  inst.hp.lengthscales = Vector(static_cast<Eigen::Index>(p));
  for (Eigen::Index j = 0; j < inst.hp.lengthscales.size(); ++j) {
    inst.hp.lengthscales(j) = 0.15 + 0.35 * rng.uniform_open();
  }
  // Shrink lengthscales until the stacked covariance has condition number at
  // most 1e6. Near the jitter floor (~1e9) no double-precision evaluation,
  // this oracle included, agrees with exact arithmetic to 1e-8.
  DesignMatrix S(l1.X.rows() + l2.X.rows(), static_cast<Eigen::Index>(p));
  S << l1.X, l2.X;
  for (;;) {
    Matrix K(S.rows(), S.rows());
    for (Eigen::Index i = 0; i < S.rows(); ++i)
      for (Eigen::Index j = 0; j < S.rows(); ++j)
        K(i, j) = se(S.row(i).transpose(), S.row(j).transpose(), 1.0, inst.hp.lengthscales) +
                  (i == j ? 1e-8 : 0.0);
    const Vector sv = Eigen::JacobiSVD<Matrix>(K).singularValues();
    if (sv(0) <= 1e6 * sv(sv.size() - 1)) break;
    inst.hp.lengthscales *= 0.8;
  }
  inst.hp.beta = Vector(static_cast<Eigen::Index>(inst.mean.basis_size(p)));
  for (Eigen::Index j = 0; j < inst.hp.beta.size(); ++j) inst.hp.beta(j) = rng.uniform_open() - 0.5;
  inst.test = lhs_sample(100, p, rng);
  return inst;
}

}  // namespace mfgp::oracle
