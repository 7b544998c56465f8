#include "mfgp/testfunctions.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mfgp/error.hpp"

namespace mfgp {

namespace {

constexpr double pi = std::numbers::pi;

double ex1_l1(double x1, double x2) { return (x1 * x2) * (x1 * x2) + std::sin(2.0 * pi * x1); }

double ex1_l2(double x1, double x2) {
  return ex1_l1(x1, x2) + 2.0 * x2 * (std::cos(4.0 * pi * x1 * x2) + x1 * x1 - x1 * x2);
}

double ex2_corr_l1(double x1, double x2) {
  return (x1 * x2) * (x1 * x2) + std::sin(2.0 * pi * x1) + std::cos(4.0 * pi * x1 * x2);
}

double ex2_uncorr_l1(double x1, double x2) {
  const double e = std::exp(x1 * x2);
  return (4.0 * x1 * x1 * x1 - x1 * std::pow(x2, 4)) / (e * e) - 2.0;
}

double ex3_l1(double x) { return x * std::sin(x) + x; }

double eval_point(TestFunctionId id, const double* x) {
  switch (id) {
    case TestFunctionId::Ex1L1: return ex1_l1(x[0], x[1]);
    case TestFunctionId::Ex1L2: return ex1_l2(x[0], x[1]);
    case TestFunctionId::Ex2CorrL1: return ex2_corr_l1(x[0], x[1]);
    case TestFunctionId::Ex2CorrL2: return ex1_l2(x[0], x[1]);
    case TestFunctionId::Ex2UncorrL1: return ex2_uncorr_l1(x[0], x[1]);
    case TestFunctionId::Ex2UncorrL2: return ex1_l2(x[0], x[1]);
    case TestFunctionId::Ex3L1: return ex3_l1(x[0]);
    case TestFunctionId::Ex3L2Shift: return ex3_l1(x[0]) + 4.0;
    case TestFunctionId::Ex3L2Tilt: return ex3_l1(x[0]) + 2.0 * x[0];
    case TestFunctionId::Ex3L2Stretch: return ex3_l1(x[0]) + 4.0 * std::sin(x[0] / 2.0);
  }
  return 0.0;
}

struct Entry {
  TestFunctionId id;
  const char* name;
};

constexpr Entry kNames[] = {
    {TestFunctionId::Ex1L1, "ex1-l1"},
    {TestFunctionId::Ex1L2, "ex1-l2"},
    {TestFunctionId::Ex2CorrL1, "ex2-corr-l1"},
    {TestFunctionId::Ex2CorrL2, "ex2-corr-l2"},
    {TestFunctionId::Ex2UncorrL1, "ex2-uncorr-l1"},
    {TestFunctionId::Ex2UncorrL2, "ex2-uncorr-l2"},
    {TestFunctionId::Ex3L1, "ex3-l1"},
    {TestFunctionId::Ex3L2Shift, "ex3-l2-shift"},
    {TestFunctionId::Ex3L2Tilt, "ex3-l2-tilt"},
    {TestFunctionId::Ex3L2Stretch, "ex3-l2-stretch"},
};

}  // namespace

std::size_t testfn_dim(TestFunctionId id) {
  switch (id) {
    case TestFunctionId::Ex3L1:
    case TestFunctionId::Ex3L2Shift:
    case TestFunctionId::Ex3L2Tilt:
    case TestFunctionId::Ex3L2Stretch: return 1;
    default: return 2;
  }
}

Domain testfn_domain(TestFunctionId id) {
  const auto p = static_cast<Eigen::Index>(testfn_dim(id));
  if (p == 1) return {Vector::Constant(1, 0.0), Vector::Constant(1, 10.0)};
  return {Vector::Zero(p), Vector::Ones(p)};
}

Vector eval_testfn(TestFunctionId id, const DesignMatrix& X) {
  const Domain dom = testfn_domain(id);
  if (static_cast<std::size_t>(X.cols()) != dom.dim()) {
    throw InvalidArgument(to_string(id) + " takes " + std::to_string(dom.dim()) +
                          " inputs, got " + std::to_string(X.cols()));
  }
  Vector out(X.rows());
  double x[2];
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      x[j] = X(i, j);
      if (!(x[j] >= dom.lower(j) && x[j] <= dom.upper(j))) {
        throw InvalidArgument(to_string(id) + ": point " + std::to_string(i + 1) +
                              " is outside the domain");
      }
    }
    out(i) = eval_point(id, x);
  }
  return out;
}

std::string to_string(TestFunctionId id) {
  for (const auto& e : kNames) {
    if (e.id == id) return e.name;
  }
  return "unknown";
}

TestFunctionId parse_testfn(std::string_view text) {
  for (const auto& e : kNames) {
    if (text == e.name) return e.id;
  }
  throw InvalidArgument("unknown test function '" + std::string(text) + "'");
}

const std::vector<TestFunctionId>& all_testfns() {
  static const std::vector<TestFunctionId> ids = [] {
    std::vector<TestFunctionId> v;
    for (const auto& e : kNames) v.push_back(e.id);
    return v;
  }();
  return ids;
}

}  // namespace mfgp
