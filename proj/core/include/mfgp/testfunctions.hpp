#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mfgp/types.hpp"

namespace mfgp {

enum class TestFunctionId {
  Ex1L1,
  Ex1L2,
  Ex2CorrL1,
  Ex2CorrL2,
  Ex2UncorrL1,
  Ex2UncorrL2,
  Ex3L1,
  Ex3L2Shift,
  Ex3L2Tilt,
  Ex3L2Stretch,
};

struct Domain {
  Vector lower;
  Vector upper;
  std::size_t dim() const noexcept { return static_cast<std::size_t>(lower.size()); }
};

/// Two-input functions live on [0,1]^2, one-input functions on [0,10].
std::size_t testfn_dim(TestFunctionId id);
Domain testfn_domain(TestFunctionId id);

/// Evaluates row by row. Throws InvalidArgument for a wrong column count or a
/// point outside the domain.
Vector eval_testfn(TestFunctionId id, const DesignMatrix& X);

/// Kebab-case identifiers, e.g. "ex1-l1", "ex3-l2-stretch".
std::string to_string(TestFunctionId id);
TestFunctionId parse_testfn(std::string_view text);
const std::vector<TestFunctionId>& all_testfns();

}  // namespace mfgp
