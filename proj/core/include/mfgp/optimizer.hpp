#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "mfgp/types.hpp"

namespace mfgp {

/// Settings for hyperparameter search: Nelder-Mead from `restarts` Latin
/// hypercube starting points in log-lengthscale space, box
/// [log(lower_factor * range_j), log(upper_factor * range_j)].
struct OptimizerConfig {
  std::size_t restarts = 10;
  double lower_factor = 0.05;
  double upper_factor = 2.0;
  std::size_t max_evaluations = 1500;
  double f_tolerance = 1e-9;
  double x_tolerance = 1e-6;
  double initial_step = 0.5;
  std::uint64_t seed = 0;

  /// Same settings with the seed re-keyed, for nested fits that must not share
  /// starting points.
  OptimizerConfig substream(std::uint64_t key) const;
};

struct OptimizationResult {
  Vector x;
  double value = 0.0;
  std::size_t evaluations = 0;
};

/// Minimizes f. Non-finite objective values are treated as +infinity.
OptimizationResult nelder_mead_minimize(const std::function<double(const Vector&)>& f,
                                        const Vector& x0, double initial_step,
                                        std::size_t max_evaluations, double f_tolerance,
                                        double x_tolerance);

struct RestartTrace {
  Vector start;
  double start_objective = 0.0;
  double final_objective = 0.0;
};

struct MultiStartResult {
  Vector x;
  double value = 0.0;
  std::size_t best_index = 0;
  std::vector<RestartTrace> restarts;
};

/// Maximizes `objective` from every start. The winner has the largest final
/// objective; ties go to the lowest start index.
MultiStartResult multistart_maximize(const std::function<double(const Vector&)>& objective,
                                     const std::vector<Vector>& starts,
                                     const OptimizerConfig& config);

}  // namespace mfgp
