#include "mfgp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mfgp/error.hpp"
#include "mfgp/random.hpp"

namespace mfgp {

OptimizerConfig OptimizerConfig::substream(std::uint64_t key) const {
  OptimizerConfig copy = *this;
  copy.seed = mix_seed(seed, {key});
  return copy;
}

OptimizationResult nelder_mead_minimize(const std::function<double(const Vector&)>& f,
                                        const Vector& x0, double initial_step,
                                        std::size_t max_evaluations, double f_tolerance,
                                        double x_tolerance) {
  constexpr double reflect = 1.0;
  constexpr double expand = 2.0;
  constexpr double contract = 0.5;
  constexpr double shrink = 0.5;
  constexpr double inf = std::numeric_limits<double>::infinity();

  const auto n = x0.size();
  std::size_t evaluations = 0;
  auto eval = [&](const Vector& x) {
    ++evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : inf;
  };

  if (n == 0) return {x0, eval(x0), evaluations};

  std::vector<Vector> simplex(static_cast<std::size_t>(n + 1), x0);
  std::vector<double> values(static_cast<std::size_t>(n + 1));
  values[0] = eval(x0);
  for (Eigen::Index i = 0; i < n; ++i) {
    simplex[static_cast<std::size_t>(i + 1)](i) += initial_step;
    values[static_cast<std::size_t>(i + 1)] = eval(simplex[static_cast<std::size_t>(i + 1)]);
  }

  std::vector<std::size_t> order(simplex.size());
  while (evaluations < max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const auto best = order.front();
    const auto worst = order.back();
    const auto second_worst = order[order.size() - 2];

    double x_spread = 0.0;
    for (const auto& v : simplex) x_spread = std::max(x_spread, (v - simplex[best]).cwiseAbs().maxCoeff());
    const bool flat = std::isfinite(values[worst]) &&
                      values[worst] - values[best] <= f_tolerance * (1.0 + std::abs(values[best]));
    if (flat && x_spread <= x_tolerance) break;
    if (x_spread <= x_tolerance * 1e-3) break;

    Vector centroid = Vector::Zero(n);
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(n);

    const Vector xr = centroid + reflect * (centroid - simplex[worst]);
    const double fr = eval(xr);
    if (fr < values[best]) {
      const Vector xe = centroid + expand * (xr - centroid);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second_worst]) {
      simplex[worst] = xr;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Vector xc = outside ? Vector(centroid + contract * (xr - centroid))
                              : Vector(centroid + contract * (simplex[worst] - centroid));
    const double fc = eval(xc);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = xc;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + shrink * (simplex[i] - simplex[best]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  return {simplex[best], values[best], evaluations};
}

MultiStartResult multistart_maximize(const std::function<double(const Vector&)>& objective,
                                     const std::vector<Vector>& starts,
                                     const OptimizerConfig& config) {
  if (starts.empty()) throw InvalidArgument("multistart_maximize needs at least one start");
  auto negated = [&](const Vector& x) { return -objective(x); };

  MultiStartResult result;
  result.value = -std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    RestartTrace trace;
    trace.start = starts[k];
    trace.start_objective = objective(starts[k]);
    const auto opt = nelder_mead_minimize(negated, starts[k], config.initial_step,
                                          config.max_evaluations, config.f_tolerance,
                                          config.x_tolerance);
    trace.final_objective = -opt.value;
    if (std::isfinite(trace.final_objective) && (!found || trace.final_objective > result.value)) {
      result.x = opt.x;
      result.value = trace.final_objective;
      result.best_index = k;
      found = true;
    }
    result.restarts.push_back(std::move(trace));
  }
  if (!found) throw NumericalError("objective was not finite at any point visited from any start");
  return result;
}

}  // namespace mfgp
