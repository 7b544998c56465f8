#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "likelihood.hpp"
#include "mfgp/design.hpp"
#include "mfgp/error.hpp"
#include "mfgp/multilevel.hpp"

namespace mfgp {

namespace {

// Runs of the first `count` populated levels stacked cheapest first.
struct Stack {
  DesignMatrix X;
  Vector y;
  std::vector<Eigen::Index> offsets;  // first row of each level, plus n
  std::size_t levels = 0;

  Eigen::Index rows() const { return y.size(); }
  Eigen::Index top_rows() const { return offsets[levels] - offsets[levels - 1]; }
};

Stack stack_levels(const MultiLevelData& data, const std::vector<std::size_t>& active,
                   std::size_t count) {
  Stack s;
  s.levels = count;
  Eigen::Index n = 0;
  for (std::size_t k = 0; k < count; ++k) n += data.levels[active[k]].X.rows();
  const auto p = static_cast<Eigen::Index>(data.dim());
  s.X.resize(n, p);
  s.y.resize(n);
  Eigen::Index row = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const auto& lvl = data.levels[active[k]];
    s.offsets.push_back(row);
    s.X.middleRows(row, lvl.X.rows()) = lvl.X;
    s.y.segment(row, lvl.y.size()) = lvl.y;
    row += lvl.X.rows();
  }
  s.offsets.push_back(row);
  return s;
}

// Stacked regression basis: one shared block (Exact) or one block per level
// with the top level last (Transfer).
Matrix stacked_basis(const Stack& s, const MeanSpec& mean, LevelLink link) {
  const Matrix h = regression_basis(s.X, mean);
  if (link == LevelLink::Exact) return h;
  const auto q = h.cols();
  Matrix H = Matrix::Zero(s.rows(), q * static_cast<Eigen::Index>(s.levels));
  for (std::size_t k = 0; k < s.levels; ++k) {
    const auto r0 = s.offsets[k];
    const auto nr = s.offsets[k + 1] - r0;
    H.block(r0, static_cast<Eigen::Index>(k) * q, nr, q) = h.middleRows(r0, nr);
  }
  return H;
}

// Parameter vector: log-lengthscales then, under Transfer, log tau per lower level.
struct Unpacked {
  Vector lengthscales;
  Vector tau;  // one per lower level, zero under Exact
};

Unpacked unpack(const Vector& t, const Vector& ranges, const Stack& s,
                const BayHEmOptions& options) {
  const auto p = ranges.size();
  Unpacked u;
  u.lengthscales = detail::lengthscales_from_log(t.head(p), ranges);
  u.tau = Vector::Zero(static_cast<Eigen::Index>(s.levels) - 1);
  if (options.link == LevelLink::Transfer) {
    for (Eigen::Index k = 0; k < u.tau.size(); ++k) {
      u.tau(k) = std::exp(std::clamp(t(p + k), options.log_tau_min, options.log_tau_max));
    }
  }
  return u;
}

Matrix stacked_correlation(const Stack& s, const Vector& lengthscales, const Vector& tau,
                           double jitter) {
  Matrix R = correlation_matrix(s.X, s.X, lengthscales);
  R.diagonal().array() += jitter;
  for (Eigen::Index k = 0; k < tau.size(); ++k) {
    const auto r0 = s.offsets[static_cast<std::size_t>(k)];
    const auto nr = s.offsets[static_cast<std::size_t>(k) + 1] - r0;
    R.diagonal().segment(r0, nr).array() += tau(k);
  }
  return R;
}

std::vector<Vector> box_starts(const Vector& lower, const Vector& upper, std::size_t count,
                               Rng& rng) {
  const DesignMatrix unit = lhs_sample(count, static_cast<std::size_t>(lower.size()), rng);
  std::vector<Vector> starts;
  starts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    starts.emplace_back(lower.array() + unit.row(row).transpose().array() * (upper - lower).array());
  }
  return starts;
}

struct StageFit {
  Hyperparams top;
  std::vector<LevelTransfer> transfers;
  Vector x;  // optimizer coordinates of the winner
  std::vector<RestartTrace> restarts;
};

// Maximizes the likelihood of the stacked first `count` populated levels.
// `scored_from_top` scores only log p(y_top | y_lower).
StageFit fit_stage(const MultiLevelData& data, const std::vector<std::size_t>& active,
                   std::size_t count, bool scored_from_top, const BayHEmOptions& options,
                   const MeanSpec& mean, const KernelSpec& kernel, const OptimizerConfig& opt,
                   const Vector& ranges, const std::optional<Vector>& warm_start) {
  const Stack s = stack_levels(data, active, count);
  const Matrix H = stacked_basis(s, mean, options.link);
  const Eigen::Index scored = scored_from_top ? s.rows() - s.top_rows() : 0;
  const auto p = ranges.size();
  const Eigen::Index ntau =
      options.link == LevelLink::Transfer ? static_cast<Eigen::Index>(count) - 1 : 0;

  auto evaluate = [&](const Vector& t) {
    const Unpacked u = unpack(t, ranges, s, options);
    return detail::profile_likelihood(stacked_correlation(s, u.lengthscales, u.tau, kernel.jitter),
                                      H, s.y, scored);
  };
  auto objective = [&](const Vector& t) {
    const auto prof = evaluate(t);
    return prof ? prof->log_lik : -std::numeric_limits<double>::infinity();
  };

  Vector lower(p + ntau), upper(p + ntau);
  for (Eigen::Index j = 0; j < p; ++j) {
    lower(j) = std::log(opt.lower_factor * ranges(j));
    upper(j) = std::log(opt.upper_factor * ranges(j));
  }
  lower.tail(ntau).setConstant(options.log_tau_start_lower);
  upper.tail(ntau).setConstant(options.log_tau_start_upper);

  Rng rng(opt.seed);
  std::vector<Vector> starts;
  if (warm_start) starts.push_back(*warm_start);
  for (auto& st : box_starts(lower, upper, std::max<std::size_t>(opt.restarts, 1), rng)) {
    starts.push_back(std::move(st));
  }

  const std::size_t top_level = data.levels[active[count - 1]].level_index;
  MultiStartResult best;
  try {
    best = multistart_maximize(objective, starts, opt);
  } catch (const NumericalError& e) {
    throw FitError("all " + std::to_string(starts.size()) + " restarts failed at level " +
                       std::to_string(top_level) + ": " + e.what(),
                   top_level);
  }
  const auto prof = evaluate(best.x);
  if (!prof) {
    throw FitError("optimum is not positive definite at level " + std::to_string(top_level),
                   top_level);
  }

  StageFit out;
  const Unpacked u = unpack(best.x, ranges, s, options);
  const auto q = static_cast<Eigen::Index>(mean.basis_size(data.dim()));
  out.top.lengthscales = u.lengthscales;
  out.top.sigma2 = prof->sigma2;
  if (options.link == LevelLink::Transfer) {
    out.top.beta = prof->beta.segment(static_cast<Eigen::Index>(count - 1) * q, q);
    for (std::size_t k = 0; k + 1 < count; ++k) {
      out.transfers.push_back({prof->beta.segment(static_cast<Eigen::Index>(k) * q, q),
                               u.tau(static_cast<Eigen::Index>(k))});
    }
  } else {
    out.top.beta = prof->beta;
    for (std::size_t k = 0; k + 1 < count; ++k) out.transfers.push_back({prof->beta, 0.0});
  }
  out.x = best.x;
  out.restarts = std::move(best.restarts);
  return out;
}

std::vector<std::size_t> populated_levels(const MultiLevelData& data) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < data.levels.size(); ++i) {
    if (data.levels[i].size() > 0) active.push_back(i);
  }
  return active;
}

}  // namespace

BayHEmModel BayHEmModel::condition(MultiLevelData data, Hyperparams top,
                                   std::vector<LevelTransfer> transfers, MeanSpec mean,
                                   KernelSpec kernel, BayHEmOptions options,
                                   std::vector<Hyperparams> stages) {
  data.validate();
  const auto active = populated_levels(data);
  if (active.empty()) throw InvalidArgument("BayHEm needs at least one level with runs");
  const auto p = data.dim();
  top.validate(p, mean);
  if (transfers.size() + 1 != active.size()) {
    throw InvalidArgument("expected " + std::to_string(active.size() - 1) +
                          " lower-level transfer terms, got " + std::to_string(transfers.size()));
  }
  const auto q = mean.basis_size(p);
  for (const auto& t : transfers) {
    if (static_cast<std::size_t>(t.beta.size()) != q || !(t.tau >= 0.0) || !std::isfinite(t.tau)) {
      throw InvalidArgument("invalid lower-level transfer term");
    }
  }

  BayHEmModel m;
  m.mean_ = mean;
  m.kernel_ = kernel;
  m.options_ = options;
  m.top_ = top;
  m.transfers_ = std::move(transfers);
  m.stages_ = std::move(stages);
  m.active_ = active;

  if (active.size() == 1) {
    auto gp = std::make_shared<const FittedGP>(
        FittedGP::condition(data.levels[active[0]], top, MeanFunction(mean), kernel));
    m.log_lik_ = gp->log_lik();
    m.process_ = std::make_shared<const PriorProcess>(MeanFunction(mean), top);
    m.single_ = std::move(gp);
    m.data_ = std::move(data);
    return m;
  }

  // Sequential conditioning: the posterior after level l is the prior of level l+1.
  const MeanFunction mf(mean);
  std::shared_ptr<const Process> proc = std::make_shared<const PriorProcess>(mf, top);
  for (std::size_t k = 0; k < active.size(); ++k) {
    const auto& lvl = data.levels[active[k]];
    const bool is_top = k + 1 == active.size();
    Observations obs;
    obs.X = lvl.X;
    obs.y = lvl.y;
    obs.level_index = lvl.level_index;
    const double tau = is_top ? 0.0 : m.transfers_[k].tau;
    obs.noise = Vector::Constant(lvl.X.rows(), (kernel.jitter + tau) * top.sigma2);
    if (!is_top && q > 0) obs.offset = regression_basis(lvl.X, mean) * (m.transfers_[k].beta - top.beta);
    proc = condition_level(std::move(proc), std::move(obs));
  }
  m.process_ = std::move(proc);

  // Objective value at the stored hyperparameters, from the stacked system.
  const Stack s = stack_levels(data, active, active.size());
  Vector tau = Vector::Zero(static_cast<Eigen::Index>(active.size()) - 1);
  Vector mu(s.rows());
  const Matrix h = regression_basis(s.X, mean);
  for (std::size_t k = 0; k < active.size(); ++k) {
    const auto r0 = s.offsets[k];
    const auto nr = s.offsets[k + 1] - r0;
    const bool is_top = k + 1 == active.size();
    const Vector& beta = is_top ? top.beta : m.transfers_[k].beta;
    mu.segment(r0, nr) = q > 0 ? Vector(h.middleRows(r0, nr) * beta) : Vector::Zero(nr);
    if (!is_top) tau(static_cast<Eigen::Index>(k)) = m.transfers_[k].tau;
  }
  const Matrix K = top.sigma2 * stacked_correlation(s, top.lengthscales, tau, kernel.jitter);
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success) throw NumericalError("stacked BayHEm covariance is singular");
  const Vector w = llt.matrixL().solve(s.y - mu);
  const bool conditional =
      options.mode == BayHEmMode::PerLevelTheta || options.objective == BayHEmObjective::TopConditional;
  const Eigen::Index from = conditional ? s.rows() - s.top_rows() : 0;
  const Matrix& L = llt.matrixLLT();
  double ll = -0.5 * w.tail(s.rows() - from).squaredNorm() -
              0.5 * static_cast<double>(s.rows() - from) * std::log(2.0 * std::numbers::pi);
  for (Eigen::Index i = from; i < s.rows(); ++i) ll -= std::log(L(i, i));
  m.log_lik_ = ll;
  m.data_ = std::move(data);
  return m;
}

Prediction BayHEmModel::predict(const DesignMatrix& Xnew, bool want_cov) const {
  if (single_) return single_->predict(Xnew, want_cov);
  return predict_process(*process_, Xnew, want_cov);
}

Prediction BayHEmModel::predict_level(std::size_t level_index, const DesignMatrix& Xnew,
                                      bool want_cov) const {
  if (level_index != data_.top().level_index) {
    throw UnsupportedOperation(
        "BayHEm predicts the top level only; the intermediate-level posterior (level " +
        std::to_string(level_index) + ") is not a valid emulator of that level");
  }
  return predict(Xnew, want_cov);
}

std::vector<Hyperparams> BayHEmModel::hp_chain() const {
  if (options_.mode == BayHEmMode::PerLevelTheta && !stages_.empty()) return stages_;
  return {top_};
}

Vector BayHEmModel::prior_mean(const DesignMatrix& Xnew) const {
  if (static_cast<std::size_t>(Xnew.cols()) != dim()) {
    throw InvalidArgument("prior_mean: dimension mismatch");
  }
  if (top_.beta.size() == 0) return Vector::Zero(Xnew.rows());
  return regression_basis(Xnew, mean_) * top_.beta;
}

BayHEmModel fit_bayhem(const MultiLevelData& data, const BayHEmOptions& options,
                       const MeanSpec& mean, const KernelSpec& kernel,
                       const OptimizerConfig& opt) {
  data.validate();
  const auto active = populated_levels(data);
  if (active.empty()) throw InvalidArgument("BayHEm needs at least one level with runs");

  if (active.size() == 1) {
    const auto& lvl = data.levels[active[0]];
    FittedGP gp = fit_gp(lvl, MeanFunction(mean), kernel, opt);
    auto restarts = gp.restarts();
    BayHEmModel m = BayHEmModel::condition(data, gp.hp(), {}, mean, kernel, options);
    m.restarts_ = std::move(restarts);
    return m;
  }

  const Vector ranges = design_ranges(stack_levels(data, active, active.size()).X);
  const auto p = ranges.size();

  if (options.mode == BayHEmMode::SharedTheta) {
    StageFit fit = fit_stage(data, active, active.size(),
                             options.objective == BayHEmObjective::TopConditional, options, mean,
                             kernel, opt, ranges, std::nullopt);
    BayHEmModel m = BayHEmModel::condition(data, fit.top, std::move(fit.transfers), mean, kernel,
                                           options);
    m.restarts_ = std::move(fit.restarts);
    return m;
  }

  // Per-level: theta_0 from level 1 alone, then one stage per further level,
  // each scoring log p(y^(l) | y^(<l)) and warm-started from the previous stage.
  const auto& first = data.levels[active[0]];
  if (first.size() < 2) {
    throw FitError("per-level BayHEm needs at least 2 runs at level " +
                       std::to_string(first.level_index),
                   first.level_index);
  }
  FittedGP gp0 = fit_gp(first, MeanFunction(mean), kernel, opt.substream(1));
  std::vector<Hyperparams> stages{gp0.hp()};
  Vector warm(p);
  for (Eigen::Index j = 0; j < p; ++j) warm(j) = std::log(gp0.hp().lengthscales(j));

  StageFit fit;
  for (std::size_t count = 2; count <= active.size(); ++count) {
    if (options.link == LevelLink::Transfer) {
      Vector next(warm.size() + 1);
      next << warm, 0.5 * (options.log_tau_start_lower + options.log_tau_start_upper);
      warm = std::move(next);
    }
    fit = fit_stage(data, active, count, true, options, mean, kernel,
                    opt.substream(static_cast<std::uint64_t>(count)), ranges, warm);
    warm = fit.x;
    stages.push_back(fit.top);
  }
  BayHEmModel m = BayHEmModel::condition(data, fit.top, std::move(fit.transfers), mean, kernel,
                                         options, std::move(stages));
  m.restarts_ = std::move(fit.restarts);
  return m;
}

}  // namespace mfgp
