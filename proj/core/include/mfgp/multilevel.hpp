#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mfgp/gp.hpp"
#include "mfgp/kernels.hpp"
#include "mfgp/optimizer.hpp"
#include "mfgp/process.hpp"
#include "mfgp/types.hpp"

namespace mfgp {

/// Levels ordered cheapest (index 1) to most complex (index L).
struct MultiLevelData {
  std::vector<LevelData> levels;

  std::size_t num_levels() const noexcept { return levels.size(); }
  std::size_t dim() const;
  const LevelData& top() const { return levels.back(); }
  /// L >= 1, shared dimension, strictly increasing level indices, each level valid.
  void validate() const;
  /// Builds levels numbered 1..L from (X, y) pairs.
  static MultiLevelData from_levels(std::vector<LevelData> levels);
};

// ---------------------------------------------------------------- BayHEm

enum class BayHEmMode { SharedTheta, PerLevelTheta };
enum class BayHEmObjective { Joint, TopConditional };

/// How lower-level runs relate to the top-level process Z.
///   Exact:    y^(l) = h(x)^T beta + Z(x) for every level, the plain recursion in
///             which each posterior is the prior of the next level.
///   Transfer: y^(l) = h(x)^T beta_l + Z(x) + e_l, e_l ~ N(0, tau_l sigma2) for
///             l < L, and the top level is h(x)^T beta_L + Z(x). beta_l and tau_l
///             are estimated with the other hyperparameters.
enum class LevelLink { Exact, Transfer };

struct BayHEmOptions {
  BayHEmMode mode = BayHEmMode::SharedTheta;
  BayHEmObjective objective = BayHEmObjective::Joint;
  LevelLink link = LevelLink::Transfer;
  /// Starting box for log tau and its hard clamp.
  double log_tau_start_lower = -12.0;
  double log_tau_start_upper = 1.0;
  double log_tau_min = -20.0;
  double log_tau_max = 8.0;
};

/// Mean offset and extra variance of one lower level under LevelLink::Transfer.
/// With LevelLink::Exact, beta equals the top-level beta and tau is 0.
struct LevelTransfer {
  Vector beta;
  double tau = 0.0;
};

std::string to_string(BayHEmMode mode);
BayHEmMode parse_bayhem_mode(std::string_view text);
std::string to_string(BayHEmObjective objective);
BayHEmObjective parse_bayhem_objective(std::string_view text);
std::string to_string(LevelLink link);
LevelLink parse_level_link(std::string_view text);

/// Top-level posterior conditioned on the runs of every level.
class BayHEmModel {
 public:
  /// Posterior for fixed hyperparameters. `top` is the hyperparameter set of the
  /// level-L process; `transfers` holds one entry per non-empty level below the
  /// top. `stages` optionally records earlier per-level fits for reporting.
  static BayHEmModel condition(MultiLevelData data, Hyperparams top,
                               std::vector<LevelTransfer> transfers, MeanSpec mean,
                               KernelSpec kernel, BayHEmOptions options,
                               std::vector<Hyperparams> stages = {});

  /// Top-level prediction.
  Prediction predict(const DesignMatrix& Xnew, bool want_cov = false) const;
  /// Only the top level is a valid emulator; any other level throws
  /// UnsupportedOperation.
  Prediction predict_level(std::size_t level_index, const DesignMatrix& Xnew,
                           bool want_cov = false) const;

  const MultiLevelData& data() const noexcept { return data_; }
  const MeanSpec& mean_spec() const noexcept { return mean_; }
  const KernelSpec& kernel_spec() const noexcept { return kernel_; }
  const BayHEmOptions& options() const noexcept { return options_; }
  BayHEmMode mode() const noexcept { return options_.mode; }
  const Hyperparams& top_hp() const noexcept { return top_; }
  const std::vector<LevelTransfer>& transfers() const noexcept { return transfers_; }
  /// SharedTheta: {theta_0}. PerLevelTheta: theta_0 .. theta_{L-1}, the last of
  /// which defines the top-level process.
  std::vector<Hyperparams> hp_chain() const;
  const std::vector<Hyperparams>& stages() const noexcept { return stages_; }
  /// Indices into data().levels that carry runs.
  const std::vector<std::size_t>& active_levels() const noexcept { return active_; }
  /// Log-likelihood of the selected objective at the stored hyperparameters.
  double log_lik() const noexcept { return log_lik_; }
  std::size_t dim() const noexcept { return data_.dim(); }
  /// Prior mean h(x)^T beta_L of the top-level process.
  Vector prior_mean(const DesignMatrix& Xnew) const;
  const std::shared_ptr<const Process>& process() const noexcept { return process_; }
  const std::vector<RestartTrace>& restarts() const noexcept { return restarts_; }
  /// The single-level model when only one level carries runs.
  const std::shared_ptr<const FittedGP>& single_level() const noexcept { return single_; }

 private:
  friend BayHEmModel fit_bayhem(const MultiLevelData&, const BayHEmOptions&, const MeanSpec&,
                                const KernelSpec&, const OptimizerConfig&);

  MultiLevelData data_;
  MeanSpec mean_;
  KernelSpec kernel_;
  BayHEmOptions options_;
  Hyperparams top_;
  std::vector<LevelTransfer> transfers_;
  std::vector<Hyperparams> stages_;
  std::vector<std::size_t> active_;
  std::shared_ptr<const Process> process_;
  // Set when a single level carries runs; predictions then come from fit_gp's model.
  std::shared_ptr<const FittedGP> single_;
  double log_lik_ = 0.0;
  std::vector<RestartTrace> restarts_;
};

/// Levels without runs are skipped. With one populated level this is fit_gp.
BayHEmModel fit_bayhem(const MultiLevelData& data, const BayHEmOptions& options,
                       const MeanSpec& mean, const KernelSpec& kernel,
                       const OptimizerConfig& opt);

// ---------------------------------------------------------- Kennedy-O'Hagan

struct RhoSpec {
  enum class Kind { Fixed, Estimated };
  Kind kind = Kind::Fixed;
  double value = 1.0;

  static RhoSpec fixed(double v) { return {Kind::Fixed, v}; }
  static RhoSpec estimated() { return {Kind::Estimated, 1.0}; }
};

/// "fixed:<v>" or "estimate".
RhoSpec parse_rho(std::string_view text);
std::string to_string(const RhoSpec& rho);

/// f^(l) = rho^(l-1) f^(l-1) + delta^(l), with independent GPs for f^(1) and
/// each discrepancy delta^(l).
class KOModel {
 public:
  /// Posterior for fixed hyperparameters: hps[0] for the base GP, hps[l-1] for
  /// discrepancy l; rho[l-2] scales level l-1 into level l.
  static KOModel condition(MultiLevelData data, std::vector<Hyperparams> hps,
                           std::vector<double> rho, MeanSpec mean, KernelSpec kernel,
                           RhoSpec rho_spec);

  Prediction predict(const DesignMatrix& Xnew, bool want_cov = false) const;
  /// Level-l emulator, l in 1..L.
  Prediction predict_level(std::size_t level, const DesignMatrix& Xnew,
                           bool want_cov = false) const;

  const MultiLevelData& data() const noexcept { return data_; }
  const FittedGP& base_gp() const { return gps_.front(); }
  /// One GP per level 2..L.
  std::vector<FittedGP> discrepancy_gps() const;
  const std::vector<FittedGP>& level_gps() const noexcept { return gps_; }
  const std::vector<double>& rho() const noexcept { return rho_; }
  const RhoSpec& rho_spec() const noexcept { return rho_spec_; }
  /// Discrepancy values at each level-l design, l = 2..L.
  const std::vector<Vector>& discrepancies() const noexcept { return discrepancies_; }
  /// Whether X^(l) is a subset of X^(l-1), l = 2..L.
  const std::vector<bool>& nested() const noexcept { return nested_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  const MeanSpec& mean_spec() const noexcept { return mean_; }
  const KernelSpec& kernel_spec() const noexcept { return kernel_; }
  std::size_t dim() const noexcept { return data_.dim(); }
  double log_lik() const;

 private:
  friend KOModel fit_ko(const MultiLevelData&, const RhoSpec&, const MeanSpec&,
                        const KernelSpec&, const OptimizerConfig&);

  MultiLevelData data_;
  MeanSpec mean_;
  KernelSpec kernel_;
  RhoSpec rho_spec_;
  std::vector<FittedGP> gps_;
  std::vector<double> rho_;
  std::vector<Vector> discrepancies_;
  std::vector<bool> nested_;
  std::vector<std::string> warnings_;
};

KOModel fit_ko(const MultiLevelData& data, const RhoSpec& rho, const MeanSpec& mean,
               const KernelSpec& kernel, const OptimizerConfig& opt);

// ------------------------------------------------------ hierarchical kriging

/// Level l >= 2 is a GP with mean beta_l m*_{l-1}(x), where m*_{l-1} is the
/// posterior mean of level l-1; beta_l is estimated by GLS.
class HKModel {
 public:
  /// hps[l-1] are the level-l hyperparameters; for l >= 2 beta has one entry.
  static HKModel condition(MultiLevelData data, std::vector<Hyperparams> hps, MeanSpec mean,
                           KernelSpec kernel);

  Prediction predict(const DesignMatrix& Xnew, bool want_cov = false) const;

  const MultiLevelData& data() const noexcept { return data_; }
  const std::vector<std::shared_ptr<const FittedGP>>& level_gps() const noexcept { return gps_; }
  /// beta_l for l = 2..L.
  std::vector<double> scales() const;
  const MeanSpec& mean_spec() const noexcept { return mean_; }
  const KernelSpec& kernel_spec() const noexcept { return kernel_; }
  std::size_t dim() const noexcept { return data_.dim(); }
  double log_lik() const;

 private:
  friend HKModel fit_hk(const MultiLevelData&, const MeanSpec&, const KernelSpec&,
                        const OptimizerConfig&);

  MultiLevelData data_;
  MeanSpec mean_;
  KernelSpec kernel_;
  std::vector<std::shared_ptr<const FittedGP>> gps_;
};

HKModel fit_hk(const MultiLevelData& data, const MeanSpec& mean, const KernelSpec& kernel,
               const OptimizerConfig& opt);

}  // namespace mfgp
