#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mfgp/csv.hpp"
#include "mfgp/metrics.hpp"
#include "mfgp/model.hpp"
#include "mfgp/testfunctions.hpp"

namespace mfgp {

/// One row of a results table: the number of runs per level, and optionally
/// fixed designs (domain units) that replace the per-replicate LHS draw.
struct DesignCell {
  std::string label;
  std::vector<std::size_t> n_per_level;
  /// Empty, or one matrix per level; an empty matrix means "draw a fresh LHS".
  std::vector<DesignMatrix> fixed;
};

enum class TestSetKind { LatinHypercube, EquallySpaced };

struct TestSetSpec {
  TestSetKind kind = TestSetKind::LatinHypercube;
  std::size_t size = 10000;
};

struct ExperimentConfig {
  std::string name;
  /// Heading of the first table column, e.g. "No. L2 points".
  std::string row_title = "Design";
  /// One test function per level, cheapest first; all share a domain.
  std::vector<TestFunctionId> functions;
  std::vector<DesignCell> cells;
  std::vector<Method> methods;
  std::size_t replicates = 20;
  TestSetSpec test_set{};
  /// Seeds the design draws and the optimizer.
  std::uint64_t seed = 1;
  /// Seeds the shared test set only.
  std::uint64_t test_seed = 2;
  RmseVariant rmse = RmseVariant::Standard;
  /// `method` is ignored; every entry of `methods` is fitted.
  FitSettings fit{};
  /// Worker threads for replicates; results do not depend on it.
  unsigned threads = 1;

  /// Throws InvalidArgument on an inconsistent configuration.
  void validate() const;
};

/// Results of one method on one design cell.
struct CellResult {
  Method method = Method::BayHEm;
  std::string label;
  std::vector<std::size_t> n_per_level;
  /// Per replicate; NaN marks a failed fit.
  std::vector<double> rmse;
  /// Per replicate; empty on success.
  std::vector<std::string> errors;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t failures = 0;
};

struct BenchmarkReport {
  std::string experiment;
  std::string row_title;
  std::uint64_t seed = 0;
  std::string config_hash;
  RmseVariant rmse = RmseVariant::Standard;
  std::size_t replicates = 0;
  std::vector<Method> methods;
  std::vector<std::string> labels;
  std::vector<CellResult> cells;  // label-major, then method

  /// Throws InvalidArgument when absent.
  const CellResult& cell(Method method, const std::string& label) const;
};

/// Inputs of replicate `replicate` for design cell `cell`.
MultiLevelData replicate_data(const ExperimentConfig& cfg, std::size_t cell, std::size_t replicate);
/// Settings used for every method on that replicate (optimizer seed included).
FitSettings replicate_settings(const ExperimentConfig& cfg, std::size_t cell,
                               std::size_t replicate, Method method);
/// The shared test set and the top-level truth on it.
DesignMatrix test_points(const ExperimentConfig& cfg);
Vector test_truth(const ExperimentConfig& cfg, const DesignMatrix& X);

/// Mean, min and max over finite entries; NaN when there are none.
void aggregate(CellResult& cell);

BenchmarkReport run_experiment(const ExperimentConfig& cfg);
std::vector<BenchmarkReport> run_suite(const std::vector<ExperimentConfig>& suite);

/// Canonical compact JSON, the input to config hashes.
std::string experiment_to_json(const ExperimentConfig& cfg);
/// Indented JSON of a suite, the format of shipped experiment files.
std::string suite_to_json(const std::vector<ExperimentConfig>& suite);
/// Accepts a single experiment object or {"experiments": [...]}.
std::vector<ExperimentConfig> suite_from_json(std::string_view text, const std::string& source);
std::string suite_hash(const std::vector<ExperimentConfig>& suite);
std::string suite_canonical_json(const std::vector<ExperimentConfig>& suite);

/// example1, example1-sparse, example2, example2-corr, example2-uncorr,
/// example3, example3-shift, example3-tilt, example3-stretch.
const std::vector<std::string>& builtin_experiment_names();
std::vector<ExperimentConfig> builtin_experiment(std::string_view name);

/// Tables 1-2 layout: one row per design cell, one "mean (min, max)" column per method.
std::string report_table_csv(const std::vector<BenchmarkReport>& reports, const Metadata& meta);
/// One row per method and cell with mean, min, max and failures at full precision.
std::string report_summary_csv(const std::vector<BenchmarkReport>& reports, const Metadata& meta);
/// Everything, including per-replicate values and errors.
std::string report_json(const std::vector<BenchmarkReport>& reports, const Metadata& meta);
/// Aligned text table for terminals.
std::string report_text(const std::vector<BenchmarkReport>& reports);

}  // namespace mfgp
