#include "mfgp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "json_io.hpp"
#include "mfgp/design.hpp"
#include "mfgp/error.hpp"
#include "mfgp/random.hpp"

namespace mfgp {

namespace {

using detail::Json;
using detail::OrderedJson;

constexpr std::uint64_t kDesignKey = 0x64657369676eULL;    // "design"
constexpr std::uint64_t kOptimizerKey = 0x6f7074696dULL;   // "optim"

std::string join_sizes(const std::vector<std::size_t>& n) {
  std::string out;
  for (std::size_t i = 0; i < n.size(); ++i) out += (i ? ";" : "") + std::to_string(n[i]);
  return out;
}

std::string to_string(TestSetKind kind) {
  return kind == TestSetKind::LatinHypercube ? "lhs" : "linspace";
}

TestSetKind parse_test_set_kind(const std::string& s) {
  if (s == "lhs") return TestSetKind::LatinHypercube;
  if (s == "linspace") return TestSetKind::EquallySpaced;
  throw InvalidArgument("unknown test-set kind '" + s + "' (expected lhs|linspace)");
}

Json experiment_json(const ExperimentConfig& c, bool include_threads) {
  Json j;
  j["name"] = c.name;
  j["row_title"] = c.row_title;
  Json fns = Json::array();
  for (auto f : c.functions) fns.push_back(to_string(f));
  j["functions"] = fns;
  Json cells = Json::array();
  for (const auto& cell : c.cells) {
    Json e{{"label", cell.label}, {"n", cell.n_per_level}};
    if (!cell.fixed.empty()) {
      Json fixed = Json::array();
      for (const auto& X : cell.fixed) {
        fixed.push_back(X.rows() == 0 ? Json(nullptr) : detail::matrix_json(X));
      }
      e["fixed"] = fixed;
    }
    cells.push_back(std::move(e));
  }
  j["cells"] = cells;
  Json methods = Json::array();
  for (auto m : c.methods) methods.push_back(to_string(m));
  j["methods"] = methods;
  j["replicates"] = c.replicates;
  j["test_set"] = {{"kind", to_string(c.test_set.kind)}, {"size", c.test_set.size}};
  j["seed"] = c.seed;
  j["test_seed"] = c.test_seed;
  j["rmse"] = to_string(c.rmse);
  Json fit = detail::settings_json(c.fit);
  fit.erase("method");
  fit["optimizer"].erase("seed");
  j["fit"] = fit;
  if (include_threads) j["threads"] = c.threads;
  return j;
}

ExperimentConfig experiment_from(const Json& j) {
  ExperimentConfig c;
  c.name = j.value("name", std::string("custom"));
  c.row_title = j.value("row_title", c.row_title);
  for (const auto& f : j.at("functions")) c.functions.push_back(parse_testfn(f.get<std::string>()));
  const auto p = c.functions.empty() ? 0 : static_cast<Eigen::Index>(testfn_dim(c.functions[0]));
  for (const auto& e : j.at("cells")) {
    DesignCell cell;
    cell.n_per_level = e.at("n").get<std::vector<std::size_t>>();
    cell.label = e.value("label", join_sizes(cell.n_per_level));
    if (e.contains("fixed")) {
      for (const auto& X : e.at("fixed")) {
        cell.fixed.push_back(X.is_null() ? DesignMatrix(0, p) : detail::matrix_from(X, p));
      }
    }
    c.cells.push_back(std::move(cell));
  }
  for (const auto& m : j.at("methods")) c.methods.push_back(parse_method(m.get<std::string>()));
  c.replicates = j.value("replicates", c.replicates);
  if (j.contains("test_set")) {
    const auto& t = j.at("test_set");
    if (t.contains("kind")) c.test_set.kind = parse_test_set_kind(t.at("kind").get<std::string>());
    c.test_set.size = t.value("size", c.test_set.size);
  }
  c.seed = j.value("seed", c.seed);
  c.test_seed = j.value("test_seed", c.test_seed);
  if (j.contains("rmse")) c.rmse = parse_rmse_variant(j.at("rmse").get<std::string>());
  if (j.contains("fit")) c.fit = detail::settings_from(j.at("fit"), c.fit);
  c.threads = j.value("threads", c.threads);
  c.validate();
  return c;
}

std::vector<Method> union_methods(const std::vector<BenchmarkReport>& reports) {
  std::vector<Method> out;
  for (const auto& r : reports) {
    for (auto m : r.methods) {
      if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
    }
  }
  return out;
}

const CellResult* find_cell(const BenchmarkReport& r, Method m, const std::string& label) {
  for (const auto& c : r.cells) {
    if (c.method == m && c.label == label) return &c;
  }
  return nullptr;
}

std::string table_cell(const CellResult& c) {
  if (std::isnan(c.mean)) return "failed";
  std::string out = format_short(c.mean) + " (" + format_short(c.min) + ", " + format_short(c.max) + ")";
  if (c.failures > 0) out += " [" + std::to_string(c.failures) + " failed]";
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (functions.empty()) throw InvalidArgument("experiment '" + name + "' has no test functions");
  const auto p = testfn_dim(functions.front());
  for (auto f : functions) {
    if (testfn_dim(f) != p) throw InvalidArgument("test functions must share one input dimension");
  }
  if (cells.empty()) throw InvalidArgument("experiment '" + name + "' has no design cells");
  for (const auto& c : cells) {
    if (c.n_per_level.size() != functions.size()) {
      throw InvalidArgument("cell '" + c.label + "' needs one design size per level");
    }
    if (!c.fixed.empty()) {
      if (c.fixed.size() != functions.size()) {
        throw InvalidArgument("cell '" + c.label + "': fixed designs must be given per level");
      }
      for (std::size_t l = 0; l < c.fixed.size(); ++l) {
        if (c.fixed[l].rows() > 0 &&
            (static_cast<std::size_t>(c.fixed[l].rows()) != c.n_per_level[l] ||
             static_cast<std::size_t>(c.fixed[l].cols()) != p)) {
          throw InvalidArgument("cell '" + c.label + "': fixed design of level " +
                                std::to_string(l + 1) + " does not match its size");
        }
      }
    }
  }
  if (methods.empty()) throw InvalidArgument("experiment '" + name + "' has no methods");
  if (replicates < 1) throw InvalidArgument("replicates must be at least 1");
  if (test_set.size < 1) throw InvalidArgument("test set must have at least one point");
  if (test_set.kind == TestSetKind::EquallySpaced && (p != 1 || test_set.size < 2)) {
    throw InvalidArgument("equally spaced test sets need one input and at least 2 points");
  }
}

const CellResult& BenchmarkReport::cell(Method method, const std::string& label) const {
  if (const auto* c = find_cell(*this, method, label)) return *c;
  throw InvalidArgument("report has no cell for " + to_string(method) + " / " + label);
}

MultiLevelData replicate_data(const ExperimentConfig& cfg, std::size_t cell, std::size_t replicate) {
  const auto& c = cfg.cells.at(cell);
  const Domain dom = testfn_domain(cfg.functions.back());
  const auto p = dom.dim();
  MultiLevelData data;
  for (std::size_t l = 0; l < cfg.functions.size(); ++l) {
    LevelData lvl;
    lvl.level_index = l + 1;
    const auto n = c.n_per_level[l];
    if (!c.fixed.empty() && c.fixed[l].rows() > 0) {
      lvl.X = c.fixed[l];
    } else if (n == 0) {
      lvl.X = DesignMatrix(0, static_cast<Eigen::Index>(p));
    } else {
      Rng rng = Rng::stream(cfg.seed, {kDesignKey, cell, replicate, l + 1});
      lvl.X = scale_to_box(lhs_sample(n, p, rng), dom.lower, dom.upper);
    }
    lvl.y = lvl.X.rows() > 0 ? eval_testfn(cfg.functions[l], lvl.X) : Vector(0);
    data.levels.push_back(std::move(lvl));
  }
  return data;
}

FitSettings replicate_settings(const ExperimentConfig& cfg, std::size_t cell,
                               std::size_t replicate, Method method) {
  FitSettings s = cfg.fit;
  s.method = method;
  s.optimizer.seed = mix_seed(cfg.seed, {kOptimizerKey, cell, replicate});
  return s;
}

DesignMatrix test_points(const ExperimentConfig& cfg) {
  const Domain dom = testfn_domain(cfg.functions.back());
  if (cfg.test_set.kind == TestSetKind::EquallySpaced) {
    return linspace(dom.lower(0), dom.upper(0), cfg.test_set.size);
  }
  Rng rng(cfg.test_seed);
  return scale_to_box(lhs_sample(cfg.test_set.size, dom.dim(), rng), dom.lower, dom.upper);
}

Vector test_truth(const ExperimentConfig& cfg, const DesignMatrix& X) {
  return eval_testfn(cfg.functions.back(), X);
}

void aggregate(CellResult& c) {
  double sum = 0.0;
  std::size_t ok = 0;
  c.min = std::numeric_limits<double>::infinity();
  c.max = -std::numeric_limits<double>::infinity();
  for (double v : c.rmse) {
    if (!std::isfinite(v)) continue;
    sum += v;
    ++ok;
    c.min = std::min(c.min, v);
    c.max = std::max(c.max, v);
  }
  c.failures = c.rmse.size() - ok;
  if (ok == 0) {
    c.mean = c.min = c.max = std::numeric_limits<double>::quiet_NaN();
  } else {
    c.mean = sum / static_cast<double>(ok);
  }
}

BenchmarkReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const DesignMatrix Xt = test_points(cfg);
  const Vector yt = test_truth(cfg, Xt);
  const auto nc = cfg.cells.size();
  const auto nm = cfg.methods.size();
  const auto nr = cfg.replicates;

  std::vector<double> rmse(nc * nm * nr, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(nc * nm * nr);
  auto slot = [&](std::size_t c, std::size_t m, std::size_t r) { return (c * nm + m) * nr + r; };

  auto run_job = [&](std::size_t job) {
    const std::size_t c = job / nr;
    const std::size_t r = job % nr;
    MultiLevelData data;
    try {
      data = replicate_data(cfg, c, r);
    } catch (const std::exception& e) {
      for (std::size_t m = 0; m < nm; ++m) errors[slot(c, m, r)] = e.what();
      return;
    }
    for (std::size_t m = 0; m < nm; ++m) {
      try {
        const auto model = fit_model(data, replicate_settings(cfg, c, r, cfg.methods[m]));
        rmse[slot(c, m, r)] = mfgp::rmse(model.predict(Xt).mean, yt, cfg.rmse);
        if (!std::isfinite(rmse[slot(c, m, r)])) errors[slot(c, m, r)] = "non-finite RMSE";
      } catch (const std::exception& e) {
        errors[slot(c, m, r)] = e.what();
        rmse[slot(c, m, r)] = std::numeric_limits<double>::quiet_NaN();
      }
    }
  };

  const std::size_t jobs = nc * nr;
  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(jobs)));
  if (threads == 1) {
    for (std::size_t j = 0; j < jobs; ++j) run_job(j);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t j = next++; j < jobs; j = next++) run_job(j);
      });
    }
    for (auto& th : pool) th.join();
  }

  BenchmarkReport rep;
  rep.experiment = cfg.name;
  rep.row_title = cfg.row_title;
  rep.seed = cfg.seed;
  rep.config_hash = fnv1a_hex(experiment_to_json(cfg));
  rep.rmse = cfg.rmse;
  rep.replicates = nr;
  rep.methods = cfg.methods;
  for (std::size_t c = 0; c < nc; ++c) {
    rep.labels.push_back(cfg.cells[c].label);
    for (std::size_t m = 0; m < nm; ++m) {
      CellResult cell;
      cell.method = cfg.methods[m];
      cell.label = cfg.cells[c].label;
      cell.n_per_level = cfg.cells[c].n_per_level;
      for (std::size_t r = 0; r < nr; ++r) {
        cell.rmse.push_back(rmse[slot(c, m, r)]);
        cell.errors.push_back(errors[slot(c, m, r)]);
      }
      aggregate(cell);
      rep.cells.push_back(std::move(cell));
    }
  }
  return rep;
}

std::vector<BenchmarkReport> run_suite(const std::vector<ExperimentConfig>& suite) {
  std::vector<BenchmarkReport> out;
  for (const auto& cfg : suite) out.push_back(run_experiment(cfg));
  return out;
}

std::string experiment_to_json(const ExperimentConfig& cfg) {
  return experiment_json(cfg, false).dump();
}

std::string suite_canonical_json(const std::vector<ExperimentConfig>& suite) {
  Json a = Json::array();
  for (const auto& c : suite) a.push_back(experiment_json(c, false));
  return Json{{"experiments", a}}.dump();
}

std::string suite_hash(const std::vector<ExperimentConfig>& suite) {
  return fnv1a_hex(suite_canonical_json(suite));
}

std::string suite_to_json(const std::vector<ExperimentConfig>& suite) {
  Json a = Json::array();
  for (const auto& c : suite) a.push_back(experiment_json(c, true));
  return Json{{"experiments", a}}.dump(2) + "\n";
}

std::vector<ExperimentConfig> suite_from_json(std::string_view text, const std::string& source) {
  try {
    const Json j = Json::parse(text);
    std::vector<ExperimentConfig> out;
    if (j.contains("experiments")) {
      for (const auto& e : j.at("experiments")) out.push_back(experiment_from(e));
    } else {
      out.push_back(experiment_from(j));
    }
    if (out.empty()) throw InvalidArgument("no experiments defined");
    return out;
  } catch (const Json::exception& e) {
    throw DataError(source, 0, std::string("invalid experiment config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(source, 0, std::string("invalid experiment config: ") + e.what());
  }
}

const std::vector<std::string>& builtin_experiment_names() {
  static const std::vector<std::string> names{
      "example1",        "example1-sparse", "example2",      "example2-corr",   "example2-uncorr",
      "example3",        "example3-shift",  "example3-tilt", "example3-stretch"};
  return names;
}

std::vector<ExperimentConfig> builtin_experiment(std::string_view name) {
  const std::vector<Method> all{Method::SingleGP, Method::BayHEm, Method::KO, Method::HK};

  auto example1 = [&] {
    ExperimentConfig c;
    c.name = "example1";
    c.row_title = "No. L2 points";
    c.functions = {TestFunctionId::Ex1L1, TestFunctionId::Ex1L2};
    for (std::size_t n2 : {20, 12, 10, 5}) c.cells.push_back({std::to_string(n2), {20, n2}, {}});
    c.methods = all;
    return c;
  };
  auto sparse = [&] {
    ExperimentConfig c = example1();
    c.name = "example1-sparse";
    c.cells.clear();
    for (std::size_t n2 : {1, 2}) c.cells.push_back({std::to_string(n2), {20, n2}, {}});
    c.methods = {Method::BayHEm};
    return c;
  };
  auto example2 = [&](bool correlated) {
    ExperimentConfig c;
    c.name = correlated ? "example2-corr" : "example2-uncorr";
    c.row_title = "Correlated";
    c.functions = correlated
                      ? std::vector{TestFunctionId::Ex2CorrL1, TestFunctionId::Ex2CorrL2}
                      : std::vector{TestFunctionId::Ex2UncorrL1, TestFunctionId::Ex2UncorrL2};
    c.cells = {{correlated ? "Highly" : "Uncorrelated", {20, 10}, {}}};
    c.methods = all;
    return c;
  };
  auto example3 = [&](TestFunctionId top, const std::string& label) {
    ExperimentConfig c;
    c.name = "example3-" + label;
    c.row_title = "Case";
    c.functions = {TestFunctionId::Ex3L1, top};
    DesignMatrix X2(2, 1);
    X2 << 1.5, 8.5;
    c.cells = {{label, {25, 2}, {DesignMatrix(0, 1), X2}}};
    c.methods = {Method::BayHEm, Method::KO};
    c.test_set = {TestSetKind::EquallySpaced, 1000};
    return c;
  };

  if (name == "example1") return {example1()};
  if (name == "example1-sparse") return {sparse()};
  if (name == "example2-corr") return {example2(true)};
  if (name == "example2-uncorr") return {example2(false)};
  if (name == "example2") return {example2(true), example2(false)};
  if (name == "example3-shift") return {example3(TestFunctionId::Ex3L2Shift, "shift")};
  if (name == "example3-tilt") return {example3(TestFunctionId::Ex3L2Tilt, "tilt")};
  if (name == "example3-stretch") return {example3(TestFunctionId::Ex3L2Stretch, "stretch")};
  if (name == "example3") {
    return {example3(TestFunctionId::Ex3L2Shift, "shift"),
            example3(TestFunctionId::Ex3L2Tilt, "tilt"),
            example3(TestFunctionId::Ex3L2Stretch, "stretch")};
  }
  std::string known;
  for (const auto& n : builtin_experiment_names()) known += (known.empty() ? "" : ", ") + n;
  throw InvalidArgument("unknown experiment '" + std::string(name) + "' (known: " + known + ")");
}

std::string report_table_csv(const std::vector<BenchmarkReport>& reports, const Metadata& meta) {
  std::string out = meta.csv_block();
  const auto methods = union_methods(reports);
  out += csv_escape(reports.empty() ? "Design" : reports.front().row_title);
  for (auto m : methods) out += "," + csv_escape(display_name(m));
  out += "\n";
  for (const auto& r : reports) {
    for (const auto& label : r.labels) {
      out += csv_escape(label);
      for (auto m : methods) {
        const auto* c = find_cell(r, m, label);
        out += ",";
        if (c) out += csv_escape(table_cell(*c));
      }
      out += "\n";
    }
  }
  return out;
}

std::string report_summary_csv(const std::vector<BenchmarkReport>& reports, const Metadata& meta) {
  std::string out = meta.csv_block();
  out += "experiment,label,method,n_per_level,replicates,failures,mean,min,max\n";
  for (const auto& r : reports) {
    for (const auto& c : r.cells) {
      out += csv_escape(r.experiment) + "," + csv_escape(c.label) + "," + to_string(c.method) + "," +
             join_sizes(c.n_per_level) + "," + std::to_string(c.rmse.size()) + "," +
             std::to_string(c.failures) + "," + format_number(c.mean) + "," +
             format_number(c.min) + "," + format_number(c.max) + "\n";
    }
  }
  return out;
}

std::string report_json(const std::vector<BenchmarkReport>& reports, const Metadata& meta) {
  OrderedJson j;
  j["metadata"] = detail::metadata_json(meta);
  OrderedJson arr = OrderedJson::array();
  for (const auto& r : reports) {
    OrderedJson e;
    e["experiment"] = r.experiment;
    e["row_title"] = r.row_title;
    e["seed"] = r.seed;
    e["config_hash"] = r.config_hash;
    e["rmse_variant"] = to_string(r.rmse);
    e["replicates"] = r.replicates;
    OrderedJson methods = OrderedJson::array();
    for (auto m : r.methods) methods.push_back(to_string(m));
    e["methods"] = methods;
    e["labels"] = r.labels;
    OrderedJson cells = OrderedJson::array();
    for (const auto& c : r.cells) {
      OrderedJson cj;
      cj["method"] = to_string(c.method);
      cj["label"] = c.label;
      cj["n_per_level"] = c.n_per_level;
      cj["mean"] = c.mean;
      cj["min"] = c.min;
      cj["max"] = c.max;
      cj["failures"] = c.failures;
      cj["rmse"] = c.rmse;
      cj["errors"] = c.errors;
      cells.push_back(std::move(cj));
    }
    e["cells"] = cells;
    arr.push_back(std::move(e));
  }
  j["reports"] = arr;
  return j.dump(1) + "\n";
}

std::string report_text(const std::vector<BenchmarkReport>& reports) {
  const auto methods = union_methods(reports);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> head{reports.empty() ? "Design" : reports.front().row_title};
  for (auto m : methods) head.push_back(display_name(m));
  rows.push_back(head);
  for (const auto& r : reports) {
    for (const auto& label : r.labels) {
      std::vector<std::string> row{label};
      for (auto m : methods) {
        const auto* c = find_cell(r, m, label);
        row.push_back(c ? table_cell(*c) : "-");
      }
      rows.push_back(std::move(row));
    }
  }
  std::vector<std::size_t> width(head.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
  }
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out += rows[i][j];
      if (j + 1 < rows[i].size()) out += std::string(width[j] - rows[i][j].size() + 2, ' ');
    }
    out += "\n";
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      out += std::string(total - 2, '-') + "\n";
    }
  }
  return out;
}

}  // namespace mfgp
