#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "mfgp/csv.hpp"
#include "mfgp/design.hpp"
#include "mfgp/error.hpp"
#include "mfgp/experiment.hpp"
#include "mfgp/model.hpp"
#include "mfgp/serialize.hpp"

namespace mfgp::cli {

namespace {

using Json = nlohmann::json;

// Settings shared by the subcommands. Unset fields fall back to the --config
// file, then to built-in defaults.
struct RunConfig {
  std::optional<std::string> config;
  std::vector<std::string> methods;
  std::optional<std::string> mode, objective, rho, link, mean, rmse, out;
  std::optional<double> jitter;
  std::optional<std::size_t> restarts, replicates, resolution, replicate;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;

  std::vector<std::string> levels;
  std::optional<std::string> model, points, experiment, cell, lower, upper;
  bool dump_config = false;
};

template <class T>
void fill(std::optional<T>& slot, const Json& j, const char* key) {
  if (!slot && j.contains(key)) slot = j.at(key).get<T>();
}

void merge_config_file(RunConfig& rc) {
  if (!rc.config) return;
  Json j;
  try {
    j = Json::parse(read_text_file(*rc.config));
  } catch (const Json::exception& e) {
    throw DataError(*rc.config, 0, std::string("invalid config file: ") + e.what());
  }
  if (!j.is_object()) throw DataError(*rc.config, 0, "config file must hold a JSON object");
  try {
    if (rc.methods.empty() && j.contains("method")) {
      const auto& m = j.at("method");
      if (m.is_array()) {
        rc.methods = m.get<std::vector<std::string>>();
      } else {
        rc.methods = {m.get<std::string>()};
      }
    }
    fill(rc.mode, j, "mode");
    fill(rc.objective, j, "objective");
    fill(rc.rho, j, "rho");
    fill(rc.link, j, "link");
    fill(rc.mean, j, "mean");
    fill(rc.rmse, j, "rmse");
    fill(rc.out, j, "out");
    fill(rc.jitter, j, "jitter");
    fill(rc.restarts, j, "restarts");
    fill(rc.replicates, j, "replicates");
    fill(rc.resolution, j, "resolution");
    fill(rc.replicate, j, "replicate");
    fill(rc.seed, j, "seed");
    fill(rc.threads, j, "threads");
    fill(rc.model, j, "model");
    fill(rc.points, j, "points");
    fill(rc.experiment, j, "experiment");
    fill(rc.cell, j, "cell");
    if (rc.levels.empty() && j.contains("levels")) {
      rc.levels = j.at("levels").get<std::vector<std::string>>();
    }
  } catch (const Json::exception& e) {
    throw DataError(*rc.config, 0, std::string("invalid config value: ") + e.what());
  }
}

FitSettings apply_settings(FitSettings s, const RunConfig& rc) {
  if (rc.methods.size() > 1) throw InvalidArgument("--method may be given only once here");
  if (!rc.methods.empty()) s.method = parse_method(rc.methods.front());
  if (rc.mode) s.bayhem.mode = parse_bayhem_mode(*rc.mode);
  if (rc.objective) s.bayhem.objective = parse_bayhem_objective(*rc.objective);
  if (rc.link) s.bayhem.link = parse_level_link(*rc.link);
  if (rc.rho) s.rho = parse_rho(*rc.rho);
  if (rc.mean) s.mean.form = parse_mean_form(*rc.mean);
  if (rc.jitter) {
    if (!(*rc.jitter >= 0.0)) throw InvalidArgument("--jitter must be >= 0");
    s.kernel.jitter = *rc.jitter;
  }
  if (rc.restarts) s.optimizer.restarts = *rc.restarts;
  if (rc.seed) s.optimizer.seed = *rc.seed;
  return s;
}

std::string output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return env && *env ? std::string(env) : std::string(".");
}

// "-" writes to `out`; an explicit path is used as given; otherwise
// <output dir>/<default_name>.
void emit(const RunConfig& rc, const std::string& default_name, const std::string& content,
          std::ostream& out, std::ostream& err) {
  if (rc.out && *rc.out == "-") {
    out << content;
    return;
  }
  const std::string path =
      rc.out ? *rc.out : (std::filesystem::path(output_dir()) / default_name).string();
  write_text_file(path, content);
  err << "wrote " << path << "\n";
}

std::string canonical(const Json& j) { return j.dump(); }

Vector parse_list(const std::string& text, const char* flag) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InvalidArgument(std::string(flag) + ": not a number list: '" + text + "'");
    }
  }
  Vector v(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
  return v;
}

std::string describe_hp(const Hyperparams& hp) {
  std::ostringstream os;
  os << "sigma2=" << format_short(hp.sigma2) << " lengthscales=(";
  for (Eigen::Index j = 0; j < hp.lengthscales.size(); ++j) {
    os << (j ? ", " : "") << format_short(hp.lengthscales(j));
  }
  os << ") beta=(";
  for (Eigen::Index j = 0; j < hp.beta.size(); ++j) os << (j ? ", " : "") << format_short(hp.beta(j));
  os << ")";
  return os.str();
}

void print_summary(const MultiLevelModel& model, std::ostream& os) {
  os << "method: " << display_name(model.method()) << "\n";
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, FittedGP>) {
          os << "  level " << m.data().level_index << ": " << describe_hp(m.hp()) << "\n";
        } else if constexpr (std::is_same_v<T, BayHEmModel>) {
          const auto chain = m.hp_chain();
          for (std::size_t i = 0; i < chain.size(); ++i) {
            os << "  theta_" << i << ": " << describe_hp(chain[i]) << "\n";
          }
          for (std::size_t i = 0; i < m.transfers().size(); ++i) {
            os << "  level " << m.data().levels[m.active_levels()[i]].level_index
               << " transfer: tau=" << format_short(m.transfers()[i].tau) << "\n";
          }
        } else if constexpr (std::is_same_v<T, KOModel>) {
          for (std::size_t i = 0; i < m.level_gps().size(); ++i) {
            os << "  " << (i == 0 ? "level 1" : "discrepancy " + std::to_string(i + 1)) << ": "
               << describe_hp(m.level_gps()[i].hp());
            if (i > 0) os << " rho=" << format_short(m.rho()[i - 1]);
            os << "\n";
          }
        } else {
          for (std::size_t i = 0; i < m.level_gps().size(); ++i) {
            os << "  level " << i + 1 << ": " << describe_hp(m.level_gps()[i]->hp()) << "\n";
          }
        }
      },
      model.variant());
  os << "log-likelihood: " << format_short(model.log_lik(), 10) << "\n";
}

int cmd_fit(RunConfig rc, std::ostream& out, std::ostream& err) {
  merge_config_file(rc);
  if (rc.levels.empty()) throw InvalidArgument("fit needs one CSV file per level");
  const FitSettings settings = apply_settings(FitSettings{}, rc);
  MultiLevelData data;
  for (std::size_t i = 0; i < rc.levels.size(); ++i) {
    data.levels.push_back(read_level_csv(rc.levels[i], i + 1));
  }
  for (const auto& lvl : data.levels) {
    if (lvl.dim() != data.levels.front().dim()) {
      throw DataError(rc.levels[lvl.level_index - 1], 0,
                      "has " + std::to_string(lvl.dim()) + " input columns, level 1 has " +
                          std::to_string(data.levels.front().dim()));
    }
  }
  if (settings.method == Method::KO && data.num_levels() < 2) {
    throw InvalidArgument("K&O requires ≥ 2 levels");
  }

  Metadata meta;
  meta.command = "fit";
  meta.seed = settings.optimizer.seed;
  meta.config = canonical(Json{{"command", "fit"},
                               {"levels", rc.levels},
                               {"settings", Json::parse(settings_to_json(settings))}});

  const MultiLevelModel model = fit_model(data, settings);
  for (const auto& w : model.warnings()) err << "warning: " << w << "\n";
  std::ostream& summary = rc.out && *rc.out == "-" ? err : out;
  print_summary(model, summary);
  emit(rc, "model.json", model_to_json(model, settings, meta), out, err);
  return kOk;
}

int cmd_predict(RunConfig rc, std::ostream& out, std::ostream& err) {
  merge_config_file(rc);
  if (!rc.model) throw InvalidArgument("predict needs --model");
  if (!rc.points) throw InvalidArgument("predict needs --points");
  const LoadedModel loaded = load_model(*rc.model);
  const auto p = loaded.model.dim();
  const DesignMatrix X = points_from_csv(read_csv(*rc.points), *rc.points, p);
  const Prediction pred = loaded.model.predict(X);

  Metadata meta;
  meta.command = "predict";
  meta.seed = loaded.metadata.seed;
  meta.config = canonical(Json{{"command", "predict"},
                               {"model", *rc.model},
                               {"model_config_hash", loaded.metadata.config_hash()},
                               {"points", *rc.points}});
  CsvTable t;
  std::istringstream block(meta.csv_block());
  for (std::string line; std::getline(block, line);) t.comments.push_back(line.substr(2));
  for (std::size_t j = 0; j < p; ++j) t.header.push_back("x" + std::to_string(j + 1));
  t.header.push_back("mean");
  t.header.push_back("variance");
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index j = 0; j < X.cols(); ++j) row.push_back(X(i, j));
    row.push_back(pred.mean(i));
    row.push_back(pred.variance(i));
    t.rows.push_back(std::move(row));
  }
  emit(rc, "predictions.csv", format_csv(t), out, err);
  return kOk;
}

std::vector<ExperimentConfig> load_suite(const std::string& name_or_path) {
  if (name_or_path.size() > 5 && name_or_path.substr(name_or_path.size() - 5) == ".json") {
    return suite_from_json(read_text_file(name_or_path), name_or_path);
  }
  return builtin_experiment(name_or_path);
}

void apply_experiment_overrides(std::vector<ExperimentConfig>& suite, const RunConfig& rc) {
  for (auto& cfg : suite) {
    if (rc.replicates) {
      if (*rc.replicates < 1) throw InvalidArgument("--replicates must be at least 1");
      cfg.replicates = *rc.replicates;
    }
    if (rc.seed) cfg.seed = *rc.seed;
    if (rc.rmse) cfg.rmse = parse_rmse_variant(*rc.rmse);
    if (rc.threads) cfg.threads = *rc.threads;
    if (!rc.methods.empty()) {
      cfg.methods.clear();
      for (const auto& m : rc.methods) cfg.methods.push_back(parse_method(m));
    }
    RunConfig fit_only = rc;
    fit_only.methods.clear();
    fit_only.seed.reset();
    cfg.fit = apply_settings(cfg.fit, fit_only);
  }
}

std::string suite_name(const std::string& requested) {
  if (requested.size() > 5 && requested.substr(requested.size() - 5) == ".json") {
    return std::filesystem::path(requested).stem().string();
  }
  return requested;
}

int cmd_benchmark(RunConfig rc, std::ostream& out, std::ostream& err) {
  merge_config_file(rc);
  if (!rc.experiment) throw InvalidArgument("benchmark needs an experiment name or .json file");
  auto suite = load_suite(*rc.experiment);
  apply_experiment_overrides(suite, rc);
  for (const auto& cfg : suite) cfg.validate();
  if (rc.dump_config) {
    out << suite_to_json(suite);
    return kOk;
  }

  Metadata meta;
  meta.command = "benchmark";
  meta.seed = suite.front().seed;
  meta.config = suite_canonical_json(suite);

  const auto reports = run_suite(suite);
  const std::string name = suite_name(*rc.experiment);
  if (rc.out && *rc.out == "-") {
    out << report_table_csv(reports, meta);
  } else {
    out << report_text(reports);
    const std::filesystem::path dir = rc.out ? *rc.out : output_dir();
    const auto table = (dir / (name + "_table.csv")).string();
    const auto summary = (dir / (name + "_summary.csv")).string();
    const auto json = (dir / (name + ".json")).string();
    write_text_file(table, report_table_csv(reports, meta));
    write_text_file(summary, report_summary_csv(reports, meta));
    write_text_file(json, report_json(reports, meta));
    err << "wrote " << table << ", " << summary << ", " << json << "\n";
  }
  for (const auto& r : reports) {
    for (const auto& c : r.cells) {
      if (c.failures > 0) {
        err << "warning: " << r.experiment << " / " << c.label << " / " << to_string(c.method)
            << ": " << c.failures << " of " << c.rmse.size() << " replicates failed\n";
      }
    }
  }
  return kOk;
}

int cmd_surface(RunConfig rc, std::ostream& out, std::ostream& err) {
  merge_config_file(rc);
  if (!rc.model && !rc.experiment) throw InvalidArgument("surface needs --model or --experiment");
  const std::size_t resolution = rc.resolution.value_or(50);
  if (resolution < 2) throw InvalidArgument("grid resolution must be at least 2 per axis");

  std::optional<ExperimentConfig> cfg;
  if (rc.experiment) {
    auto suite = load_suite(*rc.experiment);
    apply_experiment_overrides(suite, rc);
    std::size_t pick = 0;
    if (rc.cell) {
      bool found = false;
      for (std::size_t i = 0; i < suite.size() && !found; ++i) {
        for (const auto& c : suite[i].cells) {
          if (c.label == *rc.cell) {
            pick = i;
            found = true;
            break;
          }
        }
      }
      if (!found) throw InvalidArgument("no design cell labelled '" + *rc.cell + "'");
    }
    cfg = suite[pick];
  }

  std::optional<MultiLevelModel> model;
  Json source;
  std::uint64_t seed = 0;
  if (rc.model) {
    LoadedModel loaded = load_model(*rc.model);
    seed = loaded.metadata.seed;
    source = {{"model", *rc.model}, {"model_config_hash", loaded.metadata.config_hash()}};
    model.emplace(std::move(loaded.model));
  } else {
    std::size_t cell = 0;
    if (rc.cell) {
      while (cell < cfg->cells.size() && cfg->cells[cell].label != *rc.cell) ++cell;
    }
    const std::size_t rep = rc.replicate.value_or(0);
    if (rep >= cfg->replicates) throw InvalidArgument("--replicate is out of range");
    const Method method = rc.methods.empty() ? Method::BayHEm : parse_method(rc.methods.front());
    const FitSettings fs = replicate_settings(*cfg, cell, rep, method);
    seed = fs.optimizer.seed;
    source = {{"experiment", Json::parse(experiment_to_json(*cfg))}, {"cell", cfg->cells[cell].label},
              {"replicate", rep}, {"method", to_string(method)}};
    model.emplace(fit_model(replicate_data(*cfg, cell, rep), fs));
  }
  const auto p = model->dim();

  Vector lower, upper;
  if (cfg) {
    const Domain dom = testfn_domain(cfg->functions.back());
    lower = dom.lower;
    upper = dom.upper;
  } else {
    std::visit(
        [&](const auto& m) {
          using T = std::decay_t<decltype(m)>;
          std::vector<const DesignMatrix*> designs;
          if constexpr (std::is_same_v<T, FittedGP>) {
            designs.push_back(&m.data().X);
          } else {
            for (const auto& lvl : m.data().levels) designs.push_back(&lvl.X);
          }
          lower = Vector::Constant(static_cast<Eigen::Index>(p), INFINITY);
          upper = Vector::Constant(static_cast<Eigen::Index>(p), -INFINITY);
          for (const auto* X : designs) {
            if (X->rows() == 0) continue;
            lower = lower.cwiseMin(X->colwise().minCoeff().transpose());
            upper = upper.cwiseMax(X->colwise().maxCoeff().transpose());
          }
        },
        model->variant());
  }
  if (rc.lower) lower = parse_list(*rc.lower, "--lower");
  if (rc.upper) upper = parse_list(*rc.upper, "--upper");
  if (static_cast<std::size_t>(lower.size()) != p || static_cast<std::size_t>(upper.size()) != p) {
    throw InvalidArgument("grid bounds need " + std::to_string(p) + " values each");
  }
  if (cfg && testfn_dim(cfg->functions.back()) != p) {
    throw InvalidArgument("model dimension does not match the experiment");
  }

  const DesignMatrix G = regular_grid(lower, upper, resolution);
  const Prediction pred = model->predict(G);

  Metadata meta;
  meta.command = "surface";
  meta.seed = seed;
  source["command"] = "surface";
  source["resolution"] = resolution;
  source["lower"] = std::vector<double>(lower.data(), lower.data() + lower.size());
  source["upper"] = std::vector<double>(upper.data(), upper.data() + upper.size());
  meta.config = canonical(source);

  CsvTable t;
  std::istringstream block(meta.csv_block());
  for (std::string line; std::getline(block, line);) t.comments.push_back(line.substr(2));
  for (std::size_t j = 0; j < p; ++j) t.header.push_back("x" + std::to_string(j + 1));
  std::vector<Vector> truths;
  if (cfg) {
    for (std::size_t l = 0; l < cfg->functions.size(); ++l) {
      t.header.push_back("truth_l" + std::to_string(l + 1));
      truths.push_back(eval_testfn(cfg->functions[l], G));
    }
  }
  t.header.push_back("mean");
  t.header.push_back("sd");
  for (Eigen::Index i = 0; i < G.rows(); ++i) {
    std::vector<double> row;
    for (Eigen::Index j = 0; j < G.cols(); ++j) row.push_back(G(i, j));
    for (const auto& tr : truths) row.push_back(tr(i));
    row.push_back(pred.mean(i));
    row.push_back(std::sqrt(pred.variance(i)));
    t.rows.push_back(std::move(row));
  }
  emit(rc, "surface.csv", format_csv(t), out, err);
  return kOk;
}

void add_fit_flags(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--method", rc.methods, "Emulator: single|bayhem|ko|hk (repeatable)")
      ->allow_extra_args(false);
  sub->add_option("--mode", rc.mode, "BayHEm hyperparameters: shared|per-level");
  sub->add_option("--objective", rc.objective, "BayHEm shared objective: joint|top-conditional");
  sub->add_option("--link", rc.link, "BayHEm lower-level link: transfer|exact");
  sub->add_option("--rho", rc.rho, "K&O scale: fixed:<v>|estimate");
  sub->add_option("--mean", rc.mean, "Prior mean: zero|constant|linear");
  sub->add_option("--jitter", rc.jitter, "Diagonal jitter, relative to sigma2");
  sub->add_option("--restarts", rc.restarts, "Optimizer multi-starts");
  sub->add_option("--seed", rc.seed, "Random seed");
  sub->add_option("--out", rc.out, "Output path, or - for stdout");
  sub->add_option("--config", rc.config, "JSON file of default flag values");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-fidelity Gaussian-process emulation (BayHEm, K&O, HK, single GP)"};
  app.set_version_flag("--version", std::string("mfgp ") + MFGP_VERSION);
  app.require_subcommand(1);
  RunConfig rc;

  auto* fit = app.add_subcommand("fit", "Fit an emulator to one CSV per level, cheapest first");
  fit->add_option("levels", rc.levels, "Level CSV files (x1..xp,y)");
  add_fit_flags(fit, rc);

  auto* predict = app.add_subcommand("predict", "Predict with a saved model");
  predict->add_option("--model", rc.model, "Model file written by fit")->required();
  predict->add_option("--points", rc.points, "CSV of points (x1..xp)")->required();
  predict->add_option("--out", rc.out, "Output path, or - for stdout");
  predict->add_option("--config", rc.config, "JSON file of default flag values");

  auto* bench = app.add_subcommand("benchmark", "Run a built-in or JSON-defined experiment");
  bench->add_option("experiment", rc.experiment, "Experiment name or .json file");
  add_fit_flags(bench, rc);
  bench->add_option("--replicates", rc.replicates, "Replicate designs per cell");
  bench->add_option("--rmse", rc.rmse, "RMSE variant: standard|paper");
  bench->add_option("--threads", rc.threads, "Worker threads");
  bench->add_flag("--dump-config", rc.dump_config, "Print the effective experiment JSON and exit");

  auto* surface = app.add_subcommand("surface", "Emit predicted mean and sd on a regular grid");
  add_fit_flags(surface, rc);
  surface->add_option("--model", rc.model, "Model file written by fit");
  surface->add_option("--experiment", rc.experiment, "Experiment supplying truths, domain, data");
  surface->add_option("--cell", rc.cell, "Design cell label of the experiment");
  surface->add_option("--replicate", rc.replicate, "Replicate index of the experiment");
  surface->add_option("--resolution", rc.resolution, "Grid points per axis (>= 2)");
  surface->add_option("--lower", rc.lower, "Comma-separated lower grid bounds");
  surface->add_option("--upper", rc.upper, "Comma-separated upper grid bounds");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (fit->parsed()) return cmd_fit(rc, out, err);
    if (predict->parsed()) return cmd_predict(rc, out, err);
    if (bench->parsed()) return cmd_benchmark(rc, out, err);
    if (surface->parsed()) return cmd_surface(rc, out, err);
  } catch (const DataError& e) {
    err << "mfgp: data error: " << e.what() << "\n";
    return kData;
  } catch (const FitError& e) {
    err << "mfgp: fit failed at level " << e.level() << ": " << e.what() << "\n";
    return kNumerical;
  } catch (const NumericalError& e) {
    err << "mfgp: numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const UnsupportedOperation& e) {
    err << "mfgp: unsupported: " << e.what() << "\n";
    return kUnsupported;
  } catch (const InvalidArgument& e) {
    err << "mfgp: error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "mfgp: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace mfgp::cli
