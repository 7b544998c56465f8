#include "mfgp/serialize.hpp"

#include <string>

#include "json_io.hpp"
#include "mfgp/error.hpp"

namespace mfgp {

namespace detail {

Json settings_json(const FitSettings& s) {
  const auto& o = s.optimizer;
  const auto& b = s.bayhem;
  return Json{
      {"method", to_string(s.method)},
      {"mean", to_string(s.mean.form)},
      {"kernel", {{"family", to_string(s.kernel.family)}, {"jitter", s.kernel.jitter}}},
      {"optimizer",
       {{"restarts", o.restarts},
        {"lower_factor", o.lower_factor},
        {"upper_factor", o.upper_factor},
        {"max_evaluations", o.max_evaluations},
        {"f_tolerance", o.f_tolerance},
        {"x_tolerance", o.x_tolerance},
        {"initial_step", o.initial_step},
        {"seed", o.seed}}},
      {"bayhem",
       {{"mode", to_string(b.mode)},
        {"objective", to_string(b.objective)},
        {"link", to_string(b.link)},
        {"log_tau_start_lower", b.log_tau_start_lower},
        {"log_tau_start_upper", b.log_tau_start_upper},
        {"log_tau_min", b.log_tau_min},
        {"log_tau_max", b.log_tau_max}}},
      {"rho", to_string(s.rho)},
  };
}

FitSettings settings_from(const Json& j, const FitSettings& d) {
  if (!j.is_object()) throw InvalidArgument("fit settings must be a JSON object");
  FitSettings s = d;
  if (j.contains("method")) s.method = parse_method(j.at("method").get<std::string>());
  if (j.contains("mean")) s.mean.form = parse_mean_form(j.at("mean").get<std::string>());
  if (j.contains("kernel")) {
    const auto& k = j.at("kernel");
    if (k.contains("family")) s.kernel.family = parse_kernel_family(k.at("family").get<std::string>());
    s.kernel.jitter = k.value("jitter", s.kernel.jitter);
    if (!(s.kernel.jitter >= 0.0)) throw InvalidArgument("kernel jitter must be >= 0");
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    auto& t = s.optimizer;
    t.restarts = o.value("restarts", t.restarts);
    t.lower_factor = o.value("lower_factor", t.lower_factor);
    t.upper_factor = o.value("upper_factor", t.upper_factor);
    t.max_evaluations = o.value("max_evaluations", t.max_evaluations);
    t.f_tolerance = o.value("f_tolerance", t.f_tolerance);
    t.x_tolerance = o.value("x_tolerance", t.x_tolerance);
    t.initial_step = o.value("initial_step", t.initial_step);
    t.seed = o.value("seed", t.seed);
    if (!(t.lower_factor > 0.0) || !(t.upper_factor > t.lower_factor)) {
      throw InvalidArgument("optimizer box needs 0 < lower_factor < upper_factor");
    }
  }
  if (j.contains("bayhem")) {
    const auto& b = j.at("bayhem");
    auto& t = s.bayhem;
    if (b.contains("mode")) t.mode = parse_bayhem_mode(b.at("mode").get<std::string>());
    if (b.contains("objective")) {
      t.objective = parse_bayhem_objective(b.at("objective").get<std::string>());
    }
    if (b.contains("link")) t.link = parse_level_link(b.at("link").get<std::string>());
    t.log_tau_start_lower = b.value("log_tau_start_lower", t.log_tau_start_lower);
    t.log_tau_start_upper = b.value("log_tau_start_upper", t.log_tau_start_upper);
    t.log_tau_min = b.value("log_tau_min", t.log_tau_min);
    t.log_tau_max = b.value("log_tau_max", t.log_tau_max);
  }
  if (j.contains("rho")) s.rho = parse_rho(j.at("rho").get<std::string>());
  return s;
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vector_from(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("expected a numeric array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Json matrix_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i).transpose()));
  return a;
}

Matrix matrix_from(const Json& j, Eigen::Index cols) {
  if (!j.is_array()) throw InvalidArgument("expected an array of rows");
  Matrix m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vector row = vector_from(j[i]);
    if (row.size() != cols) throw InvalidArgument("ragged matrix row");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

Json hp_json(const Hyperparams& hp) {
  return Json{{"beta", vector_json(hp.beta)},
              {"sigma2", hp.sigma2},
              {"lengthscales", vector_json(hp.lengthscales)}};
}

Hyperparams hp_from(const Json& j) {
  Hyperparams hp;
  hp.beta = vector_from(j.at("beta"));
  hp.sigma2 = j.at("sigma2").get<double>();
  hp.lengthscales = vector_from(j.at("lengthscales"));
  return hp;
}

OrderedJson metadata_json(const Metadata& m) {
  OrderedJson j;
  j["tool"] = m.tool;
  j["version"] = m.version;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash();
  j["seed"] = m.seed;
  j["config"] = m.config.empty() ? OrderedJson::object() : OrderedJson::parse(m.config);
  return j;
}

Metadata metadata_from(const Json& j) {
  Metadata m;
  m.tool = j.value("tool", m.tool);
  m.version = j.value("version", m.version);
  m.command = j.value("command", std::string());
  m.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("config")) m.config = j.at("config").dump();
  return m;
}

}  // namespace detail

namespace {

using detail::Json;
using detail::OrderedJson;

OrderedJson levels_json(const MultiLevelData& data) {
  OrderedJson a = OrderedJson::array();
  for (const auto& lvl : data.levels) {
    OrderedJson l;
    l["level_index"] = lvl.level_index;
    l["dim"] = lvl.dim();
    l["X"] = detail::matrix_json(lvl.X);
    l["y"] = detail::vector_json(lvl.y);
    a.push_back(std::move(l));
  }
  return a;
}

MultiLevelData levels_from(const Json& j) {
  MultiLevelData d;
  for (const auto& l : j) {
    LevelData lvl;
    lvl.level_index = l.at("level_index").get<std::size_t>();
    lvl.X = detail::matrix_from(l.at("X"), l.at("dim").get<Eigen::Index>());
    lvl.y = detail::vector_from(l.at("y"));
    d.levels.push_back(std::move(lvl));
  }
  return d;
}

Json hp_list(const std::vector<Hyperparams>& hps) {
  Json a = Json::array();
  for (const auto& hp : hps) a.push_back(detail::hp_json(hp));
  return a;
}

std::vector<Hyperparams> hp_list_from(const Json& j) {
  std::vector<Hyperparams> out;
  for (const auto& e : j) out.push_back(detail::hp_from(e));
  return out;
}

MultiLevelData data_of(const MultiLevelModel& model) {
  return std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, FittedGP>) {
          MultiLevelData d;
          d.levels.push_back(m.data());
          return d;
        } else {
          return m.data();
        }
      },
      model.variant());
}

Json method_state(const MultiLevelModel& model) {
  Json s;
  switch (model.method()) {
    case Method::SingleGP: s["hp"] = detail::hp_json(model.as<FittedGP>().hp()); break;
    case Method::BayHEm: {
      const auto& m = model.as<BayHEmModel>();
      s["top"] = detail::hp_json(m.top_hp());
      Json t = Json::array();
      for (const auto& tr : m.transfers()) {
        t.push_back({{"beta", detail::vector_json(tr.beta)}, {"tau", tr.tau}});
      }
      s["transfers"] = std::move(t);
      s["stages"] = hp_list(m.stages());
      break;
    }
    case Method::KO: {
      const auto& m = model.as<KOModel>();
      std::vector<Hyperparams> hps;
      for (const auto& gp : m.level_gps()) hps.push_back(gp.hp());
      s["hps"] = hp_list(hps);
      s["rho"] = m.rho();
      break;
    }
    case Method::HK: {
      const auto& m = model.as<HKModel>();
      std::vector<Hyperparams> hps;
      for (const auto& gp : m.level_gps()) hps.push_back(gp->hp());
      s["hps"] = hp_list(hps);
      break;
    }
  }
  return s;
}

MultiLevelModel rebuild(Method method, MultiLevelData data, const Json& s,
                        const FitSettings& fs) {
  switch (method) {
    case Method::SingleGP: {
      if (data.num_levels() != 1) throw InvalidArgument("single-GP model must hold one level");
      return MultiLevelModel(FittedGP::condition(data.levels[0], detail::hp_from(s.at("hp")),
                                                 MeanFunction(fs.mean), fs.kernel));
    }
    case Method::BayHEm: {
      std::vector<LevelTransfer> transfers;
      for (const auto& t : s.at("transfers")) {
        transfers.push_back({detail::vector_from(t.at("beta")), t.at("tau").get<double>()});
      }
      return MultiLevelModel(BayHEmModel::condition(std::move(data), detail::hp_from(s.at("top")),
                                                    std::move(transfers), fs.mean, fs.kernel,
                                                    fs.bayhem, hp_list_from(s.at("stages"))));
    }
    case Method::KO:
      return MultiLevelModel(KOModel::condition(std::move(data), hp_list_from(s.at("hps")),
                                                s.at("rho").get<std::vector<double>>(), fs.mean,
                                                fs.kernel, fs.rho));
    case Method::HK:
      return MultiLevelModel(
          HKModel::condition(std::move(data), hp_list_from(s.at("hps")), fs.mean, fs.kernel));
  }
  throw InvalidArgument("unknown method");
}

}  // namespace

std::string settings_to_json(const FitSettings& settings) {
  return detail::settings_json(settings).dump();
}

FitSettings settings_from_json(std::string_view text, const FitSettings& defaults) {
  try {
    return detail::settings_from(Json::parse(text), defaults);
  } catch (const Json::exception& e) {
    throw InvalidArgument(std::string("invalid settings JSON: ") + e.what());
  }
}

std::string model_to_json(const MultiLevelModel& model, const FitSettings& settings,
                          const Metadata& metadata) {
  FitSettings fs = settings;
  fs.method = model.method();
  OrderedJson j;
  j["metadata"] = detail::metadata_json(metadata);
  j["format"] = "mfgp-model";
  j["format_version"] = kModelFormatVersion;
  j["method"] = to_string(fs.method);
  j["settings"] = OrderedJson::parse(detail::settings_json(fs).dump());
  j["levels"] = levels_json(data_of(model));
  j["state"] = OrderedJson::parse(method_state(model).dump());
  j["log_lik"] = model.log_lik();
  return j.dump(1) + "\n";
}

LoadedModel model_from_json(std::string_view text, const std::string& source) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    throw DataError(source, 0, std::string("not a valid model file: ") + e.what());
  }
  try {
    if (j.value("format", std::string()) != "mfgp-model") {
      throw DataError(source, 0, "not an mfgp model file");
    }
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw DataError(source, 0,
                      "unsupported model format version " + std::to_string(version) +
                          " (this build reads version " + std::to_string(kModelFormatVersion) +
                          ")");
    }
    const Method method = parse_method(j.at("method").get<std::string>());
    FitSettings fs = detail::settings_from(j.at("settings"), FitSettings{});
    fs.method = method;
    MultiLevelModel model = rebuild(method, levels_from(j.at("levels")), j.at("state"), fs);
    Metadata meta =
        j.contains("metadata") ? detail::metadata_from(j.at("metadata")) : Metadata{};
    return LoadedModel{std::move(model), std::move(fs), std::move(meta)};
  } catch (const Json::exception& e) {
    throw DataError(source, 0, std::string("malformed model file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(source, 0, std::string("malformed model file: ") + e.what());
  }
}

LoadedModel load_model(const std::string& path) {
  return model_from_json(read_text_file(path), path);
}

}  // namespace mfgp
