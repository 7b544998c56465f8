#include "mfgp/multilevel.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "mfgp/error.hpp"

namespace mfgp {

std::size_t MultiLevelData::dim() const {
  if (levels.empty()) throw InvalidArgument("multi-level data has no levels");
  return levels.front().dim();
}

void MultiLevelData::validate() const {
  if (levels.empty()) throw InvalidArgument("multi-level data needs at least one level");
  const auto p = levels.front().dim();
  if (p == 0) throw InvalidArgument("input dimension must be at least 1");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& lvl = levels[i];
    if (lvl.dim() != p) {
      throw InvalidArgument("level " + std::to_string(lvl.level_index) + " has " +
                            std::to_string(lvl.dim()) + " inputs, level " +
                            std::to_string(levels.front().level_index) + " has " +
                            std::to_string(p));
    }
    if (i > 0 && lvl.level_index <= levels[i - 1].level_index) {
      throw InvalidArgument("level indices must be strictly increasing");
    }
    lvl.validate();
  }
}

MultiLevelData MultiLevelData::from_levels(std::vector<LevelData> levels) {
  MultiLevelData d;
  d.levels = std::move(levels);
  for (std::size_t i = 0; i < d.levels.size(); ++i) d.levels[i].level_index = i + 1;
  return d;
}

std::string to_string(BayHEmMode mode) {
  return mode == BayHEmMode::SharedTheta ? "shared" : "per-level";
}

BayHEmMode parse_bayhem_mode(std::string_view text) {
  if (text == "shared") return BayHEmMode::SharedTheta;
  if (text == "per-level") return BayHEmMode::PerLevelTheta;
  throw InvalidArgument("unknown mode '" + std::string(text) + "' (expected shared|per-level)");
}

std::string to_string(BayHEmObjective objective) {
  return objective == BayHEmObjective::Joint ? "joint" : "top-conditional";
}

BayHEmObjective parse_bayhem_objective(std::string_view text) {
  if (text == "joint") return BayHEmObjective::Joint;
  if (text == "top-conditional") return BayHEmObjective::TopConditional;
  throw InvalidArgument("unknown objective '" + std::string(text) +
                        "' (expected joint|top-conditional)");
}

std::string to_string(LevelLink link) { return link == LevelLink::Exact ? "exact" : "transfer"; }

LevelLink parse_level_link(std::string_view text) {
  if (text == "exact") return LevelLink::Exact;
  if (text == "transfer") return LevelLink::Transfer;
  throw InvalidArgument("unknown level link '" + std::string(text) +
                        "' (expected exact|transfer)");
}

RhoSpec parse_rho(std::string_view text) {
  if (text == "estimate") return RhoSpec::estimated();
  constexpr std::string_view prefix = "fixed:";
  if (text.substr(0, prefix.size()) == prefix) {
    const auto body = text.substr(prefix.size());
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec == std::errc() && ptr == body.data() + body.size() && std::isfinite(v)) {
      return RhoSpec::fixed(v);
    }
  }
  throw InvalidArgument("invalid rho '" + std::string(text) + "' (expected fixed:<v>|estimate)");
}

std::string to_string(const RhoSpec& rho) {
  if (rho.kind == RhoSpec::Kind::Estimated) return "estimate";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, rho.value);
  return "fixed:" + std::string(buf, res.ptr);
}

}  // namespace mfgp
