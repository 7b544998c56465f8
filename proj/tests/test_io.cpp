#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "mfgp/csv.hpp"
#include "mfgp/design.hpp"
#include "mfgp/error.hpp"
#include "mfgp/model.hpp"
#include "mfgp/random.hpp"
#include "mfgp/serialize.hpp"
#include "mfgp/testfunctions.hpp"

namespace mfgp {
namespace {

// Line number reported for a malformed file.
std::size_t error_line(const std::string& text) {
  try {
    level_from_csv(parse_csv(text, "in.csv"), "in.csv", 1);
  } catch (const DataError& e) {
    EXPECT_EQ(e.file(), "in.csv");
    return e.row();
  }
  ADD_FAILURE() << "no DataError for:\n" << text;
  return 0;
}

TEST(Csv, MalformedInputNamesTheLine) {
  EXPECT_EQ(error_line("x1,y\n0.1,1\n0.2\n"), 3u);
  EXPECT_EQ(error_line("x1,y\n0.1,abc\n"), 2u);
  EXPECT_EQ(error_line("x1,y\n0.1,\n"), 2u);
  EXPECT_EQ(error_line("# comment\nx1,y\n0.1,1\n0.3,2\n0.1,5\n"), 5u);
  EXPECT_EQ(error_line("x1,y\n1,2,3\n"), 2u);
  EXPECT_THROW(parse_csv("", "empty.csv"), DataError);
}

TEST(Csv, DuplicateRowNamesBothLines) {
  try {
    level_from_csv(parse_csv("x1,x2,y\n0.1,0.2,1\n0.5,0.5,2\n0.1,0.2,3\n", "d.csv"), "d.csv", 1);
    FAIL();
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("d.csv:4"), std::string::npos) << msg;
    EXPECT_NE(msg.find("2"), std::string::npos) << msg;
  }
}

TEST(Csv, LevelRoundTripIsByteIdentical) {
  Rng rng(1);
  LevelData d{lhs_sample(7, 2, rng), Vector(), 1};
  d.y = eval_testfn(TestFunctionId::Ex1L2, d.X);
  const std::string once = format_csv(level_to_csv(d));
  const auto back = level_from_csv(parse_csv(once, "x"), "x", 1);
  EXPECT_EQ(back.X, d.X);
  EXPECT_EQ(back.y, d.y);
  EXPECT_EQ(format_csv(parse_csv(once, "x")), once);
}

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
  EXPECT_EQ(format_short(0.73912), "0.7391");
  EXPECT_EQ(format_short(std::nan("")), "nan");
}

TEST(Csv, PointsAcceptOptionalOutputColumn) {
  const auto t = parse_csv("x1,x2,y\n0.1,0.2,3\n", "p");
  EXPECT_EQ(points_from_csv(t, "p", 2).rows(), 1);
  EXPECT_THROW(points_from_csv(t, "p", 1), DataError);
  EXPECT_EQ(points_from_csv(parse_csv("x1,x2\n", "p"), "p", 2).rows(), 0);
}

TEST(Metadata, BlockAndHash) {
  Metadata m;
  m.command = "fit";
  m.seed = 7;
  m.config = R"({"a":1})";
  const auto block = m.csv_block();
  EXPECT_EQ(block.rfind("# tool: mfgp ", 0), 0u);
  EXPECT_NE(block.find("# config_hash: " + m.config_hash()), std::string::npos);
  EXPECT_NE(block.find("# seed: 7"), std::string::npos);
  EXPECT_EQ(m.config_hash().size(), 16u);
  // FNV-1a 64 reference values.
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

MultiLevelData two_levels(std::size_t n1, std::size_t n2, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  const auto f1 = p == 2 ? TestFunctionId::Ex1L1 : TestFunctionId::Ex3L1;
  const auto f2 = p == 2 ? TestFunctionId::Ex1L2 : TestFunctionId::Ex3L2Tilt;
  const Domain d = testfn_domain(f1);
  LevelData l1{scale_to_box(lhs_sample(n1, p, rng), d.lower, d.upper), Vector(), 1};
  LevelData l2{scale_to_box(lhs_sample(n2, p, rng), d.lower, d.upper), Vector(), 2};
  l1.y = eval_testfn(f1, l1.X);
  l2.y = eval_testfn(f2, l2.X);
  return MultiLevelData::from_levels({l1, l2});
}

class ModelRoundTrip : public ::testing::TestWithParam<std::tuple<Method, BayHEmMode>> {};

TEST_P(ModelRoundTrip, LoadThenPredictIsBitwiseEqual) {
  const auto [method, mode] = GetParam();
  const auto data = two_levels(5, 3, 1, 3);
  FitSettings s;
  s.method = method;
  s.bayhem.mode = mode;
  s.rho = RhoSpec::estimated();
  s.optimizer.seed = 4;
  const auto model = fit_model(data, s);
  Metadata meta;
  meta.command = "fit";
  meta.seed = 4;
  meta.config = "{}";
  const std::string text = model_to_json(model, s, meta);
  const auto loaded = model_from_json(text, "m.json");
  EXPECT_EQ(loaded.model.method(), method);
  EXPECT_EQ(loaded.metadata.config_hash(), meta.config_hash());
  const DesignMatrix T = linspace(0, 10, 41);
  const auto a = model.predict(T), b = loaded.model.predict(T);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.variance, b.variance);
  EXPECT_EQ(model_to_json(loaded.model, loaded.settings, loaded.metadata), text);
}

INSTANTIATE_TEST_SUITE_P(
    Methods, ModelRoundTrip,
    ::testing::Values(std::tuple{Method::SingleGP, BayHEmMode::SharedTheta},
                      std::tuple{Method::BayHEm, BayHEmMode::SharedTheta},
                      std::tuple{Method::BayHEm, BayHEmMode::PerLevelTheta},
                      std::tuple{Method::KO, BayHEmMode::SharedTheta},
                      std::tuple{Method::HK, BayHEmMode::SharedTheta}));

TEST(ModelFile, RejectsUnknownVersionAndGarbage) {
  const auto data = two_levels(6, 3, 1, 5);
  FitSettings s;
  const auto model = fit_model(data, s);
  auto j = nlohmann::ordered_json::parse(model_to_json(model, s, Metadata{}));
  EXPECT_EQ(j.begin().key(), "metadata");
  EXPECT_EQ(j.at("format_version"), kModelFormatVersion);
  j["format_version"] = kModelFormatVersion + 1;
  EXPECT_THROW(model_from_json(j.dump(), "m.json"), DataError);
  EXPECT_THROW(model_from_json("{not json", "m.json"), DataError);
  EXPECT_THROW(model_from_json("{}", "m.json"), DataError);
}

TEST(Settings, JsonRoundTrip) {
  FitSettings s;
  s.method = Method::HK;
  s.mean.form = MeanForm::Linear;
  s.kernel.jitter = 1e-6;
  s.bayhem.mode = BayHEmMode::PerLevelTheta;
  s.bayhem.objective = BayHEmObjective::TopConditional;
  s.rho = RhoSpec::fixed(0.5);
  s.optimizer.restarts = 4;
  const auto back = settings_from_json(settings_to_json(s));
  EXPECT_EQ(settings_to_json(back), settings_to_json(s));
  EXPECT_EQ(back.method, Method::HK);
  EXPECT_EQ(back.rho.value, 0.5);
}

}  // namespace
}  // namespace mfgp
