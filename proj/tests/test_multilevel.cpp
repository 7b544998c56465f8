#include <gtest/gtest.h>

#include <cmath>

#include "mfgp/design.hpp"
#include "mfgp/error.hpp"
#include "mfgp/model.hpp"
#include "mfgp/multilevel.hpp"
#include "mfgp/process.hpp"
#include "mfgp/random.hpp"
#include "mfgp/testfunctions.hpp"
#include "support/oracle.hpp"

namespace mfgp {
namespace {

BayHEmOptions exact_shared() {
  BayHEmOptions o;
  o.link = LevelLink::Exact;
  return o;
}

std::vector<LevelTransfer> exact_transfers(const Hyperparams& hp, std::size_t lower) {
  return std::vector<LevelTransfer>(lower, LevelTransfer{hp.beta, 0.0});
}

Hyperparams hp1d(double sigma2, double ls, double beta) {
  Hyperparams hp;
  hp.sigma2 = sigma2;
  hp.lengthscales = Vector::Constant(1, ls);
  hp.beta = Vector::Constant(1, beta);
  return hp;
}

LevelData level_of(TestFunctionId id, const DesignMatrix& X, std::size_t index) {
  return {X, eval_testfn(id, X), index};
}

// ------------------------------------------------------------ condition_level

TEST(ConditionLevel, EmptyObservationsReturnPrior) {
  auto prior = std::make_shared<const PriorProcess>(MeanFunction{}, hp1d(1, 0.3, 0.5));
  EXPECT_EQ(condition_level(prior, Observations{}), prior);
}

TEST(ConditionLevel, RedundantObservationLeavesPosterior) {
  const auto hp = hp1d(1.0, 0.3, 0.0);
  auto prior = std::make_shared<const PriorProcess>(MeanFunction{}, hp);
  Observations first{(DesignMatrix(3, 1) << 0.1, 0.5, 0.8).finished(),
                     (Vector(3) << 0.4, -0.2, 0.7).finished(), Vector(), Vector::Constant(3, 1e-8), 1};
  auto post = condition_level(prior, first);
  const DesignMatrix x = DesignMatrix::Constant(1, 1, 0.5);
  Observations again{x, post->mean(x), Vector(), Vector::Constant(1, 1e-8), 2};
  auto twice = condition_level(post, again);
  const DesignMatrix grid = linspace(0, 1, 41);
  EXPECT_LE((post->mean(grid) - twice->mean(grid)).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE((post->variance(grid) - twice->variance(grid)).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(ConditionLevel, CollidingPointsAreNamed) {
  auto prior = std::make_shared<const PriorProcess>(MeanFunction{}, hp1d(1, 0.3, 0.0));
  Observations a{(DesignMatrix(2, 1) << 0.25, 0.75).finished(), Vector::Zero(2), Vector(), Vector(), 1};
  auto post = condition_level(prior, a);
  Observations b{(DesignMatrix(1, 1) << 0.75).finished(), Vector::Ones(1), Vector(), Vector(), 2};
  try {
    condition_level(post, b);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("0.75"), std::string::npos) << e.what();
  }
}

// Two sequential steps against one joint conditioning on the stacked design.
TEST(ConditionLevel, SequentialEqualsJoint) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto inst = oracle::random_instance(500 + s);
    const auto& l1 = inst.data.levels[0];
    const auto& l2 = inst.data.levels[1];
    auto proc = std::make_shared<const PriorProcess>(MeanFunction(inst.mean), inst.hp);
    const double nz = 1e-8 * inst.hp.sigma2;
    auto p1 = condition_level(proc, {l1.X, l1.y, Vector(), Vector::Constant(l1.X.rows(), nz), 1});
    auto p2 = condition_level(p1, {l2.X, l2.y, Vector(), Vector::Constant(l2.X.rows(), nz), 2});

    DesignMatrix X(l1.X.rows() + l2.X.rows(), l1.X.cols());
    X << l1.X, l2.X;
    Vector y(X.rows());
    y << l1.y, l2.y;
    const auto ref = oracle::condition(X, y, oracle::mean_at(X, inst.mean, inst.hp.beta),
                                       Vector::Constant(X.rows(), nz), inst.test,
                                       oracle::mean_at(inst.test, inst.mean, inst.hp.beta),
                                       inst.hp.sigma2, inst.hp.lengthscales);
    EXPECT_LE((p2->mean(inst.test) - ref.mean).cwiseAbs().maxCoeff(), 1e-8) << s;
    EXPECT_LE((p2->variance(inst.test) - ref.variance).cwiseAbs().maxCoeff(), 1e-8) << s;
  }
}

// ------------------------------------------------------------------ BayHEm

TEST(BayHEm, ExactLinkMatchesStackedConditioning) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto inst = oracle::random_instance(700 + s);
    const auto model = BayHEmModel::condition(inst.data, inst.hp, exact_transfers(inst.hp, 1),
                                              inst.mean, KernelSpec{}, exact_shared());
    const auto& l1 = inst.data.levels[0];
    const auto& l2 = inst.data.levels[1];
    DesignMatrix X(l1.X.rows() + l2.X.rows(), l1.X.cols());
    X << l1.X, l2.X;
    Vector y(X.rows());
    y << l1.y, l2.y;
    const auto ref = oracle::condition(X, y, oracle::mean_at(X, inst.mean, inst.hp.beta),
                                       Vector::Constant(X.rows(), 1e-8 * inst.hp.sigma2), inst.test,
                                       oracle::mean_at(inst.test, inst.mean, inst.hp.beta),
                                       inst.hp.sigma2, inst.hp.lengthscales);
    const auto pred = model.predict(inst.test);
    EXPECT_LE((pred.mean - ref.mean).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((pred.variance - ref.variance).cwiseAbs().maxCoeff(), 1e-8);
  }
}

// Transfer link: lower level observes Z + h^T beta_1 with extra variance tau sigma2.
TEST(BayHEm, TransferLinkMatchesOffsetNoisyConditioning) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto inst = oracle::random_instance(900 + s);
    LevelTransfer t{inst.hp.beta.array() + 0.25, 0.05};
    BayHEmOptions opts;
    const auto model =
        BayHEmModel::condition(inst.data, inst.hp, {t}, inst.mean, KernelSpec{}, opts);
    const auto& l1 = inst.data.levels[0];
    const auto& l2 = inst.data.levels[1];
    const auto n1 = l1.X.rows(), n2 = l2.X.rows();
    DesignMatrix X(n1 + n2, l1.X.cols());
    X << l1.X, l2.X;
    Vector y(X.rows()), mu(X.rows()), noise(X.rows());
    y << l1.y, l2.y;
    mu << oracle::mean_at(l1.X, inst.mean, t.beta), oracle::mean_at(l2.X, inst.mean, inst.hp.beta);
    noise << Vector::Constant(n1, (1e-8 + t.tau) * inst.hp.sigma2),
        Vector::Constant(n2, 1e-8 * inst.hp.sigma2);
    const auto ref = oracle::condition(X, y, mu, noise, inst.test,
                                       oracle::mean_at(inst.test, inst.mean, inst.hp.beta),
                                       inst.hp.sigma2, inst.hp.lengthscales);
    const auto pred = model.predict(inst.test);
    EXPECT_LE((pred.mean - ref.mean).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE((pred.variance - ref.variance).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(BayHEm, SingleLevelIsFitGP) {
  Rng rng(3);
  const auto l1 = level_of(TestFunctionId::Ex1L1, lhs_sample(12, 2, rng), 1);
  const auto data = MultiLevelData::from_levels({l1});
  const auto bay = fit_bayhem(data, {}, MeanSpec{}, KernelSpec{}, {});
  const auto gp = fit_gp(l1, MeanSpec{}, KernelSpec{}, {});
  EXPECT_EQ(bay.top_hp().lengthscales, gp.hp().lengthscales);
  const DesignMatrix T = lhs_sample(50, 2, rng);
  EXPECT_LE((bay.predict(T).mean - gp.predict(T).mean).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BayHEm, EmptyTopLevelIsGPOnLevelOne) {
  Rng rng(4);
  const auto l1 = level_of(TestFunctionId::Ex1L1, lhs_sample(12, 2, rng), 1);
  LevelData empty{DesignMatrix(0, 2), Vector(0), 2};
  const auto bay = fit_bayhem(MultiLevelData::from_levels({l1, empty}), {}, MeanSpec{},
                              KernelSpec{}, {});
  const auto gp = fit_gp(l1, MeanSpec{}, KernelSpec{}, {});
  const DesignMatrix T = lhs_sample(50, 2, rng);
  EXPECT_LE((bay.predict(T).mean - gp.predict(T).mean).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BayHEm, IntermediateLevelPredictionRefused) {
  const auto inst = oracle::random_instance(1);
  const auto model = BayHEmModel::condition(inst.data, inst.hp, exact_transfers(inst.hp, 1),
                                            inst.mean, KernelSpec{}, exact_shared());
  EXPECT_THROW(model.predict_level(1, inst.test), UnsupportedOperation);
  EXPECT_NO_THROW(model.predict_level(2, inst.test));
}

TEST(BayHEm, InterpolatesTopAndBoundsVariance) {
  Rng rng(5);
  const auto l1 = level_of(TestFunctionId::Ex1L1, lhs_sample(20, 2, rng), 1);
  const auto l2 = level_of(TestFunctionId::Ex1L2, lhs_sample(8, 2, rng), 2);
  for (auto mode : {BayHEmMode::SharedTheta, BayHEmMode::PerLevelTheta}) {
    BayHEmOptions o;
    o.mode = mode;
    const auto m = fit_bayhem(MultiLevelData::from_levels({l1, l2}), o, MeanSpec{}, KernelSpec{}, {});
    const auto at = m.predict(l2.X);
    const double range = l2.y.maxCoeff() - l2.y.minCoeff();
    EXPECT_LE((at.mean - l2.y).cwiseAbs().maxCoeff(), 1e-6 * range);
    const auto anywhere = m.predict(lhs_sample(500, 2, rng));
    EXPECT_LE(anywhere.variance.maxCoeff(), m.top_hp().sigma2 + 1e-10);
  }
}

// Level-1 data informs the top level away from every level-2 run.
TEST(BayHEm, LevelOneRunInformsTopLevel) {
  const auto X1 = linspace(0, 10, 21);
  const auto l1 = level_of(TestFunctionId::Ex3L1, X1, 1);
  LevelData l2{(DesignMatrix(2, 1) << 0.5, 1.0).finished(), Vector(), 2};
  l2.y = eval_testfn(TestFunctionId::Ex3L1, l2.X);
  const auto hp = hp1d(20.0, 1.2, 0.0);
  const auto m = BayHEmModel::condition(MultiLevelData::from_levels({l1, l2}), hp,
                                        exact_transfers(hp, 1), MeanSpec{}, KernelSpec{},
                                        exact_shared());
  const DesignMatrix x = X1.row(16);  // x = 8, far from 0.5 and 1.0
  const auto pred = m.predict(x);
  EXPECT_LE(std::abs(pred.mean(0) - l1.y(16)), std::sqrt(pred.variance(0)) + 1e-6);
}

TEST(BayHEm, PerLevelChainStartsFromLevelOneFit) {
  Rng rng(6);
  const auto l1 = level_of(TestFunctionId::Ex1L1, lhs_sample(15, 2, rng), 1);
  const auto l2 = level_of(TestFunctionId::Ex1L2, lhs_sample(6, 2, rng), 2);
  BayHEmOptions o;
  o.mode = BayHEmMode::PerLevelTheta;
  OptimizerConfig opt;
  opt.seed = 9;
  const auto m = fit_bayhem(MultiLevelData::from_levels({l1, l2}), o, MeanSpec{}, KernelSpec{}, opt);
  const auto chain = m.hp_chain();
  ASSERT_EQ(chain.size(), 2u);
  const auto gp = fit_gp(l1, MeanSpec{}, KernelSpec{}, opt.substream(1));
  EXPECT_EQ(chain[0].lengthscales, gp.hp().lengthscales);
  EXPECT_EQ(chain[1].lengthscales, m.top_hp().lengthscales);
}

TEST(BayHEm, SharedObjectivesAreDistinctLikelihoods) {
  const auto inst = oracle::random_instance(42);
  auto joint = exact_shared();
  auto cond = exact_shared();
  cond.objective = BayHEmObjective::TopConditional;
  const auto a = BayHEmModel::condition(inst.data, inst.hp, exact_transfers(inst.hp, 1), inst.mean,
                                        KernelSpec{}, joint);
  const auto b = BayHEmModel::condition(inst.data, inst.hp, exact_transfers(inst.hp, 1), inst.mean,
                                        KernelSpec{}, cond);
  // joint = log p(y1) + log p(y2 | y1)
  const auto only1 = FittedGP::condition(inst.data.levels[0], inst.hp, MeanFunction(inst.mean), {});
  EXPECT_NEAR(a.log_lik(), only1.log_lik() + b.log_lik(), 1e-8 * std::abs(a.log_lik()) + 1e-8);
}

// -------------------------------------------------------------------- K&O

struct NestedPair {
  MultiLevelData data;
  std::vector<Hyperparams> hps;
};

NestedPair nested_pair() {
  const DesignMatrix X1 = linspace(0, 10, 21);
  DesignMatrix X2(4, 1);
  X2 << X1(2, 0), X1(5, 0), X1(7, 0), X1(9, 0);
  LevelData l1 = level_of(TestFunctionId::Ex3L1, X1, 1);
  LevelData l2 = level_of(TestFunctionId::Ex3L2Tilt, X2, 2);
  return {MultiLevelData::from_levels({l1, l2}), {hp1d(15.0, 1.0, 3.0), hp1d(2.0, 1.5, 0.0)}};
}

TEST(KO, CompositionOfTwoGPs) {
  auto np = nested_pair();
  const double rho = 0.8;
  const auto m = KOModel::condition(np.data, np.hps, {rho}, MeanSpec{}, KernelSpec{}, RhoSpec::fixed(rho));
  ASSERT_TRUE(m.nested()[0]);
  const auto& l1 = np.data.levels[0];
  const auto& l2 = np.data.levels[1];
  const auto base = FittedGP::condition(l1, np.hps[0], MeanFunction{}, {});
  Vector d(l2.y.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    Eigen::Index k = 0;
    while (l1.X(k, 0) != l2.X(i, 0)) ++k;
    d(i) = l2.y(i) - rho * l1.y(k);
  }
  EXPECT_EQ(m.discrepancies()[0], d);
  const auto delta = FittedGP::condition({l2.X, d, 2}, np.hps[1], MeanFunction{}, {});
  const DesignMatrix T = linspace(-0.5, 10.5, 57);
  const auto pb = base.predict(T), pd = delta.predict(T), pm = m.predict(T);
  EXPECT_LE((pm.mean - (rho * pb.mean + pd.mean)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((pm.variance - (rho * rho * pb.variance + pd.variance)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(KO, InterpolatesNestedTopRuns) {
  auto np = nested_pair();
  const auto m = KOModel::condition(np.data, np.hps, {1.0}, MeanSpec{}, KernelSpec{}, RhoSpec{});
  const auto& l2 = np.data.levels[1];
  EXPECT_LE((m.predict(l2.X).mean - l2.y).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(KO, ZeroRhoDecouplesLevels) {
  auto np = nested_pair();
  const auto m = KOModel::condition(np.data, np.hps, {0.0}, MeanSpec{}, KernelSpec{}, RhoSpec::fixed(0));
  const auto& l2 = np.data.levels[1];
  const auto alone = FittedGP::condition(l2, np.hps[1], MeanFunction{}, {});
  const DesignMatrix T = linspace(0, 10, 33);
  EXPECT_LE((m.predict(T).mean - alone.predict(T).mean).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(KO, ConstantShiftIsRecovered) {
  const DesignMatrix X1 = linspace(0, 10, 25);
  const auto l1 = level_of(TestFunctionId::Ex3L1, X1, 1);
  const auto l2 = level_of(TestFunctionId::Ex3L2Shift, (DesignMatrix(2, 1) << 1.5, 8.5).finished(), 2);
  const auto m = fit_ko(MultiLevelData::from_levels({l1, l2}), RhoSpec{}, MeanSpec{}, KernelSpec{}, {});
  DesignMatrix T(24, 1);
  for (int i = 0; i < 24; ++i) T(i, 0) = (X1(i, 0) + X1(i + 1, 0)) / 2;
  const Vector truth = eval_testfn(TestFunctionId::Ex3L2Shift, T);
  EXPECT_LE((m.predict(T).mean - truth).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(KO, NonNestedUsesPosteriorMeanAndWarns) {
  Rng rng(8);
  const auto l1 = level_of(TestFunctionId::Ex1L1, lhs_sample(15, 2, rng), 1);
  const auto l2 = level_of(TestFunctionId::Ex1L2, lhs_sample(5, 2, rng), 2);
  const auto m = fit_ko(MultiLevelData::from_levels({l1, l2}), RhoSpec{}, MeanSpec{}, KernelSpec{}, {});
  EXPECT_FALSE(m.nested()[0]);
  EXPECT_FALSE(m.warnings().empty());
  const Vector expected = l2.y - m.base_gp().predict(l2.X).mean;
  EXPECT_LE((m.discrepancies()[0] - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(KO, EstimatedRhoRecoversSlope) {
  const DesignMatrix X1 = linspace(0, 10, 21);
  const auto l1 = level_of(TestFunctionId::Ex3L1, X1, 1);
  LevelData l2{X1, 2.5 * l1.y.array() + 1.0, 2};
  const auto m = fit_ko(MultiLevelData::from_levels({l1, l2}), RhoSpec::estimated(), MeanSpec{},
                        KernelSpec{}, {});
  EXPECT_NEAR(m.rho()[0], 2.5, 1e-9);
}

TEST(KO, RequiresTwoLevels) {
  Rng rng(9);
  const auto l1 = level_of(TestFunctionId::Ex1L1, lhs_sample(6, 2, rng), 1);
  FitSettings s;
  s.method = Method::KO;
  try {
    fit_model(MultiLevelData::from_levels({l1}), s);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_STREQ(e.what(), "K&O requires ≥ 2 levels");
  }
}

// --------------------------------------------------------------------- HK

TEST(HK, ProportionalLevelsRecoverScale) {
  Rng rng(10);
  const auto X1 = lhs_sample(20, 2, rng);
  const auto l1 = level_of(TestFunctionId::Ex1L1, X1, 1);
  const auto X2 = lhs_sample(25, 2, rng);
  LevelData l2{X2, 1.7 * eval_testfn(TestFunctionId::Ex1L1, X2).array(), 2};
  const auto m = fit_hk(MultiLevelData::from_levels({l1, l2}), MeanSpec{}, KernelSpec{}, {});
  EXPECT_NEAR(m.scales()[0], 1.7, 1e-2);
}

TEST(HK, SingleLevelIsFitGP) {
  Rng rng(11);
  const auto l1 = level_of(TestFunctionId::Ex1L2, lhs_sample(10, 2, rng), 1);
  const auto m = fit_hk(MultiLevelData::from_levels({l1}), MeanSpec{}, KernelSpec{}, {});
  const auto gp = fit_gp(l1, MeanSpec{}, KernelSpec{}, {});
  const DesignMatrix T = lhs_sample(40, 2, rng);
  EXPECT_EQ(m.predict(T).mean, gp.predict(T).mean);
}

TEST(HK, InterpolatesTopRuns) {
  Rng rng(12);
  const auto l1 = level_of(TestFunctionId::Ex1L1, lhs_sample(20, 2, rng), 1);
  const auto l2 = level_of(TestFunctionId::Ex1L2, lhs_sample(8, 2, rng), 2);
  const auto m = fit_hk(MultiLevelData::from_levels({l1, l2}), MeanSpec{}, KernelSpec{}, {});
  const double range = l2.y.maxCoeff() - l2.y.minCoeff();
  EXPECT_LE((m.predict(l2.X).mean - l2.y).cwiseAbs().maxCoeff(), 1e-6 * range);
}

// ----------------------------------------------------------------- parsing

TEST(Parsing, EnumsRoundTrip) {
  for (auto m : {BayHEmMode::SharedTheta, BayHEmMode::PerLevelTheta})
    EXPECT_EQ(parse_bayhem_mode(to_string(m)), m);
  for (auto o : {BayHEmObjective::Joint, BayHEmObjective::TopConditional})
    EXPECT_EQ(parse_bayhem_objective(to_string(o)), o);
  for (auto m : {Method::SingleGP, Method::BayHEm, Method::KO, Method::HK})
    EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_EQ(parse_rho("estimate").kind, RhoSpec::Kind::Estimated);
  EXPECT_EQ(parse_rho("fixed:0.5").value, 0.5);
  EXPECT_THROW(parse_rho("fixed:"), InvalidArgument);
  EXPECT_THROW(parse_rho("sometimes"), InvalidArgument);
  EXPECT_THROW(parse_bayhem_mode("both"), InvalidArgument);
}

}  // namespace
}  // namespace mfgp
