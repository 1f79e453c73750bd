#include "mlapprox/experiment.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "cosine_system.hpp"
#include "oracles.hpp"

namespace mlapprox {
namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// One level with m coefficients and n uniform points.
ApproxAlgorithm single_level(std::size_t m, std::uint64_t n) {
  return [m, n](const CoefficientFunction& f, const StreamSource& streams) {
    const Schedule s{{n}, {m}};
    return multilevel_run(as_target(f), f.basis_ptr(), s, streams).value;
  };
}

TEST(Summarize, MeanAndStandardError) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto e = summarize(v);
  EXPECT_DOUBLE_EQ(e.mean, 2.5);
  EXPECT_DOUBLE_EQ(e.standard_error, oracle::standard_error(v));
  const std::vector<double> one{1.0};
  EXPECT_THROW(summarize(one), std::invalid_argument);
}

TEST(Replicate, IndexOrderedAndThreadIndependent) {
  const auto fn = [](std::size_t i) { return std::sqrt(static_cast<double>(i)); };
  const auto serial = replicate(101, 1, fn);
  const auto parallel = replicate(101, 4, fn);
  EXPECT_EQ(serial, parallel);
  for (std::size_t i = 0; i < 101; ++i) EXPECT_EQ(serial[i], std::sqrt(static_cast<double>(i)));
}

TEST(Replicate, PropagatesExceptions) {
  const auto fn = [](std::size_t i) -> double {
    if (i == 7) throw std::runtime_error("boom");
    return 0.0;
  };
  EXPECT_THROW(replicate(20, 3, fn), std::runtime_error);
  EXPECT_THROW(replicate(20, 1, fn), std::runtime_error);
}

TEST(EstimateMse, IdentityIsZero) {
  const auto basis = enumerate_basis(WeightSpec::mixed(1, 1), 8);
  const CoefficientFunction f(basis, {0.2, 0.5});
  const auto e = estimate_mse(f, [](const CoefficientFunction& g, const StreamSource&) { return g; }, 10, 1);
  EXPECT_EQ(e.mean, 0.0);
  EXPECT_EQ(e.standard_error, 0.0);
}

TEST(EstimateMse, DeterministicAcrossRunsAndThreads) {
  const auto basis = enumerate_basis(WeightSpec::mixed(1, 1), 8);
  const CoefficientFunction f(basis, {kInvSqrt2, kInvSqrt2});
  const auto a = estimate_mse(f, single_level(1, 4), 500, 3, 1);
  const auto b = estimate_mse(f, single_level(1, 4), 500, 3, 1);
  const auto c = estimate_mse(f, single_level(1, 4), 500, 3, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.standard_error, b.standard_error);
  EXPECT_EQ(a.mean, c.mean);
}

TEST(AnalyticSingleLevelMse, Examples) {
  const auto basis = enumerate_basis(WeightSpec::mixed(1, 1), 8);
  EXPECT_DOUBLE_EQ(analytic_single_level_mse(CoefficientFunction(basis, {kInvSqrt2, kInvSqrt2}), 1, 4), 0.625);
  for (std::uint64_t n : {1u, 5u, 1000u})
    EXPECT_EQ(analytic_single_level_mse(CoefficientFunction(basis, {1.0}), 1, n), 0.0);
  const CoefficientFunction f(basis, {0.5, 0.5, 0.5, 0.5});
  EXPECT_LT(analytic_single_level_mse(f, 4, 1000000), 1e-5);
  const auto custom = enumerate_basis(testing_support::cosine_spec(4), 4);
  EXPECT_THROW(analytic_single_level_mse(CoefficientFunction(custom, {1.0}), 1, 4), std::invalid_argument);
}

TEST(EstimateMse, SingleLevelOracle) {
  const auto basis = enumerate_basis(WeightSpec::mixed(1, 1), 8);
  const CoefficientFunction f(basis, {kInvSqrt2, kInvSqrt2});
  const auto e = estimate_mse(f, single_level(1, 4), 4000, 11);
  EXPECT_NEAR(e.mean, 0.625, 4 * e.standard_error);
}

// Pipeline check on ten random targets with mixed (m, n).
TEST(EstimateMse, PipelineAgreesWithAnalyticOracle) {
  const auto basis = enumerate_basis(WeightSpec::mixed(1, 2), 32);
  RngStream rng(21, 0);
  for (int t = 0; t < 10; ++t) {
    const auto f = random_unit_ball(basis, 4 + rng.uniform_index(28), rng);
    const std::size_t m = 1 + rng.uniform_index(8);
    const std::uint64_t n = 2 + rng.uniform_index(20);
    const auto e = estimate_mse(f, single_level(m, n), 2000, 100 + t);
    EXPECT_NEAR(e.mean, analytic_single_level_mse(f, m, n), 4 * e.standard_error) << "t=" << t;
  }
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.spec = WeightSpec::mixed(1, 1);
  cfg.N = 256;
  cfg.n_grid = {32, 64, 128};
  cfg.replications = 30;
  cfg.seed = 5;
  return cfg;
}

std::string csv_of(const ExperimentConfig& cfg) {
  std::ostringstream out;
  write_run_records(out, run_convergence(cfg));
  return out.str();
}

TEST(RunConvergence, ColumnsAndBound) {
  const auto cfg = small_config();
  const auto records = run_convergence(cfg);
  ASSERT_EQ(records.size(), 3u);
  const auto basis = enumerate_basis(cfg.spec, cfg.N);
  for (const auto& r : records) {
    EXPECT_EQ(r.R, 30u);
    EXPECT_GE(r.mse_mean, 0.0);
    EXPECT_DOUBLE_EQ(r.rmse, std::sqrt(r.mse_mean));
    EXPECT_EQ(r.bound, bound_constants(1.0).c_r * basis->sigma(r.n));
    EXPECT_EQ(r.evals_used, schedule_a_n_r(r.n, 1.0, 256).total_evaluations());
    EXPECT_EQ(r.sigma_next, basis->sigma(schedule_a_n_r(r.n, 1.0, 256).final_m() + 1));
  }
  const std::string csv = csv_of(cfg);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,R,mse_mean,mse_stderr,rmse,sigma_next,bound,evals_used");
}

TEST(RunConvergence, ByteIdenticalAcrossRunsAndThreads) {
  auto cfg = small_config();
  const std::string first = csv_of(cfg);
  EXPECT_EQ(first, csv_of(cfg));
  cfg.threads = 3;
  EXPECT_EQ(first, csv_of(cfg));
  cfg.seed = 6;
  EXPECT_NE(first, csv_of(cfg));
}

TEST(RunConvergence, HardInstanceStaysAboveNextSigma) {
  auto cfg = small_config();
  cfg.target = TargetKind::HardInstance;
  for (const auto& r : run_convergence(cfg)) EXPECT_GE(r.mse_mean + 4 * r.mse_stderr, r.sigma_next * r.sigma_next);
}

TEST(RunConvergence, OtherAlgorithms) {
  auto cfg = small_config();
  cfg.algorithm = Algorithm::QM;
  cfg.target = TargetKind::WeakInstance;
  for (const auto& r : run_convergence(cfg)) {
    EXPECT_NEAR(r.bound * r.bound, 2 * std::pow(enumerate_basis(cfg.spec, 256)->sigma(r.n + 1), 2), 1e-15);
    EXPECT_LE(r.mse_mean, r.bound * r.bound + 4 * r.mse_stderr);
  }
  cfg.algorithm = Algorithm::Q2NR;
  cfg.target = TargetKind::RandomUnitBall;
  for (const auto& r : run_convergence(cfg)) EXPECT_LE(r.evals_used, 2 * r.n);
  cfg.algorithm = Algorithm::DirectSimulation;
  for (const auto& r : run_convergence(cfg)) {
    EXPECT_EQ(r.evals_used, r.n);
    EXPECT_DOUBLE_EQ(r.bound, 1.0 / std::sqrt(static_cast<double>(r.n)));
  }
}

TEST(RunConvergence, RejectsTooSmallBasis) {
  auto cfg = small_config();
  cfg.N = 100;
  try {
    run_convergence(cfg);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "N");
  }
}

TEST(RunIntegrationComparison, VarianceReduction) {
  auto cfg = small_config();
  cfg.n_grid = {64, 256};
  cfg.replications = 200;
  const auto records = run_integration_comparison(cfg);
  ASSERT_EQ(records.size(), 2u);
  for (const auto& r : records) {
    EXPECT_LE(r.q_evals, 2 * r.n);
    EXPECT_EQ(r.s_evals, 2 * r.n);
    EXPECT_LT(r.q_mse.mean, r.s_mse.mean);
  }
  std::ostringstream out;
  write_integration_records(out, records);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "n,R,q_mse,q_stderr,q_evals,q_bound,s_mse,s_stderr,s_evals,s_bound");
}

TEST(SingleRun, RunsConfiguredAlgorithm) {
  auto cfg = small_config();
  cfg.target = TargetKind::HardInstance;
  const auto a = single_run(cfg, 128);
  EXPECT_EQ(a.evals_used, 120u);
  cfg.algorithm = Algorithm::Q2NR;
  EXPECT_THROW(single_run(cfg, 128), ConfigError);
}

TEST(Config, ParsesSettings) {
  std::istringstream in(
      "# comment\n"
      "spec = explicit\n"
      "sigma = 1, 0.5, 0.25, 0.125, 0.0625\n"
      "order = 0.5   # trailing comment\n"
      "algorithm = q_m\n"
      "n_grid = pow2:0:2\n"
      "epsilon = sigma_squared\n"
      "replications = 7\n"
      "target = weak_instance\n");
  const auto cfg = make_config(read_settings(in));
  EXPECT_EQ(cfg.spec.kind, WeightKind::ExplicitSigma);
  EXPECT_EQ(cfg.spec.sigma.size(), 5u);
  EXPECT_EQ(cfg.algorithm, Algorithm::QM);
  EXPECT_EQ(cfg.n_grid, (std::vector<std::uint64_t>{1, 2, 4}));
  EXPECT_EQ(cfg.algorithm_order(), 0.5);
  EXPECT_EQ(cfg.replications, 7u);
  EXPECT_EQ(cfg.target, TargetKind::WeakInstance);
}

std::string failing_field(const Settings& s) {
  try {
    make_config(s);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(failing_field({{"bogus", "1"}}), "bogus");
  EXPECT_EQ(failing_field({{"n_grid", "8,4"}}), "n_grid");
  EXPECT_EQ(failing_field({{"n_grid", "8,x"}}), "n_grid");
  EXPECT_EQ(failing_field({{"replications", "1"}}), "replications");
  EXPECT_EQ(failing_field({{"algorithm", "magic"}}), "algorithm");
  EXPECT_EQ(failing_field({{"algorithm", "q_m"}, {"n_grid", "3"}}), "n_grid");
  EXPECT_EQ(failing_field({{"algorithm", "q_m"}, {"n_grid", "4"}, {"epsilon", "1,0.5"}}), "epsilon");
  EXPECT_EQ(failing_field({{"target", "file"}}), "target_file");
  EXPECT_EQ(failing_field({{"r", "abc"}}), "r");
  EXPECT_EQ(failing_field({{"spec", "explicit"}, {"sigma", "1,0.5"}}), "order");
  std::istringstream bad("no equals sign here\n");
  EXPECT_THROW(read_settings(bad), ConfigError);
}

TEST(Config, FileTargetMustMatchSpec) {
  const auto basis = enumerate_basis(WeightSpec::mixed(1, 1), 64);
  const std::string path = ::testing::TempDir() + "target.csv";
  {
    std::ofstream out(path);
    write_coefficients_csv(out, weak_instance(basis, 64));
  }
  auto cfg = small_config();
  cfg.N = 256;
  cfg.target = TargetKind::CoefficientFile;
  cfg.target_file = path;
  EXPECT_EQ(run_convergence(cfg).size(), 3u);
  cfg.spec = WeightSpec::mixed(2, 1);
  try {
    run_convergence(cfg);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "target_file");
  }
}

}  // namespace
}  // namespace mlapprox
