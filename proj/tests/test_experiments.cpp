#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mfrc/error.hpp"
#include "mfrc/experiments.hpp"
#include "oracles.hpp"

namespace {

using namespace mfrc;

ReservoirParams small_params(double rho = 1.4) {
  ReservoirParams p;
  p.n = 60;
  p.rho = rho;
  p.t_listen = 2 * kOrbitPeriod;
  p.t_train = 5 * kOrbitPeriod;
  p.t_predict_end = 9 * kOrbitPeriod;
  return validated(p);
}

const TopologySource kSmallEr = TopologySource::erdos_renyi(60, 0.1);

TEST(Seeds, DerivedStreamsDifferAndAreStable) {
  EXPECT_NE(matrix_seed(5), input_seed(5));
  EXPECT_EQ(matrix_seed(5), matrix_seed(5));
  const auto s = trial_seed(1, Model::ERRC, 5.0, 1.4, 0);
  EXPECT_EQ(s, trial_seed(1, Model::ERRC, 5.0, 1.4, 0));
  EXPECT_NE(s, trial_seed(1, Model::FFRC, 5.0, 1.4, 0));
  EXPECT_NE(s, trial_seed(1, Model::ERRC, 15.0, 1.4, 0));
  EXPECT_NE(s, trial_seed(1, Model::ERRC, 5.0, 1.45, 0));
  EXPECT_NE(s, trial_seed(1, Model::ERRC, 5.0, 1.4, 1));
  EXPECT_NE(s, trial_seed(2, Model::ERRC, 5.0, 1.4, 0));
}

TEST(Trial, Deterministic) {
  const auto a = run_trial(kSmallEr, small_params(), TaskSetup{}, 99);
  const auto b = run_trial(kSmallEr, small_params(), TaskSetup{}, 99);
  EXPECT_EQ(a.verdict.multifunctional, b.verdict.multifunctional);
  EXPECT_EQ(a.verdict.failure_mode, b.verdict.failure_mode);
  EXPECT_EQ(a.verdict.check_a.roundness, b.verdict.check_a.roundness);
  EXPECT_EQ(a.verdict.check_b.roundness, b.verdict.check_b.roundness);
}

TEST(Trial, ZeroSpectralRadiusIsNeither) {
  const auto rec = run_trial(kSmallEr, small_params(0.0), TaskSetup{}, 3);
  EXPECT_FALSE(rec.verdict.multifunctional);
  EXPECT_EQ(rec.verdict.failure_mode, FailureMode::Neither);
}

TEST(Trial, FfrcWithoutMatrixIsPrecondition) {
  TopologySource src;
  src.model = Model::FFRC;
  EXPECT_THROW(run_trial(src, small_params(), TaskSetup{}, 1), Error);
}

TEST(Exp1, ZeroTrialsPerSetGivesEmptyResult) {
  const auto r = run_experiment1(kSmallEr, small_params(), TaskSetup{}, 3, 0, RunContext{});
  EXPECT_TRUE(r.set_counts.empty());
  EXPECT_TRUE(r.trials.empty());
  EXPECT_EQ(r.mean(), 0.0);
}

TEST(Exp1, CountsMatchTrialVerdicts) {
  RunContext ctx;
  ctx.base_seed = 17;
  const auto r = run_experiment1(kSmallEr, small_params(), TaskSetup{}, 2, 3, ctx);
  ASSERT_EQ(r.set_counts.size(), 2u);
  ASSERT_EQ(r.trials.size(), 6u);
  for (int s = 0; s < 2; ++s) {
    int count = 0;
    for (int k = 0; k < 3; ++k) count += r.trials[s * 3 + k].verdict.multifunctional;
    EXPECT_EQ(r.set_counts[s], count);
    EXPECT_LE(r.set_counts[s], 3);
  }
  EXPECT_EQ(r.trials[4].seed, trial_seed(17, Model::ERRC, 5.0, 1.4, 4));
}

TEST(RankSum, IdenticalSamples) {
  const auto r = rank_sum_test({2, 2, 2}, {2, 2, 2});
  EXPECT_EQ(r.u_statistic, 4.5);
  EXPECT_EQ(r.z_score, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(RankSum, CompleteSeparation) {
  const auto r = rank_sum_test({1, 2, 3}, {4, 5, 6});
  EXPECT_EQ(r.u_statistic, 0.0);
  EXPECT_NEAR(r.z_score, -1.964, 1e-3);
  EXPECT_NEAR(r.p_value, 0.0495, 1e-4);
  EXPECT_NEAR(oracle::exact_rank_sum_p({1, 2, 3}, {4, 5, 6}), 0.1, 1e-12);
  EXPECT_NEAR(oracle::exact_rank_sum_p({1, 2, 3}, {4, 5, 6}, false), 0.05, 1e-12);
  // The normal approximation is below the exact two-sided value at this size.
  EXPECT_LT(r.p_value, 0.1);
}

TEST(RankSum, Antisymmetry) {
  const std::vector<double> a{3, 7, 7, 1, 9, 4}, b{2, 8, 5, 5, 6};
  const auto ab = rank_sum_test(a, b);
  const auto ba = rank_sum_test(b, a);
  EXPECT_NEAR(ab.z_score, -ba.z_score, 1e-12);
  EXPECT_NEAR(ab.p_value, ba.p_value, 1e-12);
  EXPECT_NEAR(ab.u_statistic + ba.u_statistic, 30.0, 1e-12);
}

TEST(RankSum, TiesMatchOracleU) {
  const std::vector<double> a{1, 2, 2, 3}, b{2, 3, 3, 4, 5};
  const auto r = rank_sum_test(a, b);
  double u = 0.0;
  for (double x : a) {
    for (double y : b) u += (x > y) ? 1.0 : (x == y ? 0.5 : 0.0);
  }
  EXPECT_EQ(r.u_statistic, u);
  const double exact = oracle::exact_rank_sum_p(a, b);
  EXPECT_NEAR(r.p_value, exact, 0.1);
}

TEST(RankSum, ContinuityCorrectionShrinksZ) {
  const auto plain = rank_sum_test({1, 2, 3}, {4, 5, 6});
  const auto corr = rank_sum_test({1, 2, 3}, {4, 5, 6}, true);
  EXPECT_LT(std::abs(corr.z_score), std::abs(plain.z_score));
  EXPECT_GT(corr.p_value, plain.p_value);
}

TEST(RankSum, EmptySampleRejected) {
  EXPECT_THROW(rank_sum_test({}, {1.0}), Error);
}

TEST(Grid, InclusiveAndClean) {
  const auto g = make_grid(0.0, 2.0, 0.05);
  ASSERT_EQ(g.size(), 41u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 2.0);
  EXPECT_EQ(g[3], 0.15);
  EXPECT_EQ(make_grid(5, 95, 10).size(), 10u);
  EXPECT_EQ(make_grid(1.0, 1.0, 0.1).size(), 1u);
  EXPECT_THROW(make_grid(1.0, 0.0, 0.1), Error);
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "mfrc_experiments_test";
  std::filesystem::create_directories(dir);
  const auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}

TEST(Sweep, IndependentOfWorkerCount) {
  const std::vector<double> gammas{5.0, 15.0};
  const std::vector<double> rhos{0.4, 1.2};
  RunContext one;
  one.base_seed = 5;
  RunContext two = one;
  two.workers = 2;
  const auto a = run_sweep(kSmallEr, small_params(), TaskSetup{}, gammas, rhos, 2, one);
  const auto b = run_sweep(kSmallEr, small_params(), TaskSetup{}, gammas, rhos, 2, two);
  ASSERT_EQ(a.size(), 4u);
  ASSERT_EQ(b.size(), 4u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].gamma, b[i].gamma);
    EXPECT_EQ(a[i].rho, b[i].rho);
    EXPECT_EQ(a[i].mf_count, b[i].mf_count);
    EXPECT_EQ(a[i].trials, 2);
  }
}

TEST(Sweep, ManifestResumeSkipsDoneCells) {
  const auto path = scratch("manifest.csv");
  SweepOptions opts{path.string()};
  RunContext ctx;
  ctx.base_seed = 8;
  const auto first =
      run_sweep(kSmallEr, small_params(), TaskSetup{}, {5.0}, {0.5, 1.0}, 1, ctx, opts);
  ASSERT_EQ(read_sweep_manifest(path.string()).size(), 2u);

  // Tamper with a recorded count: a resumed run must report it, not recompute it.
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  in.close();
  std::string text = buf.str();
  const auto first_row = text.find('\n') + 1;
  const auto comma = text.rfind(',', text.find('\n', first_row));
  text.replace(comma - 1, 1, "7");
  std::ofstream(path) << text;

  int progress_calls = 0;
  ctx.progress = [&](const std::string&) { ++progress_calls; };
  const auto resumed =
      run_sweep(kSmallEr, small_params(), TaskSetup{}, {5.0}, {0.5, 1.0}, 1, ctx, opts);
  ASSERT_EQ(resumed.size(), 2u);
  EXPECT_EQ(progress_calls, 0);
  EXPECT_EQ(resumed[0].mf_count, 7);
  EXPECT_EQ(resumed[1].mf_count, first[1].mf_count);
  EXPECT_EQ(read_sweep_manifest(path.string()).size(), 2u);
}

TEST(Files, HeaderAndCountsRoundTrip) {
  Exp1Result r;
  r.model = Model::FFRC;
  r.set_counts = {3, 0, 12};
  Exp1Result e;
  e.model = Model::ERRC;
  e.set_counts = {1, 1};
  const auto path = scratch("counts.csv");
  {
    std::ofstream out(path);
    write_header(out, OutputHeader{"00ff", 42});
    write_exp1_counts(out, {r, e});
  }
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "# config_hash=00ff base_seed=42");
  EXPECT_EQ(read_counts_column(path.string(), Model::FFRC), (std::vector<double>{3, 0, 12}));
  EXPECT_EQ(read_counts_column(path.string(), Model::ERRC), (std::vector<double>{1, 1}));
  EXPECT_EQ(read_counts_column(path.string()).size(), 5u);
}

TEST(Models, ParseAndPrint) {
  EXPECT_EQ(parse_model("errc"), Model::ERRC);
  EXPECT_EQ(parse_model("FFRC"), Model::FFRC);
  EXPECT_FALSE(parse_model("xyz").has_value());
  EXPECT_STREQ(to_string(Model::FFRC), "ffrc");
}

}  // namespace
