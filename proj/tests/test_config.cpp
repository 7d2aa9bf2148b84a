#include <gtest/gtest.h>

#include <cstdlib>
#include <numbers>
#include <sstream>

#include "mfrc/config.hpp"
#include "mfrc/error.hpp"

namespace {

using namespace mfrc;

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ConfigError parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "no ConfigError for: " << text;
  return ConfigError("", -1, "");
}

TEST(Config, EmptyFileGivesDefaults) {
  const auto cfg = parse("");
  EXPECT_EQ(cfg.params.n, 500);
  EXPECT_EQ(cfg.params.gamma, 5.0);
  EXPECT_EQ(cfg.params.sigma, 0.2);
  EXPECT_EQ(cfg.params.rho, 1.4);
  EXPECT_EQ(cfg.params.beta, 0.01);
  EXPECT_EQ(cfg.params.tau, 0.01);
  EXPECT_EQ(cfg.model, Model::ERRC);
  EXPECT_EQ(cfg.sparsity, 0.05);
  EXPECT_EQ(cfg.synapse_threshold, 50);
  EXPECT_EQ(cfg.roundness_threshold, 0.25);
  EXPECT_EQ(cfg.exp1_sets, 50);
  EXPECT_EQ(cfg.exp1_trials, 100);
  RunConfig defaults;
  validate(defaults);
  EXPECT_EQ(config_hash(cfg), config_hash(defaults));
}

TEST(Config, CommentsBlankLinesAndQuotes) {
  const auto cfg = parse(
      "# header\n"
      "\n"
      "gamma = 15   # trailing\n"
      "output_dir = \"out # not a comment\"\n"
      "model = ffrc\n"
      "connectome_path = data/x.csv\n");
  EXPECT_EQ(cfg.params.gamma, 15.0);
  EXPECT_EQ(cfg.output_dir, "out # not a comment");
  EXPECT_EQ(cfg.model, Model::FFRC);
  EXPECT_EQ(cfg.connectome_path, "data/x.csv");
}

TEST(Config, PeriodSuffix) {
  // Times multiply by 2π, then phase times snap to the integration grid.
  const auto cfg = parse("tau = 0.001\nt_listen = 6T\nt_train = 15T\nt_predict_end = 27T\n");
  EXPECT_NEAR(cfg.params.t_listen, 6 * kOrbitPeriod, 5e-4);
  EXPECT_NEAR(cfg.params.t_train, 15 * kOrbitPeriod, 5e-4);
  EXPECT_NEAR(cfg.params.t_predict_end, 27 * kOrbitPeriod, 5e-4);
  EXPECT_DOUBLE_EQ(cfg.params.t_train, 94.248);
  EXPECT_DOUBLE_EQ(parse("transient_skip = T\n").transient_skip, kOrbitPeriod);
  EXPECT_DOUBLE_EQ(parse("transient_skip = 0.5T\n").transient_skip, std::numbers::pi);
}

TEST(Config, NegativeStepRejected) {
  const auto e = parse_error("tau = -1\n");
  EXPECT_EQ(e.kind(), ErrorKind::Config);
  EXPECT_NE(std::string(e.what()).find("tau"), std::string::npos);
}

TEST(Config, UnknownKeyNamesLineAndKey) {
  const auto e = parse_error("gamma = 5\n\nfoo = 1\n");
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.field(), "foo");
  EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  EXPECT_NE(std::string(e.what()).find("'foo'"), std::string::npos);
}

TEST(Config, TypeErrorsAndDuplicates) {
  EXPECT_EQ(parse_error("n = 12.5\n").field(), "n");
  EXPECT_EQ(parse_error("dump_reservoir = yes\n").line(), 1);
  EXPECT_EQ(parse_error("model = gnn\n").field(), "model");
  EXPECT_EQ(parse_error("base_seed = -4\n").field(), "base_seed");
  EXPECT_EQ(parse_error("gamma = 5\ngamma = 6\n").line(), 2);
  EXPECT_EQ(parse_error("just text\n").line(), 1);
}

TEST(Config, ValidationNamesField) {
  EXPECT_EQ(parse_error("d = 3\n").field(), "d");
  EXPECT_EQ(parse_error("sparsity = 1.5\n").field(), "sparsity");
  EXPECT_EQ(parse_error("continuation_window = 5T\n").field(), "continuation_window");
  EXPECT_EQ(parse_error("transient_skip = 20T\n").field(), "transient_skip");
}

TEST(Config, OverridesAndEnvironment) {
  RunConfig cfg;
  set_field(cfg, "rho", "0.9");
  set_field(cfg, "workers", "3");
  EXPECT_EQ(cfg.params.rho, 0.9);
  EXPECT_EQ(cfg.workers, 3);
  EXPECT_THROW(set_field(cfg, "nope", "1"), ConfigError);
  ::setenv("MFRC_OUTPUT_DIR", "/tmp/mfrc_env_out", 1);
  apply_environment(cfg);
  ::unsetenv("MFRC_OUTPUT_DIR");
  EXPECT_EQ(cfg.output_dir, "/tmp/mfrc_env_out");
}

TEST(Config, HashTracksResultsOnly) {
  RunConfig a;
  RunConfig b;
  b.output_dir = "elsewhere";
  b.workers = 8;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.params.gamma = 6.0;
  EXPECT_NE(config_hash(a), config_hash(b));
  // Parsing the canonical listing reproduces the same configuration.
  validate(b);
  EXPECT_EQ(config_hash(parse(canonical_config(b))), config_hash(b));
}

TEST(Config, FfrcWithoutConnectomeIsConfigError) {
  RunConfig cfg;
  cfg.model = Model::FFRC;
  EXPECT_THROW(make_topology_source(cfg), ConfigError);
}

TEST(Config, FixtureConnectomeLoads) {
  RunConfig cfg;
  cfg.model = Model::FFRC;
  cfg.connectome_path = MFRC_FIXTURE;
  const auto src = make_topology_source(cfg);
  ASSERT_TRUE(src.connectome);
  EXPECT_EQ(src.connectome->n(), 426);
}

}  // namespace
