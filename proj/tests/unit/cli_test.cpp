#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "npm/approx/checkpoint.hpp"
#include "npm/cli/commands.hpp"
#include "npm/cli/config.hpp"

namespace npm::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

TEST(Config, EmptyFileGivesDefaults) {
  const fs::path path = fs::path(::testing::TempDir()) / "npm_empty_config.json";
  std::ofstream(path).close();
  const RunConfig c = parse_config(path);
  EXPECT_EQ(c.gamma, 0.99);
  EXPECT_EQ(c.epsilon, 0.1);
  EXPECT_EQ(c.dqn_lr, 1e-4);
  EXPECT_EQ(c.policy_lr, 3e-4);
  EXPECT_EQ(c.entropy_coef, 0.2);
  EXPECT_EQ(c.dqn_batch_size, 32);
  EXPECT_EQ(c.phase1_batch_size, 64);
  EXPECT_EQ(c.dqn_buffer_size, 1000000);
  EXPECT_EQ(c.phase1_buffer_size, 50000);
  EXPECT_EQ(c.learning_starts, 50000);
  EXPECT_EQ(c.target_update_interval, 200);
  EXPECT_EQ(c.hidden, (std::vector<int>{64, 64}));
  fs::remove(path);
}

TEST(Config, MissingFileIsMissingArtifact) {
  EXPECT_THROW(parse_config("/nonexistent/npm/config.json"), MissingArtifact);
}

TEST(Config, EpsilonRange) {
  EXPECT_EQ(parse_config_json({{"epsilon", 0.3}}).epsilon, 0.3);
  EXPECT_EQ(parse_config_json({{"epsilon", 10.0}}).epsilon, 10.0);
  EXPECT_THROW(parse_config_json({{"epsilon", -1.0}}), ConfigError);
  EXPECT_THROW(parse_config_json({{"epsilon", 0.0}}), ConfigError);
  EXPECT_THROW(parse_config_json({{"epsilon", 10.5}}), ConfigError);
}

TEST(Config, UnknownKeysAndBadTypesFail) {
  EXPECT_THROW(parse_config_json({{"epsilonn", 0.1}}), ConfigError);
  EXPECT_THROW(parse_config_json({{"epsilon", "small"}}), ConfigError);
  EXPECT_THROW(parse_config_json(json::array()), ConfigError);
  try {
    parse_config_json({{"learning_rate", 0.1}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("learning_rate"), std::string::npos);
  }
}

TEST(Config, InvariantViolations) {
  EXPECT_THROW(parse_config_json({{"seeds", json::array()}}), ConfigError);
  EXPECT_THROW(parse_config_json({{"phase2_steps", 0}}), ConfigError);
  EXPECT_THROW(parse_config_json({{"phase1_steps", -5}}), ConfigError);
  EXPECT_THROW(parse_config_json({{"mask_mode", "soft"}, {"learner", "dqn"}}), ConfigError);
  EXPECT_NO_THROW(parse_config_json({{"mask_mode", "soft"}, {"learner", "pg"}}));
  EXPECT_THROW(parse_config_json({{"env", "atari"}}), ConfigError);
  EXPECT_THROW(parse_config_json({{"learner", "a2c"}}), ConfigError);
}

TEST(Config, EnvironmentSpecificDefaults) {
  EXPECT_EQ(parse_config_json({{"env", "four_rooms"}}).phase1_budget(), 50000);
  EXPECT_EQ(parse_config_json({{"env", "actuator_maze"}, {"maze_m", 8}}).phase1_budget(), 100000);
  EXPECT_EQ(parse_config_json({{"env", "key_door"}}).phase1_budget(), 500000);
  EXPECT_EQ(parse_config_json({{"env", "key_door"}}).collection_mode(), "curiosity");
  EXPECT_EQ(parse_config_json({{"env", "four_rooms"}}).collection_mode(), "uniform");
  EXPECT_EQ(parse_config_json({{"env", "key_door"}, {"phase1_steps", 10}}).phase1_budget(), 10);
}

TEST(Config, HashRoundTripAndProfile) {
  const RunConfig c = parse_config_json({{"env", "four_rooms"}, {"n_repeat", 8}, {"seeds", {0, 1}}});
  const RunConfig back = parse_config_json(to_json(c));
  EXPECT_EQ(config_hash(c), config_hash(back));
  EXPECT_EQ(config_hash(c).size(), 16u);
  EXPECT_NE(config_hash(c), config_hash(parse_config_json({{"n_repeat", 16}})));
  const RunConfig ci = apply_profile(c, "ci");
  EXPECT_EQ(ci.phase1_budget(), 5000);
  EXPECT_EQ(ci.phase2_steps, 20000);
  EXPECT_EQ(apply_profile(c, "full").phase2_steps, c.phase2_steps);
  EXPECT_THROW(apply_profile(c, "tiny"), ConfigError);
}

TEST(Config, RunIdSharedAcrossPolicyVariants) {
  const RunConfig a = parse_config_json({{"n_repeat", 8}, {"mask_mode", "learned"}});
  const RunConfig b = parse_config_json({{"n_repeat", 8}, {"mask_mode", "none"}, {"epsilon", 0.5}});
  EXPECT_EQ(resolved_run_id(a), resolved_run_id(b));
  EXPECT_NE(resolved_run_id(a), resolved_run_id(parse_config_json({{"n_repeat", 16}})));
  EXPECT_EQ(policy_tag(a), "dqn-learned-eps0.1");
  EXPECT_EQ(policy_tag(b), "dqn-none");
  EXPECT_EQ(policy_tag(parse_config_json({{"learner", "pg"}, {"mask_mode", "soft"}})), "pg-soft-eta1");
}

class CliRun : public ::testing::Test {
 protected:
  fs::path root;

  void SetUp() override {
    root = fs::path(::testing::TempDir()) /
           ("npm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  void TearDown() override { fs::remove_all(root); }

  fs::path write_config(const std::string& name, json doc) {
    doc["output_dir"] = (root / "runs").string();
    const fs::path path = root / name;
    std::ofstream(path) << doc.dump();
    return path;
  }

  static int run(std::vector<std::string> args) {
    args.insert(args.begin(), "npmask");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_main(static_cast<int>(argv.size()), argv.data());
  }
};

json tiny_four_rooms() {
  return {{"env", "four_rooms"}, {"n_repeat", 2},      {"seeds", {0, 1}},      {"phase1_steps", 800},
          {"phase2_steps", 600}, {"eval_interval", 300}, {"eval_episodes", 1}, {"learning_starts", 100},
          {"hidden", {8}}};
}

TEST_F(CliRun, MissingConfigExitsThree) {
  EXPECT_EQ(run({"train-mask", "-c", (root / "absent.json").string()}), kMissingArtifact);
}

TEST_F(CliRun, BadConfigExitsTwo) {
  const fs::path cfg = write_config("bad.json", {{"epsilon", -1}});
  EXPECT_EQ(run({"train-mask", "-c", cfg.string()}), kConfigError);
  EXPECT_EQ(run({"no-such-command"}), kConfigError);
}

TEST_F(CliRun, TrainMaskWritesCheckpointsPerSeed) {
  const fs::path cfg = write_config("c.json", tiny_four_rooms());
  ASSERT_EQ(run({"train-mask", "-c", cfg.string()}), kOk);
  const RunConfig config = parse_config(cfg);
  for (std::uint64_t seed : {0, 1}) {
    const fs::path dir = seed_directory(config, seed);
    EXPECT_TRUE(fs::exists(dir / "inverse.json"));
    EXPECT_TRUE(fs::exists(dir / "nvalue.json"));
    const std::string csv = slurp(dir / "phase1_metrics.csv");
    EXPECT_GT(std::count(csv.begin(), csv.end(), '\n'), 1);
  }
  const json manifest = approx::read_json_file(run_directory(config) / "manifest.json");
  EXPECT_EQ(manifest.at("config_hash"), config_hash(config));
  EXPECT_TRUE(manifest.at("seeds").contains("0"));
  EXPECT_TRUE(manifest.at("seeds").contains("1"));
  for (const auto& [seed, roles] : manifest.at("seeds").items())
    for (const auto& [role, path] : roles.items()) EXPECT_TRUE(fs::exists(path.get<std::string>())) << role;
}

TEST_F(CliRun, LearnedPolicyWithoutMaskExitsThree) {
  json doc = tiny_four_rooms();
  doc["phase"] = "policy";
  const fs::path cfg = write_config("c.json", doc);
  EXPECT_EQ(run({"train-policy", "-c", cfg.string()}), kMissingArtifact);
}

TEST_F(CliRun, BaselinePolicyRunIsReproducible) {
  json doc = tiny_four_rooms();
  doc["mask_mode"] = "none";
  doc["seeds"] = {3};
  const fs::path cfg = write_config("c.json", doc);
  const RunConfig config = parse_config(cfg);
  ASSERT_EQ(run({"train-policy", "-c", cfg.string()}), kOk);
  const fs::path metrics = policy_directory(config, 3) / "metrics.csv";
  const std::string first = slurp(metrics);
  EXPECT_EQ(first.substr(0, first.find('\n')), agents::metrics_csv_header());
  ASSERT_EQ(run({"train-policy", "-c", cfg.string()}), kOk);
  EXPECT_EQ(slurp(metrics), first);
  EXPECT_EQ(run({"evaluate", "-c", cfg.string()}), kOk);
  EXPECT_EQ(run({"plot-data", "-c", cfg.string()}), kOk);
  EXPECT_TRUE(fs::exists(root / "runs" / "plot_data.csv"));
}

TEST_F(CliRun, OracleMaskPolicyRuns) {
  json doc = tiny_four_rooms();
  doc["mask_mode"] = "oracle";
  doc["seeds"] = {0};
  const fs::path cfg = write_config("c.json", doc);
  EXPECT_EQ(run({"train-policy", "-c", cfg.string()}), kOk);
  const std::string metrics = slurp(policy_directory(parse_config(cfg), 0) / "metrics.csv");
  EXPECT_NE(metrics.find(",oracle,"), std::string::npos);
}

TEST_F(CliRun, ExportMatrix) {
  json doc = tiny_four_rooms();
  doc["seeds"] = {0};
  const fs::path cfg = write_config("c.json", doc);
  ASSERT_EQ(run({"train-mask", "-c", cfg.string()}), kOk);
  const fs::path states = root / "states.json";
  std::ofstream(states) << "[24, 25]";
  const fs::path out = root / "m.json";
  ASSERT_EQ(run({"export-matrix", "-c", cfg.string(), "--states", states.string(), "--out", out.string()}), kOk);
  const json m = approx::read_json_file(out);
  ASSERT_EQ(m.at("states").size(), 2u);
  EXPECT_EQ(m.at("states")[0].at("matrix").size(), 25u);

  std::ofstream(states) << "[]";
  ASSERT_EQ(run({"export-matrix", "-c", cfg.string(), "--states", states.string(), "--out", out.string()}), kOk);
  EXPECT_TRUE(approx::read_json_file(out).at("states").empty());

  json other = tiny_four_rooms();
  other["n_repeat"] = 5;
  const fs::path mismatched = write_config("other.json", other);
  const fs::path ckpt = seed_directory(parse_config(cfg), 0) / "nvalue.json";
  EXPECT_EQ(run({"export-matrix", "-c", mismatched.string(), "--states", states.string(), "--checkpoint",
                 ckpt.string()}),
            kConfigError);
}

TEST_F(CliRun, TransferEval) {
  json doc = {{"env", "key_door"},     {"seeds", {0}},       {"phase1_steps", 600},  {"phase2_steps", 400},
              {"eval_interval", 200},  {"eval_episodes", 1}, {"learner", "pg"},      {"pg_rollout", 128},
              {"hidden", {8}}};
  const fs::path cfg = write_config("kd.json", doc);
  ASSERT_EQ(run({"train-mask", "-c", cfg.string()}), kOk);
  ASSERT_EQ(run({"transfer-eval", "-c", cfg.string()}), kOk);
  const fs::path dir = policy_directory(parse_config(cfg), 0);
  EXPECT_TRUE(fs::exists(dir / "transfer_metrics.csv"));
  EXPECT_NE(slurp(dir / "transfer_metrics.csv").find("+transfer"), std::string::npos);

  const fs::path fr = write_config("fr.json", tiny_four_rooms());
  EXPECT_EQ(run({"transfer-eval", "-c", fr.string()}), kConfigError);
  ASSERT_EQ(run({"train-mask", "-c", fr.string()}), kOk);
  const fs::path wrong_mask = seed_directory(parse_config(fr), 0) / "nvalue.json";
  EXPECT_EQ(run({"transfer-eval", "-c", cfg.string(), "--mask", wrong_mask.string()}), kConfigError);
}

TEST_F(CliRun, OracleVerifyExitCodes) {
  const fs::path out = root / "audit.json";
  EXPECT_EQ(run({"oracle-verify", "--out", out.string()}), kOk);
  const json report = approx::read_json_file(out);
  for (const auto& c : report.at("checks")) EXPECT_EQ(c.at("passes"), c.at("instances"));
  EXPECT_EQ(run({"oracle-verify", "--break-precondition", "--out", out.string()}), kAuditFailure);
  bool flagged = false;
  const json broken = approx::read_json_file(out);
  for (const auto& c : broken.at("checks"))
    if (c.at("name") == "collapse_bound") flagged = c.at("precondition_failures").get<int>() > 0;
  EXPECT_TRUE(flagged);
}

}  // namespace
}  // namespace npm::cli
