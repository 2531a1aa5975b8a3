#include "npm/cli/commands.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "npm/approx/checkpoint.hpp"
#include "npm/mask/models.hpp"
#include "npm/oracle/audit.hpp"

namespace npm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << header << '\n';
  }
  void row(const std::string& line) { out_ << line << '\n'; }

 private:
  std::ofstream out_;
};

// Manifest of one run directory, merged across invocations.
class Manifest {
 public:
  Manifest(const RunConfig& config, std::string command, const CommandOptions& options)
      : path_(run_directory(config) / "manifest.json"), started_(utc_now()) {
    fs::create_directories(path_.parent_path());
    if (fs::exists(path_)) doc_ = approx::read_json_file(path_);
    doc_["config_hash"] = config_hash(config);
    doc_["code_version"] = NPM_VERSION;
    doc_["config"] = to_json(config);
    if (!doc_.contains("created")) doc_["created"] = started_;
    if (!doc_.contains("files")) doc_["files"] = json::array();
    if (!doc_.contains("seeds")) doc_["seeds"] = json::object();
    if (!doc_.contains("commands")) doc_["commands"] = json::array();
    command_ = {{"command", std::move(command)}, {"profile", options.profile}, {"started", started_}};
  }

  void add(std::uint64_t seed, const std::string& role, const fs::path& file) {
    doc_["seeds"][std::to_string(seed)][role] = file.string();
    add(file);
  }
  void add(const fs::path& file) {
    json& files = doc_["files"];
    if (std::find(files.begin(), files.end(), json(file.string())) == files.end()) files.push_back(file.string());
  }

  void finish(int status) {
    command_["finished"] = utc_now();
    command_["status"] = status;
    doc_["commands"].push_back(command_);
    doc_["updated"] = command_["finished"];
    approx::write_json_file(path_, doc_);
  }

 private:
  fs::path path_;
  std::string started_;
  json doc_ = json::object();
  json command_;
};

// Runs `fn` per seed, in child processes when requested; returns the worst
// exit status.
template <class Fn>
int for_each_seed(const RunConfig& config, const CommandOptions& options, Fn fn) {
  if (!options.parallel_seeds || config.seeds.size() == 1) {
    for (std::uint64_t seed : config.seeds) fn(seed);
    return kOk;
  }
  std::vector<pid_t> children;
  for (std::uint64_t seed : config.seeds) {
    std::cout.flush();
    const pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
      int code = kOk;
      try {
        fn(seed);
      } catch (const ConfigError& e) {
        std::cerr << "seed " << seed << ": " << e.what() << '\n';
        code = kConfigError;
      } catch (const MissingArtifact& e) {
        std::cerr << "seed " << seed << ": " << e.what() << '\n';
        code = kMissingArtifact;
      } catch (const std::exception& e) {
        std::cerr << "seed " << seed << ": " << e.what() << '\n';
        code = kFailure;
      }
      std::cout.flush();
      _exit(code);
    }
    children.push_back(pid);
  }
  int worst = kOk;
  for (pid_t pid : children) {
    int status = 0;
    waitpid(pid, &status, 0);
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : kFailure;
    worst = std::max(worst, code);
  }
  return worst;
}

json read_artifact(const fs::path& path) {
  if (!fs::exists(path)) throw MissingArtifact("missing artifact: " + path.string());
  return approx::read_json_file(path);
}

mask::NValueModel load_nvalue(const fs::path& path, const Environment& env) {
  mask::NValueModel model = mask::nvalue_from_json(read_artifact(path));
  if (model.num_actions() != env.num_actions() || model.obs_size() != env.observation_size())
    throw ConfigError("checkpoint " + path.string() + " does not match the environment (" +
                      std::to_string(model.num_actions()) + " actions, observation size " +
                      std::to_string(model.obs_size()) + ")");
  return model;
}

fs::path mask_path(const RunConfig& config, const CommandOptions& options, std::uint64_t seed) {
  return options.mask ? *options.mask : seed_directory(config, seed) / "nvalue.json";
}

std::unique_ptr<agents::MaskProvider> build_masks(const RunConfig& config, const CommandOptions& options,
                                                  std::uint64_t seed, const Environment& env) {
  const agents::MaskMode mode = agents::parse_mask_mode(config.mask_mode);
  std::optional<mask::NValueModel> model;
  if (mode == agents::MaskMode::kLearned || mode == agents::MaskMode::kSoft)
    model = load_nvalue(mask_path(config, options, seed), env);
  if (mode == agents::MaskMode::kOracle && !dynamic_cast<const DiscreteEnvironment*>(&env))
    throw ConfigError("mask_mode: oracle needs an environment with exact dynamics");
  return agents::make_mask_provider(mode, env.num_actions(), config.epsilon, config.eta, std::move(model));
}

void write_metrics(const fs::path& path, const std::vector<agents::EvalRow>& rows) {
  CsvWriter csv(path, agents::metrics_csv_header());
  for (const auto& r : rows) csv.row(agents::to_csv(r));
}

void write_episodes(const fs::path& path, const std::vector<agents::EpisodeRow>& rows) {
  CsvWriter csv(path, "env_steps,episode_return,success,mask_size_mean");
  for (const auto& r : rows)
    csv.row(std::to_string(r.env_steps) + "," + std::to_string(r.episode_return) + "," +
            (r.success ? "1" : "0") + "," + std::to_string(r.mask_size_mean));
}

int policy_run(const RunConfig& config, const CommandOptions& options, const std::string& command,
               const std::optional<std::string>& goal, const std::string& prefix, const std::string& tag) {
  if (config.env != "key_door" && goal) throw ConfigError("transfer_goal: only the key_door family has goals");
  Manifest manifest(config, command, options);
  const int status = for_each_seed(config, options, [&](std::uint64_t seed) {
    std::unique_ptr<Environment> env = make_environment(config, goal);
    std::unique_ptr<agents::MaskProvider> masks = build_masks(config, options, seed, *env);
    agents::Phase2Config p2 = phase2_config(config, seed);
    p2.run_id += tag;
    const agents::Phase2Result result = agents::phase2_train(*env, *masks, p2);
    const fs::path dir = policy_directory(config, seed);
    fs::create_directories(dir);
    write_metrics(dir / (prefix + "metrics.csv"), result.evals);
    write_episodes(dir / (prefix + "episodes.csv"), result.episodes);
    approx::write_json_file(dir / (prefix + "policy.json"), result.checkpoint);
    const auto& last = result.evals.back();
    std::cout << "seed " << seed << ": success_rate " << last.success_rate << " return " << last.episode_return_mean
              << " mask_size " << last.mask_size_mean << '\n';
  });
  for (std::uint64_t seed : config.seeds) {
    const fs::path dir = policy_directory(config, seed);
    for (const char* role : {"metrics.csv", "episodes.csv", "policy.json"})
      if (fs::exists(dir / (prefix + role)))
        manifest.add(seed, policy_tag(config) + "/" + prefix + role, dir / (prefix + role));
  }
  manifest.finish(status);
  return status;
}

}  // namespace

fs::path run_directory(const RunConfig& config) { return fs::path(config.output_dir) / resolved_run_id(config); }

fs::path seed_directory(const RunConfig& config, std::uint64_t seed) {
  return run_directory(config) / ("seed-" + std::to_string(seed));
}

fs::path policy_directory(const RunConfig& config, std::uint64_t seed) {
  return seed_directory(config, seed) / policy_tag(config);
}

int cmd_train_mask(const RunConfig& config, const CommandOptions& options) {
  Manifest manifest(config, "train-mask", options);
  const int status = for_each_seed(config, options, [&](std::uint64_t seed) {
    std::unique_ptr<Environment> env = make_environment(config);
    Rng rng(seed);
    const mask::Phase1Result result = mask::phase1_train(*env, phase1_config(config), rng);
    const fs::path dir = seed_directory(config, seed);
    fs::create_directories(dir);
    approx::write_json_file(dir / "inverse.json", mask::to_json(result.inverse));
    approx::write_json_file(dir / "nvalue.json", mask::to_json(result.nvalue));
    CsvWriter csv(dir / "phase1_metrics.csv",
                  "run_id,env,seed,env_steps,inverse_loss,nvalue_loss,curiosity_return,distinct_states");
    for (const auto& r : result.log) {
      std::ostringstream line;
      line.precision(10);
      line << resolved_run_id(config) << ',' << config.env << ',' << seed << ',' << r.env_steps << ','
           << r.inverse_loss << ',' << r.nvalue_loss << ',' << r.curiosity_return << ',' << r.distinct_states;
      csv.row(line.str());
    }
    std::cout << "seed " << seed << ": heldout accuracy " << result.heldout_accuracy << " log-likelihood "
              << result.heldout_log_likelihood << '\n';
  });
  for (std::uint64_t seed : config.seeds) {
    const fs::path dir = seed_directory(config, seed);
    for (const char* role : {"inverse.json", "nvalue.json", "phase1_metrics.csv"})
      if (fs::exists(dir / role)) manifest.add(seed, role, dir / role);
  }
  manifest.finish(status);
  return status;
}

int cmd_train_policy(const RunConfig& config, const CommandOptions& options) {
  if (config.phase == "both") {
    const agents::MaskMode mode = agents::parse_mask_mode(config.mask_mode);
    const bool needs_mask = mode == agents::MaskMode::kLearned || mode == agents::MaskMode::kSoft;
    bool missing = false;
    for (std::uint64_t seed : config.seeds) missing = missing || !fs::exists(seed_directory(config, seed) / "nvalue.json");
    if (needs_mask && !options.mask && missing) {
      const int status = cmd_train_mask(config, options);
      if (status != kOk) return status;
    }
  }
  return policy_run(config, options, "train-policy", std::nullopt, "", "");
}

int cmd_transfer_eval(const RunConfig& config, const CommandOptions& options) {
  if (config.env != "key_door") throw ConfigError("transfer-eval: needs the key_door family");
  return policy_run(config, options, "transfer-eval", config.transfer_goal, "transfer_", "+transfer");
}

int cmd_evaluate(const RunConfig& config, const CommandOptions& options) {
  json results = json::array();
  for (std::uint64_t seed : config.seeds) {
    std::unique_ptr<Environment> env = make_environment(config);
    std::unique_ptr<agents::MaskProvider> masks = build_masks(config, options, seed, *env);
    const fs::path path = options.checkpoint ? *options.checkpoint : policy_directory(config, seed) / "policy.json";
    const agents::GreedyPolicy policy = agents::greedy_policy_from_checkpoint(read_artifact(path), *masks);
    Rng rng = Rng(seed).derive(31);
    const agents::EvalSummary s = agents::evaluate_greedy(*env, *masks, config.eval_episodes, rng, policy);
    results.push_back({{"seed", seed},
                       {"checkpoint", path.string()},
                       {"episode_return_mean", s.return_mean},
                       {"success_rate", s.success_rate},
                       {"mask_size_mean", s.mask_size_mean}});
  }
  const json report = {{"env", config.env}, {"mask_mode", config.mask_mode}, {"results", results}};
  if (options.out) approx::write_json_file(*options.out, report);
  std::cout << report.dump(2) << '\n';
  return kOk;
}

int cmd_export_matrix(const RunConfig& config, const CommandOptions& options) {
  if (!options.states) throw ConfigError("export-matrix: --states is required");
  std::unique_ptr<Environment> env = make_environment(config);
  const std::uint64_t seed = config.seeds.front();
  const mask::NValueModel model =
      load_nvalue(options.checkpoint ? *options.checkpoint : mask_path(config, options, seed), *env);
  json states = read_artifact(*options.states);
  if (states.is_object()) states = states.at("states");
  if (!states.is_array()) throw ConfigError("states file: expected an array or {\"states\": [...]}");
  auto* discrete = dynamic_cast<DiscreteEnvironment*>(env.get());
  json records = json::array();
  Rng rng(seed);
  env->reset(rng);
  for (const json& entry : states) {
    Observation obs;
    std::string key;
    if (entry.is_number_integer()) {
      if (!discrete) throw ConfigError("states file: integer state codes need an environment with exact dynamics");
      discrete->restore(entry.get<std::uint64_t>());
      obs = discrete->observation();
      key = discrete->state_label();
    } else if (entry.is_array()) {
      obs = entry.get<std::vector<double>>();
      if (static_cast<int>(obs.size()) != env->observation_size())
        throw ConfigError("states file: observation of size " + std::to_string(obs.size()) + ", expected " +
                          std::to_string(env->observation_size()));
      key = observation_key(obs);
    } else {
      throw ConfigError("states file: entries must be state codes or observation arrays");
    }
    const mask::SimilarityMatrix m = mask::similarity(model, obs, key);
    records.push_back(mask::to_json(m, mask::cluster(m, config.epsilon)));
  }
  const fs::path out = options.out ? *options.out : run_directory(config) / "matrices.json";
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  approx::write_json_file(out, {{"env", config.env}, {"epsilon", config.epsilon}, {"states", records}});
  std::cout << "wrote " << records.size() << " matrices to " << out.string() << '\n';
  return kOk;
}

int cmd_oracle_verify(const RunConfig& config, const CommandOptions& options) {
  oracle::AuditConfig audit;
  audit.seed = config.seeds.front();
  audit.break_precondition = options.break_precondition;
  const std::vector<oracle::AuditCheck> checks = oracle::run_audits(audit);
  const json report = oracle::audit_report(checks);
  if (options.out) {
    if (options.out->has_parent_path()) fs::create_directories(options.out->parent_path());
    approx::write_json_file(*options.out, report);
  }
  std::cout << report.dump(2) << '\n';
  for (const auto& c : checks)
    if (!c.ok()) return kAuditFailure;
  return kOk;
}

int cmd_plot_data(const RunConfig& config, const CommandOptions& options) {
  const fs::path root(config.output_dir);
  if (!fs::exists(root)) throw MissingArtifact("output directory not found: " + root.string());
  std::set<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && (name == "metrics.csv" || name == "transfer_metrics.csv")) files.insert(entry.path());
  }
  const fs::path out = options.out ? *options.out : root / "plot_data.csv";
  CsvWriter csv(out, agents::metrics_csv_header() + ",source");
  std::size_t rows = 0;
  for (const fs::path& file : files) {
    std::ifstream in(file);
    std::string line;
    std::getline(in, line);
    if (line != agents::metrics_csv_header()) throw ConfigError("unexpected metrics header in " + file.string());
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      csv.row(line + "," + fs::relative(file, root).string());
      ++rows;
    }
  }
  std::cout << "wrote " << rows << " rows from " << files.size() << " files to " << out.string() << '\n';
  return kOk;
}

int run_main(int argc, char** argv) {
  CLI::App app{"Action masking from learned transition similarity"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(NPM_VERSION));
  std::string config_path;
  CommandOptions options;
  std::string mask, checkpoint, states, out;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("-c,--config", config_path, "Run configuration (flat JSON)");
    if (config_required) opt->required();
    sub->add_option("--profile", options.profile, "Budget profile: full or ci")->check(CLI::IsMember({"full", "ci"}));
  };
  CLI::App* train_mask = app.add_subcommand("train-mask", "Phase 1: train the inverse and N-value models");
  add_common(train_mask, true);
  train_mask->add_flag("--parallel-seeds", options.parallel_seeds, "Run seeds as separate processes");
  CLI::App* train_policy = app.add_subcommand("train-policy", "Phase 2: train a masked policy");
  add_common(train_policy, true);
  train_policy->add_flag("--parallel-seeds", options.parallel_seeds, "Run seeds as separate processes");
  train_policy->add_option("--mask", mask, "N-value checkpoint for learned or soft masks");
  CLI::App* evaluate = app.add_subcommand("evaluate", "Greedy evaluation of a policy checkpoint");
  add_common(evaluate, true);
  evaluate->add_option("--checkpoint", checkpoint, "Policy checkpoint");
  evaluate->add_option("--mask", mask, "N-value checkpoint for learned or soft masks");
  evaluate->add_option("--out", out, "Write the report here");
  CLI::App* export_matrix = app.add_subcommand("export-matrix", "Similarity matrices and clusters at given states");
  add_common(export_matrix, true);
  export_matrix->add_option("--checkpoint", checkpoint, "N-value checkpoint");
  export_matrix->add_option("--states", states, "JSON list of state codes or observations")->required();
  export_matrix->add_option("--out", out, "Output JSON path");
  CLI::App* verify = app.add_subcommand("oracle-verify", "Exact audits on random tabular MDPs");
  add_common(verify, false);
  verify->add_option("--out", out, "Write the audit report here");
  verify->add_flag("--break-precondition", options.break_precondition,
                   "Merge non-similar actions into clusters (exercises the precondition check)");
  CLI::App* transfer = app.add_subcommand("transfer-eval", "Phase 2 on a new goal with a frozen mask");
  add_common(transfer, true);
  transfer->add_flag("--parallel-seeds", options.parallel_seeds, "Run seeds as separate processes");
  transfer->add_option("--mask", mask, "N-value checkpoint trained on the source goal");
  CLI::App* plot_data = app.add_subcommand("plot-data", "Collect metrics files into one tidy CSV");
  add_common(plot_data, false);
  plot_data->add_option("--out", out, "Output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (!mask.empty()) options.mask = mask;
  if (!checkpoint.empty()) options.checkpoint = checkpoint;
  if (!states.empty()) options.states = states;
  if (!out.empty()) options.out = out;

  try {
    RunConfig config = config_path.empty() ? parse_config_json(json()) : parse_config(config_path);
    config = apply_profile(config, options.profile);
    if (*train_mask) return cmd_train_mask(config, options);
    if (*train_policy) return cmd_train_policy(config, options);
    if (*evaluate) return cmd_evaluate(config, options);
    if (*export_matrix) return cmd_export_matrix(config, options);
    if (*verify) return cmd_oracle_verify(config, options);
    if (*transfer) return cmd_transfer_eval(config, options);
    if (*plot_data) return cmd_plot_data(config, options);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const MissingArtifact& e) {
    std::cerr << "missing artifact: " << e.what() << '\n';
    return kMissingArtifact;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace npm::cli
