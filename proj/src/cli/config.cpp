#include "npm/cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "npm/envs/actuator_maze.hpp"
#include "npm/envs/four_rooms.hpp"
#include "npm/envs/key_door.hpp"

namespace npm::cli {

namespace {

using nlohmann::json;

struct Field {
  std::string key;
  std::function<void(const json&, RunConfig&)> read;
  std::function<json(const RunConfig&)> write;
};

template <class T>
T convert(const json& value, const std::string& key) {
  try {
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!value.is_number_integer()) throw ConfigError(key + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>)
        if (value.get<long long>() < 0) throw ConfigError(key + ": expected a non-negative integer");
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!value.is_number()) throw ConfigError(key + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!value.is_string()) throw ConfigError(key + ": expected a string");
    }
    return value.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

template <class T>
Field field(std::string key, T RunConfig::*member) {
  return {key, [key, member](const json& v, RunConfig& c) { c.*member = convert<T>(v, key); },
          [member](const RunConfig& c) { return json(c.*member); }};
}

template <class T>
Field optional_field(std::string key, std::optional<T> RunConfig::*member,
                     std::function<json(const RunConfig&)> resolved) {
  return {key,
          [key, member](const json& v, RunConfig& c) {
            if (v.is_null()) c.*member = std::nullopt;
            else c.*member = convert<T>(v, key);
          },
          std::move(resolved)};
}

template <class T>
Field list_field(std::string key, std::vector<T> RunConfig::*member) {
  return {key,
          [key, member](const json& v, RunConfig& c) {
            if (!v.is_array()) throw ConfigError(key + ": expected an array");
            std::vector<T> out;
            for (const json& item : v) out.push_back(convert<T>(item, key));
            c.*member = std::move(out);
          },
          [member](const RunConfig& c) { return json(c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      field("env", &RunConfig::env),
      field("n_repeat", &RunConfig::n_repeat),
      field("wind_p", &RunConfig::wind_p),
      field("horizon", &RunConfig::horizon),
      field("maze_m", &RunConfig::maze_m),
      field("maze_step_size", &RunConfig::maze_step_size),
      field("maze_goal_radius", &RunConfig::maze_goal_radius),
      field("goal", &RunConfig::goal),
      field("transfer_goal", &RunConfig::transfer_goal),
      field("phase", &RunConfig::phase),
      field("learner", &RunConfig::learner),
      field("mask_mode", &RunConfig::mask_mode),
      field("epsilon", &RunConfig::epsilon),
      field("eta", &RunConfig::eta),
      list_field("seeds", &RunConfig::seeds),
      optional_field("phase1_steps", &RunConfig::phase1_steps,
                     [](const RunConfig& c) { return json(c.phase1_budget()); }),
      field("phase2_steps", &RunConfig::phase2_steps),
      field("eval_interval", &RunConfig::eval_interval),
      field("eval_episodes", &RunConfig::eval_episodes),
      field("output_dir", &RunConfig::output_dir),
      field("run_id", &RunConfig::run_id),
      list_field("hidden", &RunConfig::hidden),
      field("activation", &RunConfig::activation),
      field("gamma", &RunConfig::gamma),
      field("inverse_lr", &RunConfig::inverse_lr),
      field("nvalue_lr", &RunConfig::nvalue_lr),
      field("nvalue_interval", &RunConfig::nvalue_interval),
      field("inverse_updates", &RunConfig::inverse_updates),
      field("nvalue_updates", &RunConfig::nvalue_updates),
      field("phase1_rollout", &RunConfig::phase1_rollout),
      field("phase1_batch_size", &RunConfig::phase1_batch_size),
      field("phase1_buffer_size", &RunConfig::phase1_buffer_size),
      optional_field("output_weight_decay", &RunConfig::output_weight_decay,
                     [](const RunConfig& c) { return json(c.output_decay()); }),
      optional_field("collection", &RunConfig::collection,
                     [](const RunConfig& c) { return json(c.collection_mode()); }),
      field("inverse_variant", &RunConfig::inverse_variant),
      field("policy_lr", &RunConfig::policy_lr),
      field("entropy_coef", &RunConfig::entropy_coef),
      field("pg_rollout", &RunConfig::pg_rollout),
      field("pg_epochs", &RunConfig::pg_epochs),
      field("pg_minibatch", &RunConfig::pg_minibatch),
      field("pg_clip", &RunConfig::pg_clip),
      field("gae_lambda", &RunConfig::gae_lambda),
      field("pg_max_grad_norm", &RunConfig::pg_max_grad_norm),
      field("dqn_lr", &RunConfig::dqn_lr),
      field("dqn_buffer_size", &RunConfig::dqn_buffer_size),
      field("dqn_batch_size", &RunConfig::dqn_batch_size),
      field("exploration_initial", &RunConfig::exploration_initial),
      field("exploration_final", &RunConfig::exploration_final),
      field("exploration_fraction", &RunConfig::exploration_fraction),
      field("learning_starts", &RunConfig::learning_starts),
      field("target_update_interval", &RunConfig::target_update_interval),
      field("train_freq", &RunConfig::train_freq),
      field("dqn_max_grad_norm", &RunConfig::dqn_max_grad_norm),
  };
  return table;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool one_of(const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options)
    if (v == o) return true;
  return false;
}

}  // namespace

long RunConfig::phase1_budget() const {
  if (phase1_steps) return *phase1_steps;
  if (env == "actuator_maze") return maze_m >= 8 ? 100000 : 50000;
  if (env == "key_door") return 500000;
  return 50000;
}

double RunConfig::output_decay() const {
  if (output_weight_decay) return *output_weight_decay;
  return env == "four_rooms" ? 10.0 : 0.0;
}

std::string RunConfig::collection_mode() const {
  if (collection) return *collection;
  return env == "key_door" ? "curiosity" : "uniform";
}

void validate(const RunConfig& c) {
  require(one_of(c.env, {"four_rooms", "actuator_maze", "key_door"}), "env: unknown environment '" + c.env + "'");
  require(c.n_repeat >= 1, "n_repeat: must be at least 1");
  require(c.wind_p >= 0.0 && c.wind_p <= 1.0, "wind_p: must lie in [0, 1]");
  require(c.horizon >= 0, "horizon: must be non-negative (0 selects the default)");
  require(c.maze_m >= 1 && c.maze_m <= 10, "maze_m: must lie in [1, 10]");
  require(c.maze_step_size > 0.0, "maze_step_size: must be positive");
  require(c.maze_goal_radius > 0.0, "maze_goal_radius: must be positive");
  require(one_of(c.goal, {"box", "key"}), "goal: expected box or key");
  require(one_of(c.transfer_goal, {"box", "key"}), "transfer_goal: expected box or key");
  require(one_of(c.phase, {"mask", "policy", "both"}), "phase: expected mask, policy or both");
  require(one_of(c.learner, {"dqn", "pg"}), "learner: expected dqn or pg");
  require(one_of(c.mask_mode, {"learned", "oracle", "ground_truth", "none", "soft"}),
          "mask_mode: expected learned, oracle, ground_truth, none or soft");
  require(!(c.learner == "dqn" && c.mask_mode == "soft"), "mask_mode: soft requires learner pg");
  require(c.epsilon > 0.0 && c.epsilon <= 10.0, "epsilon: must lie in (0, 10]");
  require(c.eta >= 0.0 && std::isfinite(c.eta), "eta: must be finite and non-negative");
  require(!c.seeds.empty(), "seeds: must be non-empty");
  require(c.phase1_budget() > 0, "phase1_steps: must be positive");
  require(c.phase2_steps > 0, "phase2_steps: must be positive");
  require(c.eval_interval > 0, "eval_interval: must be positive");
  require(c.eval_episodes > 0, "eval_episodes: must be positive");
  require(!c.output_dir.empty(), "output_dir: must be non-empty");
  require(c.run_id.find('/') == std::string::npos, "run_id: must not contain '/'");
  require(!c.hidden.empty(), "hidden: must be non-empty");
  for (int h : c.hidden) require(h > 0, "hidden: layer sizes must be positive");
  require(one_of(c.activation, {"tanh", "relu"}), "activation: expected tanh or relu");
  require(c.gamma > 0.0 && c.gamma < 1.0, "gamma: must lie in (0, 1)");
  require(c.inverse_lr > 0.0, "inverse_lr: must be positive");
  require(c.nvalue_lr > 0.0, "nvalue_lr: must be positive");
  require(c.nvalue_interval >= 1, "nvalue_interval: must be at least 1");
  require(c.inverse_updates >= 1, "inverse_updates: must be at least 1");
  require(c.nvalue_updates >= 1, "nvalue_updates: must be at least 1");
  require(c.phase1_rollout >= 1, "phase1_rollout: must be at least 1");
  require(c.phase1_batch_size >= 1, "phase1_batch_size: must be at least 1");
  require(c.phase1_buffer_size >= 1, "phase1_buffer_size: must be at least 1");
  require(c.output_decay() >= 0.0, "output_weight_decay: must be non-negative");
  require(one_of(c.collection_mode(), {"uniform", "policy", "curiosity"}),
          "collection: expected uniform, policy or curiosity");
  require(one_of(c.inverse_variant, {"modified", "original"}), "inverse_variant: expected modified or original");
  require(c.policy_lr > 0.0, "policy_lr: must be positive");
  require(c.entropy_coef >= 0.0, "entropy_coef: must be non-negative");
  require(c.pg_rollout >= 1, "pg_rollout: must be at least 1");
  require(c.pg_epochs >= 1, "pg_epochs: must be at least 1");
  require(c.pg_minibatch >= 1, "pg_minibatch: must be at least 1");
  require(c.pg_clip > 0.0, "pg_clip: must be positive");
  require(c.gae_lambda >= 0.0 && c.gae_lambda <= 1.0, "gae_lambda: must lie in [0, 1]");
  require(c.pg_max_grad_norm > 0.0, "pg_max_grad_norm: must be positive");
  require(c.dqn_lr > 0.0, "dqn_lr: must be positive");
  require(c.dqn_buffer_size >= 1, "dqn_buffer_size: must be at least 1");
  require(c.dqn_batch_size >= 1, "dqn_batch_size: must be at least 1");
  require(c.exploration_initial >= 0.0 && c.exploration_initial <= 1.0, "exploration_initial: must lie in [0, 1]");
  require(c.exploration_final >= 0.0 && c.exploration_final <= 1.0, "exploration_final: must lie in [0, 1]");
  require(c.exploration_fraction > 0.0 && c.exploration_fraction <= 1.0, "exploration_fraction: must lie in (0, 1]");
  require(c.learning_starts >= 0, "learning_starts: must be non-negative");
  require(c.target_update_interval >= 1, "target_update_interval: must be at least 1");
  require(c.train_freq >= 1, "train_freq: must be at least 1");
  require(c.dqn_max_grad_norm > 0.0, "dqn_max_grad_norm: must be positive");
}

RunConfig parse_config_json(const json& doc) {
  RunConfig config;
  if (doc.is_null()) return config;
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto& table = fields();
    auto f = std::find_if(table.begin(), table.end(), [&](const Field& x) { return x.key == it.key(); });
    if (f == table.end()) throw ConfigError("unknown config key '" + it.key() + "'");
    f->read(it.value(), config);
  }
  validate(config);
  return config;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifact("config file not found: " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  const std::string body = text.str();
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) return parse_config_json(json());
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: malformed JSON: " + std::string(e.what()));
  }
  return parse_config_json(doc);
}

json to_json(const RunConfig& config) {
  json out = json::object();
  for (const Field& f : fields()) out[f.key] = f.write(config);
  return out;
}

std::string config_hash(const RunConfig& config) { return fnv1a_hex(to_json(config).dump()); }

RunConfig apply_profile(RunConfig config, const std::string& profile) {
  if (profile == "full") return config;
  if (profile != "ci") throw ConfigError("profile: expected full or ci");
  config.phase1_steps = std::max(1L, config.phase1_budget() / 10);
  config.phase2_steps = std::max(1L, config.phase2_steps / 10);
  config.eval_interval = std::max(1L, config.eval_interval / 10);
  config.learning_starts /= 10;
  return config;
}

std::unique_ptr<Environment> make_environment(const RunConfig& c, const std::optional<std::string>& goal) {
  if (c.env == "four_rooms") {
    envs::FourRoomsSpec spec;
    spec.n_repeat = c.n_repeat;
    spec.wind_p = c.wind_p;
    if (c.horizon > 0) spec.horizon = c.horizon;
    return std::make_unique<envs::FourRooms>(spec);
  }
  if (c.env == "actuator_maze") {
    envs::ActuatorMazeSpec spec;
    spec.m = c.maze_m;
    spec.step_size = c.maze_step_size;
    spec.goal_radius = c.maze_goal_radius;
    if (c.horizon > 0) spec.horizon = c.horizon;
    return std::make_unique<envs::ActuatorMaze>(spec);
  }
  if (c.env == "key_door") {
    envs::KeyDoorSpec spec;
    spec.goal = envs::parse_goal_object(goal.value_or(c.goal));
    if (c.horizon > 0) spec.horizon = c.horizon;
    return std::make_unique<envs::KeyDoor>(spec);
  }
  throw ConfigError("env: unknown environment '" + c.env + "'");
}

mask::Phase1Config phase1_config(const RunConfig& c) {
  mask::Phase1Config p;
  p.total_steps = c.phase1_budget();
  p.rollout_length = c.phase1_rollout;
  p.inverse_updates = c.inverse_updates;
  p.nvalue_updates = c.nvalue_updates;
  p.nvalue_interval = c.nvalue_interval;
  p.batch_size = c.phase1_batch_size;
  p.buffer_capacity = static_cast<std::size_t>(c.phase1_buffer_size);
  p.hidden = c.hidden;
  p.activation = approx::parse_activation(c.activation);
  p.inverse_lr = c.inverse_lr;
  p.nvalue_lr = c.nvalue_lr;
  p.output_weight_decay = c.output_decay();
  p.variant = mask::parse_inverse_variant(c.inverse_variant);
  const std::string mode = c.collection_mode();
  p.uniform_collection = mode == "uniform";
  p.complex_task = mode == "curiosity";
  p.curiosity_pg.learning_rate = c.policy_lr;
  p.curiosity_pg.gamma = c.gamma;
  p.curiosity_pg.entropy_coef = c.entropy_coef;
  p.log_interval = static_cast<int>(std::max(1L, p.total_steps / 20));
  return p;
}

agents::Phase2Config phase2_config(const RunConfig& c, std::uint64_t seed) {
  agents::Phase2Config p;
  p.learner = c.learner;
  p.total_steps = c.phase2_steps;
  p.eval_interval = c.eval_interval;
  p.eval_episodes = c.eval_episodes;
  p.seed = seed;
  p.hidden = c.hidden;
  p.activation = approx::parse_activation(c.activation);
  p.dqn.learning_rate = c.dqn_lr;
  p.dqn.gamma = c.gamma;
  p.dqn.batch_size = c.dqn_batch_size;
  p.dqn.buffer_size = static_cast<std::size_t>(c.dqn_buffer_size);
  p.dqn.exploration_initial = c.exploration_initial;
  p.dqn.exploration_final = c.exploration_final;
  p.dqn.exploration_fraction = c.exploration_fraction;
  p.dqn.learning_starts = c.learning_starts;
  p.dqn.target_update_interval = c.target_update_interval;
  p.dqn.train_freq = c.train_freq;
  p.dqn.max_grad_norm = c.dqn_max_grad_norm;
  p.pg.learning_rate = c.policy_lr;
  p.pg.gamma = c.gamma;
  p.pg.gae_lambda = c.gae_lambda;
  p.pg.clip = c.pg_clip;
  p.pg.entropy_coef = c.entropy_coef;
  p.pg.epochs = c.pg_epochs;
  p.pg.minibatch = c.pg_minibatch;
  p.pg.max_grad_norm = c.pg_max_grad_norm;
  p.pg_rollout = c.pg_rollout;
  p.run_id = resolved_run_id(c);
  p.env_name = c.env;
  p.epsilon = c.epsilon;
  return p;
}

std::string resolved_run_id(const RunConfig& c) {
  if (!c.run_id.empty()) return c.run_id;
  // Policy-only fields are left out so every phase-2 variant shares the run's masks.
  static const std::set<std::string> kPolicyKeys = {
      "phase", "learner", "mask_mode", "epsilon", "eta", "seeds", "phase2_steps", "eval_interval",
      "eval_episodes", "output_dir", "run_id", "transfer_goal", "policy_lr", "pg_rollout", "pg_epochs",
      "pg_minibatch", "pg_clip", "gae_lambda", "pg_max_grad_norm", "dqn_lr", "dqn_buffer_size", "dqn_batch_size",
      "exploration_initial", "exploration_final", "exploration_fraction", "learning_starts",
      "target_update_interval", "train_freq", "dqn_max_grad_norm"};
  json subset = to_json(c);
  for (const std::string& key : kPolicyKeys) subset.erase(key);
  return c.env + "-" + fnv1a_hex(subset.dump()).substr(0, 8);
}

std::string policy_tag(const RunConfig& c) {
  std::ostringstream out;
  out << c.learner << '-' << c.mask_mode;
  if (c.mask_mode == "soft") out << "-eta" << c.eta;
  else if (c.mask_mode == "learned" || c.mask_mode == "oracle") out << "-eps" << c.epsilon;
  return out.str();
}

}  // namespace npm::cli
