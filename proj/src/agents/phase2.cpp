#include "npm/agents/phase2.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "npm/agents/masking.hpp"
#include "npm/approx/checkpoint.hpp"

namespace npm::agents {

namespace {

struct Window {
  double mask_total = 0.0;
  long mask_count = 0;
  double loss_total = 0.0;
  long loss_count = 0;

  void add_mask(std::size_t size) {
    mask_total += static_cast<double>(size);
    ++mask_count;
  }
  void add_loss(double loss) {
    loss_total += loss;
    ++loss_count;
  }
};

EvalRow base_row(const Phase2Config& c, const MaskProvider& masks, long steps) {
  EvalRow row;
  row.run_id = c.run_id;
  row.env = c.env_name;
  row.learner = c.learner;
  row.mask_mode = to_string(masks.mode());
  row.epsilon = c.epsilon;
  row.seed = c.seed;
  row.env_steps = steps;
  return row;
}

ActionId pg_greedy(const PolicyNet& net, const Environment& env, MaskProvider& masks) {
  const std::vector<double> probs = net.probs(env.observation(), masks.logit_bias(env));
  return static_cast<ActionId>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

class EpisodeTracker {
 public:
  void step(double reward, bool success, std::size_t mask_size) {
    ret_ += reward;
    success_ = success_ || success;
    mask_total_ += static_cast<double>(mask_size);
    ++length_;
  }
  void finish(long env_steps, std::vector<EpisodeRow>& out) {
    out.push_back({env_steps, ret_, success_, length_ ? mask_total_ / length_ : 0.0});
    *this = EpisodeTracker();
  }

 private:
  double ret_ = 0.0;
  bool success_ = false;
  double mask_total_ = 0.0;
  long length_ = 0;
};

Phase2Result train_dqn(Environment& env, MaskProvider& masks, const Phase2Config& c) {
  const DqnConfig& d = c.dqn;
  Rng rng(c.seed);
  Rng init = rng.derive(11);
  Rng act_rng = rng.derive(12);
  Rng env_rng = rng.derive(13);
  Rng sample_rng = rng.derive(14);
  Rng eval_rng = rng.derive(15);
  QNet qnet(env.observation_size(), env.num_actions(), c.hidden, c.activation, d.learning_rate, init);
  ReplayBuffer buffer(std::min<std::size_t>(d.buffer_size, static_cast<std::size_t>(c.total_steps)));
  Phase2Result result;
  Window window;
  EpisodeTracker tracker;

  env.reset(env_rng);
  std::vector<ActionId> valid = masks.valid_actions(env);
  const int na = env.num_actions();
  for (long t = 1; t <= c.total_steps; ++t) {
    const double explore = exploration_rate(d, t - 1, c.total_steps);
    TransitionRecord rec;
    rec.state = env.observation();
    const ActionId greedy = masked_argmax(qnet.q_values(rec.state), valid);
    rec.action = act_rng.bernoulli(explore) ? valid[act_rng.uniform_index(valid.size())] : greedy;
    rec.policy_dist.assign(na, 0.0);
    for (ActionId a : valid) rec.policy_dist[a] += explore / static_cast<double>(valid.size());
    rec.policy_dist[greedy] += 1.0 - explore;
    window.add_mask(valid.size());
    const StepResult r = env.step(rec.action, env_rng);
    tracker.step(r.reward, r.success, valid.size());
    rec.next_state = r.observation;
    rec.reward = r.reward;
    rec.terminal = r.terminal && !r.truncated;
    if (!rec.terminal) rec.next_valid = masks.valid_actions(env);
    std::vector<ActionId> next_valid = rec.next_valid;
    buffer.push(std::move(rec));
    if (r.terminal) {
      tracker.finish(t, result.episodes);
      env.reset(env_rng);
      valid = masks.valid_actions(env);
    } else {
      valid = std::move(next_valid);
    }
    if (t > d.learning_starts && t % d.train_freq == 0)
      window.add_loss(dqn_update(qnet, buffer.sample(d.batch_size, sample_rng), d.gamma, d.max_grad_norm));
    if (t % d.target_update_interval == 0) qnet.sync_target();
    if (t % c.eval_interval == 0 || t == c.total_steps) {
      EvalRow row = base_row(c, masks, t);
      const EvalSummary summary =
          evaluate_greedy(env, masks, c.eval_episodes, eval_rng, [&](const Environment& e, const std::vector<ActionId>& v) {
            return masked_argmax(qnet.q_values(e.observation()), v);
          });
      row.episode_return_mean = summary.return_mean;
      row.success_rate = summary.success_rate;
      row.mask_size_mean = window.mask_count ? window.mask_total / window.mask_count : 0.0;
      row.loss = window.loss_count ? window.loss_total / window.loss_count : 0.0;
      result.evals.push_back(row);
      window = Window();
    }
  }
  result.checkpoint = {{"learner", "dqn"},
                       {"online", approx::to_json(qnet.online(), &qnet.optimizer())},
                       {"target", approx::to_json(qnet.target())}};
  return result;
}

Phase2Result train_pg(Environment& env, MaskProvider& masks, const Phase2Config& c) {
  Rng rng(c.seed);
  Rng init = rng.derive(21);
  Rng act_rng = rng.derive(22);
  Rng env_rng = rng.derive(23);
  Rng update_rng = rng.derive(24);
  Rng eval_rng = rng.derive(25);
  PolicyNet net(env.observation_size(), env.num_actions(), c.hidden, c.activation, init);
  approx::AdamState policy_opt(net.policy, {c.pg.learning_rate});
  approx::AdamState value_opt(net.value, {c.pg.learning_rate});
  Phase2Result result;
  Window window;
  EpisodeTracker tracker;
  std::vector<RolloutStep> rollout;

  env.reset(env_rng);
  for (long t = 1; t <= c.total_steps; ++t) {
    RolloutStep step;
    step.obs = env.observation();
    step.logit_bias = masks.logit_bias(env);
    std::size_t allowed = 0;
    for (double b : step.logit_bias) allowed += std::isfinite(b);
    window.add_mask(allowed);
    const std::vector<double> p = net.probs(step.obs, step.logit_bias);
    step.action = static_cast<ActionId>(act_rng.categorical(p));
    step.log_prob = std::log(p[step.action]);
    step.value = net.value_of(step.obs);
    const StepResult r = env.step(step.action, env_rng);
    tracker.step(r.reward, r.success, allowed);
    step.reward = r.reward;
    step.terminal = r.terminal && !r.truncated;
    step.done = r.terminal;
    if (r.truncated) step.bootstrap_value = net.value_of(r.observation);
    rollout.push_back(std::move(step));
    if (r.terminal) {
      tracker.finish(t, result.episodes);
      env.reset(env_rng);
    }
    if (static_cast<int>(rollout.size()) >= c.pg_rollout || t == c.total_steps) {
      const double last = net.value_of(env.observation());
      const PgStats stats = pg_update(net, policy_opt, value_opt, rollout, last, c.pg, update_rng);
      window.add_loss(stats.policy_loss);
      rollout.clear();
    }
    if (t % c.eval_interval == 0 || t == c.total_steps) {
      EvalRow row = base_row(c, masks, t);
      const EvalSummary summary =
          evaluate_greedy(env, masks, c.eval_episodes, eval_rng, [&](const Environment& e, const std::vector<ActionId>&) {
            return pg_greedy(net, e, masks);
          });
      row.episode_return_mean = summary.return_mean;
      row.success_rate = summary.success_rate;
      row.mask_size_mean = window.mask_count ? window.mask_total / window.mask_count : 0.0;
      row.loss = window.loss_count ? window.loss_total / window.loss_count : 0.0;
      result.evals.push_back(row);
      window = Window();
    }
  }
  result.checkpoint = {{"learner", "pg"},
                       {"policy", approx::to_json(net.policy, &policy_opt)},
                       {"value", approx::to_json(net.value, &value_opt)}};
  return result;
}

}  // namespace

EvalSummary evaluate_greedy(const Environment& env, MaskProvider& masks, int episodes, Rng& rng,
                            const GreedyPolicy& act) {
  if (episodes <= 0) throw std::invalid_argument("evaluate_greedy: episodes must be positive");
  std::unique_ptr<Environment> eval_env = env.clone();
  EvalSummary out;
  double mask_total = 0.0;
  long decisions = 0;
  for (int e = 0; e < episodes; ++e) {
    eval_env->reset(rng);
    double ret = 0.0;
    bool success = false;
    while (!eval_env->episode_over()) {
      const std::vector<ActionId> valid = masks.valid_actions(*eval_env);
      mask_total += static_cast<double>(valid.size());
      ++decisions;
      const StepResult r = eval_env->step(act(*eval_env, valid), rng);
      ret += r.reward;
      success = success || r.success;
    }
    out.return_mean += ret;
    out.success_rate += success;
  }
  out.return_mean /= episodes;
  out.success_rate /= episodes;
  out.mask_size_mean = decisions ? mask_total / decisions : 0.0;
  return out;
}

GreedyPolicy greedy_policy_from_checkpoint(const nlohmann::json& checkpoint, MaskProvider& masks) {
  const std::string learner = checkpoint.at("learner").get<std::string>();
  if (learner == "dqn") {
    auto net = std::make_shared<approx::Mlp>(approx::mlp_from_json(checkpoint.at("online")));
    return [net](const Environment& env, const std::vector<ActionId>& valid) {
      const Eigen::VectorXd q = net->predict(env.observation());
      return masked_argmax(std::vector<double>(q.data(), q.data() + q.size()), valid);
    };
  }
  if (learner == "pg") {
    auto net = std::make_shared<PolicyNet>(approx::mlp_from_json(checkpoint.at("policy")),
                                           approx::mlp_from_json(checkpoint.at("value")));
    return [net, &masks](const Environment& env, const std::vector<ActionId>&) { return pg_greedy(*net, env, masks); };
  }
  throw std::invalid_argument("checkpoint: unknown learner " + learner);
}

Phase2Result phase2_train(Environment& env, MaskProvider& masks, const Phase2Config& config) {
  if (config.total_steps <= 0 || config.eval_interval <= 0 || config.eval_episodes <= 0)
    throw std::invalid_argument("phase2: budgets must be positive");
  if (config.learner == "dqn") {
    if (masks.mode() == MaskMode::kSoft) throw std::invalid_argument("phase2: the soft mask applies to the pg learner only");
    return train_dqn(env, masks, config);
  }
  if (config.learner == "pg") return train_pg(env, masks, config);
  throw std::invalid_argument("phase2: unknown learner " + config.learner);
}

std::string metrics_csv_header() {
  return "run_id,env,learner,mask_mode,epsilon,seed,env_steps,episode_return_mean,success_rate,mask_size_mean,loss";
}

std::string to_csv(const EvalRow& r) {
  std::ostringstream out;
  out.precision(10);
  out << r.run_id << ',' << r.env << ',' << r.learner << ',' << r.mask_mode << ',' << r.epsilon << ',' << r.seed << ','
      << r.env_steps << ',' << r.episode_return_mean << ',' << r.success_rate << ',' << r.mask_size_mean << ','
      << r.loss;
  return out.str();
}

long steps_to_success(const std::vector<EvalRow>& rows, double level) {
  for (const EvalRow& r : rows)
    if (r.success_rate >= level) return r.env_steps;
  return -1;
}

}  // namespace npm::agents
