#include "npm/mask/phase1.hpp"

#include <set>
#include <stdexcept>

namespace npm::mask {

namespace {

void validate(const Phase1Config& c) {
  if (c.total_steps <= 0) throw std::invalid_argument("phase1: budget must be positive");
  if (c.rollout_length < 1 || c.batch_size < 1 || c.nvalue_interval < 1)
    throw std::invalid_argument("phase1: rollout_length, batch_size and nvalue_interval must be positive");
  if (c.inverse_updates < 0 || c.nvalue_updates < 0) throw std::invalid_argument("phase1: negative update count");
  if (c.output_weight_decay < 0.0) throw std::invalid_argument("phase1: negative weight decay");
  if (c.buffer_capacity == 0) throw std::invalid_argument("phase1: buffer capacity must be positive");
}

// Collection policy: uniform, or a (possibly curiosity-trained) network.
class Collector {
 public:
  Collector(Environment& env, const Phase1Config& config, Rng& rng)
      : env_(env), config_(config), net_(env.observation_size(), env.num_actions(), config.hidden,
                                         approx::Activation::kTanh, rng),
        policy_opt_(net_.policy, {config.curiosity_pg.learning_rate}),
        value_opt_(net_.value, {config.curiosity_pg.learning_rate}) {}

  std::vector<double> distribution(const Observation& obs) const {
    if (config_.uniform_collection)
      return std::vector<double>(env_.num_actions(), 1.0 / env_.num_actions());
    return net_.probs(obs, {});
  }

  // One step; returns the record and updates curiosity bookkeeping.
  TransitionRecord step(Rng& rng) {
    if (env_.episode_over()) env_.reset(rng);
    TransitionRecord rec;
    rec.state = env_.observation();
    rec.policy_dist = distribution(rec.state);
    rec.action = static_cast<ActionId>(rng.categorical(rec.policy_dist));
    const std::string key = env_.count_key();
    counter_.visit(key, rec.action);
    const StepResult r = env_.step(rec.action, rng);
    rec.next_state = r.observation;
    rec.reward = r.reward;
    rec.terminal = r.terminal && !r.truncated;
    if (config_.complex_task) {
      agents::RolloutStep s;
      s.obs = rec.state;
      s.action = rec.action;
      s.reward = curiosity_reward(counter_, key, rec.action);
      s.terminal = rec.terminal;
      s.done = r.terminal;
      if (r.truncated) s.bootstrap_value = net_.value_of(r.observation);
      s.log_prob = std::log(rec.policy_dist[rec.action]);
      s.value = net_.value_of(rec.state);
      curiosity_return_ += s.reward;
      rollout_.push_back(std::move(s));
      if (static_cast<int>(rollout_.size()) >= config_.curiosity_rollout) {
        const double last = env_.episode_over() ? 0.0 : net_.value_of(env_.observation());
        agents::pg_update(net_, policy_opt_, value_opt_, rollout_, last, config_.curiosity_pg, rng);
        rollout_.clear();
      }
    }
    return rec;
  }

  const VisitCounter& counter() const { return counter_; }
  double take_curiosity_return() {
    const double v = curiosity_return_;
    curiosity_return_ = 0.0;
    return v;
  }

 private:
  Environment& env_;
  const Phase1Config& config_;
  agents::PolicyNet net_;
  approx::AdamState policy_opt_;
  approx::AdamState value_opt_;
  VisitCounter counter_;
  std::vector<agents::RolloutStep> rollout_;
  double curiosity_return_ = 0.0;
};

}  // namespace

double train_inverse(InverseModel& model, approx::AdamState& opt, const ReplayBuffer& buffer, int steps,
                     int batch_size, Rng& rng, double output_weight_decay) {
  double total = 0.0;
  for (int k = 0; k < steps; ++k) {
    LossAndGrad lg = inverse_loss_and_grad(model, buffer.sample(batch_size, rng));
    approx::adam_step(model.net(), lg.grads, opt);
    if (output_weight_decay > 0.0)
      model.net().weights().back() *= 1.0 - opt.config().learning_rate * output_weight_decay;
    total += lg.loss;
  }
  return steps > 0 ? total / steps : 0.0;
}

double train_nvalue(NValueModel& model, approx::AdamState& opt, const InverseModel& inv, const ReplayBuffer& buffer,
                    int steps, int batch_size, Rng& rng) {
  double total = 0.0;
  for (int k = 0; k < steps; ++k) {
    LossAndGrad lg = nvalue_loss_and_grad(model, inv, buffer.sample(batch_size, rng));
    approx::adam_step(model.net(), lg.grads, opt);
    total += lg.loss;
  }
  return steps > 0 ? total / steps : 0.0;
}

Phase1Result phase1_train(Environment& env, const Phase1Config& config, Rng& rng) {
  validate(config);
  const int obs = env.observation_size();
  const int na = env.num_actions();
  Rng init = rng.derive(1);
  Phase1Result result{InverseModel(config.variant, obs, na, config.hidden, config.activation, init),
                      NValueModel(obs, na, config.hidden, config.activation, init),
                      {}, 0.0, 0.0, {}};
  result.inverse.net().weights().back().setZero();
  result.nvalue.net().weights().back().setZero();
  approx::AdamState inv_opt(result.inverse.net(), {config.inverse_lr});
  approx::AdamState nv_opt(result.nvalue.net(), {config.nvalue_lr});
  Rng collect_rng = rng.derive(2);
  Rng train_rng = rng.derive(3);
  Collector collector(env, config, init);
  ReplayBuffer buffer(config.buffer_capacity);
  std::set<std::string> visited;

  env.reset(collect_rng);
  long steps = 0;
  double inv_loss = 0.0, nv_loss = 0.0;
  int inv_count = 0, nv_count = 0;
  long next_log = config.log_interval;
  for (long iteration = 0; steps < config.total_steps; ++iteration) {
    for (int k = 0; k < config.rollout_length && steps < config.total_steps; ++k, ++steps) {
      if (env.episode_over()) env.reset(collect_rng);
      visited.insert(env.count_key());
      buffer.push(collector.step(collect_rng));
    }
    if (config.anneal_lr) {
      const double progress = static_cast<double>(steps) / static_cast<double>(config.total_steps);
      const double frac = 1.0 - (1.0 - config.final_lr_fraction) * progress;
      inv_opt.set_learning_rate(config.inverse_lr * frac);
      nv_opt.set_learning_rate(config.nvalue_lr * frac);
    }
    if (config.inverse_updates > 0) {
      inv_loss += train_inverse(result.inverse, inv_opt, buffer, config.inverse_updates, config.batch_size, train_rng,
                                config.output_weight_decay);
      ++inv_count;
    }
    if (iteration % config.nvalue_interval == 0 && config.nvalue_updates > 0) {
      nv_loss += train_nvalue(result.nvalue, nv_opt, result.inverse, buffer, config.nvalue_updates,
                              config.batch_size, train_rng);
      ++nv_count;
    }
    if (steps >= next_log || steps >= config.total_steps) {
      result.log.push_back({steps, inv_count ? inv_loss / inv_count : 0.0, nv_count ? nv_loss / nv_count : 0.0,
                            collector.take_curiosity_return(), static_cast<long>(visited.size())});
      inv_loss = nv_loss = 0.0;
      inv_count = nv_count = 0;
      while (next_log <= steps) next_log += config.log_interval;
    }
  }

  if (config.heldout_steps > 0) {
    ReplayBuffer heldout(static_cast<std::size_t>(config.heldout_steps));
    Rng heldout_rng = rng.derive(4);
    for (int k = 0; k < config.heldout_steps; ++k) heldout.push(collector.step(heldout_rng));
    ReplayBuffer::Batch all;
    for (std::size_t k = 0; k < heldout.size(); ++k) all.push_back(&heldout.at(k));
    result.heldout_accuracy = inverse_accuracy(result.inverse, all);
    result.heldout_log_likelihood = inverse_log_likelihood(result.inverse, all);
  }
  result.visited.assign(visited.begin(), visited.end());
  return result;
}

}  // namespace npm::mask
