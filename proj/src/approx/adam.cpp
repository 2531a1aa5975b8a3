#include "npm/approx/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace npm::approx {

AdamState::AdamState(const Mlp& net, AdamConfig config)
    : config_(config), m_(net.zero_gradients()), v_(net.zero_gradients()) {}

AdamState::AdamState(AdamConfig config, std::int64_t steps, MlpGradients first, MlpGradients second)
    : config_(config), steps_(steps), m_(std::move(first)), v_(std::move(second)) {}

bool adam_step(Mlp& net, const MlpGradients& grads, AdamState& state) {
  if (grads.weights.size() != net.weights().size())
    throw std::invalid_argument("adam_step: gradient shape mismatch");
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    if (grads.weights[l].rows() != net.weights()[l].rows() ||
        grads.weights[l].cols() != net.weights()[l].cols() ||
        grads.biases[l].size() != net.biases()[l].size())
      throw std::invalid_argument("adam_step: gradient shape mismatch");
  }
  if (!grads.all_finite()) {
    ++state.skipped_;
    return false;
  }
  const auto& cfg = state.config_;
  ++state.steps_;
  const double t = static_cast<double>(state.steps_);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  const double step = cfg.learning_rate / correction1;
  const double root2 = std::sqrt(correction2);
  const auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    param.array() -= step * m.array() / (v.array().sqrt() / root2 + cfg.epsilon);
  };
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    update(net.weights()[l], state.m_.weights[l], state.v_.weights[l], grads.weights[l]);
    update(net.biases()[l], state.m_.biases[l], state.v_.biases[l], grads.biases[l]);
  }
  net.clear_cache();
  return true;
}

}  // namespace npm::approx
