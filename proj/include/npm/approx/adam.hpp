#pragma once

#include <cstdint>

#include "npm/approx/mlp.hpp"

namespace npm::approx {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam moments for one network.
class AdamState {
 public:
  AdamState(const Mlp& net, AdamConfig config);
  /// Restores a saved state.
  AdamState(AdamConfig config, std::int64_t steps, MlpGradients first, MlpGradients second);

  const AdamConfig& config() const { return config_; }
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  std::int64_t steps() const { return steps_; }
  std::int64_t skipped() const { return skipped_; }
  const MlpGradients& first_moment() const { return m_; }
  const MlpGradients& second_moment() const { return v_; }

 private:
  friend bool adam_step(Mlp& net, const MlpGradients& grads, AdamState& state);

  AdamConfig config_;
  std::int64_t steps_ = 0;
  std::int64_t skipped_ = 0;
  MlpGradients m_;
  MlpGradients v_;
};

/// Applies one Adam update. A gradient with non-finite entries is rejected:
/// nothing changes except the skipped counter, and false is returned.
bool adam_step(Mlp& net, const MlpGradients& grads, AdamState& state);

}  // namespace npm::approx
