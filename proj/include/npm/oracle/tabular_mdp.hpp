#pragma once

#include <span>
#include <utility>
#include <vector>

namespace npm::oracle {

/// Sparse successor distribution: (next state, probability) sorted by state.
using SparseRow = std::vector<std::pair<int, double>>;

/// Finite MDP with state-only rewards in [0, r_max].
class TabularMDP {
 public:
  TabularMDP(int num_states, int num_actions, double gamma);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  double gamma() const { return gamma_; }

  /// Stores P(.|s, a); entries are merged by state and zeros dropped.
  void set_row(int s, int a, SparseRow row);
  void set_dense_row(int s, int a, std::span<const double> probs);
  const SparseRow& row(int s, int a) const { return rows_[index(s, a)]; }
  std::vector<double> dense_row(int s, int a) const;
  double prob(int s, int a, int next) const;

  std::vector<double>& rewards() { return rewards_; }
  const std::vector<double>& rewards() const { return rewards_; }
  double r_max() const;

  /// Throws std::invalid_argument unless every row sums to 1 within 1e-12,
  /// probabilities are non-negative and rewards finite and non-negative.
  void validate() const;

 private:
  std::size_t index(int s, int a) const;

  int num_states_;
  int num_actions_;
  double gamma_;
  std::vector<SparseRow> rows_;
  std::vector<double> rewards_;
};

/// Row-stochastic S x A policy matrix.
class TabularPolicy {
 public:
  TabularPolicy(int num_states, int num_actions);
  static TabularPolicy uniform(int num_states, int num_actions);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  double operator()(int s, int a) const { return probs_[static_cast<std::size_t>(s) * num_actions_ + a]; }
  double& operator()(int s, int a) { return probs_[static_cast<std::size_t>(s) * num_actions_ + a]; }
  std::span<const double> row(int s) const {
    return {probs_.data() + static_cast<std::size_t>(s) * num_actions_, static_cast<std::size_t>(num_actions_)};
  }
  void validate() const;

 private:
  int num_states_;
  int num_actions_;
  std::vector<double> probs_;
};

}  // namespace npm::oracle
