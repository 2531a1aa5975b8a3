#include "npm/oracle/tabular_mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace npm::oracle {

TabularMDP::TabularMDP(int num_states, int num_actions, double gamma)
    : num_states_(num_states), num_actions_(num_actions), gamma_(gamma) {
  if (num_states < 1 || num_actions < 1) throw std::invalid_argument("mdp: empty state or action set");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("mdp: gamma must lie in [0, 1)");
  rows_.resize(static_cast<std::size_t>(num_states) * num_actions);
  rewards_.assign(num_states, 0.0);
}

std::size_t TabularMDP::index(int s, int a) const {
  if (s < 0 || s >= num_states_ || a < 0 || a >= num_actions_)
    throw std::out_of_range("mdp: state or action out of range");
  return static_cast<std::size_t>(s) * num_actions_ + a;
}

void TabularMDP::set_row(int s, int a, SparseRow row) {
  std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  SparseRow merged;
  for (const auto& [next, p] : row) {
    if (next < 0 || next >= num_states_) throw std::out_of_range("mdp: successor out of range");
    if (p == 0.0) continue;
    if (!merged.empty() && merged.back().first == next) merged.back().second += p;
    else merged.emplace_back(next, p);
  }
  rows_[index(s, a)] = std::move(merged);
}

void TabularMDP::set_dense_row(int s, int a, std::span<const double> probs) {
  if (static_cast<int>(probs.size()) != num_states_) throw std::invalid_argument("mdp: dense row size");
  SparseRow row;
  for (int i = 0; i < num_states_; ++i)
    if (probs[i] != 0.0) row.emplace_back(i, probs[i]);
  rows_[index(s, a)] = std::move(row);
}

std::vector<double> TabularMDP::dense_row(int s, int a) const {
  std::vector<double> out(num_states_, 0.0);
  for (const auto& [next, p] : row(s, a)) out[next] = p;
  return out;
}

double TabularMDP::prob(int s, int a, int next) const {
  const auto& r = row(s, a);
  const auto it = std::lower_bound(r.begin(), r.end(), next,
                                   [](const auto& entry, int key) { return entry.first < key; });
  return (it != r.end() && it->first == next) ? it->second : 0.0;
}

double TabularMDP::r_max() const { return *std::max_element(rewards_.begin(), rewards_.end()); }

void TabularMDP::validate() const {
  for (int s = 0; s < num_states_; ++s) {
    if (!std::isfinite(rewards_[s]) || rewards_[s] < 0.0)
      throw std::invalid_argument("mdp: reward must be finite and non-negative");
    for (int a = 0; a < num_actions_; ++a) {
      double total = 0.0;
      for (const auto& [next, p] : row(s, a)) {
        if (!(p >= 0.0)) throw std::invalid_argument("mdp: negative transition probability");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("mdp: row (" + std::to_string(s) + ", " + std::to_string(a) +
                                    ") does not sum to 1");
    }
  }
}

TabularPolicy::TabularPolicy(int num_states, int num_actions)
    : num_states_(num_states), num_actions_(num_actions),
      probs_(static_cast<std::size_t>(num_states) * num_actions, 0.0) {}

TabularPolicy TabularPolicy::uniform(int num_states, int num_actions) {
  TabularPolicy pi(num_states, num_actions);
  std::fill(pi.probs_.begin(), pi.probs_.end(), 1.0 / num_actions);
  return pi;
}

void TabularPolicy::validate() const {
  for (int s = 0; s < num_states_; ++s) {
    double total = 0.0;
    for (double p : row(s)) {
      if (!(p >= 0.0)) throw std::invalid_argument("policy: negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("policy: row does not sum to 1");
  }
}

}  // namespace npm::oracle
