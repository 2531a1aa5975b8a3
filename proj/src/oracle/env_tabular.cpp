#include "npm/oracle/env_tabular.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>

namespace npm::oracle {

TabularEnv env_to_tabular(Environment& env, double gamma) {
  auto* discrete = dynamic_cast<DiscreteEnvironment*>(&env);
  if (discrete == nullptr) throw std::invalid_argument("env_to_tabular: " + env.name() + " is not discrete");
  const std::uint64_t saved = discrete->state_code();
  const int num_actions = env.num_actions();

  std::vector<std::uint64_t> codes;
  std::unordered_map<std::uint64_t, int> index;
  std::vector<double> entry_reward;
  std::vector<bool> absorbing;
  std::vector<std::vector<std::vector<Outcome>>> rows;
  auto intern = [&](std::uint64_t code, double reward, bool goal) {
    auto [it, inserted] = index.emplace(code, static_cast<int>(codes.size()));
    if (inserted) {
      codes.push_back(code);
      entry_reward.push_back(reward);
      absorbing.push_back(goal);
    } else if (entry_reward[it->second] != reward) {
      throw std::logic_error("env_to_tabular: reward depends on more than the entered state");
    }
    return it->second;
  };

  std::deque<int> frontier;
  for (std::uint64_t code : discrete->initial_states()) {
    discrete->restore(code);
    frontier.push_back(intern(code, 0.0, discrete->at_goal()));
  }
  std::vector<bool> expanded;
  while (!frontier.empty()) {
    const int s = frontier.front();
    frontier.pop_front();
    if (static_cast<int>(expanded.size()) <= s) expanded.resize(s + 1, false);
    if (expanded[s]) continue;
    expanded[s] = true;
    if (static_cast<int>(rows.size()) <= s) rows.resize(s + 1);
    if (absorbing[s]) continue;
    discrete->restore(codes[s]);
    rows[s].resize(num_actions);
    for (int a = 0; a < num_actions; ++a) {
      rows[s][a] = discrete->outcomes(a);
      for (const Outcome& o : rows[s][a]) {
        const int before = static_cast<int>(codes.size());
        const int next = intern(o.next_state, o.reward, o.absorbing);
        if (next == before) frontier.push_back(next);
      }
    }
  }
  discrete->restore(saved);

  const int n = static_cast<int>(codes.size());
  TabularEnv out{TabularMDP(n + 1, num_actions, gamma), codes, index, n};
  for (int s = 0; s < n; ++s) {
    out.mdp.rewards()[s] = entry_reward[s];
    for (int a = 0; a < num_actions; ++a) {
      if (absorbing[s]) {
        out.mdp.set_row(s, a, {{n, 1.0}});
        continue;
      }
      SparseRow row;
      for (const Outcome& o : rows[s][a]) row.emplace_back(index.at(o.next_state), o.probability);
      out.mdp.set_row(s, a, std::move(row));
    }
  }
  out.mdp.rewards()[n] = 0.0;
  for (int a = 0; a < num_actions; ++a) out.mdp.set_row(n, a, {{n, 1.0}});
  return out;
}

mask::SimilarityMatrix state_kl_matrix(const DiscreteEnvironment& env) {
  const int n = env.num_actions();
  std::vector<std::vector<Outcome>> rows(n);
  for (int a = 0; a < n; ++a) rows[a] = env.outcomes(a);
  auto m = mask::SimilarityMatrix::zeros(n, env.state_label());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      double kl = 0.0;
      std::size_t k = 0;
      for (const Outcome& o : rows[i]) {
        while (k < rows[j].size() && rows[j][k].next_state < o.next_state) ++k;
        if (k == rows[j].size() || rows[j][k].next_state != o.next_state) {
          kl = std::numeric_limits<double>::infinity();
          break;
        }
        kl += o.probability * std::log(o.probability / rows[j][k].probability);
      }
      m.at(i, j) = kl;
    }
  }
  return m;
}

}  // namespace npm::oracle
