#include "npm/oracle/random_mdp.hpp"

#include <algorithm>
#include <stdexcept>

#include "npm/oracle/exact.hpp"

namespace npm::oracle {

std::vector<double> random_distribution(Rng& rng, int n, double zero_prob) {
  if (n < 1) throw std::invalid_argument("random_distribution: n must be positive");
  std::vector<double> p(n);
  double total = 0.0;
  for (double& v : p) {
    v = rng.bernoulli(zero_prob) ? 0.0 : rng.uniform(0.05, 1.0);
    total += v;
  }
  if (total == 0.0) {
    const std::size_t keep = rng.uniform_index(n);
    p[keep] = 1.0;
    total = 1.0;
  }
  for (double& v : p) v /= total;
  return p;
}

TabularMDP random_mdp(Rng& rng, int num_states, int num_actions, double gamma, double zero_prob) {
  TabularMDP mdp(num_states, num_actions, gamma);
  for (int s = 0; s < num_states; ++s) {
    mdp.rewards()[s] = rng.uniform();
    for (int a = 0; a < num_actions; ++a) mdp.set_dense_row(s, a, random_distribution(rng, num_states, zero_prob));
  }
  return mdp;
}

TabularPolicy random_policy(Rng& rng, int num_states, int num_actions) {
  TabularPolicy pi(num_states, num_actions);
  for (int s = 0; s < num_states; ++s) {
    const std::vector<double> row = random_distribution(rng, num_actions, 0.0);
    for (int a = 0; a < num_actions; ++a) pi(s, a) = row[a];
  }
  return pi;
}

namespace {

std::vector<double> mix(const std::vector<double>& base, const std::vector<double>& noise, double delta) {
  std::vector<double> out(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) out[i] = (1.0 - delta) * base[i] + delta * noise[i];
  return out;
}

}  // namespace

TabularMDP near_duplicate_mdp(Rng& rng, int num_states, int num_base_actions, int num_copies,
                              double gamma, double delta, double epsilon) {
  if (num_base_actions < 1 || num_copies < 0) throw std::invalid_argument("near_duplicate_mdp: bad action counts");
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("near_duplicate_mdp: delta must lie in [0, 1]");
  const int num_actions = num_base_actions + num_copies;
  TabularMDP mdp(num_states, num_actions, gamma);
  for (int s = 0; s < num_states; ++s) {
    mdp.rewards()[s] = rng.uniform();
    for (int a = 0; a < num_base_actions; ++a)
      mdp.set_dense_row(s, a, random_distribution(rng, num_states, a == 0 ? 0.0 : 0.3));
    const std::vector<double> base = mdp.dense_row(s, 0);
    std::vector<std::vector<double>> noise;
    for (int c = 0; c < num_copies; ++c) noise.push_back(random_distribution(rng, num_states, 0.0));

    // Shrink the perturbation until every pair among {0, copies} is epsilon-close.
    double d = delta;
    std::vector<std::vector<double>> rows;
    for (int attempt = 0;; ++attempt) {
      rows.assign(1, base);
      for (const auto& n : noise) rows.push_back(d == 0.0 ? base : mix(base, n, d));
      bool close = true;
      for (std::size_t i = 0; i < rows.size() && close; ++i)
        for (std::size_t j = 0; j < rows.size() && close; ++j)
          if (i != j && !(exact_kl(rows[i], rows[j]) < epsilon)) close = false;
      if (close) break;
      if (attempt > 60) throw std::runtime_error("near_duplicate_mdp: cannot satisfy epsilon");
      d *= 0.5;
    }
    for (int c = 0; c < num_copies; ++c) mdp.set_dense_row(s, num_base_actions + c, rows[c + 1]);
  }
  return mdp;
}

}  // namespace npm::oracle
