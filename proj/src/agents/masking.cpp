#include "npm/agents/masking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "npm/approx/softmax.hpp"

namespace npm::agents {

ActionId masked_argmax(std::span<const double> q, std::span<const ActionId> valid) {
  if (valid.empty()) throw std::invalid_argument("masked_argmax: empty valid set");
  ActionId best = -1;
  for (ActionId a : valid) {
    if (a < 0 || static_cast<std::size_t>(a) >= q.size()) throw std::invalid_argument("masked_argmax: action out of range");
    if (best < 0 || q[a] > q[best] || (q[a] == q[best] && a < best)) best = a;
  }
  return best;
}

std::vector<double> masked_probs(std::span<const double> pi, std::span<const ActionId> invalid) {
  std::vector<double> out(pi.begin(), pi.end());
  for (ActionId a : invalid) {
    if (a < 0 || static_cast<std::size_t>(a) >= out.size()) throw std::invalid_argument("masked_probs: action out of range");
    out[a] = 0.0;
  }
  double remaining = 0.0;
  for (double p : out) remaining += p;
  if (!(remaining > 0.0)) throw std::invalid_argument("masked_probs: no probability mass on valid actions");
  for (double& p : out) p /= remaining;
  return out;
}

std::vector<double> soft_mask_bias(const mask::SimilarityMatrix& m, double eta) {
  const int n = m.num_actions;
  if (n < 2) throw std::invalid_argument("soft mask needs at least two actions");
  if (!std::isfinite(eta)) throw std::invalid_argument("soft mask: eta must be finite");
  std::vector<double> bias(n, 0.0);
  if (eta == 0.0) return bias;
  for (int i = 0; i < n; ++i) {
    double total = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) total += m.at(i, j);
    bias[i] = eta * total / (n - 1);
  }
  return bias;
}

std::vector<double> soft_mask_probs(std::span<const double> pi, const mask::SimilarityMatrix& m, double eta) {
  if (static_cast<int>(pi.size()) != m.num_actions) throw std::invalid_argument("soft mask: size mismatch");
  const std::vector<double> bias = soft_mask_bias(m, eta);
  if (std::all_of(bias.begin(), bias.end(), [&](double b) { return b == bias.front(); }))
    return {pi.begin(), pi.end()};
  std::vector<double> logw(pi.size());
  for (std::size_t i = 0; i < pi.size(); ++i)
    logw[i] = pi[i] > 0.0 ? std::log(pi[i]) + bias[i] : -std::numeric_limits<double>::infinity();
  return approx::softmax(logw);
}

std::vector<double> hard_mask_bias(int num_actions, std::span<const ActionId> valid) {
  std::vector<double> bias(num_actions, -std::numeric_limits<double>::infinity());
  for (ActionId a : valid) bias.at(a) = 0.0;
  return bias;
}

std::vector<ActionId> complement(int num_actions, std::span<const ActionId> valid) {
  std::vector<bool> keep(num_actions, false);
  for (ActionId a : valid) keep.at(a) = true;
  std::vector<ActionId> out;
  for (ActionId a = 0; a < num_actions; ++a)
    if (!keep[a]) out.push_back(a);
  return out;
}

}  // namespace npm::agents
