#include "npm/core/environment.hpp"

namespace npm {

namespace {

bool same_outcomes(const std::vector<Outcome>& a, const std::vector<Outcome>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].next_state != b[i].next_state || a[i].probability != b[i].probability) return false;
  }
  return true;
}

}  // namespace

ActionPartition partition_by_outcomes(const DiscreteEnvironment& env) {
  const int n = env.num_actions();
  std::vector<std::vector<Outcome>> rows;
  rows.reserve(n);
  for (ActionId a = 0; a < n; ++a) rows.push_back(env.outcomes(a));
  ActionPartition clusters;
  std::vector<int> owner(n, -1);
  for (ActionId a = 0; a < n; ++a) {
    if (owner[a] >= 0) continue;
    owner[a] = static_cast<int>(clusters.size());
    clusters.push_back({a});
    for (ActionId b = a + 1; b < n; ++b) {
      if (owner[b] < 0 && same_outcomes(rows[a], rows[b])) {
        owner[b] = owner[a];
        clusters.back().push_back(b);
      }
    }
  }
  return clusters;
}

}  // namespace npm
