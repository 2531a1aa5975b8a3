#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "npm/core/types.hpp"

namespace npm::mask {

/// Per-state |A|x|A| matrix of similarity factors (KL divergences between
/// successor distributions). Entry (i, j) compares action i against j.
/// Support mismatch is stored as +infinity.
struct SimilarityMatrix {
  std::string state_key;
  int num_actions = 0;
  std::vector<double> values;  // row-major

  static SimilarityMatrix zeros(int num_actions, std::string state_key = {});

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * num_actions + j]; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * num_actions + j]; }
};

/// Partition of the action set at one state, one representative per cluster.
struct ActionClusterSet {
  std::vector<std::vector<ActionId>> clusters;
  std::vector<ActionId> representatives;
  double epsilon = 0.0;

  /// Throws std::logic_error unless clusters partition [0, num_actions) and
  /// each representative is the lowest member of its cluster.
  void validate(int num_actions) const;
};

/// Greedy first-fit partition: actions are scanned in ascending order and
/// join the first cluster whose every member b satisfies
/// max(m[a][b], m[b][a]) < epsilon; otherwise they open a new cluster.
ActionClusterSet cluster(const SimilarityMatrix& m, double epsilon);

/// Sorted representatives (the minimal action space).
std::vector<ActionId> minimal_action_space(const ActionClusterSet& c);

/// Export record: {state_key, epsilon, matrix, clusters, representatives}.
/// Infinite entries are written as the string "Infinity".
nlohmann::json to_json(const SimilarityMatrix& m, const ActionClusterSet& c);

}  // namespace npm::mask
