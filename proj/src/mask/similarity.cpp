#include "npm/mask/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace npm::mask {

SimilarityMatrix SimilarityMatrix::zeros(int num_actions, std::string state_key) {
  SimilarityMatrix m;
  m.state_key = std::move(state_key);
  m.num_actions = num_actions;
  m.values.assign(static_cast<std::size_t>(num_actions) * num_actions, 0.0);
  return m;
}

void ActionClusterSet::validate(int num_actions) const {
  if (clusters.size() != representatives.size())
    throw std::logic_error("cluster set: one representative per cluster required");
  std::vector<int> seen(num_actions, 0);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].empty()) throw std::logic_error("cluster set: empty cluster");
    for (ActionId a : clusters[c]) {
      if (a < 0 || a >= num_actions) throw std::logic_error("cluster set: action out of range");
      ++seen[a];
    }
    if (representatives[c] != *std::min_element(clusters[c].begin(), clusters[c].end()))
      throw std::logic_error("cluster set: representative must be the lowest member");
  }
  for (int count : seen)
    if (count != 1) throw std::logic_error("cluster set: clusters must partition the action set");
}

ActionClusterSet cluster(const SimilarityMatrix& m, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("cluster: epsilon must be positive");
  ActionClusterSet out;
  out.epsilon = epsilon;
  for (ActionId a = 0; a < m.num_actions; ++a) {
    bool placed = false;
    for (auto& members : out.clusters) {
      const bool fits = std::all_of(members.begin(), members.end(), [&](ActionId b) {
        return std::max(m.at(a, b), m.at(b, a)) < epsilon;
      });
      if (fits) {
        members.push_back(a);
        placed = true;
        break;
      }
    }
    if (!placed) {
      out.clusters.push_back({a});
      out.representatives.push_back(a);
    }
  }
  return out;
}

std::vector<ActionId> minimal_action_space(const ActionClusterSet& c) {
  std::vector<ActionId> reps = c.representatives;
  std::sort(reps.begin(), reps.end());
  return reps;
}

nlohmann::json to_json(const SimilarityMatrix& m, const ActionClusterSet& c) {
  nlohmann::json matrix = nlohmann::json::array();
  for (double v : m.values) {
    if (std::isinf(v)) matrix.push_back("Infinity");
    else matrix.push_back(v);
  }
  return {{"state_key", m.state_key},
          {"num_actions", m.num_actions},
          {"epsilon", c.epsilon},
          {"matrix", std::move(matrix)},
          {"clusters", c.clusters},
          {"representatives", c.representatives}};
}

}  // namespace npm::mask
