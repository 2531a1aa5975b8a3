#pragma once

#include <string>
#include <unordered_map>

#include "npm/core/types.hpp"

namespace npm::mask {

/// Visit counts per state key and per (state key, action).
class VisitCounter {
 public:
  /// Records one visit of (key, a) and returns the updated pair count.
  long visit(const std::string& key, ActionId a);
  long count(const std::string& key, ActionId a) const;
  long state_count(const std::string& key) const;
  std::size_t distinct_states() const { return states_.size(); }

 private:
  std::unordered_map<std::string, long> pairs_;
  std::unordered_map<std::string, long> states_;
};

/// count(key, a)^(-1/2). Throws std::logic_error if the pair was never visited.
double curiosity_reward(const VisitCounter& counter, const std::string& key, ActionId a);

}  // namespace npm::mask
