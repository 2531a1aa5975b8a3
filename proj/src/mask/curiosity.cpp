#include "npm/mask/curiosity.hpp"

#include <cmath>
#include <stdexcept>

namespace npm::mask {

namespace {
std::string pair_key(const std::string& key, ActionId a) { return key + '#' + std::to_string(a); }
}  // namespace

long VisitCounter::visit(const std::string& key, ActionId a) {
  ++states_[key];
  return ++pairs_[pair_key(key, a)];
}

long VisitCounter::count(const std::string& key, ActionId a) const {
  const auto it = pairs_.find(pair_key(key, a));
  return it == pairs_.end() ? 0 : it->second;
}

long VisitCounter::state_count(const std::string& key) const {
  const auto it = states_.find(key);
  return it == states_.end() ? 0 : it->second;
}

double curiosity_reward(const VisitCounter& counter, const std::string& key, ActionId a) {
  const long n = counter.count(key, a);
  if (n < 1) throw std::logic_error("curiosity reward queried for an unvisited pair");
  return 1.0 / std::sqrt(static_cast<double>(n));
}

}  // namespace npm::mask
