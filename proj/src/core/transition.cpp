#include "npm/core/transition.hpp"

#include <cmath>
#include <stdexcept>

namespace npm {

void TransitionRecord::validate() const {
  if (!std::isfinite(reward)) throw std::invalid_argument("transition: non-finite reward");
  if (policy_dist.empty()) throw std::invalid_argument("transition: missing policy_dist");
  if (action < 0 || static_cast<std::size_t>(action) >= policy_dist.size())
    throw std::invalid_argument("transition: action outside policy_dist support");
  double total = 0.0;
  for (double p : policy_dist) {
    if (!(p >= 0.0)) throw std::invalid_argument("transition: negative policy probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("transition: policy_dist does not sum to 1");
  for (double v : state)
    if (!std::isfinite(v)) throw std::invalid_argument("transition: non-finite state");
  for (double v : next_state)
    if (!std::isfinite(v)) throw std::invalid_argument("transition: non-finite next_state");
  for (ActionId a : next_valid)
    if (a < 0 || static_cast<std::size_t>(a) >= policy_dist.size())
      throw std::invalid_argument("transition: next_valid action out of range");
}

}  // namespace npm
