#pragma once

#include <cstddef>
#include <vector>

#include "npm/core/rng.hpp"
#include "npm/core/transition.hpp"

namespace npm {

/// Bounded FIFO of transitions with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  using Batch = std::vector<const TransitionRecord*>;

  explicit ReplayBuffer(std::size_t capacity);

  /// Validates and stores `rec`, evicting the oldest record when full.
  void push(TransitionRecord rec);
  Batch sample(std::size_t batch_size, Rng& rng) const;

  std::size_t size() const { return records_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return records_.empty(); }
  /// i-th record in insertion order (0 = oldest).
  const TransitionRecord& at(std::size_t i) const;
  void clear();

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // position of the oldest record once full
  std::vector<TransitionRecord> records_;
};

}  // namespace npm
