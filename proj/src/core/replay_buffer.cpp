#include "npm/core/replay_buffer.hpp"

#include <stdexcept>

namespace npm {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
}

void ReplayBuffer::push(TransitionRecord rec) {
  rec.validate();
  if (records_.size() < capacity_) {
    records_.push_back(std::move(rec));
    return;
  }
  records_[head_] = std::move(rec);
  head_ = (head_ + 1) % capacity_;
}

ReplayBuffer::Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  if (records_.empty()) throw std::logic_error("cannot sample from an empty replay buffer");
  Batch batch;
  batch.reserve(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i)
    batch.push_back(&records_[rng.uniform_index(records_.size())]);
  return batch;
}

const TransitionRecord& ReplayBuffer::at(std::size_t i) const {
  if (i >= records_.size()) throw std::out_of_range("replay buffer index");
  return records_[(head_ + i) % records_.size()];
}

void ReplayBuffer::clear() {
  records_.clear();
  head_ = 0;
}

}  // namespace npm
