#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hidjam/state_matrix.hpp"
#include "hidjam/types.hpp"

namespace hidjam::dqn {

struct Experience {
  StateMatrix state;
  Channel action = kNone;
  double reward = 0.0;
  StateMatrix next_state;
};

// Bounded FIFO of experiences; sampling is uniform with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    storage_.reserve(capacity);
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return storage_.size(); }
  bool empty() const { return storage_.empty(); }

  void push(Experience e) {
    if (!e.state.same_shape(e.next_state)) throw std::invalid_argument("Experience: state shapes differ");
    if (e.action < 1 || e.action > e.state.channels()) throw std::invalid_argument("Experience: action out of range");
    if (!std::isfinite(e.reward)) throw std::invalid_argument("Experience: reward not finite");
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(e));
    } else {
      storage_[next_] = std::move(e);
    }
    next_ = (next_ + 1) % capacity_;
  }

  // Position 0 is the oldest experience still stored.
  const Experience& at(std::size_t i) const {
    if (storage_.size() < capacity_) return storage_.at(i);
    return storage_.at((next_ + i) % capacity_);
  }

  std::size_t sample_index(Rng& rng) const {
    if (storage_.empty()) throw std::logic_error("ReplayBuffer: sampling from an empty buffer");
    return std::uniform_int_distribution<std::size_t>(0, storage_.size() - 1)(rng);
  }

  std::vector<const Experience*> sample(std::size_t batch, Rng& rng) const {
    std::vector<const Experience*> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) out.push_back(&storage_[sample_index(rng)]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::vector<Experience> storage_;
  std::size_t next_ = 0;
};

}  // namespace hidjam::dqn
