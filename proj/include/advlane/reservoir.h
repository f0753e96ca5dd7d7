#ifndef ADVLANE_RESERVOIR_H_
#define ADVLANE_RESERVOIR_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "advlane/env.h"

namespace advlane {

// Fixed-capacity uniform sample over every item ever inserted (Algorithm R).
template <typename T>
class ReservoirBuffer {
 public:
  explicit ReservoirBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw InvalidInput("reservoir capacity must be >= 1");
    items_.reserve(std::min<std::size_t>(capacity, 1u << 16));
  }

  void Insert(T item, Rng& rng) {
    ++seen_;
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
      return;
    }
    // Keep the new item with probability capacity / seen, in a uniform slot.
    const std::uint64_t j = std::uniform_int_distribution<std::uint64_t>(0, seen_ - 1)(rng);
    if (j < capacity_) items_[j] = std::move(item);
  }

  std::size_t capacity() const { return capacity_; }
  std::uint64_t seen() const { return seen_; }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const std::vector<T>& items() const { return items_; }

 private:
  std::size_t capacity_;
  std::uint64_t seen_ = 0;
  std::vector<T> items_;
};

struct ObsAction {
  std::vector<double> obs;
  std::vector<double> action;
};

using ExperienceBuffer = ReservoirBuffer<ObsAction>;

}  // namespace advlane

#endif  // ADVLANE_RESERVOIR_H_
