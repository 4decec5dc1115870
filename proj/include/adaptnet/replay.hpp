#pragma once

#include <cstddef>
#include <vector>

#include "adaptnet/error.hpp"
#include "adaptnet/rng.hpp"

namespace adaptnet {

/// Fixed-capacity ring buffer; the oldest entry is overwritten when full.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw InvalidInput("ReplayBuffer: capacity must be positive");
    entries_.reserve(std::min<std::size_t>(capacity, 4096));
  }

  void push(T entry) {
    if (entries_.size() < capacity_) {
      entries_.push_back(std::move(entry));
    } else {
      entries_[cursor_] = std::move(entry);
    }
    cursor_ = (cursor_ + 1) % capacity_;
  }

  /// Uniform draw with replacement over stored entries.
  std::vector<const T*> sample(std::size_t count, Rng& rng) const {
    if (entries_.empty()) throw UsageError("ReplayBuffer::sample: buffer is empty");
    std::vector<const T*> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(&entries_[rng.uniform_index(entries_.size())]);
    return out;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t cursor() const noexcept { return cursor_; }
  bool empty() const noexcept { return entries_.empty(); }
  const T& operator[](std::size_t i) const { return entries_.at(i); }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<T> entries_;
};

}  // namespace adaptnet
