#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>

namespace rfq::pipeline {

enum class DropPolicy { kDropNewest, kDropOldest };

/// Bounded FIFO. When full, either the incoming element or the oldest one
/// is discarded, and the drop is counted.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity = 64, DropPolicy policy = DropPolicy::kDropNewest)
      : capacity_(capacity), policy_(policy) {}

  /// Returns false when an element (this one or the oldest) was dropped.
  bool push(T item) {
    if (items_.size() < capacity_) {
      items_.push_back(std::move(item));
      return true;
    }
    ++drops_;
    if (policy_ == DropPolicy::kDropOldest && capacity_ > 0) {
      items_.pop_front();
      items_.push_back(std::move(item));
    }
    return false;
  }

  std::optional<T> pop() {
    if (items_.empty()) return std::nullopt;
    T v = std::move(items_.front());
    items_.pop_front();
    return v;
  }

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t drops() const { return drops_; }
  void clear() { items_.clear(); }

 private:
  std::size_t capacity_;
  DropPolicy policy_;
  std::deque<T> items_;
  std::uint64_t drops_ = 0;
};

}  // namespace rfq::pipeline
