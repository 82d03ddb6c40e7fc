#pragma once

// Order-m label histories expanded into first-order states. State s encodes
// the tuple (y_{t-m+1}, ..., y_t) in base 4 with the oldest label as the most
// significant digit. Histories reaching before the first line are padded
// with O, so the state at the first line is (O, ..., O, y_1).

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "reflines/label.hpp"

namespace reflines {

class StateSpace {
 public:
  static constexpr int kMaxOrder = 3;

  explicit StateSpace(int order) : order_(order) {
    if (order < 1 || order > kMaxOrder) {
      throw std::invalid_argument("Markov order must be in [1, 3]");
    }
    size_ = 1;
    for (int k = 0; k < order; ++k) size_ *= kNumLabels;
    high_ = size_ / kNumLabels;
  }

  int order() const { return order_; }
  int size() const { return size_; }

  static Label last(int s) { return label_at(s % kNumLabels); }

  /// State reached from `s` after emitting `next`.
  int successor(int s, Label next) const {
    return (s * kNumLabels + index_of(next)) % size_;
  }

  /// The predecessor of `s` whose oldest label is `oldest`.
  int predecessor(int s, Label oldest) const {
    return index_of(oldest) * high_ + s / kNumLabels;
  }

  /// State at the first line when it carries label `first`.
  int start_state(Label first) const {
    int s = 0;
    for (int k = 0; k + 1 < order_; ++k) s = s * kNumLabels + index_of(Label::O);
    return s * kNumLabels + index_of(first);
  }

  /// Labels of `s`, oldest first.
  std::vector<Label> labels(int s) const {
    std::vector<Label> out(static_cast<std::size_t>(order_));
    for (int k = order_ - 1; k >= 0; --k) {
      out[static_cast<std::size_t>(k)] = label_at(s % kNumLabels);
      s /= kNumLabels;
    }
    return out;
  }

  /// Number of transition parameters: every state has 4 successors.
  int num_transitions() const { return size_ * kNumLabels; }

 private:
  int order_;
  int size_;
  int high_;
};

}  // namespace reflines
