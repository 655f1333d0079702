#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dosprop {

// Sorted, validated p-values. Keeps the permutation back to the caller's
// original order so rejection sets can be reported in input coordinates.
class PValueSample {
 public:
  static PValueSample from(std::span<const double> values);

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }

  // 1-based order statistic p_(k).
  double order_stat(std::size_t k) const { return values_.at(k - 1); }

  // Original (pre-sort) index of the k-th smallest value, 0-based k.
  std::size_t original_index(std::size_t sorted_pos) const { return order_.at(sorted_pos); }
  const std::vector<std::size_t>& order() const noexcept { return order_; }

  // DOS needs at least two usable indices i with 2i <= n.
  bool too_small_for_dos() const noexcept { return values_.size() < 4; }

 private:
  PValueSample(std::vector<double> values, std::vector<std::size_t> order)
      : values_(std::move(values)), order_(std::move(order)) {}

  std::vector<double> values_;
  std::vector<std::size_t> order_;
};

// Validates and sorts. Throws EmptyInput, NotANumber(i) or OutOfRange(i).
PValueSample validate_sample(std::span<const double> values);

}  // namespace dosprop
