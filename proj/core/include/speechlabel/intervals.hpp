#pragma once

#include <span>
#include <vector>

namespace speechlabel {

struct Interval {
  double start = 0.0;
  double end = 0.0;
  double length() const noexcept { return end > start ? end - start : 0.0; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Sorted, non-overlapping cover of the input; empty intervals dropped.
std::vector<Interval> union_of(std::span<const Interval> intervals);
double total_length(std::span<const Interval> disjoint);
// Length of the intersection of two unions.
double intersection_length(std::span<const Interval> a, std::span<const Interval> b);

}  // namespace speechlabel
