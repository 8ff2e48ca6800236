#include "speechlabel/intervals.hpp"

#include <algorithm>

namespace speechlabel {

std::vector<Interval> union_of(std::span<const Interval> intervals) {
  std::vector<Interval> v;
  for (const auto& i : intervals) {
    if (i.end > i.start) v.push_back(i);
  }
  std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) {
    return a.start < b.start || (a.start == b.start && a.end < b.end);
  });
  std::vector<Interval> out;
  for (const auto& i : v) {
    if (!out.empty() && i.start <= out.back().end) {
      out.back().end = std::max(out.back().end, i.end);
    } else {
      out.push_back(i);
    }
  }
  return out;
}

double total_length(std::span<const Interval> disjoint) {
  double sum = 0.0;
  for (const auto& i : disjoint) sum += i.length();
  return sum;
}

double intersection_length(std::span<const Interval> a, std::span<const Interval> b) {
  const auto ua = union_of(a);
  const auto ub = union_of(b);
  double sum = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < ua.size() && j < ub.size()) {
    const double lo = std::max(ua[i].start, ub[j].start);
    const double hi = std::min(ua[i].end, ub[j].end);
    if (hi > lo) sum += hi - lo;
    if (ua[i].end < ub[j].end) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

}  // namespace speechlabel
