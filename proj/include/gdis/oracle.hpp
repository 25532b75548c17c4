#pragma once

#include <vector>

#include "gdis/geometry.hpp"

namespace gdis::oracle {

struct Solution {
  double weight = 0;
  std::vector<Box> items;
};

inline constexpr std::size_t kBoxLimit = 24;

// Exact maximum-weight set of pairwise disjoint open intervals.
Solution exact_interval_is(std::vector<Box> items);

// Exact maximum-weight independent set by branch and bound; returns the
// lexicographically smallest id-set among optima. Refuses more than `limit` items.
Solution exact_box_is(const std::vector<Box>& items, std::size_t limit = kBoxLimit);

// Full subset enumeration, used to double-check the branch and bound.
Solution exhaustive_is(const std::vector<Box>& items, std::size_t max_size = 64);

// Best independent subset with at most k members (exhaustive; small inputs).
Solution best_bounded_subset(const std::vector<Box>& items, std::size_t k);

}  // namespace gdis::oracle
