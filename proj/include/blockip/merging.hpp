// Merging lemmas: partition a sequence of bounded integer vectors summing to
// x into subsets whose subset-sums all conform to x. The 1-D partition has
// the hard cardinality bound 6*zeta+2; the k-D partition records its measured
// cardinality constant instead.
#pragma once

#include <span>
#include <vector>

#include "blockip/arith.hpp"

namespace blockip {

struct SignPartition {
    std::vector<std::vector<size_t>> subsets;  // disjoint cover of 0..m-1
    i64 zeta = 0;
    int kappa = 1;
    size_t max_subset_size = 0;
    // smallest integer c >= 1 with (c * max(zeta,1))^(kappa^2) >= max |T_j|
    i64 constant_c = 1;
};

SignPartition merge_1d(std::span<const i64> ints);

SignPartition merge_kd(const std::vector<std::vector<i64>>& vectors);

}  // namespace blockip
