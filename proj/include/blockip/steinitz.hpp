// Constructive Steinitz rearrangement: permute vectors of inf-norm <= zeta
// summing to x so every prefix sum stays within kappa*zeta of the segment
// toward x. The certificate is exact: the achieved deviation is reported as
// the rational max_l || sum_{i<=l} x_pi(i) - ((l-kappa)/m) x ||_inf.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "blockip/arith.hpp"

namespace blockip {

struct RearrangementResult {
    std::vector<size_t> permutation;  // position -> original index
    // achieved deviation = deviation_num / deviation_den (den = m)
    i64 deviation_num = 0;
    i64 deviation_den = 1;

    bool bound_ok(i64 kappa, i64 zeta) const {
        return deviation_num <= checked_mul(checked_mul(kappa, zeta), deviation_den);
    }
};

enum class SteinitzMode {
    exact,              // nested-set construction, certified kappa*zeta
    greedy_then_exact,  // greedy pass first, kept only if it meets kappa*zeta
};

RearrangementResult steinitz_permute(const std::vector<std::vector<i64>>& vectors,
                                     SteinitzMode mode = SteinitzMode::exact);

// First pair (l1 < l2) of equal prefix sums, where prefix 0 is the empty sum.
// Requires every prefix sum to lie in the centered box of the given radius.
std::optional<std::pair<size_t, size_t>> prefix_collision(
    const std::vector<std::vector<i64>>& vectors, i64 box_radius);

}  // namespace blockip
