// Dynamic program over bricks: stages pick one candidate brick each, the
// state is the running sum of D*z, and the final state must hit a target.
// Backs the n-fold step oracle, the bounded decomposition search and the
// exhaustive conformal-kernel certifier.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "blockip/matrix.hpp"

namespace blockip {

struct BrickStage {
    // candidates sorted lexicographically; costs parallel to cands
    std::vector<std::vector<i64>> cands;
    std::vector<i64> costs;
};

struct BrickDPOptions {
    u64 state_budget = 5'000'000;
};

struct BrickDPSolution {
    bool found = false;
    i64 cost = 0;
    std::vector<std::vector<i64>> picks;
    u64 states_visited = 0;
};

// Minimum-cost pick sequence; ties resolved toward the lexicographically
// smallest sequence of picks (stage by stage).
BrickDPSolution brick_dp_min(const SmallMatrix& d,
                             const std::vector<BrickStage>& stages,
                             std::span<const i64> target,
                             const BrickDPOptions& opts = {});

// Number of pick sequences hitting the target, saturating at the cap.
u64 brick_dp_count(const SmallMatrix& d, const std::vector<BrickStage>& stages,
                   std::span<const i64> target, const BrickDPOptions& opts = {});

// k-th (0-based) pick sequence in lexicographic order, if k < count.
std::optional<std::vector<std::vector<i64>>> brick_dp_unrank(
    const SmallMatrix& d, const std::vector<BrickStage>& stages,
    std::span<const i64> target, u64 k, const BrickDPOptions& opts = {});

// Integer vectors z with A z = rhs and lo <= z <= hi, sorted
// lexicographically. DFS with suffix-capacity pruning per row.
std::vector<std::vector<i64>> enumerate_bricks(const SmallMatrix& a,
                                               std::span<const i64> rhs,
                                               std::span<const i64> lo,
                                               std::span<const i64> hi,
                                               u64 node_budget = 10'000'000);

}  // namespace blockip
