// Exact optimization: brute-force oracle over a clamped box, phase-one
// feasibility, the per-guess n-fold step oracle (dynamic program over
// bricks), and the augmentation solve loop with step lengths 2^k.
#pragma once

#include <optional>

#include "blockip/brick_dp.hpp"
#include "blockip/instance.hpp"

namespace blockip {

enum class SolveStatus { optimal, infeasible, unbounded, budget_exceeded };

const char* to_string(SolveStatus s);

struct SolveStats {
    i64 augmentation_steps = 0;
    u64 dp_states = 0;
    u64 guesses = 0;
    u64 nodes = 0;
};

struct SolveResult {
    SolveStatus status = SolveStatus::infeasible;
    std::optional<std::vector<i64>> solution;  // flat coordinates
    std::optional<i64> objective;
    bool certified = false;
    i64 phase_one_objective = 0;  // > 0 iff infeasible was decided there
    SolveStats stats;
};

// Ground-truth oracle: exhaustive search over bounds clamped to
// [-radius, radius]. Exact on instances whose solutions live in the box.
SolveResult brute_solve(const IPInstance& inst, i64 radius,
                        u64 node_budget = 500'000'000);

// Phase-one construction: append per-brick slack pairs entering the top row
// and the brick rows through +/- identity columns, start from the trivial
// point carrying b on the slacks, and minimize the slack l1-mass (written as
// a split objective). A shift moves the original variables so 0 is inside
// their bounds; infinite bounds are clamped to a standard cap.
struct PhaseOne {
    IPInstance augmented;
    BrickVector start;
    int orig_t_A = 0;
    int orig_t_B = 0;
    std::vector<i64> shift;  // original x = augmented x-part + shift

    // pull the original variables out of a solution of the augmented instance
    std::vector<i64> extract(const BrickVector& x) const;
};

PhaseOne phase_one(const IPInstance& inst);

struct StepQuery {
    BrickVector base;          // current feasible point
    i64 rho = 1;               // power of two
    i64 xi = 1;                // inf-norm cap on the direction
    std::vector<i64> guess;    // fixes g^0
};

struct StepResult {
    BrickVector g;
    i64 delta;  // w . g (per unit of rho)
};

// Among directions g with g^0 = guess, B g^0 + A g^i = 0, C g^0 + sum D g^i
// = 0, |g|_inf <= xi and l <= base + rho*g <= u, returns one minimizing w.g
// (lexicographically smallest among minimizers). nullopt if none exists.
std::optional<StepResult> best_step_dp(const IPInstance& inst, const StepQuery& q,
                                       SolveStats* stats = nullptr,
                                       u64 state_budget = 5'000'000);

struct SolveCaps {
    i64 xi = 0;             // 0: derive from the bound ranges
    i64 guess_radius = -1;  // <0: derive from the brick-0 bound ranges
    u64 dp_state_budget = 50'000'000;
    u64 node_budget = 500'000'000;
    i64 max_steps = 100'000;
    int threads = 1;
    // caller vouches that xi and guess_radius dominate the true Graver norms
    bool assert_caps_sufficient = false;
};

// Full solve: phase-one for a start, then augment with the best improving
// rho * g over rho = 2^k and all guesses of g^0. The result is certified
// when every bound is finite and the caps cover the bound ranges (any
// applicable augmentation direction fits inside them), or when the caller
// asserts cap sufficiency.
SolveResult solve(const IPInstance& inst, const SolveCaps& caps = {});

// Augmentation from a known feasible point (skips phase-one).
SolveResult solve_from(const IPInstance& inst, const BrickVector& start,
                       const SolveCaps& caps = {});

}  // namespace blockip
