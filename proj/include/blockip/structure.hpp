// Structural decompositions of 3-block kernel vectors: bounded-norm
// decomposition, same-orthant principal/add-on split, brick typing,
// centralization, and extraction of a strict conformal divisor (the witness
// that a kernel vector is not conformal-minimal).
#pragma once

#include <map>
#include <optional>

#include "blockip/block.hpp"
#include "blockip/graver.hpp"

namespace blockip {

struct xi_too_small : std::runtime_error {
    explicit xi_too_small(const std::string& m) : std::runtime_error(m) {}
};

struct jobs_not_representable : std::runtime_error {
    explicit jobs_not_representable(const std::string& m) : std::runtime_error(m) {}
};

/////////////////////////////////////////////////////////////////////////////
// Bounded decomposition.

struct BoundedDecomposition {
    std::vector<BrickVector> summands;
    i64 xi = 0;  // inf-norm cap actually achieved (max over summands)
};

// Splits a kernel vector of H0 into kernel summands of inf-norm <= xi whose
// brick 0 conforms to the input's brick 0. Realized as an iterated search:
// each step subtracts a bounded kernel vector that strictly reduces the
// residual's l1-norm. Throws xi_too_small when no such step exists.
BoundedDecomposition decompose_bounded(const BrickVector& g,
                                       const FourBlockSpec& spec, i64 xi,
                                       u64 state_budget = 50'000'000);

// Doubles xi until the search succeeds (or xi_cap is passed).
BoundedDecomposition decompose_bounded_auto(const BrickVector& g,
                                            const FourBlockSpec& spec,
                                            i64 xi_start = 1, i64 xi_cap = 256,
                                            u64 state_budget = 50'000'000);

/////////////////////////////////////////////////////////////////////////////
// Canonical representatives per brick-0 value.

enum class CanonicalStatus { found, infeasible, zero };

struct CanonicalEntry {
    std::vector<i64> u;
    CanonicalStatus status = CanonicalStatus::infeasible;
    std::optional<BrickVector> rep;  // H0 rep = 0, rep^0 = u, minimal norm found
};

// One representative kernel vector per t_B-vector u with |u|_inf <= xi (or a
// marker when none exists; u = 0 records the zero marker). Integer
// feasibility is decided exactly via lattice solves before searching.
std::vector<CanonicalEntry> canonical_set(const FourBlockSpec& spec, i64 xi,
                                          i64 rep_norm_cap = 64,
                                          u64 state_budget = 50'000'000);

// Exact integer feasibility of { z bricks : A z^i = -B u for all i,
// sum_i D z^i = 0 } for a fixed brick-0 value u.
bool canonical_feasible(const FourBlockSpec& spec, std::span<const i64> u);

/////////////////////////////////////////////////////////////////////////////
// Same-orthant decomposition.

struct OrthantDecomposition {
    std::vector<BrickVector> principals;  // pairwise sign-compatible
    std::vector<BrickVector> addons;      // brick0 = 0, pairwise sign-compatible
    i64 xi_used = 0;
};

// g = sum(principals) + sum(addons); principals come from merging copies of
// per-brick0 representatives of the bounded decomposition (reduced-vector
// merging), addons from conformal peeling of the leftover n-fold kernel part.
OrthantDecomposition decompose_same_orthant(const BrickVector& g,
                                            const FourBlockSpec& spec,
                                            i64 xi_start = 1,
                                            u64 state_budget = 50'000'000);

/////////////////////////////////////////////////////////////////////////////
// Brick types and centralization.

enum class QuantityKind { small, pos_large, neg_large };

struct BrickTypeAssignment {
    i64 gamma = 1;
    // per brick i (1-based bricks; index i-1): kind of each coordinate
    std::vector<std::vector<QuantityKind>> quantity_types;
    // N_1..N_sigma as 1-based brick indices; groups[0] = {1}
    std::vector<std::vector<int>> groups;
    std::vector<int> group_of;  // per brick (index i-1) -> group index
};

// Coordinates with |value| <= gamma are small, larger ones positive/negative
// large. Brick 1 is isolated; bricks with equal quantity type (and equal
// principle label, when given) share a group.
BrickTypeAssignment assign_brick_types(
    const BrickVector& y, i64 gamma,
    const std::optional<std::vector<int>>& principle_labels = std::nullopt);

struct Centralization {
    BrickVector y_tilde;
    std::vector<std::vector<i64>> jobs;  // v_1..v_lambda, lex order
    // psi(j,k): copies of job k over bricks of group j
    std::vector<std::vector<i64>> job_counts;
    // per brick (index i-1), per job kind: copies assigned after spreading
    std::vector<std::vector<i64>> assigned;
};

// Redistributes the add-on jobs evenly across each group (earlier bricks get
// the larger shares), keeping brick 0 and brick 1 fixed.
Centralization centralize(const BrickVector& y, const BrickTypeAssignment& types,
                          const std::vector<BrickVector>& principals,
                          const std::vector<BrickVector>& addons);

/////////////////////////////////////////////////////////////////////////////
// Conformal-kernel census and witness extraction.

// Number of kernel vectors z of the (three_block ? H0 : H) system with
// z conformal to y (including 0 and y themselves), saturating.
u64 conformal_kernel_count(const FourBlockSpec& spec, bool three_block,
                           const BrickVector& y, u64 state_budget = 50'000'000);

// k-th conformal kernel vector in lexicographic order.
std::optional<BrickVector> conformal_kernel_unrank(const FourBlockSpec& spec,
                                                   bool three_block,
                                                   const BrickVector& y, u64 k,
                                                   u64 state_budget = 50'000'000);

// Some kernel z with z conformal to y, z != 0, z != y; nullopt iff none
// exists (exhaustive, so nullopt certifies conformal minimality).
std::optional<BrickVector> strict_conformal_divisor(const FourBlockSpec& spec,
                                                    bool three_block,
                                                    const BrickVector& y,
                                                    u64 state_budget = 50'000'000);

struct WitnessOptions {
    i64 xi_start = 1;
    i64 xi_cap = 256;
    u64 state_budget = 50'000'000;
};

// The constructive path alone: centralization, the md/od summand rewrite and
// two-stage merging over reduced vectors, then candidate selection by the
// sign conditions. Every candidate is verified exactly before it is
// returned; nullopt means no part of the merged decomposition passed.
std::optional<BrickVector> sign_compatible_witness_pipeline(
    const BrickVector& y, const FourBlockSpec& spec,
    const WitnessOptions& opts = {});

// Strict conformal divisor of a nonzero H0-kernel vector: runs the pipeline
// first, then the exhaustive conformal search. Returns nullopt only when y
// is conformal-minimal.
std::optional<BrickVector> sign_compatible_witness(const BrickVector& y,
                                                   const FourBlockSpec& spec,
                                                   const WitnessOptions& opts = {});

}  // namespace blockip
