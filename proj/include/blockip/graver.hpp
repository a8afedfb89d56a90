// Graver bases: the conformal order, a bounded enumeration engine (the
// trusted oracle) and a completion engine (the scalable path), plus positive
// conformal decomposition of kernel vectors.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "blockip/matrix.hpp"

namespace blockip {

// x conforms to y (x below y in the conformal partial order): per coordinate
// |x_i| <= |y_i| and x_i * y_i >= 0.
bool conforms(std::span<const i64> x, std::span<const i64> y);

// No coordinate of strictly opposite sign.
bool sign_compatible(std::span<const i64> x, std::span<const i64> y);

enum class GraverMethod { enumeration, completion };

struct GraverSet {
    SmallMatrix matrix;
    std::vector<std::vector<i64>> elements;  // sorted lexicographically
    GraverMethod method = GraverMethod::enumeration;
    i64 radius = 0;  // enumeration only
    bool certified_complete = false;

    i64 max_norm() const {
        i64 m = 0;
        for (const auto& g : elements)
            for (i64 e : g) m = std::max(m, abs_i64(e));
        return m;
    }
    bool contains(const std::vector<i64>& v) const {
        return std::binary_search(elements.begin(), elements.end(), v);
    }
};

struct EnumerateOptions {
    u64 node_budget = 10'000'000;
    // The enumeration is complete for elements of norm <= radius; the caller
    // asserts a norm bound to mark the whole basis as certified.
    i64 asserted_norm_bound = 0;
    int threads = 1;
};

// All conformal-minimal nonzero kernel vectors of M with inf-norm <= radius,
// found by per-coordinate DFS with constraint propagation on partial row sums.
GraverSet graver_enumerate(const SmallMatrix& m, i64 radius,
                           const EnumerateOptions& opts = {});

struct CompleteOptions {
    size_t element_budget = 100'000;
};

// Completion procedure: start from a lattice basis of ker(M), close under
// normal-form reduction of pairwise sums, then filter to conformal-minimal
// elements. certified_complete is true on normal termination; on budget
// exhaustion the partial set is returned with the flag false.
GraverSet graver_complete(const SmallMatrix& m, const CompleteOptions& opts = {});

// A lattice basis of {x integer : M x = 0}.
std::vector<std::vector<i64>> kernel_lattice_basis(const SmallMatrix& m);

// Some integer solution of M x = rhs, or nullopt when none exists.
std::optional<std::vector<i64>> lattice_solve(const SmallMatrix& m,
                                              std::span<const i64> rhs);

// All nonzero integer kernel points of M with inf-norm <= radius (not only
// the minimal ones). Used by certifiers.
std::vector<std::vector<i64>> kernel_points(const SmallMatrix& m, i64 radius,
                                            u64 node_budget = 10'000'000,
                                            bool stop_at_first = false);

struct DecomposeTerm {
    i64 coefficient = 0;       // positive
    std::vector<i64> element;  // conforms to the input
};

// Writes y as a positive combination of conforming basis elements. Greedy:
// at each step take the conforming element of maximal inf-norm (ties broken
// lexicographically) with the largest coefficient that still conforms.
std::vector<DecomposeTerm> graver_decompose(std::span<const i64> y,
                                            const GraverSet& basis);

}  // namespace blockip
