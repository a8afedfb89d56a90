// Lower-bound instance families and the seeded random corpus used for
// oracle testing.
#pragma once

#include <optional>
#include <random>

#include "blockip/instance.hpp"

namespace blockip {

enum class CertifyMethod { exhaustive, divisibility };

enum class LowerBoundFamily { four_block, three_block, other };

struct LowerBoundCertificate {
    LowerBoundFamily family = LowerBoundFamily::other;
    int t = 0;  // four_block parameter, 0 otherwise
    int n = 0;
    BrickVector witness;        // nonzero kernel vector realizing the bound
    i64 min_norm_verified = 0;  // no nonzero kernel vector has smaller inf-norm
    CertifyMethod method = CertifyMethod::exhaustive;
    std::optional<BrickVector> counterexample;  // set when certification fails
    bool ok = false;
};

// 4-block family with square identity blocks: A = I_t, B = -I_t, D the
// (t-1) x t bidiagonal (1,-1) matrix, C = (-I | 0). Any nonzero kernel
// vector has all bricks equal and brick 0 in the 1-dimensional lattice
// spanned by (n^{t-1}, n^{t-2}(n-1), ..., (n-1)^{t-1}).
FourBlockSpec gen_lower_4block(int t, int n);

// 3-block family: B = (1), A = (1,-1), D = (1,0), C = 0, together with the
// kernel witness (1, (n-1, n), (-1, 0), ..., (-1, 0)) of inf-norm n.
struct ThreeBlockLowerBound {
    FourBlockSpec spec;
    BrickVector witness;
};

ThreeBlockLowerBound gen_lower_3block(int n);

// Certifies that no nonzero kernel vector of H (the full 4-block matrix) has
// inf-norm < bound, exhaustively over the box of radius bound-1. On failure
// the violating vector is attached.
LowerBoundCertificate certify_min_norm_exhaustive(const FourBlockSpec& spec,
                                                  i64 bound,
                                                  u64 node_budget = 200'000'000);

// Replays the divisibility chain (n-1) y_i = n y_{i+1} of the 4-block family
// symbolically: every kernel vector is an integer multiple of the generator,
// so the minimal inf-norm equals n^{t-1}. Only valid for gen_lower_4block
// specs.
LowerBoundCertificate certify_min_norm_divisibility(int t, int n);

// Dispatching surface: exhaustive works on any spec; divisibility requires
// the spec to match the gen_lower_4block family shape.
LowerBoundCertificate certify_min_norm(const FourBlockSpec& spec, i64 bound,
                                       CertifyMethod method);

struct CorpusParams {
    int n_min = 2, n_max = 4;
    int t_A_min = 1, t_A_max = 2;
    int t_B_min = 1, t_B_max = 2;
    int s_A_min = 1, s_A_max = 2;
    int s_C_min = 1, s_C_max = 2;
    i64 entry_range = 2;   // block entries in [-entry_range, entry_range]
    i64 bound_low = -3;    // lower bounds sampled from [bound_low, bound_low+2]
    i64 bound_width = 4;   // upper = lower + width sampled from [0, bound_width]
    i64 w_range = 3;
    bool three_block = false;
};

// Seeded instance corpus; instances at even positions are planted feasible
// (b = H x for a sampled in-bounds x), odd positions draw b at random.
std::vector<IPInstance> random_corpus(u64 seed, const CorpusParams& params,
                                      size_t count);

// Seeded kernel vectors of a 3-block spec: integer combinations of a kernel
// lattice basis with small coefficients (zero vectors are skipped).
std::vector<BrickVector> random_kernel_vectors(const FourBlockSpec& spec,
                                               u64 seed, size_t count,
                                               i64 coeff_range = 2);

}  // namespace blockip
