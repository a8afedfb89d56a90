// Block assembly of the 4-block constraint matrix and the brick-structured
// vectors everything else operates on.
//
// The big matrix built from (A, B, C, D, n) is
//
//     H = ( C  D  D ... D )
//         ( B  A  0 ... 0 )
//         ( B  0  A ... 0 )
//         ( ...           )
//         ( B  0  0 ... A )
//
// H0 is H with the C block zeroed, E is H with B and C zeroed, F is H with
// C and D zeroed. Solution vectors split into brick 0 (length t_B) and n
// bricks of length t_A.
#pragma once

#include <vector>

#include "blockip/matrix.hpp"

namespace blockip {

enum class MatrixKind { H, H0, E, F };

struct FourBlockSpec {
    SmallMatrix A, B, C, D;
    int n = 1;

    FourBlockSpec() = default;
    FourBlockSpec(SmallMatrix a, SmallMatrix b, SmallMatrix c, SmallMatrix d,
                  int copies)
        : A(std::move(a)), B(std::move(b)), C(std::move(c)), D(std::move(d)),
          n(copies) {
        validate();
    }

    void validate() const {
        if (n < 1) throw dim_error("spec: n must be >= 1");
        if (C.rows() != D.rows()) throw dim_error("spec: s_C != s_D");
        if (A.rows() != B.rows()) throw dim_error("spec: s_A != s_B");
        if (B.cols() != C.cols()) throw dim_error("spec: t_B != t_C");
        if (A.cols() != D.cols()) throw dim_error("spec: t_A != t_D");
    }

    int s_A() const { return A.rows(); }
    int t_A() const { return A.cols(); }
    int t_B() const { return B.cols(); }
    int s_C() const { return C.rows(); }

    int num_rows() const { return s_C() + n * s_A(); }
    int num_cols() const { return t_B() + n * t_A(); }

    // Largest absolute entry over the four blocks.
    i64 delta() const {
        return std::max(std::max(A.max_abs(), B.max_abs()),
                        std::max(C.max_abs(), D.max_abs()));
    }

    bool is_three_block() const { return C.is_zero(); }

    FourBlockSpec with_zero_C() const {
        return FourBlockSpec(A, B, SmallMatrix::zero(C.rows(), C.cols()), D, n);
    }
};

// A (t_B + n*t_A)-dimensional vector split into bricks.
struct BrickVector {
    std::vector<i64> brick0;
    std::vector<std::vector<i64>> bricks;

    BrickVector() = default;
    BrickVector(std::vector<i64> b0, std::vector<std::vector<i64>> bs)
        : brick0(std::move(b0)), bricks(std::move(bs)) {
        for (const auto& b : bricks)
            if (b.size() != brick_len())
                throw dim_error("brick vector: bricks of unequal length");
    }

    static BrickVector zero(int t_B, int t_A, int n) {
        return BrickVector(std::vector<i64>(t_B, 0),
                           std::vector<std::vector<i64>>(n, std::vector<i64>(t_A, 0)));
    }

    static BrickVector from_flat(std::span<const i64> flat, int t_B, int t_A, int n);

    size_t brick_len() const { return bricks.empty() ? 0 : bricks.front().size(); }
    int num_bricks() const { return (int)bricks.size(); }
    size_t dim() const { return brick0.size() + bricks.size() * brick_len(); }

    std::vector<i64> flatten() const;

    bool is_zero() const;
    i64 norm_inf() const;
    i64 norm_1() const;

    friend bool operator==(const BrickVector& a, const BrickVector& b) {
        return a.brick0 == b.brick0 && a.bricks == b.bricks;
    }
};

BrickVector operator+(const BrickVector& a, const BrickVector& b);
BrickVector operator-(const BrickVector& a, const BrickVector& b);
BrickVector operator-(const BrickVector& a);
BrickVector scale(const BrickVector& a, i64 c);

// Materializes one of H, H0, E, F. All four share the (s_C + n*s_A) x
// (t_B + n*t_A) shape; E and F keep their removed blocks as zeros.
SmallMatrix assemble(const FourBlockSpec& spec, MatrixKind kind);

struct BlockImage {
    std::vector<i64> top;                       // length s_C
    std::vector<std::vector<i64>> per_brick;    // n vectors of length s_A
};

// H applied to x using the block structure directly:
//   top        = C x^0 + sum_i D x^i
//   per_brick' = B x^0 + A x^i
BlockImage block_apply(const FourBlockSpec& spec, const BrickVector& x);

// true iff H x = 0 (or H0 x = 0 when three_block).
bool in_kernel(const FourBlockSpec& spec, const BrickVector& x, bool three_block);

}  // namespace blockip
