#include "blockip/block.hpp"

namespace blockip {

BrickVector BrickVector::from_flat(std::span<const i64> flat, int t_B, int t_A,
                                   int n) {
    if ((int)flat.size() != t_B + n * t_A)
        throw dim_error("from_flat: length does not match t_B + n*t_A");
    BrickVector v;
    v.brick0.assign(flat.begin(), flat.begin() + t_B);
    v.bricks.resize(n);
    for (int i = 0; i < n; ++i)
        v.bricks[i].assign(flat.begin() + t_B + (size_t)i * t_A,
                           flat.begin() + t_B + (size_t)(i + 1) * t_A);
    return v;
}

std::vector<i64> BrickVector::flatten() const {
    std::vector<i64> flat;
    flat.reserve(dim());
    flat.insert(flat.end(), brick0.begin(), brick0.end());
    for (const auto& b : bricks) flat.insert(flat.end(), b.begin(), b.end());
    return flat;
}

bool BrickVector::is_zero() const {
    for (i64 e : brick0) if (e != 0) return false;
    for (const auto& b : bricks)
        for (i64 e : b) if (e != 0) return false;
    return true;
}

i64 BrickVector::norm_inf() const {
    i64 m = 0;
    for (i64 e : brick0) m = std::max(m, abs_i64(e));
    for (const auto& b : bricks)
        for (i64 e : b) m = std::max(m, abs_i64(e));
    return m;
}

i64 BrickVector::norm_1() const {
    i64 s = 0;
    for (i64 e : brick0) s = checked_add(s, abs_i64(e));
    for (const auto& b : bricks)
        for (i64 e : b) s = checked_add(s, abs_i64(e));
    return s;
}

static void check_same_shape(const BrickVector& a, const BrickVector& b) {
    if (a.brick0.size() != b.brick0.size() || a.bricks.size() != b.bricks.size() ||
        a.brick_len() != b.brick_len())
        throw dim_error("brick vectors of different shape");
}

BrickVector operator+(const BrickVector& a, const BrickVector& b) {
    check_same_shape(a, b);
    BrickVector r = a;
    for (size_t i = 0; i < r.brick0.size(); ++i)
        r.brick0[i] = checked_add(r.brick0[i], b.brick0[i]);
    for (size_t i = 0; i < r.bricks.size(); ++i)
        for (size_t j = 0; j < r.bricks[i].size(); ++j)
            r.bricks[i][j] = checked_add(r.bricks[i][j], b.bricks[i][j]);
    return r;
}

BrickVector operator-(const BrickVector& a, const BrickVector& b) {
    check_same_shape(a, b);
    BrickVector r = a;
    for (size_t i = 0; i < r.brick0.size(); ++i)
        r.brick0[i] = checked_sub(r.brick0[i], b.brick0[i]);
    for (size_t i = 0; i < r.bricks.size(); ++i)
        for (size_t j = 0; j < r.bricks[i].size(); ++j)
            r.bricks[i][j] = checked_sub(r.bricks[i][j], b.bricks[i][j]);
    return r;
}

BrickVector operator-(const BrickVector& a) {
    BrickVector r = a;
    for (auto& e : r.brick0) e = checked_neg(e);
    for (auto& b : r.bricks)
        for (auto& e : b) e = checked_neg(e);
    return r;
}

BrickVector scale(const BrickVector& a, i64 c) {
    BrickVector r = a;
    for (auto& e : r.brick0) e = checked_mul(e, c);
    for (auto& b : r.bricks)
        for (auto& e : b) e = checked_mul(e, c);
    return r;
}

SmallMatrix assemble(const FourBlockSpec& spec, MatrixKind kind) {
    spec.validate();
    const bool use_B = kind == MatrixKind::H || kind == MatrixKind::H0 ||
                       kind == MatrixKind::F;
    const bool use_C = kind == MatrixKind::H;
    const bool use_D = kind != MatrixKind::F;

    const int sC = spec.s_C(), sA = spec.s_A();
    const int tB = spec.t_B(), tA = spec.t_A();
    SmallMatrix m = SmallMatrix::zero(spec.num_rows(), spec.num_cols());

    for (int r = 0; r < sC; ++r) {
        if (use_C)
            for (int c = 0; c < tB; ++c) m.at(r, c) = spec.C.at(r, c);
        if (use_D)
            for (int i = 0; i < spec.n; ++i)
                for (int c = 0; c < tA; ++c)
                    m.at(r, tB + i * tA + c) = spec.D.at(r, c);
    }
    for (int i = 0; i < spec.n; ++i) {
        for (int r = 0; r < sA; ++r) {
            int row = sC + i * sA + r;
            if (use_B)
                for (int c = 0; c < tB; ++c) m.at(row, c) = spec.B.at(r, c);
            for (int c = 0; c < tA; ++c)
                m.at(row, tB + i * tA + c) = spec.A.at(r, c);
        }
    }
    return m;
}

BlockImage block_apply(const FourBlockSpec& spec, const BrickVector& x) {
    spec.validate();
    if ((int)x.brick0.size() != spec.t_B() || x.num_bricks() != spec.n ||
        (int)x.brick_len() != spec.t_A())
        throw dim_error("block_apply: vector shape does not match spec");

    BlockImage img;
    img.top = spec.C.apply(x.brick0);
    for (int i = 0; i < spec.n; ++i)
        apply_accumulate(spec.D, x.bricks[i], 1, img.top);

    std::vector<i64> bx = spec.B.apply(x.brick0);
    img.per_brick.resize(spec.n);
    for (int i = 0; i < spec.n; ++i) {
        img.per_brick[i] = spec.A.apply(x.bricks[i]);
        for (int r = 0; r < spec.s_A(); ++r)
            img.per_brick[i][r] = checked_add(img.per_brick[i][r], bx[r]);
    }
    return img;
}

bool in_kernel(const FourBlockSpec& spec, const BrickVector& x, bool three_block) {
    const FourBlockSpec& s = spec;
    BlockImage img;
    if (three_block) {
        FourBlockSpec s0 = s.is_three_block() ? s : s.with_zero_C();
        img = block_apply(s0, x);
    } else {
        img = block_apply(s, x);
    }
    for (i64 e : img.top) if (e != 0) return false;
    for (const auto& b : img.per_brick)
        for (i64 e : b) if (e != 0) return false;
    return true;
}

}  // namespace blockip
