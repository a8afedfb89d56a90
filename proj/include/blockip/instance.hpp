// IP instances: a constraint system (block spec or explicit matrix), right
// hand side, extended-integer bounds and an integer objective.
#pragma once

#include <optional>
#include <vector>

#include "blockip/block.hpp"

namespace blockip {

// Extended integer bound; -inf/+inf are explicit states, never sentinels
// inside integer arithmetic.
struct Bound {
    enum class Kind { Finite, NegInf, PosInf };
    Kind kind = Kind::Finite;
    i64 value = 0;

    static Bound finite(i64 v) { return Bound{Kind::Finite, v}; }
    static Bound neg_inf() { return Bound{Kind::NegInf, 0}; }
    static Bound pos_inf() { return Bound{Kind::PosInf, 0}; }

    bool is_finite() const { return kind == Kind::Finite; }

    friend bool operator==(const Bound& a, const Bound& b) {
        if (a.kind != b.kind) return false;
        return a.kind != Kind::Finite || a.value == b.value;
    }
};

// lo <= hi where infinities compare in the obvious way.
inline bool bound_le(const Bound& lo, const Bound& hi) {
    if (lo.kind == Bound::Kind::NegInf || hi.kind == Bound::Kind::PosInf) return true;
    if (lo.kind == Bound::Kind::PosInf) return hi.kind == Bound::Kind::PosInf;
    if (hi.kind == Bound::Kind::NegInf) return false;
    return lo.value <= hi.value;
}

inline bool within(const Bound& lo, i64 x, const Bound& hi) {
    if (lo.is_finite() && x < lo.value) return false;
    if (hi.is_finite() && x > hi.value) return false;
    return lo.kind != Bound::Kind::PosInf && hi.kind != Bound::Kind::NegInf;
}

struct IPInstance {
    // Block-structured when spec is set, otherwise explicit matrix.
    std::optional<FourBlockSpec> spec;
    bool three_block = false;
    std::optional<SmallMatrix> matrix;

    std::vector<i64> b;
    std::vector<Bound> lower, upper;
    std::vector<i64> w;

    static IPInstance from_spec(FourBlockSpec s, bool three, std::vector<i64> rhs,
                                std::vector<Bound> lo, std::vector<Bound> hi,
                                std::vector<i64> obj) {
        IPInstance inst;
        inst.spec = std::move(s);
        inst.three_block = three;
        inst.b = std::move(rhs);
        inst.lower = std::move(lo);
        inst.upper = std::move(hi);
        inst.w = std::move(obj);
        inst.validate();
        return inst;
    }

    static IPInstance from_matrix(SmallMatrix m, std::vector<i64> rhs,
                                  std::vector<Bound> lo, std::vector<Bound> hi,
                                  std::vector<i64> obj) {
        IPInstance inst;
        inst.matrix = std::move(m);
        inst.b = std::move(rhs);
        inst.lower = std::move(lo);
        inst.upper = std::move(hi);
        inst.w = std::move(obj);
        inst.validate();
        return inst;
    }

    bool is_block() const { return spec.has_value(); }

    int num_vars() const {
        return is_block() ? spec->num_cols() : matrix->cols();
    }
    int num_rows() const {
        return is_block() ? spec->num_rows() : matrix->rows();
    }

    // The effective constraint matrix (H, H0, or the explicit matrix).
    SmallMatrix constraint_matrix() const {
        if (is_block())
            return assemble(*spec, three_block ? MatrixKind::H0 : MatrixKind::H);
        return *matrix;
    }

    void validate() const {
        if (is_block() == matrix.has_value())
            throw dim_error("instance: exactly one of spec/matrix required");
        if (is_block()) {
            spec->validate();
            if (three_block && !spec->is_three_block())
                throw dim_error("instance: three_block set but C is nonzero");
        }
        int nv = num_vars(), nr = num_rows();
        if ((int)b.size() != nr) throw dim_error("instance: b length mismatch");
        if ((int)w.size() != nv) throw dim_error("instance: w length mismatch");
        if ((int)lower.size() != nv || (int)upper.size() != nv)
            throw dim_error("instance: bound length mismatch");
        for (int i = 0; i < nv; ++i)
            if (!bound_le(lower[i], upper[i]))
                throw dim_error("instance: lower > upper at coordinate " +
                                std::to_string(i));
    }

    bool feasible_point(std::span<const i64> x) const {
        if ((int)x.size() != num_vars()) return false;
        for (int i = 0; i < num_vars(); ++i)
            if (!within(lower[i], x[i], upper[i])) return false;
        std::vector<i64> hx = constraint_matrix().apply(x);
        return hx == b;
    }

    i64 objective(std::span<const i64> x) const {
        i64 s = 0;
        for (size_t i = 0; i < x.size(); ++i)
            s = checked_add(s, checked_mul(w[i], x[i]));
        return s;
    }
};

}  // namespace blockip
