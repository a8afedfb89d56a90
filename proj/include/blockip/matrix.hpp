// Dense exact-integer matrices. These stay small: they hold the building
// blocks A, B, C, D and the assembled block matrices at desk scale.
#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include "blockip/arith.hpp"

namespace blockip {

class SmallMatrix {
public:
    SmallMatrix() = default;

    SmallMatrix(int rows, int cols, std::vector<i64> entries)
        : rows_(rows), cols_(cols), entries_(std::move(entries)) {
        if (rows_ < 0 || cols_ < 0 ||
            entries_.size() != (size_t)rows_ * (size_t)cols_)
            throw dim_error("matrix entries do not match rows x cols");
    }

    SmallMatrix(int rows, int cols,
                std::initializer_list<i64> entries)
        : SmallMatrix(rows, cols, std::vector<i64>(entries)) {}

    static SmallMatrix zero(int rows, int cols) {
        return SmallMatrix(rows, cols, std::vector<i64>((size_t)rows * cols, 0));
    }

    static SmallMatrix identity(int t) {
        SmallMatrix m = zero(t, t);
        for (int i = 0; i < t; ++i) m.at(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    i64 at(int r, int c) const { return entries_[(size_t)r * cols_ + c]; }
    i64& at(int r, int c) { return entries_[(size_t)r * cols_ + c]; }

    const std::vector<i64>& entries() const { return entries_; }

    i64 max_abs() const {
        i64 m = 0;
        for (i64 e : entries_) m = std::max(m, abs_i64(e));
        return m;
    }

    bool is_zero() const {
        for (i64 e : entries_) if (e != 0) return false;
        return true;
    }

    std::vector<i64> row(int r) const {
        return std::vector<i64>(entries_.begin() + (size_t)r * cols_,
                                entries_.begin() + (size_t)(r + 1) * cols_);
    }

    SmallMatrix transpose() const {
        SmallMatrix t = zero(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c)
                t.at(c, r) = at(r, c);
        return t;
    }

    // exact matrix-vector product
    std::vector<i64> apply(std::span<const i64> x) const;

    i64 apply_row(int r, std::span<const i64> x) const;

    friend bool operator==(const SmallMatrix& a, const SmallMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<i64> entries_;
};

// y += c * M x, with y preallocated to m.rows().
void apply_accumulate(const SmallMatrix& m, std::span<const i64> x, i64 c,
                      std::vector<i64>& y);

}  // namespace blockip
