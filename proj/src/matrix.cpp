#include "blockip/matrix.hpp"

namespace blockip {

std::vector<i64> SmallMatrix::apply(std::span<const i64> x) const {
    if ((int)x.size() != cols())
        throw dim_error("apply: vector length does not match matrix columns");
    std::vector<i64> y(rows(), 0);
    for (int r = 0; r < rows(); ++r) {
        i64 acc = 0;
        for (int c = 0; c < cols(); ++c)
            acc = checked_add(acc, checked_mul(at(r, c), x[c]));
        y[r] = acc;
    }
    return y;
}

i64 SmallMatrix::apply_row(int r, std::span<const i64> x) const {
    if ((int)x.size() != cols())
        throw dim_error("apply_row: vector length does not match matrix columns");
    i64 acc = 0;
    for (int c = 0; c < cols(); ++c)
        acc = checked_add(acc, checked_mul(at(r, c), x[c]));
    return acc;
}

void apply_accumulate(const SmallMatrix& m, std::span<const i64> x, i64 c,
                      std::vector<i64>& y) {
    if ((int)x.size() != m.cols() || (int)y.size() != m.rows())
        throw dim_error("apply_accumulate: dimension mismatch");
    for (int r = 0; r < m.rows(); ++r) {
        i64 acc = 0;
        for (int j = 0; j < m.cols(); ++j)
            acc = checked_add(acc, checked_mul(m.at(r, j), x[j]));
        y[r] = checked_add(y[r], checked_mul(c, acc));
    }
}

}  // namespace blockip
