#include "blockip/steinitz.hpp"

#include <algorithm>
#include <map>

namespace blockip {

namespace {

/////////////////////////////////////////////////////////////////////////////
// Exact phase-1 simplex for the certificate systems. Variables live in
// [0, ub]; we only need feasibility plus a basic solution, so the objective
// is the sum of artificials and pivoting follows Bland's rule. Tableau
// entries are ratios of minors of the (small) integer input, so Rat64 is
// exact here.

class FeasibilitySimplex {
public:
    // system: for lambda in [0, ub]^n, sum_i lambda_i * cols[i] = rhs
    FeasibilitySimplex(const std::vector<std::vector<i64>>& cols,
                       const std::vector<i64>& rhs, i64 ub)
        : n_((int)cols.size()), m_((int)rhs.size()), ub_(ub) {
        tab_.assign(m_, std::vector<Rat64>(n_ + m_ + 1, Rat64(0)));
        for (int r = 0; r < m_; ++r) {
            i64 s = rhs[r] >= 0 ? 1 : -1;
            for (int j = 0; j < n_; ++j) tab_[r][j] = Rat64(checked_mul(s, cols[j][r]));
            tab_[r][n_ + r] = Rat64(1);
            tab_[r][n_ + m_] = Rat64(checked_mul(s, rhs[r]));
        }
        basis_.resize(m_);
        for (int r = 0; r < m_; ++r) basis_[r] = n_ + r;
        at_upper_.assign(n_ + m_, false);
    }

    // returns the feasible lambda, or nullopt if the system is infeasible
    std::optional<std::vector<Rat64>> run() {
        // objective row: minimize sum of artificials. Only the reduced costs
        // of the structural/artificial columns are kept; the rhs slot is
        // never read and dropping it keeps every entry determinant-bounded.
        std::vector<Rat64> obj(n_ + m_, Rat64(0));
        for (int r = 0; r < m_; ++r)
            for (int j = 0; j < n_ + m_; ++j)
                obj[j] = obj[j] - tab_[r][j];
        for (int r = 0; r < m_; ++r) obj[basis_[r]] = Rat64(0);

        while (true) {
            int enter = -1;
            bool from_upper = false;
            for (int j = 0; j < n_ + m_; ++j) {
                if (is_basic(j)) continue;
                if (!at_upper_[j] && obj[j] < Rat64(0)) { enter = j; break; }
                if (at_upper_[j] && obj[j] > Rat64(0)) { enter = j; from_upper = true; break; }
            }
            if (enter < 0) break;

            // direction: entering moves by +t (from lower) or -t (from upper);
            // Bland: among blocking variables at the minimal ratio, the one
            // with the smallest index leaves (the entering variable's own
            // bound counts as a blocking candidate -> bound flip). Artificial
            // variables have no upper bound.
            bool have_t = false;
            Rat64 tmax(0);
            int leave_row = -1;
            int leave_var = -1;
            bool leave_to_upper = false;
            if (enter < n_) {
                have_t = true;
                tmax = Rat64(ub_);
                leave_var = enter;
            }
            for (int r = 0; r < m_; ++r) {
                Rat64 a = tab_[r][enter];
                if (!from_upper) a = -a;  // basic value changes by a*t
                if (a.sign() == 0) continue;
                if (a.sign() > 0 && basis_[r] >= n_) continue;  // no upper bound
                Rat64 bv = value_of_basic(r);
                Rat64 room = a.sign() < 0 ? bv : (Rat64(ub_) - bv);
                Rat64 t = room / a.abs();
                if (!have_t || t < tmax || (t == tmax && basis_[r] < leave_var)) {
                    have_t = true;
                    tmax = t;
                    leave_row = r;
                    leave_var = basis_[r];
                    leave_to_upper = a.sign() > 0;
                }
            }
            if (!have_t)
                throw invariant_error("simplex: unbounded phase-1 direction");

            if (leave_row < 0) {
                // bound flip
                at_upper_[enter] = !at_upper_[enter];
                shift_rhs(enter, from_upper ? -tmax : tmax, obj);
                continue;
            }

            pivot(leave_row, enter, from_upper, leave_to_upper, obj);
        }

        for (int r = 0; r < m_; ++r)
            if (basis_[r] >= n_ && value_of_basic(r).sign() != 0)
                return std::nullopt;

        std::vector<Rat64> lambda(n_, Rat64(0));
        for (int j = 0; j < n_; ++j)
            if (at_upper_[j]) lambda[j] = Rat64(ub_);
        for (int r = 0; r < m_; ++r)
            if (basis_[r] < n_) lambda[basis_[r]] = value_of_basic(r);
        return lambda;
    }

private:
    bool is_basic(int j) const {
        for (int r = 0; r < m_; ++r)
            if (basis_[r] == j) return true;
        return false;
    }

    // current value of the basic variable in row r
    Rat64 value_of_basic(int r) const { return tab_[r][n_ + m_]; }

    // moving nonbasic j by delta changes each basic value by -tab[r][j]*delta
    void shift_rhs(int j, const Rat64& delta, std::vector<Rat64>& obj) {
        for (int r = 0; r < m_; ++r)
            tab_[r][n_ + m_] = tab_[r][n_ + m_] - tab_[r][j] * delta;
        (void)obj;
    }

    void pivot(int row, int enter, bool enter_from_upper, bool leave_to_upper,
               std::vector<Rat64>& obj) {
        int leave = basis_[row];
        // express the tableau relative to lower bounds before pivoting
        if (enter_from_upper) {
            shift_rhs(enter, Rat64(-ub_), obj);
            at_upper_[enter] = false;
        }
        Rat64 p = tab_[row][enter];
        if (p.sign() == 0) throw invariant_error("simplex: zero pivot");
        for (int j = 0; j <= n_ + m_; ++j) tab_[row][j] = tab_[row][j] / p;
        for (int r = 0; r < m_; ++r) {
            if (r == row) continue;
            Rat64 f = tab_[r][enter];
            if (f.sign() == 0) continue;
            for (int j = 0; j <= n_ + m_; ++j)
                tab_[r][j] = tab_[r][j] - f * tab_[row][j];
        }
        Rat64 fo = obj[enter];
        if (fo.sign() != 0)
            for (int j = 0; j < n_ + m_; ++j)
                obj[j] = obj[j] - fo * tab_[row][j];
        basis_[row] = enter;
        if (leave_to_upper) {
            at_upper_[leave] = true;
            shift_rhs(leave, Rat64(ub_), obj);
        }
    }

    int n_, m_;
    i64 ub_;
    std::vector<std::vector<Rat64>> tab_;
    std::vector<int> basis_;
    std::vector<bool> at_upper_;
};

/////////////////////////////////////////////////////////////////////////////

i64 deviation_of(const std::vector<std::vector<i64>>& vectors,
                 const std::vector<size_t>& perm, const std::vector<i64>& total,
                 i64 kappa) {
    const i64 m = (i64)vectors.size();
    std::vector<i64> prefix(total.size(), 0);
    i64 dev = 0;
    for (i64 l = 1; l <= m; ++l) {
        const auto& v = vectors[perm[l - 1]];
        for (size_t c = 0; c < prefix.size(); ++c) {
            prefix[c] = checked_add(prefix[c], v[c]);
            // m*prefix - (l-kappa)*x, exact scaled deviation
            i64 d = checked_sub(checked_mul(m, prefix[c]),
                                checked_mul(l - kappa, total[c]));
            dev = std::max(dev, abs_i64(d));
        }
    }
    return dev;
}

std::vector<size_t> greedy_order(const std::vector<std::vector<i64>>& vectors,
                                 const std::vector<i64>& total, i64 kappa) {
    const i64 m = (i64)vectors.size();
    const size_t dim = total.size();
    std::vector<bool> used(vectors.size(), false);
    std::vector<i64> prefix(dim, 0);
    std::vector<size_t> perm;
    perm.reserve(vectors.size());
    for (i64 l = 1; l <= m; ++l) {
        int best = -1;
        i64 best_dev = 0;
        for (size_t i = 0; i < vectors.size(); ++i) {
            if (used[i]) continue;
            i64 dev = 0;
            for (size_t c = 0; c < dim; ++c) {
                i64 p = checked_add(prefix[c], vectors[i][c]);
                i64 d = checked_sub(checked_mul(m, p),
                                    checked_mul(l - kappa, total[c]));
                dev = std::max(dev, abs_i64(d));
            }
            if (best < 0 || dev < best_dev) { best = (int)i; best_dev = dev; }
        }
        used[best] = true;
        for (size_t c = 0; c < dim; ++c)
            prefix[c] = checked_add(prefix[c], vectors[best][c]);
        perm.push_back((size_t)best);
    }
    return perm;
}

// Classical nested-set construction. For l = m..kappa+1 we find a feasible
// lambda in [0, m]^{S} (scaled by m) with sum lambda_i = (l-1-kappa)*m and
// sum lambda_i x_i = (l-1-kappa)*x; a basic solution always has a zero
// coordinate, which becomes position l.
std::vector<size_t> exact_order(const std::vector<std::vector<i64>>& vectors,
                                const std::vector<i64>& total, i64 kappa) {
    const i64 m = (i64)vectors.size();
    std::vector<size_t> active(vectors.size());
    for (size_t i = 0; i < active.size(); ++i) active[i] = i;
    std::vector<size_t> perm(vectors.size());

    for (i64 l = m; l >= kappa + 1; --l) {
        const i64 mass = l - 1 - kappa;
        std::vector<std::vector<i64>> cols;
        cols.reserve(active.size());
        for (size_t idx : active) {
            std::vector<i64> col(vectors[idx]);
            col.push_back(1);
            cols.push_back(std::move(col));
        }
        std::vector<i64> rhs;
        rhs.reserve(total.size() + 1);
        for (i64 xc : total) rhs.push_back(checked_mul(mass, xc));
        rhs.push_back(checked_mul(mass, m));

        FeasibilitySimplex lp(cols, rhs, m);
        auto lambda = lp.run();
        if (!lambda)
            throw invariant_error("steinitz: certificate system infeasible");

        int zero_pos = -1;
        for (size_t j = 0; j < lambda->size(); ++j)
            if ((*lambda)[j].is_zero()) { zero_pos = (int)j; break; }
        if (zero_pos < 0)
            throw invariant_error("steinitz: basic certificate has no zero coordinate");

        perm[l - 1] = active[zero_pos];
        active.erase(active.begin() + zero_pos);
    }
    for (size_t p = 0; p < active.size(); ++p) perm[p] = active[p];
    return perm;
}

}  // namespace

RearrangementResult steinitz_permute(const std::vector<std::vector<i64>>& vectors,
                                     SteinitzMode mode) {
    if (vectors.empty()) throw dim_error("steinitz: empty sequence");
    const size_t dim = vectors.front().size();
    if (dim == 0) throw dim_error("steinitz: zero-dimensional vectors");
    for (const auto& v : vectors)
        if (v.size() != dim) throw dim_error("steinitz: mixed dimensions");

    const i64 kappa = (i64)dim;
    const i64 m = (i64)vectors.size();
    std::vector<i64> total(dim, 0);
    i64 zeta = 0;
    for (const auto& v : vectors)
        for (size_t c = 0; c < dim; ++c) {
            total[c] = checked_add(total[c], v[c]);
            zeta = std::max(zeta, abs_i64(v[c]));
        }

    RearrangementResult out;
    out.deviation_den = m;

    if (m <= kappa) {
        out.permutation.resize(vectors.size());
        for (size_t i = 0; i < vectors.size(); ++i) out.permutation[i] = i;
        out.deviation_num = deviation_of(vectors, out.permutation, total, kappa);
        return out;
    }

    if (mode == SteinitzMode::greedy_then_exact) {
        auto perm = greedy_order(vectors, total, kappa);
        i64 dev = deviation_of(vectors, perm, total, kappa);
        if (dev <= checked_mul(checked_mul(kappa, zeta), m)) {
            out.permutation = std::move(perm);
            out.deviation_num = dev;
            return out;
        }
    }

    out.permutation = exact_order(vectors, total, kappa);
    out.deviation_num = deviation_of(vectors, out.permutation, total, kappa);
    if (!out.bound_ok(kappa, zeta))
        throw invariant_error("steinitz: exact construction exceeded kappa*zeta");
    return out;
}

std::optional<std::pair<size_t, size_t>> prefix_collision(
    const std::vector<std::vector<i64>>& vectors, i64 box_radius) {
    if (vectors.empty()) throw dim_error("prefix_collision: empty sequence");
    const size_t dim = vectors.front().size();
    std::vector<i64> prefix(dim, 0);
    std::map<std::vector<i64>, size_t> seen;
    seen.emplace(prefix, 0);
    for (size_t l = 1; l <= vectors.size(); ++l) {
        const auto& v = vectors[l - 1];
        if (v.size() != dim) throw dim_error("prefix_collision: mixed dimensions");
        for (size_t c = 0; c < dim; ++c) {
            prefix[c] = checked_add(prefix[c], v[c]);
            if (abs_i64(prefix[c]) > box_radius)
                throw invariant_error("prefix_collision: prefix escapes the box");
        }
        auto [it, inserted] = seen.emplace(prefix, l);
        if (!inserted) return std::make_pair(it->second, l);
    }
    return std::nullopt;
}

}  // namespace blockip
