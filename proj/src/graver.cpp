#include "blockip/graver.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <numeric>

#include "blockip/parallel.hpp"

namespace blockip {

bool conforms(std::span<const i64> x, std::span<const i64> y) {
    if (x.size() != y.size())
        throw dim_error("conforms: dimension mismatch");
    for (size_t i = 0; i < x.size(); ++i) {
        if (abs_i64(x[i]) > abs_i64(y[i])) return false;
        if (x[i] > 0 && y[i] < 0) return false;
        if (x[i] < 0 && y[i] > 0) return false;
    }
    return true;
}

bool sign_compatible(std::span<const i64> x, std::span<const i64> y) {
    if (x.size() != y.size())
        throw dim_error("sign_compatible: dimension mismatch");
    for (size_t i = 0; i < x.size(); ++i)
        if ((x[i] > 0 && y[i] < 0) || (x[i] < 0 && y[i] > 0)) return false;
    return true;
}

/////////////////////////////////////////////////////////////////////////////
// Kernel lattice basis via integer row reduction of [M^T | I].

std::vector<std::vector<i64>> kernel_lattice_basis(const SmallMatrix& m) {
    const int r = m.rows(), c = m.cols();
    // rows of work = columns of M, first r entries hold M^T, trailing c hold I
    std::vector<std::vector<i64>> work(c, std::vector<i64>(r + c, 0));
    for (int i = 0; i < c; ++i) {
        for (int j = 0; j < r; ++j) work[i][j] = m.at(j, i);
        work[i][r + i] = 1;
    }

    int row = 0;
    for (int col = 0; col < r && row < c; ++col) {
        // euclidean elimination in this column below `row`
        while (true) {
            int piv = -1;
            i64 best = 0;
            for (int i = row; i < c; ++i) {
                i64 v = abs_i64(work[i][col]);
                if (v != 0 && (piv < 0 || v < best)) { piv = i; best = v; }
            }
            if (piv < 0) break;
            std::swap(work[row], work[piv]);
            bool clean = true;
            for (int i = row + 1; i < c; ++i) {
                if (work[i][col] == 0) continue;
                i64 q = div_floor(work[i][col], work[row][col]);
                if (q != 0)
                    for (int j = 0; j < r + c; ++j)
                        work[i][j] = checked_sub(work[i][j],
                                                 checked_mul(q, work[row][j]));
                if (work[i][col] != 0) clean = false;
            }
            if (clean) { ++row; break; }
        }
    }

    std::vector<std::vector<i64>> basis;
    for (int i = row; i < c; ++i) {
        bool zero_head = true;
        for (int j = 0; j < r; ++j)
            if (work[i][j] != 0) { zero_head = false; break; }
        if (!zero_head)
            throw invariant_error("kernel basis: reduction left a nonzero head row");
        std::vector<i64> v(work[i].begin() + r, work[i].end());
        bool nz = false;
        for (i64 e : v) if (e != 0) { nz = true; break; }
        if (nz) basis.push_back(std::move(v));
    }
    return basis;
}

// Solve M x = rhs over the integers: row-reduce M^T with unimodular ops
// (tracking the transform), express rhs greedily over the echelon rows with
// divisibility checks, then map back.
std::optional<std::vector<i64>> lattice_solve(const SmallMatrix& m,
                                              std::span<const i64> rhs) {
    const int r = m.rows(), c = m.cols();
    if ((int)rhs.size() != r) throw dim_error("lattice_solve: rhs length");
    std::vector<std::vector<i64>> work(c, std::vector<i64>(r + c, 0));
    for (int i = 0; i < c; ++i) {
        for (int j = 0; j < r; ++j) work[i][j] = m.at(j, i);
        work[i][r + i] = 1;
    }
    int row = 0;
    for (int col = 0; col < r && row < c; ++col) {
        while (true) {
            int piv = -1;
            i64 best = 0;
            for (int i = row; i < c; ++i) {
                i64 v = abs_i64(work[i][col]);
                if (v != 0 && (piv < 0 || v < best)) { piv = i; best = v; }
            }
            if (piv < 0) break;
            std::swap(work[row], work[piv]);
            bool clean = true;
            for (int i = row + 1; i < c; ++i) {
                if (work[i][col] == 0) continue;
                i64 q = div_floor(work[i][col], work[row][col]);
                if (q != 0)
                    for (int j = 0; j < r + c; ++j)
                        work[i][j] = checked_sub(work[i][j],
                                                 checked_mul(q, work[row][j]));
                if (work[i][col] != 0) clean = false;
            }
            if (clean) { ++row; break; }
        }
    }

    std::vector<i64> residual(rhs.begin(), rhs.end());
    std::vector<i64> x(c, 0);
    for (int i = 0; i < row; ++i) {
        int lead = -1;
        for (int j = 0; j < r; ++j)
            if (work[i][j] != 0) { lead = j; break; }
        if (lead < 0) continue;
        if (residual[lead] % work[i][lead] != 0) continue;
        i64 q = residual[lead] / work[i][lead];
        if (q == 0) continue;
        for (int j = 0; j < r; ++j)
            residual[j] = checked_sub(residual[j], checked_mul(q, work[i][j]));
        for (int j = 0; j < c; ++j)
            x[j] = checked_add(x[j], checked_mul(q, work[i][r + j]));
    }
    for (i64 e : residual)
        if (e != 0) return std::nullopt;
    return x;
}

/////////////////////////////////////////////////////////////////////////////
// Bounded enumeration.

namespace {

struct EnumCtx {
    const SmallMatrix& m;
    i64 radius;
    u64 budget;
    // suffix_cap[r][c] = radius * sum_{j>=c} |m[r][j]|
    std::vector<std::vector<i64>> suffix_cap;
    std::vector<std::vector<i64>> found;
    u64 nodes = 0;
    bool stop_at_first = false;
    bool minimal_only_sym = false;  // enumerate first-nonzero-positive half
    bool done = false;
};

void enum_dfs(EnumCtx& ctx, std::vector<i64>& x, std::vector<i64>& partial,
              int depth, bool all_zero) {
    if (ctx.done) return;
    if (++ctx.nodes > ctx.budget)
        throw budget_error("enumeration node budget exceeded");
    const int cols = ctx.m.cols(), rows = ctx.m.rows();
    if (depth == cols) {
        if (all_zero) return;
        for (int r = 0; r < rows; ++r)
            if (partial[r] != 0) return;
        ctx.found.push_back(x);
        if (ctx.stop_at_first) ctx.done = true;
        return;
    }
    for (int r = 0; r < rows; ++r)
        if (abs_i64(partial[r]) > ctx.suffix_cap[r][depth]) return;

    i64 lo = -ctx.radius;
    if (ctx.minimal_only_sym && all_zero) lo = 0;
    for (i64 v = lo; v <= ctx.radius; ++v) {
        x[depth] = v;
        for (int r = 0; r < rows; ++r)
            partial[r] = checked_add(partial[r], checked_mul(ctx.m.at(r, depth), v));
        enum_dfs(ctx, x, partial, depth + 1, all_zero && v == 0);
        for (int r = 0; r < rows; ++r)
            partial[r] = checked_sub(partial[r], checked_mul(ctx.m.at(r, depth), v));
        if (ctx.done) return;
    }
    x[depth] = 0;
}

std::vector<std::vector<i64>> suffix_caps(const SmallMatrix& m, i64 radius) {
    std::vector<std::vector<i64>> cap(m.rows(), std::vector<i64>(m.cols() + 1, 0));
    for (int r = 0; r < m.rows(); ++r)
        for (int c = m.cols() - 1; c >= 0; --c)
            cap[r][c] = checked_add(cap[r][c + 1],
                                    checked_mul(radius, abs_i64(m.at(r, c))));
    return cap;
}

// Keep only conformal-minimal elements. The input must contain every kernel
// point that could witness non-minimality (true for box enumerations).
std::vector<std::vector<i64>> minimal_filter(std::vector<std::vector<i64>> v) {
    std::sort(v.begin(), v.end(),
              [](const std::vector<i64>& a, const std::vector<i64>& b) {
                  i64 na = 0, nb = 0;
                  for (i64 e : a) na += abs_i64(e);
                  for (i64 e : b) nb += abs_i64(e);
                  if (na != nb) return na < nb;
                  return a < b;
              });
    std::vector<std::vector<i64>> out;
    for (const auto& g : v) {
        bool dominated = false;
        for (const auto& h : out) {
            if (h != g && conforms(h, g)) { dominated = true; break; }
        }
        if (!dominated) out.push_back(g);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<std::vector<i64>> kernel_points(const SmallMatrix& m, i64 radius,
                                            u64 node_budget, bool stop_at_first) {
    if (radius < 0) throw dim_error("kernel_points: negative radius");
    EnumCtx ctx{m, radius, node_budget, suffix_caps(m, radius), {}, 0,
                stop_at_first, false, false};
    std::vector<i64> x(m.cols(), 0), partial(m.rows(), 0);
    if (radius > 0 && m.cols() > 0) enum_dfs(ctx, x, partial, 0, true);
    std::sort(ctx.found.begin(), ctx.found.end());
    return ctx.found;
}

GraverSet graver_enumerate(const SmallMatrix& m, i64 radius,
                           const EnumerateOptions& opts) {
    if (radius < 1) throw dim_error("graver_enumerate: radius must be >= 1");
    std::vector<std::vector<i64>> half;
    if (m.cols() > 0) {
        if (opts.threads <= 1) {
            EnumCtx ctx{m, radius, opts.node_budget, suffix_caps(m, radius),
                        {}, 0, false, true, false};
            std::vector<i64> x(m.cols(), 0), partial(m.rows(), 0);
            enum_dfs(ctx, x, partial, 0, true);
            half = std::move(ctx.found);
        } else {
            // split the first coordinate's value range across workers;
            // merge in fixed (value) order so results are deterministic
            std::vector<std::vector<std::vector<i64>>> parts(radius + 1);
            std::atomic<bool> overrun{false};
            auto caps = suffix_caps(m, radius);
            u64 per_budget = opts.node_budget / (u64)(radius + 1) + 1;
            parallel_for((size_t)radius + 1, (size_t)opts.threads, [&](size_t k, size_t) {
                i64 v0 = (i64)k;  // first nonzero coordinate is positive
                EnumCtx ctx{m, radius, per_budget, caps, {}, 0, false, true, false};
                std::vector<i64> x(m.cols(), 0), partial(m.rows(), 0);
                x[0] = v0;
                for (int r = 0; r < m.rows(); ++r)
                    partial[r] = checked_mul(m.at(r, 0), v0);
                try {
                    enum_dfs(ctx, x, partial, 1, v0 == 0);
                } catch (const budget_error&) {
                    overrun = true;
                }
                parts[k] = std::move(ctx.found);
            });
            if (overrun) throw budget_error("enumeration node budget exceeded");
            for (auto& p : parts)
                half.insert(half.end(), p.begin(), p.end());
        }
    }

    std::vector<std::vector<i64>> all;
    all.reserve(half.size() * 2);
    for (const auto& g : half) {
        all.push_back(g);
        std::vector<i64> neg(g.size());
        for (size_t i = 0; i < g.size(); ++i) neg[i] = checked_neg(g[i]);
        all.push_back(std::move(neg));
    }

    GraverSet gs;
    gs.matrix = m;
    gs.elements = minimal_filter(std::move(all));
    gs.method = GraverMethod::enumeration;
    gs.radius = radius;
    gs.certified_complete =
        opts.asserted_norm_bound > 0 && radius >= opts.asserted_norm_bound;
    return gs;
}

/////////////////////////////////////////////////////////////////////////////
// Completion.

namespace {

// Repeatedly subtract conforming elements; empty result means reducible to 0.
bool normal_form(std::vector<i64>& s, const std::vector<std::vector<i64>>& g) {
    bool changed = true;
    while (changed) {
        bool zero = true;
        for (i64 e : s) if (e != 0) { zero = false; break; }
        if (zero) return false;
        changed = false;
        for (const auto& h : g) {
            if (conforms(h, s)) {
                bool hz = true;
                for (i64 e : h) if (e != 0) { hz = false; break; }
                if (hz) continue;
                for (size_t i = 0; i < s.size(); ++i)
                    s[i] = checked_sub(s[i], h[i]);
                changed = true;
                break;
            }
        }
    }
    return true;
}

}  // namespace

GraverSet graver_complete(const SmallMatrix& m, const CompleteOptions& opts) {
    GraverSet gs;
    gs.matrix = m;
    gs.method = GraverMethod::completion;

    std::vector<std::vector<i64>> g;
    for (auto& v : kernel_lattice_basis(m)) {
        std::vector<i64> neg(v.size());
        for (size_t i = 0; i < v.size(); ++i) neg[i] = checked_neg(v[i]);
        g.push_back(std::move(v));
        g.push_back(std::move(neg));
    }

    bool complete = true;
    std::deque<std::pair<size_t, size_t>> pairs;
    for (size_t i = 0; i < g.size(); ++i)
        for (size_t j = i; j < g.size(); ++j) pairs.emplace_back(i, j);

    while (!pairs.empty()) {
        auto [i, j] = pairs.front();
        pairs.pop_front();
        std::vector<i64> s(g[i].size());
        for (size_t k = 0; k < s.size(); ++k)
            s[k] = checked_add(g[i][k], g[j][k]);
        if (!normal_form(s, g)) continue;
        std::vector<i64> neg(s.size());
        for (size_t k = 0; k < s.size(); ++k) neg[k] = checked_neg(s[k]);
        size_t base = g.size();
        g.push_back(std::move(s));
        g.push_back(std::move(neg));
        for (size_t k = 0; k < g.size(); ++k) {
            pairs.emplace_back(k, base);
            pairs.emplace_back(k, base + 1);
        }
        if (g.size() > opts.element_budget) {
            complete = false;
            break;
        }
    }

    gs.elements = minimal_filter(std::move(g));
    gs.certified_complete = complete;
    return gs;
}

/////////////////////////////////////////////////////////////////////////////
// Positive conformal decomposition.

std::vector<DecomposeTerm> graver_decompose(std::span<const i64> y,
                                            const GraverSet& basis) {
    if ((int)y.size() != basis.matrix.cols())
        throw dim_error("graver_decompose: dimension mismatch");
    std::vector<i64> res = basis.matrix.apply(y);
    for (i64 e : res)
        if (e != 0) throw invariant_error("graver_decompose: y is not in the kernel");
    if (!basis.certified_complete)
        throw invariant_error("graver_decompose: basis is not certified complete");

    std::vector<i64> r(y.begin(), y.end());
    std::vector<DecomposeTerm> terms;
    while (true) {
        bool zero = true;
        for (i64 e : r) if (e != 0) { zero = false; break; }
        if (zero) break;

        const std::vector<i64>* best = nullptr;
        i64 best_norm = -1;
        for (const auto& g : basis.elements) {
            if (!conforms(g, r)) continue;
            i64 nn = 0;
            for (i64 e : g) nn = std::max(nn, abs_i64(e));
            if (nn == 0) continue;
            if (nn > best_norm || (nn == best_norm && g < *best)) {
                best = &g;
                best_norm = nn;
            }
        }
        if (!best)
            throw invariant_error(
                "graver_decompose: decomposition stalled (incomplete basis)");

        // largest alpha with alpha*g still conformal to the residual
        i64 alpha = 0;
        for (size_t i = 0; i < r.size(); ++i) {
            if ((*best)[i] == 0) continue;
            i64 q = abs_i64(r[i]) / abs_i64((*best)[i]);
            alpha = alpha == 0 ? q : std::min(alpha, q);
        }
        if (alpha < 1)
            throw invariant_error("graver_decompose: conforming element with alpha 0");
        for (size_t i = 0; i < r.size(); ++i)
            r[i] = checked_sub(r[i], checked_mul(alpha, (*best)[i]));
        terms.push_back(DecomposeTerm{alpha, *best});
    }
    return terms;
}

}  // namespace blockip
