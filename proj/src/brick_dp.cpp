#include "blockip/brick_dp.hpp"

#include <algorithm>
#include <unordered_map>

namespace blockip {

namespace {

constexpr u64 kCountCap = u64(1) << 62;

struct VecHash {
    size_t operator()(const std::vector<i64>& v) const {
        size_t h = 1469598103934665603ull;
        for (i64 e : v) {
            h ^= (size_t)e;
            h *= 1099511628211ull;
        }
        return h;
    }
};

template <typename T>
using StateMap = std::unordered_map<std::vector<i64>, T, VecHash>;

std::vector<i64> step_state(const SmallMatrix& d, const std::vector<i64>& s,
                            const std::vector<i64>& z) {
    std::vector<i64> t = s;
    for (int r = 0; r < d.rows(); ++r) {
        i64 acc = 0;
        for (int c = 0; c < d.cols(); ++c)
            acc = checked_add(acc, checked_mul(d.at(r, c), z[c]));
        t[r] = checked_add(t[r], acc);
    }
    return t;
}

// value[i][s] over states s reachable backward from the target: best cost
// (or count) of completing stages i..n-1 starting from partial sum s.
template <typename T, typename Combine, typename Init>
std::vector<StateMap<T>> backward_tables(const SmallMatrix& d,
                                         const std::vector<BrickStage>& stages,
                                         std::span<const i64> target,
                                         const BrickDPOptions& opts, Init init,
                                         Combine combine, u64* states_out) {
    const size_t n = stages.size();
    std::vector<StateMap<T>> val(n + 1);
    std::vector<i64> tgt(target.begin(), target.end());
    val[n].emplace(tgt, init());
    u64 total_states = 1;
    for (size_t i = n; i-- > 0;) {
        auto& cur = val[i];
        for (const auto& [s_next, v_next] : val[i + 1]) {
            for (size_t c = 0; c < stages[i].cands.size(); ++c) {
                // predecessor state: s_next - D*z
                std::vector<i64> s_prev = s_next;
                for (int r = 0; r < d.rows(); ++r) {
                    i64 acc = 0;
                    for (int cc = 0; cc < d.cols(); ++cc)
                        acc = checked_add(acc, checked_mul(d.at(r, cc),
                                                           stages[i].cands[c][cc]));
                    s_prev[r] = checked_sub(s_prev[r], acc);
                }
                auto [it, fresh] = cur.emplace(std::move(s_prev), T{});
                combine(it->second, fresh, stages[i].costs[c], v_next);
                if (fresh && ++total_states > opts.state_budget)
                    throw budget_error("brick dp state budget exceeded");
            }
        }
    }
    if (states_out) *states_out = total_states;
    return val;
}

struct MinCell {
    i64 cost = 0;
    bool set = false;
};

}  // namespace

BrickDPSolution brick_dp_min(const SmallMatrix& d,
                             const std::vector<BrickStage>& stages,
                             std::span<const i64> target,
                             const BrickDPOptions& opts) {
    BrickDPSolution sol;
    for (const auto& st : stages)
        if (st.cands.empty()) return sol;

    auto val = backward_tables<MinCell>(
        d, stages, target, opts, [] { return MinCell{0, true}; },
        [](MinCell& cell, bool, i64 cost, const MinCell& next) {
            if (!next.set) return;
            i64 total = checked_add(cost, next.cost);
            if (!cell.set || total < cell.cost) {
                cell.cost = total;
                cell.set = true;
            }
        },
        &sol.states_visited);

    std::vector<i64> s(d.rows(), 0);
    auto it0 = val[0].find(s);
    if (it0 == val[0].end() || !it0->second.set) return sol;
    sol.found = true;
    sol.cost = it0->second.cost;

    i64 remaining = sol.cost;
    for (size_t i = 0; i < stages.size(); ++i) {
        bool picked = false;
        for (size_t c = 0; c < stages[i].cands.size(); ++c) {
            std::vector<i64> nxt = step_state(d, s, stages[i].cands[c]);
            auto it = val[i + 1].find(nxt);
            if (it == val[i + 1].end() || !it->second.set) continue;
            if (checked_add(stages[i].costs[c], it->second.cost) == remaining) {
                sol.picks.push_back(stages[i].cands[c]);
                remaining = checked_sub(remaining, stages[i].costs[c]);
                s = std::move(nxt);
                picked = true;
                break;
            }
        }
        if (!picked)
            throw invariant_error("brick dp: reconstruction lost the optimum");
    }
    return sol;
}

u64 brick_dp_count(const SmallMatrix& d, const std::vector<BrickStage>& stages,
                   std::span<const i64> target, const BrickDPOptions& opts) {
    for (const auto& st : stages)
        if (st.cands.empty()) return 0;
    auto val = backward_tables<u64>(
        d, stages, target, opts, [] { return u64(1); },
        [](u64& cell, bool fresh, i64, const u64& next) {
            if (fresh) cell = 0;
            cell = cell > kCountCap - next ? kCountCap : cell + next;
        },
        nullptr);
    std::vector<i64> s(d.rows(), 0);
    auto it = val[0].find(s);
    return it == val[0].end() ? 0 : it->second;
}

std::optional<std::vector<std::vector<i64>>> brick_dp_unrank(
    const SmallMatrix& d, const std::vector<BrickStage>& stages,
    std::span<const i64> target, u64 k, const BrickDPOptions& opts) {
    for (const auto& st : stages)
        if (st.cands.empty()) return std::nullopt;
    auto val = backward_tables<u64>(
        d, stages, target, opts, [] { return u64(1); },
        [](u64& cell, bool fresh, i64, const u64& next) {
            if (fresh) cell = 0;
            cell = cell > kCountCap - next ? kCountCap : cell + next;
        },
        nullptr);
    std::vector<i64> s(d.rows(), 0);
    auto it0 = val[0].find(s);
    if (it0 == val[0].end() || k >= it0->second) return std::nullopt;

    std::vector<std::vector<i64>> picks;
    for (size_t i = 0; i < stages.size(); ++i) {
        bool picked = false;
        for (size_t c = 0; c < stages[i].cands.size(); ++c) {
            std::vector<i64> nxt = step_state(d, s, stages[i].cands[c]);
            auto it = val[i + 1].find(nxt);
            if (it == val[i + 1].end()) continue;
            if (k < it->second) {
                picks.push_back(stages[i].cands[c]);
                s = std::move(nxt);
                picked = true;
                break;
            }
            k -= it->second;
        }
        if (!picked)
            throw invariant_error("brick dp: unrank lost its path");
    }
    return picks;
}

/////////////////////////////////////////////////////////////////////////////

namespace {

struct BrickEnumCtx {
    const SmallMatrix& a;
    std::span<const i64> rhs;
    std::span<const i64> lo;
    std::span<const i64> hi;
    std::vector<std::vector<i64>> suffix_cap;  // per row, per depth
    std::vector<std::vector<i64>> out;
    u64 nodes = 0;
    u64 budget;
};

void brick_dfs(BrickEnumCtx& ctx, std::vector<i64>& z, std::vector<i64>& partial,
               int depth) {
    if (++ctx.nodes > ctx.budget)
        throw budget_error("brick enumeration budget exceeded");
    const int cols = ctx.a.cols(), rows = ctx.a.rows();
    if (depth == cols) {
        for (int r = 0; r < rows; ++r)
            if (partial[r] != ctx.rhs[r]) return;
        ctx.out.push_back(z);
        return;
    }
    for (int r = 0; r < rows; ++r)
        if (abs_i64(checked_sub(ctx.rhs[r], partial[r])) > ctx.suffix_cap[r][depth])
            return;
    for (i64 v = ctx.lo[depth]; v <= ctx.hi[depth]; ++v) {
        z[depth] = v;
        for (int r = 0; r < rows; ++r)
            partial[r] = checked_add(partial[r], checked_mul(ctx.a.at(r, depth), v));
        brick_dfs(ctx, z, partial, depth + 1);
        for (int r = 0; r < rows; ++r)
            partial[r] = checked_sub(partial[r], checked_mul(ctx.a.at(r, depth), v));
    }
}

}  // namespace

std::vector<std::vector<i64>> enumerate_bricks(const SmallMatrix& a,
                                               std::span<const i64> rhs,
                                               std::span<const i64> lo,
                                               std::span<const i64> hi,
                                               u64 node_budget) {
    if ((int)rhs.size() != a.rows() || (int)lo.size() != a.cols() ||
        (int)hi.size() != a.cols())
        throw dim_error("enumerate_bricks: dimension mismatch");
    for (int c = 0; c < a.cols(); ++c)
        if (lo[c] > hi[c]) return {};

    BrickEnumCtx ctx{a, rhs, lo, hi, {}, {}, 0, node_budget};
    ctx.suffix_cap.assign(a.rows(), std::vector<i64>(a.cols() + 1, 0));
    for (int r = 0; r < a.rows(); ++r)
        for (int c = a.cols() - 1; c >= 0; --c) {
            i64 mag = std::max(abs_i64(lo[c]), abs_i64(hi[c]));
            ctx.suffix_cap[r][c] = checked_add(
                ctx.suffix_cap[r][c + 1], checked_mul(abs_i64(a.at(r, c)), mag));
        }
    std::vector<i64> z(a.cols(), 0), partial(a.rows(), 0);
    brick_dfs(ctx, z, partial, 0);
    return ctx.out;  // DFS ascends per coordinate, so output is lex-sorted
}

}  // namespace blockip
