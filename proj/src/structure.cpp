#include "blockip/structure.hpp"

#include <algorithm>
#include <numeric>
#include <cstdlib>
#include <iostream>

#include "blockip/brick_dp.hpp"
#include "blockip/merging.hpp"

namespace blockip {

namespace {

void require_three_block(const FourBlockSpec& spec, const char* who) {
    if (!spec.is_three_block())
        throw dim_error(std::string(who) + ": requires a 3-block spec (C = 0)");
}

void require_kernel(const FourBlockSpec& spec, const BrickVector& y,
                    const char* who) {
    if (!in_kernel(spec, y, /*three_block=*/true))
        throw invariant_error(std::string(who) + ": input is not in ker(H0)");
}

// all brick-0 values conformal to u0 with |coord| <= xi, in lex order
std::vector<std::vector<i64>> conformal_guesses(std::span<const i64> u0, i64 xi) {
    std::vector<i64> lo(u0.size()), hi(u0.size());
    for (size_t c = 0; c < u0.size(); ++c) {
        lo[c] = std::max(std::min<i64>(u0[c], 0), -xi);
        hi[c] = std::min(std::max<i64>(u0[c], 0), xi);
    }
    std::vector<std::vector<i64>> out;
    std::vector<i64> cur = lo;
    if (u0.empty()) return {std::vector<i64>{}};
    while (true) {
        out.push_back(cur);
        int p = (int)u0.size() - 1;
        while (p >= 0 && cur[p] == hi[p]) { cur[p] = lo[p]; --p; }
        if (p < 0) break;
        ++cur[p];
    }
    return out;
}

i64 l1(std::span<const i64> v) {
    i64 s = 0;
    for (i64 e : v) s = checked_add(s, abs_i64(e));
    return s;
}

std::vector<i64> negate_vec(std::span<const i64> v) {
    std::vector<i64> r(v.begin(), v.end());
    for (auto& e : r) e = checked_neg(e);
    return r;
}

}  // namespace

/////////////////////////////////////////////////////////////////////////////
// Bounded decomposition.

namespace {

// best (lowest |r - e|_1) single bounded kernel step at the given cap
std::optional<std::pair<BrickVector, i64>> l1_step(const BrickVector& r,
                                                   const FourBlockSpec& spec,
                                                   i64 xi, u64 state_budget) {
    const int tA = spec.t_A();
    std::optional<std::pair<BrickVector, i64>> best;
    for (const auto& v : conformal_guesses(r.brick0, xi)) {
        std::vector<i64> rhs = negate_vec(spec.B.apply(v));
        std::vector<i64> lo(tA, -xi), hi(tA, xi);
        auto cands = enumerate_bricks(spec.A, rhs, lo, hi);
        if (cands.empty()) continue;

        std::vector<BrickStage> stages(spec.n);
        for (int i = 0; i < spec.n; ++i) {
            stages[i].cands = cands;
            stages[i].costs.resize(cands.size());
            for (size_t c = 0; c < cands.size(); ++c) {
                i64 cost = 0;
                for (int j = 0; j < tA; ++j)
                    cost = checked_add(
                        cost, abs_i64(checked_sub(r.bricks[i][j], cands[c][j])));
                stages[i].costs[c] = cost;
            }
        }
        std::vector<i64> target(spec.s_C(), 0);
        BrickDPOptions opts;
        opts.state_budget = state_budget;
        auto sol = brick_dp_min(spec.D, stages, target, opts);
        if (!sol.found) continue;
        i64 cost = sol.cost;
        for (size_t c = 0; c < v.size(); ++c)
            cost = checked_add(cost, abs_i64(checked_sub(r.brick0[c], v[c])));
        BrickVector e(v, sol.picks);
        if (!best || cost < best->second ||
            (cost == best->second && e.flatten() < best->first.flatten()))
            best = std::make_pair(std::move(e), cost);
    }
    return best;
}

}  // namespace

BoundedDecomposition decompose_bounded(const BrickVector& g,
                                       const FourBlockSpec& spec, i64 xi,
                                       u64 state_budget) {
    spec.validate();
    require_three_block(spec, "decompose_bounded");
    require_kernel(spec, g, "decompose_bounded");
    if (xi < 1) throw dim_error("decompose_bounded: xi must be >= 1");

    BoundedDecomposition out;
    BrickVector r = g;
    while (!r.is_zero()) {
        i64 rl1 = r.norm_1();
        auto step = l1_step(r, spec, xi, state_budget);
        if (!step || step->second >= rl1)
            throw xi_too_small("decompose_bounded: no l1-reducing step at xi=" +
                               std::to_string(xi));
        r = r - step->first;
        out.xi = std::max(out.xi, step->first.norm_inf());
        out.summands.push_back(std::move(step->first));
    }

    BrickVector sum = BrickVector::zero(spec.t_B(), spec.t_A(), spec.n);
    for (const auto& e : out.summands) {
        sum = sum + e;
        if (!in_kernel(spec, e, true))
            throw invariant_error("decompose_bounded: summand left the kernel");
        if (!conforms(e.brick0, g.brick0))
            throw invariant_error("decompose_bounded: brick0 not conformal");
    }
    if (!(sum == g))
        throw invariant_error("decompose_bounded: summands do not reconstruct g");
    return out;
}

BoundedDecomposition decompose_bounded_auto(const BrickVector& g,
                                            const FourBlockSpec& spec,
                                            i64 xi_start, i64 xi_cap,
                                            u64 state_budget) {
    for (i64 xi = std::max<i64>(1, xi_start); xi <= xi_cap;
         xi = checked_mul(xi, 2)) {
        try {
            return decompose_bounded(g, spec, xi, state_budget);
        } catch (const xi_too_small&) {
        }
    }
    throw budget_error("decompose_bounded_auto: xi cap reached");
}

/////////////////////////////////////////////////////////////////////////////
// Canonical representatives.

bool canonical_feasible(const FourBlockSpec& spec, std::span<const i64> u) {
    // one brick: A z = -B u solvable over the integers
    std::vector<i64> rhs = negate_vec(spec.B.apply(u));
    auto z0 = lattice_solve(spec.A, rhs);
    if (!z0) return false;
    // the D row: need delta in ker(A) with D delta = -n * D z0
    auto kb = kernel_lattice_basis(spec.A);
    std::vector<i64> target = spec.D.apply(*z0);
    for (auto& e : target) e = checked_mul(e, -(i64)spec.n);
    if (kb.empty()) {
        for (i64 e : target)
            if (e != 0) return false;
        return true;
    }
    SmallMatrix dk = SmallMatrix::zero(spec.s_C(), (int)kb.size());
    for (size_t j = 0; j < kb.size(); ++j) {
        std::vector<i64> col = spec.D.apply(kb[j]);
        for (int r = 0; r < spec.s_C(); ++r) dk.at(r, (int)j) = col[r];
    }
    return lattice_solve(dk, target).has_value();
}

std::vector<CanonicalEntry> canonical_set(const FourBlockSpec& spec, i64 xi,
                                          i64 rep_norm_cap, u64 state_budget) {
    spec.validate();
    require_three_block(spec, "canonical_set");
    if (xi < 1) throw dim_error("canonical_set: xi must be >= 1");

    std::vector<i64> all_lo(spec.t_B(), -xi), all_hi(spec.t_B(), xi);
    std::vector<CanonicalEntry> out;
    std::vector<i64> u = all_lo;
    const int tB = spec.t_B();
    while (true) {
        CanonicalEntry entry;
        entry.u = u;
        bool zero = std::all_of(u.begin(), u.end(), [](i64 e) { return e == 0; });
        if (zero) {
            entry.status = CanonicalStatus::zero;
        } else if (!canonical_feasible(spec, u)) {
            entry.status = CanonicalStatus::infeasible;
        } else {
            std::vector<i64> rhs = negate_vec(spec.B.apply(u));
            for (i64 cap = 1; cap <= rep_norm_cap; cap = checked_mul(cap, 2)) {
                std::vector<i64> lo(spec.t_A(), -cap), hi(spec.t_A(), cap);
                auto cands = enumerate_bricks(spec.A, rhs, lo, hi);
                if (cands.empty()) continue;
                std::vector<BrickStage> stages(spec.n);
                for (int i = 0; i < spec.n; ++i) {
                    stages[i].cands = cands;
                    stages[i].costs.resize(cands.size());
                    for (size_t c = 0; c < cands.size(); ++c)
                        stages[i].costs[c] = l1(cands[c]);
                }
                std::vector<i64> target(spec.s_C(), 0);
                BrickDPOptions opts;
                opts.state_budget = state_budget;
                auto sol = brick_dp_min(spec.D, stages, target, opts);
                if (sol.found) {
                    entry.status = CanonicalStatus::found;
                    entry.rep = BrickVector(u, sol.picks);
                    break;
                }
            }
            if (entry.status != CanonicalStatus::found)
                throw budget_error("canonical_set: representative norm cap reached");
        }
        out.push_back(std::move(entry));

        int p = tB - 1;
        while (p >= 0 && u[p] == xi) { u[p] = -xi; --p; }
        if (p < 0) break;
        ++u[p];
    }
    return out;
}

/////////////////////////////////////////////////////////////////////////////
// Same-orthant decomposition.

namespace {

// peel one conformal n-fold kernel piece (brick0 = 0) out of e', smallest
// cap first, largest l1 mass at that cap
std::optional<BrickVector> peel_conformal_nfold(const BrickVector& ep,
                                                const FourBlockSpec& spec,
                                                u64 state_budget) {
    const int tA = spec.t_A();
    std::vector<i64> rhs(spec.s_A(), 0);
    for (i64 cap = 1; cap <= std::max<i64>(1, ep.norm_inf());
         cap = checked_mul(cap, 2)) {
        std::vector<BrickStage> stages(spec.n);
        bool any = true;
        for (int i = 0; i < spec.n && any; ++i) {
            std::vector<i64> lo(tA), hi(tA);
            for (int c = 0; c < tA; ++c) {
                lo[c] = std::max(std::min<i64>(ep.bricks[i][c], 0), -cap);
                hi[c] = std::min(std::max<i64>(ep.bricks[i][c], 0), cap);
            }
            stages[i].cands = enumerate_bricks(spec.A, rhs, lo, hi);
            if (stages[i].cands.empty()) any = false;
            stages[i].costs.resize(stages[i].cands.size());
            for (size_t c = 0; c < stages[i].cands.size(); ++c)
                stages[i].costs[c] = checked_neg(l1(stages[i].cands[c]));
        }
        if (!any) continue;
        std::vector<i64> target(spec.s_C(), 0);
        BrickDPOptions opts;
        opts.state_budget = state_budget;
        auto sol = brick_dp_min(spec.D, stages, target, opts);
        if (sol.found && sol.cost < 0)
            return BrickVector(std::vector<i64>(spec.t_B(), 0), sol.picks);
    }
    return std::nullopt;
}

}  // namespace

OrthantDecomposition decompose_same_orthant(const BrickVector& g,
                                            const FourBlockSpec& spec,
                                            i64 xi_start, u64 state_budget) {
    spec.validate();
    require_three_block(spec, "decompose_same_orthant");
    require_kernel(spec, g, "decompose_same_orthant");

    OrthantDecomposition out;
    if (g.is_zero()) return out;

    BoundedDecomposition bd =
        decompose_bounded_auto(g, spec, xi_start, 256, state_budget);
    out.xi_used = bd.xi;

    // group summands by brick 0; the group representative is its
    // lexicographically smallest member
    std::map<std::vector<i64>, std::vector<size_t>> by_u;
    for (size_t h = 0; h < bd.summands.size(); ++h)
        by_u[bd.summands[h].brick0].push_back(h);

    std::vector<BrickVector> reps;
    std::vector<i64> multiplicity;
    BrickVector leftover = BrickVector::zero(spec.t_B(), spec.t_A(), spec.n);
    for (const auto& [u, idxs] : by_u) {
        bool u_zero = std::all_of(u.begin(), u.end(), [](i64 e) { return e == 0; });
        if (u_zero) {
            // brick0-free summands feed the add-on part directly
            for (size_t h : idxs) leftover = leftover + bd.summands[h];
            continue;
        }
        const BrickVector* rep = &bd.summands[idxs.front()];
        for (size_t h : idxs)
            if (bd.summands[h].flatten() < rep->flatten()) rep = &bd.summands[h];
        for (size_t h : idxs) leftover = leftover + (bd.summands[h] - *rep);
        reps.push_back(*rep);
        multiplicity.push_back((i64)idxs.size());
    }

    // add-ons: conformal peel of the n-fold kernel leftover
    for (i64 e : leftover.brick0)
        if (e != 0)
            throw invariant_error("decompose_same_orthant: leftover has brick0 mass");
    BrickVector resid = leftover;
    while (!resid.is_zero()) {
        auto piece = peel_conformal_nfold(resid, spec, state_budget);
        if (!piece)
            throw invariant_error("decompose_same_orthant: peeling stalled");
        resid = resid - *piece;
        out.addons.push_back(std::move(*piece));
    }

    // principals: merge duplicated representatives over reduced vectors
    if (!reps.empty()) {
        // profile groups: bricks with identical representative columns
        std::map<std::vector<i64>, std::vector<int>> profile_groups;
        std::vector<int> order;
        for (int i = 0; i < spec.n; ++i) {
            std::vector<i64> key;
            for (const auto& rp : reps)
                key.insert(key.end(), rp.bricks[i].begin(), rp.bricks[i].end());
            auto [it, fresh] = profile_groups.emplace(key, std::vector<int>{});
            it->second.push_back(i);
            (void)fresh;
        }
        std::vector<std::vector<int>> prof;
        for (auto& [k, idxs] : profile_groups) prof.push_back(idxs);

        auto reduce = [&](const BrickVector& v) {
            std::vector<i64> rd(v.brick0);
            for (const auto& grp : prof)
                rd.insert(rd.end(), v.bricks[grp.front()].begin(),
                          v.bricks[grp.front()].end());
            return rd;
        };

        std::vector<std::vector<i64>> seq;
        std::vector<size_t> owner;  // sequence position -> rep index
        for (size_t j = 0; j < reps.size(); ++j) {
            std::vector<i64> rd = reduce(reps[j]);
            for (i64 m = 0; m < multiplicity[j]; ++m) {
                seq.push_back(rd);
                owner.push_back(j);
            }
        }
        SignPartition part = merge_kd(seq);
        for (const auto& subset : part.subsets) {
            BrickVector sum = BrickVector::zero(spec.t_B(), spec.t_A(), spec.n);
            for (size_t pos : subset) sum = sum + reps[owner[pos]];
            out.principals.push_back(std::move(sum));
        }
    }

    // exact reconstruction and orthant checks
    BrickVector sum = BrickVector::zero(spec.t_B(), spec.t_A(), spec.n);
    for (const auto& p : out.principals) sum = sum + p;
    for (const auto& d : out.addons) sum = sum + d;
    if (!(sum == g))
        throw invariant_error("decompose_same_orthant: parts do not reconstruct g");
    for (size_t a = 0; a < out.principals.size(); ++a)
        for (size_t b = a + 1; b < out.principals.size(); ++b)
            if (!sign_compatible(out.principals[a].flatten(),
                                 out.principals[b].flatten()))
                throw invariant_error("decompose_same_orthant: principals clash");
    for (size_t a = 0; a < out.addons.size(); ++a)
        for (size_t b = a + 1; b < out.addons.size(); ++b)
            if (!sign_compatible(out.addons[a].flatten(), out.addons[b].flatten()))
                throw invariant_error("decompose_same_orthant: addons clash");
    return out;
}

/////////////////////////////////////////////////////////////////////////////
// Brick types.

BrickTypeAssignment assign_brick_types(
    const BrickVector& y, i64 gamma,
    const std::optional<std::vector<int>>& principle_labels) {
    if (gamma < 1) throw dim_error("assign_brick_types: gamma must be >= 1");
    const int n = y.num_bricks();
    if (n < 1) throw dim_error("assign_brick_types: no bricks");
    if (principle_labels && (int)principle_labels->size() != n)
        throw dim_error("assign_brick_types: label count mismatch");

    BrickTypeAssignment out;
    out.gamma = gamma;
    out.quantity_types.resize(n);
    for (int i = 0; i < n; ++i) {
        out.quantity_types[i].resize(y.brick_len());
        for (size_t c = 0; c < y.brick_len(); ++c) {
            i64 v = y.bricks[i][c];
            out.quantity_types[i][c] = abs_i64(v) <= gamma
                                           ? QuantityKind::small
                                           : (v > 0 ? QuantityKind::pos_large
                                                    : QuantityKind::neg_large);
        }
    }

    out.groups.push_back({1});
    out.group_of.assign(n, -1);
    out.group_of[0] = 0;
    std::map<std::pair<std::vector<QuantityKind>, int>, int> seen;
    for (int i = 2; i <= n; ++i) {
        auto key = std::make_pair(out.quantity_types[i - 1],
                                  principle_labels ? (*principle_labels)[i - 1] : 0);
        auto it = seen.find(key);
        if (it == seen.end()) {
            it = seen.emplace(key, (int)out.groups.size()).first;
            out.groups.push_back({});
        }
        out.groups[it->second].push_back(i);
        out.group_of[i - 1] = it->second;
    }
    // drop empty placeholder groups (none expected, but keep it tight)
    return out;
}

/////////////////////////////////////////////////////////////////////////////
// Centralization.

Centralization centralize(const BrickVector& y, const BrickTypeAssignment& types,
                          const std::vector<BrickVector>& principals,
                          const std::vector<BrickVector>& addons) {
    const int n = y.num_bricks();
    const int tA = (int)y.brick_len();

    BrickVector check = BrickVector::zero((int)y.brick0.size(), tA, n);
    for (const auto& p : principals) check = check + p;
    std::vector<std::vector<i64>> principal_part(n);
    for (int i = 0; i < n; ++i) principal_part[i] = check.bricks[i];
    for (const auto& d : addons) {
        for (i64 e : d.brick0)
            if (e != 0)
                throw jobs_not_representable("centralize: addon with brick0 mass");
        check = check + d;
    }
    if (!(check == y))
        throw jobs_not_representable("centralize: decomposition does not sum to y");

    // job catalog: distinct nonzero addon bricks
    Centralization out;
    std::map<std::vector<i64>, size_t> job_id;
    for (const auto& d : addons)
        for (int i = 0; i < n; ++i) {
            if (std::all_of(d.bricks[i].begin(), d.bricks[i].end(),
                            [](i64 e) { return e == 0; }))
                continue;
            job_id.emplace(d.bricks[i], 0);
        }
    for (auto& [v, id] : job_id) {
        id = out.jobs.size();
        out.jobs.push_back(v);
    }
    const size_t lambda = out.jobs.size();

    // per-brick copies of each job
    std::vector<std::vector<i64>> count(n, std::vector<i64>(lambda, 0));
    for (const auto& d : addons)
        for (int i = 0; i < n; ++i) {
            if (std::all_of(d.bricks[i].begin(), d.bricks[i].end(),
                            [](i64 e) { return e == 0; }))
                continue;
            ++count[i][job_id.at(d.bricks[i])];
        }

    // groups must agree on the principal contribution
    const size_t sigma = types.groups.size();
    for (size_t j = 0; j < sigma; ++j)
        for (int brick : types.groups[j])
            if (principal_part[brick - 1] != principal_part[types.groups[j].front() - 1])
                throw jobs_not_representable(
                    "centralize: principal bricks differ inside a group");

    out.job_counts.assign(sigma, std::vector<i64>(lambda, 0));
    for (size_t j = 0; j < sigma; ++j)
        for (int brick : types.groups[j])
            for (size_t k = 0; k < lambda; ++k)
                out.job_counts[j][k] =
                    checked_add(out.job_counts[j][k], count[brick - 1][k]);

    // spread each group's jobs evenly; earlier bricks take the larger share
    out.assigned.assign(n, std::vector<i64>(lambda, 0));
    out.assigned[0] = count[0];
    for (size_t j = 1; j < sigma; ++j) {
        std::vector<int> members = types.groups[j];
        std::sort(members.begin(), members.end());
        const i64 nj = (i64)members.size();
        if (nj == 0) continue;
        for (size_t k = 0; k < lambda; ++k) {
            i64 q = out.job_counts[j][k] / nj;
            i64 r = out.job_counts[j][k] % nj;
            for (i64 p = 0; p < nj; ++p)
                out.assigned[members[(size_t)p] - 1][k] = q + (p < r ? 1 : 0);
        }
    }

    out.y_tilde = BrickVector::zero((int)y.brick0.size(), tA, n);
    out.y_tilde.brick0 = y.brick0;
    out.y_tilde.bricks[0] = y.bricks[0];
    for (int i = 1; i < n; ++i) {
        std::vector<i64> b = principal_part[i];
        for (size_t k = 0; k < lambda; ++k)
            for (int c = 0; c < tA; ++c)
                b[c] = checked_add(b[c],
                                   checked_mul(out.assigned[i][k], out.jobs[k][c]));
        out.y_tilde.bricks[i] = std::move(b);
    }
    return out;
}

/////////////////////////////////////////////////////////////////////////////
// Conformal census.

namespace {

struct ConformalDP {
    std::vector<std::vector<i64>> guesses;
    // stages per guess are built lazily; share candidate lists per window
    const FourBlockSpec* spec;
    const BrickVector* y;
    u64 state_budget;

    std::vector<BrickStage> stages_for(const std::vector<i64>& v) const {
        const int tA = spec->t_A();
        std::vector<i64> rhs = negate_vec(spec->B.apply(v));
        std::vector<BrickStage> stages(spec->n);
        std::map<std::pair<std::vector<i64>, std::vector<i64>>,
                 std::vector<std::vector<i64>>>
            memo;
        for (int i = 0; i < spec->n; ++i) {
            std::vector<i64> lo(tA), hi(tA);
            for (int c = 0; c < tA; ++c) {
                lo[c] = std::min<i64>(y->bricks[i][c], 0);
                hi[c] = std::max<i64>(y->bricks[i][c], 0);
            }
            auto key = std::make_pair(lo, hi);
            auto it = memo.find(key);
            if (it == memo.end())
                it = memo.emplace(key, enumerate_bricks(spec->A, rhs, lo, hi)).first;
            stages[i].cands = it->second;
            stages[i].costs.assign(stages[i].cands.size(), 0);
        }
        return stages;
    }

    std::vector<i64> target_for(const std::vector<i64>& v, bool three_block) const {
        if (three_block) return std::vector<i64>(spec->s_C(), 0);
        return negate_vec(spec->C.apply(v));
    }
};

}  // namespace

u64 conformal_kernel_count(const FourBlockSpec& spec, bool three_block,
                           const BrickVector& y, u64 state_budget) {
    spec.validate();
    ConformalDP dp{conformal_guesses(y.brick0, y.norm_inf() + 1), &spec, &y,
                   state_budget};
    u64 total = 0;
    BrickDPOptions opts;
    opts.state_budget = state_budget;
    for (const auto& v : dp.guesses) {
        u64 c = brick_dp_count(spec.D, dp.stages_for(v), dp.target_for(v, three_block),
                               opts);
        total = total > (u64(1) << 62) - c ? (u64(1) << 62) : total + c;
    }
    return total;
}

std::optional<BrickVector> conformal_kernel_unrank(const FourBlockSpec& spec,
                                                   bool three_block,
                                                   const BrickVector& y, u64 k,
                                                   u64 state_budget) {
    spec.validate();
    ConformalDP dp{conformal_guesses(y.brick0, y.norm_inf() + 1), &spec, &y,
                   state_budget};
    BrickDPOptions opts;
    opts.state_budget = state_budget;
    for (const auto& v : dp.guesses) {
        auto stages = dp.stages_for(v);
        auto target = dp.target_for(v, three_block);
        u64 c = brick_dp_count(spec.D, stages, target, opts);
        if (k < c) {
            auto picks = brick_dp_unrank(spec.D, stages, target, k, opts);
            if (!picks)
                throw invariant_error("conformal unrank: count/unrank mismatch");
            return BrickVector(v, *picks);
        }
        k -= c;
    }
    return std::nullopt;
}

std::optional<BrickVector> strict_conformal_divisor(const FourBlockSpec& spec,
                                                    bool three_block,
                                                    const BrickVector& y,
                                                    u64 state_budget) {
    u64 count = conformal_kernel_count(spec, three_block, y, state_budget);
    if (count <= 2) return std::nullopt;
    for (u64 k = 0; k < 3; ++k) {
        auto z = conformal_kernel_unrank(spec, three_block, y, k, state_budget);
        if (!z) throw invariant_error("strict divisor: unrank ran dry");
        if (!z->is_zero() && !(*z == y)) return z;
    }
    throw invariant_error("strict divisor: first three elements were 0 and y twice");
}

/////////////////////////////////////////////////////////////////////////////
// Witness extraction.

namespace {

std::optional<BrickVector> witness_pipeline(const BrickVector& y,
                                            const FourBlockSpec& spec,
                                            const WitnessOptions& opts) {
    OrthantDecomposition od =
        decompose_same_orthant(y, spec, opts.xi_start, opts.state_budget);

    // Gamma = sum over job kinds of their inf-norms
    i64 gamma = 0;
    {
        std::map<std::vector<i64>, bool> jobs;
        for (const auto& d : od.addons)
            for (const auto& b : d.bricks)
                if (!std::all_of(b.begin(), b.end(), [](i64 e) { return e == 0; }))
                    jobs.emplace(b, true);
        for (const auto& [v, used] : jobs) {
            (void)used;
            i64 ni = 0;
            for (i64 e : v) ni = std::max(ni, abs_i64(e));
            gamma = checked_add(gamma, ni);
        }
    }
    gamma = std::max<i64>(gamma, 1);

    // principle labels from the principal brick tuples
    std::vector<int> labels(spec.n, 0);
    {
        std::map<std::vector<i64>, int> ids;
        for (int i = 0; i < spec.n; ++i) {
            std::vector<i64> key;
            for (const auto& p : od.principals)
                key.insert(key.end(), p.bricks[i].begin(), p.bricks[i].end());
            auto [it, fresh] = ids.emplace(key, (int)ids.size());
            (void)fresh;
            labels[i] = it->second;
        }
    }

    BrickTypeAssignment types = assign_brick_types(y, gamma, labels);
    Centralization cent = centralize(y, types, od.principals, od.addons);
    const auto& jobs = cent.jobs;
    const size_t lambda = jobs.size();
    const int tA = spec.t_A(), tB = spec.t_B();

    // summands of the centralized vector
    std::vector<BrickVector> summands = od.principals;
    std::vector<i64> eta_coeff(lambda, 0);  // gamma_k: total copies of job k
    for (size_t j = 0; j < types.groups.size(); ++j)
        for (size_t k = 0; k < lambda; ++k)
            eta_coeff[k] = checked_add(eta_coeff[k], cent.job_counts[j][k]);

    for (size_t j = 1; j < types.groups.size(); ++j) {
        std::vector<int> members = types.groups[j];
        std::sort(members.begin(), members.end());
        const i64 nj = (i64)members.size();
        for (size_t k = 0; k < lambda; ++k) {
            i64 q = cent.job_counts[j][k] / nj;
            i64 r = cent.job_counts[j][k] % nj;
            if (q > 0) {
                BrickVector md = BrickVector::zero(tB, tA, spec.n);
                for (int m : members) md.bricks[m - 1] = jobs[k];
                md.bricks[0] = jobs[k];
                for (auto& e : md.bricks[0]) e = checked_mul(e, -nj);
                for (i64 copy = 0; copy < q; ++copy) summands.push_back(md);
            }
            if (r > 0) {
                BrickVector mdbar = BrickVector::zero(tB, tA, spec.n);
                for (i64 p = 0; p < r; ++p) mdbar.bricks[members[(size_t)p] - 1] = jobs[k];
                mdbar.bricks[0] = jobs[k];
                for (auto& e : mdbar.bricks[0]) e = checked_mul(e, -r);
                summands.push_back(mdbar);
            }
        }
    }

    // leftover on brick 1 decomposes over the Graver basis of [D v_1 .. D v_l]
    if (lambda > 0) {
        SmallMatrix dv = SmallMatrix::zero(spec.s_C(), (int)lambda);
        for (size_t k = 0; k < lambda; ++k) {
            std::vector<i64> col = spec.D.apply(jobs[k]);
            for (int r = 0; r < spec.s_C(); ++r) dv.at(r, (int)k) = col[r];
        }
        GraverSet gdv = graver_complete(dv);
        if (!gdv.certified_complete)
            throw budget_error("witness: Graver basis of DV not completed");
        bool eta_zero = std::all_of(eta_coeff.begin(), eta_coeff.end(),
                                    [](i64 e) { return e == 0; });
        if (!eta_zero) {
            auto terms = graver_decompose(eta_coeff, gdv);
            for (const auto& t : terms) {
                BrickVector od_vec = BrickVector::zero(tB, tA, spec.n);
                for (size_t k = 0; k < lambda; ++k)
                    for (int c = 0; c < tA; ++c)
                        od_vec.bricks[0][c] = checked_add(
                            od_vec.bricks[0][c],
                            checked_mul(t.element[k], jobs[k][c]));
                for (i64 copy = 0; copy < t.coefficient; ++copy)
                    summands.push_back(od_vec);
            }
        }
    }

    BrickVector total = BrickVector::zero(tB, tA, spec.n);
    for (const auto& z : summands) total = total + z;
    if (!(total == cent.y_tilde))
        throw invariant_error("witness: summands do not reach the centralization");
    if (summands.size() < 2) return std::nullopt;

    // segment groups: brick 0, brick 1, then bricks sharing (group, ceil-set)
    std::map<std::pair<int, std::vector<i64>>, std::vector<int>> seg_map;
    for (int i = 2; i <= spec.n; ++i) {
        int j = types.group_of[i - 1];
        std::vector<i64> ceil_set;
        for (size_t k = 0; k < lambda; ++k) {
            i64 q = cent.job_counts[(size_t)j][k] / (i64)types.groups[(size_t)j].size();
            if (cent.assigned[i - 1][k] > q) ceil_set.push_back((i64)k);
        }
        seg_map[{j, ceil_set}].push_back(i);
    }
    std::vector<std::vector<int>> segments;
    for (auto& [key, bricks] : seg_map) segments.push_back(bricks);

    auto reduce_tail = [&](const BrickVector& z) {
        std::vector<i64> rd(z.brick0);
        for (const auto& seg : segments) {
            for (int i : seg)
                if (z.bricks[i - 1] != z.bricks[seg.front() - 1])
                    throw invariant_error("witness: segment bricks differ");
            rd.insert(rd.end(), z.bricks[seg.front() - 1].begin(),
                      z.bricks[seg.front() - 1].end());
        }
        return rd;
    };

    // stage 1: merge everything except the brick-1 segment
    std::vector<std::vector<i64>> stage1;
    stage1.reserve(summands.size());
    for (const auto& z : summands) stage1.push_back(reduce_tail(z));
    SignPartition p1 = merge_kd(stage1);

    // stage 2: merge the brick-1 segments of the stage-1 groups
    std::vector<std::vector<i64>> stage2;
    stage2.reserve(p1.subsets.size());
    for (const auto& sub : p1.subsets) {
        std::vector<i64> s(tA, 0);
        for (size_t pos : sub)
            for (int c = 0; c < tA; ++c)
                s[c] = checked_add(s[c], summands[pos].bricks[0][c]);
        stage2.push_back(std::move(s));
    }
    SignPartition p2 = merge_kd(stage2);

    std::vector<BrickVector> zs;
    for (const auto& sub2 : p2.subsets) {
        BrickVector z = BrickVector::zero(tB, tA, spec.n);
        for (size_t g1 : sub2)
            for (size_t pos : p1.subsets[g1]) z = z + summands[pos];
        zs.push_back(std::move(z));
    }

    if (std::getenv("BLOCKIP_DEBUG_PIPELINE")) {
        std::cerr << "[pipeline] summands=" << summands.size()
                  << " m'=" << p1.subsets.size() << " m''=" << zs.size()
                  << " gamma=" << gamma << " lambda=" << lambda
                  << " groups=" << 2 + segments.size() << "\n";
    }

    // pick a part that avoids every small coordinate and conforms to y
    int fail_small = 0, fail_sign = 0, fail_kernel = 0, fail_conf = 0,
        fail_strict = 0;
    for (const auto& z : zs) {
        bool ok = true;
        bool small_hit = false, sign_hit = false;
        for (int i = 0; i < spec.n && ok; ++i)
            for (int c = 0; c < tA && ok; ++c) {
                QuantityKind kind = types.quantity_types[i][c];
                i64 v = z.bricks[i][c];
                if (kind == QuantityKind::small && v != 0) { ok = false; small_hit = true; }
                if (kind == QuantityKind::pos_large && v < 0) { ok = false; sign_hit = true; }
                if (kind == QuantityKind::neg_large && v > 0) { ok = false; sign_hit = true; }
            }
        if (!ok) {
            fail_small += small_hit;
            fail_sign += sign_hit;
            continue;
        }
        if (!in_kernel(spec, z, true)) { ++fail_kernel; continue; }
        if (!conforms(z.flatten(), y.flatten())) { ++fail_conf; continue; }
        i64 zl1 = z.norm_1();
        if (zl1 == 0 || zl1 >= y.norm_1()) { ++fail_strict; continue; }
        return z;
    }
    if (std::getenv("BLOCKIP_DEBUG_PIPELINE")) {
        std::cerr << "[pipeline] miss: small=" << fail_small
                  << " sign=" << fail_sign << " kernel=" << fail_kernel
                  << " conf=" << fail_conf << " strict=" << fail_strict << "\n";
    }
    return std::nullopt;
}

}  // namespace

std::optional<BrickVector> sign_compatible_witness_pipeline(
    const BrickVector& y, const FourBlockSpec& spec,
    const WitnessOptions& opts) {
    spec.validate();
    require_three_block(spec, "sign_compatible_witness");
    if (y.is_zero()) throw dim_error("sign_compatible_witness: y = 0");
    require_kernel(spec, y, "sign_compatible_witness");
    return witness_pipeline(y, spec, opts);
}

std::optional<BrickVector> sign_compatible_witness(const BrickVector& y,
                                                   const FourBlockSpec& spec,
                                                   const WitnessOptions& opts) {
    spec.validate();
    require_three_block(spec, "sign_compatible_witness");
    if (y.is_zero()) throw dim_error("sign_compatible_witness: y = 0");
    require_kernel(spec, y, "sign_compatible_witness");

    std::optional<BrickVector> cand;
    try {
        cand = witness_pipeline(y, spec, opts);
    } catch (const budget_error&) {
        throw;
    } catch (const std::exception&) {
        cand = std::nullopt;  // pipeline preconditions failed; fall back
    }
    if (cand) return cand;

    auto z = strict_conformal_divisor(spec, true, y, opts.state_budget);
    if (z) {
        if (!in_kernel(spec, *z, true) || !conforms(z->flatten(), y.flatten()) ||
            z->norm_1() == 0 || z->norm_1() >= y.norm_1())
            throw invariant_error("witness: fallback produced an invalid divisor");
    }
    return z;
}

}  // namespace blockip
