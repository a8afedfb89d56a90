#include "blockip/merging.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "blockip/graver.hpp"
#include "blockip/steinitz.hpp"

namespace blockip {

namespace {

i64 pow_capped(i64 base, i64 exp, i64 cap) {
    i64 r = 1;
    for (i64 i = 0; i < exp; ++i) {
        if (base != 0 && r > cap / base) return cap;
        r *= base;
        if (r >= cap) return cap;
    }
    return r;
}

i64 smallest_c(size_t max_subset, i64 zeta, int kappa) {
    i64 z = std::max<i64>(zeta, 1);
    i64 e = (i64)kappa * (i64)kappa;
    for (i64 c = 1;; ++c) {
        if (pow_capped(checked_mul(c, z), e, (i64)max_subset + 1) >= (i64)max_subset)
            return c;
    }
}

/////////////////////////////////////////////////////////////////////////////
// 1-D merging. Invariant: the running total of the not-yet-assigned entries
// stays >= 0 (after orientation), so every emitted subset sum lands in
// [0, x] and conforms to the total.

struct Item {
    std::vector<i64> v;
    size_t orig;
};

std::vector<i64> seq_total(const std::vector<Item>& items, size_t dim) {
    std::vector<i64> t(dim, 0);
    for (const auto& it : items)
        for (size_t c = 0; c < dim; ++c) t[c] = checked_add(t[c], it.v[c]);
    return t;
}

}  // namespace

SignPartition merge_1d(std::span<const i64> ints) {
    if (ints.empty()) throw dim_error("merge_1d: empty sequence");
    const size_t m = ints.size();
    i64 zeta = 0, total = 0;
    for (i64 v : ints) {
        zeta = std::max(zeta, abs_i64(v));
        total = checked_add(total, v);
    }
    const bool flip = total < 0;

    std::vector<Item> active;
    active.reserve(m);
    for (size_t i = 0; i < m; ++i)
        active.push_back(Item{{flip ? checked_neg(ints[i]) : ints[i]}, i});

    const i64 cap = checked_add(checked_mul(6, zeta), 2);
    SignPartition part;
    part.zeta = zeta;
    part.kappa = 1;

    i64 rem_total = flip ? checked_neg(total) : total;  // >= 0 throughout
    while (!active.empty()) {
        const i64 mm = (i64)active.size();
        if (mm <= cap) {
            std::vector<size_t> t;
            for (const auto& it : active) t.push_back(it.orig);
            part.subsets.push_back(std::move(t));
            break;
        }

        std::vector<std::vector<i64>> vecs;
        vecs.reserve(active.size());
        for (const auto& it : active) vecs.push_back(it.v);
        auto re = steinitz_permute(vecs, SteinitzMode::greedy_then_exact);

        std::vector<size_t> chosen;  // positions in the reordered sequence
        if (checked_mul(checked_add(checked_mul(3, zeta), 1), rem_total) >
            checked_mul(zeta, mm)) {
            // the line climbs fast: a block of the first 3*zeta+2 entries has
            // a nonnegative sum and leaves a nonnegative remainder
            for (i64 p = 0; p < checked_add(checked_mul(3, zeta), 2); ++p)
                chosen.push_back((size_t)p);
        } else {
            // flat stretch: two of the prefixes 0..3*zeta+2 collide
            std::vector<std::vector<i64>> ordered;
            i64 scan = std::min<i64>(mm, checked_add(checked_mul(3, zeta), 2));
            for (i64 p = 0; p < scan; ++p)
                ordered.push_back(vecs[re.permutation[p]]);
            auto col = prefix_collision(ordered, checked_mul(2, zeta));
            if (!col)
                throw invariant_error("merge_1d: pigeonhole collision missing");
            for (size_t p = col->first; p < col->second; ++p)
                chosen.push_back(p);
        }

        i64 sum = 0;
        std::vector<size_t> subset;
        std::vector<bool> removed(active.size(), false);
        for (size_t p : chosen) {
            size_t ai = re.permutation[p];
            subset.push_back(active[ai].orig);
            sum = checked_add(sum, active[ai].v[0]);
            removed[ai] = true;
        }
        if (sum < 0 || sum > rem_total)
            throw invariant_error("merge_1d: extracted subset not conformal");
        rem_total = checked_sub(rem_total, sum);
        part.subsets.push_back(std::move(subset));

        std::vector<Item> next;
        next.reserve(active.size() - chosen.size());
        for (size_t i = 0; i < active.size(); ++i)
            if (!removed[i]) next.push_back(std::move(active[i]));
        active = std::move(next);
    }

    for (const auto& t : part.subsets) {
        if ((i64)t.size() > cap)
            throw invariant_error("merge_1d: subset exceeds 6*zeta+2");
        i64 s = 0;
        for (size_t i : t) s = checked_add(s, ints[i]);
        i64 sv[1] = {s}, tv[1] = {total};
        if (!conforms(sv, tv))
            throw invariant_error("merge_1d: subset sum does not conform");
        part.max_subset_size = std::max(part.max_subset_size, t.size());
    }
    part.constant_c = smallest_c(part.max_subset_size, zeta, 1);
    return part;
}

/////////////////////////////////////////////////////////////////////////////
// k-D merging, following the conformal-subset extraction: orient so the
// total is nonnegative, sort coordinates ascending by the running total,
// Steinitz-reorder, then either find a prefix collision inside a small box
// (low coordinates cancel exactly) or cut a block that is positive on the
// large coordinates. Every extraction is re-verified before it is emitted;
// taking the whole remainder is always a valid final subset.

namespace {

struct KdState {
    std::vector<Item> active;
    std::vector<i64> rem_total;  // oriented, >= 0 throughout
    size_t dim;
};

// one conformal subset, as positions into state.active
std::vector<size_t> extract_conformal(const KdState& st) {
    const i64 mm = (i64)st.active.size();
    const i64 kappa = (i64)st.dim;
    std::vector<size_t> all(st.active.size());
    std::iota(all.begin(), all.end(), 0);
    if (mm <= kappa + 1) return all;

    // pre-pass: an element already inside the residual's box is a conformal
    // subset on its own; this keeps partitions fine where the threshold
    // search would fall back to one big block
    for (size_t i = 0; i < st.active.size(); ++i) {
        bool fits = true;
        for (size_t c = 0; c < st.dim && fits; ++c) {
            i64 v = st.active[i].v[c];
            if (v < 0 || v > st.rem_total[c]) fits = false;
        }
        if (fits) return {i};
    }

    // coordinate order, ascending residual total
    std::vector<size_t> coord(st.dim);
    std::iota(coord.begin(), coord.end(), 0);
    std::stable_sort(coord.begin(), coord.end(), [&](size_t a, size_t b) {
        return st.rem_total[a] < st.rem_total[b];
    });
    auto xs = [&](i64 j) { return st.rem_total[coord[(size_t)j - 1]]; };  // 1-based

    std::vector<std::vector<i64>> vecs;
    vecs.reserve(st.active.size());
    for (const auto& it : st.active) {
        std::vector<i64> v(st.dim);
        for (size_t c = 0; c < st.dim; ++c) v[c] = it.v[coord[c]];
        vecs.push_back(std::move(v));
    }
    auto re = steinitz_permute(vecs, SteinitzMode::greedy_then_exact);
    const i64 dev_num = re.deviation_num;  // deviation = dev_num / mm
    const i64 rbox = (3 * dev_num) / mm;

    std::vector<std::vector<i64>> prefix(st.active.size() + 1,
                                         std::vector<i64>(st.dim, 0));
    for (i64 p = 1; p <= mm; ++p)
        for (size_t c = 0; c < st.dim; ++c)
            prefix[p][c] = checked_add(prefix[p - 1][c],
                                       vecs[re.permutation[p - 1]][c]);

    auto block = [&](i64 l1, i64 l2) {
        std::vector<size_t> t;
        for (i64 p = l1; p < l2; ++p) t.push_back(re.permutation[(size_t)p]);
        return t;
    };

    // collision scan over sampled prefixes within the first j sorted coords
    auto scan_collision = [&](i64 j, i64 step, i64 max_l) -> std::vector<size_t> {
        std::map<std::vector<i64>, i64> seen;
        for (i64 l = kappa; l <= std::min(max_l, mm); l += step) {
            std::vector<i64> key(prefix[l].begin(), prefix[l].begin() + j);
            for (i64 v : key)
                if (abs_i64(v) > rbox)
                    throw invariant_error("merge_kd: sampled prefix escapes box");
            auto [it, fresh] = seen.emplace(std::move(key), l);
            if (!fresh) return block(it->second, l);
        }
        return {};
    };

    // level kappa: if even the largest coordinate stays flat across the
    // sample window, all kappa coordinates collide exactly
    const i64 points_k = pow_capped(2 * rbox + 1, kappa, mm + 2);
    const i64 mu_top = checked_add(kappa, points_k);
    i64 mu_next;  // smallest mu with mu * x_sorted(level) > 2*dev_num
    if (xs(kappa) == 0 || checked_mul(mu_top, xs(kappa)) <= checked_mul(2, dev_num)) {
        auto t = scan_collision(kappa, 1, mu_top);
        if (!t.empty()) return t;
        return all;  // too short to force a collision
    }
    mu_next = xs(kappa) == 0 ? 1 : (2 * dev_num) / xs(kappa) + 1;

    for (i64 j = kappa - 1; j >= 1; --j) {
        // extraction at level j+1: low coordinates cancel via collision,
        // high coordinates stay positive because blocks span >= mu_next
        const i64 span = pow_capped(2 * rbox + 1, j, mm + 2);
        bool applicable;
        if (xs(j) == 0)
            applicable = true;
        else
            applicable = checked_mul(checked_sub(mu_next, 1), xs(j + 1)) >
                         checked_mul(checked_add(kappa, checked_mul(span, mu_next)),
                                     xs(j));
        if (applicable) {
            auto t = scan_collision(j, mu_next, checked_add(kappa, checked_mul(span, mu_next)));
            if (!t.empty() && mm >= checked_add(checked_mul(3, (i64)t.size()), kappa))
                return t;
            return all;  // sequence too short for a safe cut
        }
        mu_next = xs(j) == 0 ? 1 : (2 * dev_num) / xs(j) + 1;
    }

    // every coordinate climbs: an initial block of mu_1 + kappa entries is
    // positive everywhere and leaves a positive remainder
    if (mm <= checked_add(checked_mul(2, mu_next), kappa)) return all;
    std::vector<size_t> t;
    for (i64 p = 0; p < mu_next + kappa; ++p) t.push_back(re.permutation[(size_t)p]);
    return t;
}

}  // namespace

SignPartition merge_kd(const std::vector<std::vector<i64>>& vectors) {
    if (vectors.empty()) throw dim_error("merge_kd: empty sequence");
    const size_t dim = vectors.front().size();
    if (dim == 0) throw dim_error("merge_kd: zero-dimensional vectors");
    for (const auto& v : vectors)
        if (v.size() != dim) throw dim_error("merge_kd: mixed dimensions");

    i64 zeta = 0;
    std::vector<i64> total(dim, 0);
    for (const auto& v : vectors)
        for (size_t c = 0; c < dim; ++c) {
            zeta = std::max(zeta, abs_i64(v[c]));
            total[c] = checked_add(total[c], v[c]);
        }
    std::vector<bool> flip(dim, false);
    for (size_t c = 0; c < dim; ++c) flip[c] = total[c] < 0;

    KdState st;
    st.dim = dim;
    st.active.reserve(vectors.size());
    for (size_t i = 0; i < vectors.size(); ++i) {
        Item it;
        it.orig = i;
        it.v = vectors[i];
        for (size_t c = 0; c < dim; ++c)
            if (flip[c]) it.v[c] = checked_neg(it.v[c]);
        st.active.push_back(std::move(it));
    }
    st.rem_total = seq_total(st.active, dim);

    SignPartition part;
    part.zeta = zeta;
    part.kappa = (int)dim;

    while (!st.active.empty()) {
        auto positions = extract_conformal(st);
        if (positions.empty())
            throw invariant_error("merge_kd: empty extraction");

        std::vector<i64> sum(dim, 0);
        std::vector<size_t> subset;
        std::vector<bool> removed(st.active.size(), false);
        for (size_t p : positions) {
            subset.push_back(st.active[p].orig);
            for (size_t c = 0; c < dim; ++c)
                sum[c] = checked_add(sum[c], st.active[p].v[c]);
            removed[p] = true;
        }
        for (size_t c = 0; c < dim; ++c)
            if (sum[c] < 0 || sum[c] > st.rem_total[c])
                throw invariant_error("merge_kd: extracted subset not conformal");

        for (size_t c = 0; c < dim; ++c)
            st.rem_total[c] = checked_sub(st.rem_total[c], sum[c]);
        std::sort(subset.begin(), subset.end());
        part.subsets.push_back(std::move(subset));

        std::vector<Item> next;
        next.reserve(st.active.size() - positions.size());
        for (size_t i = 0; i < st.active.size(); ++i)
            if (!removed[i]) next.push_back(std::move(st.active[i]));
        st.active = std::move(next);
    }

    for (const auto& t : part.subsets) {
        std::vector<i64> s(dim, 0);
        for (size_t i : t)
            for (size_t c = 0; c < dim; ++c)
                s[c] = checked_add(s[c], vectors[i][c]);
        if (!conforms(s, total))
            throw invariant_error("merge_kd: subset sum does not conform");
        part.max_subset_size = std::max(part.max_subset_size, t.size());
    }
    part.constant_c = smallest_c(part.max_subset_size, zeta, (int)dim);
    return part;
}

}  // namespace blockip
