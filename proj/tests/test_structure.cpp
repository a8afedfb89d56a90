#include "doctest.h"

#include <random>

#include "blockip/instances.hpp"
#include "blockip/solver.hpp"
#include "blockip/structure.hpp"

using namespace blockip;

namespace {

FourBlockSpec line_spec(int n) {
    return FourBlockSpec(SmallMatrix(1, 2, {1, -1}), SmallMatrix(1, 1, {1}),
                         SmallMatrix::zero(1, 1), SmallMatrix(1, 2, {1, 0}), n);
}

void check_bounded_decomposition(const BrickVector& g, const FourBlockSpec& spec,
                                 const BoundedDecomposition& bd) {
    BrickVector sum = BrickVector::zero(spec.t_B(), spec.t_A(), spec.n);
    for (const auto& e : bd.summands) {
        CHECK(in_kernel(spec, e, true));
        CHECK(conforms(e.brick0, g.brick0));
        CHECK(e.norm_inf() <= bd.xi);
        sum = sum + e;
    }
    CHECK(sum == g);
}

}  // namespace

TEST_CASE("decompose_bounded: trivial and empty cases") {
    FourBlockSpec s = line_spec(2);
    BrickVector g({1}, {{1, 2}, {-1, 0}});
    BoundedDecomposition bd = decompose_bounded(g, s, 2);
    REQUIRE(bd.summands.size() == 1);
    CHECK(bd.summands[0] == g);
    CHECK(bd.xi == 2);

    BrickVector zero = BrickVector::zero(1, 2, 2);
    BoundedDecomposition bz = decompose_bounded(zero, s, 1);
    CHECK(bz.summands.empty());
    CHECK(bz.xi == 0);
}

TEST_CASE("decompose_bounded splits the doubled n=3 witness at xi = 2") {
    FourBlockSpec s = line_spec(3);
    BrickVector g({2}, {{4, 6}, {-2, 0}, {-2, 0}});
    REQUIRE(in_kernel(s, g, true));
    BoundedDecomposition bd = decompose_bounded(g, s, 2);
    check_bounded_decomposition(g, s, bd);
    // brick 1 carries a 6; summands are capped at 2, so at least 3 of them
    CHECK(bd.summands.size() >= 3);
    CHECK(bd.xi <= 2);
}

TEST_CASE("decompose_bounded auto-escalates") {
    FourBlockSpec s = line_spec(4);
    ThreeBlockLowerBound lb = gen_lower_3block(4);
    BoundedDecomposition bd = decompose_bounded_auto(lb.witness, s, 1);
    check_bounded_decomposition(lb.witness, s, bd);
}

TEST_CASE("decompose_bounded escalation stops at the cap") {
    // 2u + 3z = 0 forces z = -2 when u = 3, so xi < 3 cannot make progress
    FourBlockSpec s(SmallMatrix(1, 1, {3}), SmallMatrix(1, 1, {2}),
                    SmallMatrix::zero(1, 1), SmallMatrix::zero(1, 1), 2);
    BrickVector y({3}, {{-2}, {-2}});
    REQUIRE(in_kernel(s, y, true));
    CHECK_THROWS_AS(decompose_bounded(y, s, 2), xi_too_small);
    CHECK_THROWS_AS(decompose_bounded_auto(y, s, 1, 2), budget_error);
    BoundedDecomposition bd = decompose_bounded_auto(y, s, 1, 8);
    CHECK(bd.xi == 3);
    CHECK(bd.summands.size() == 1);
}

TEST_CASE("centralize rejects decompositions that do not sum to y") {
    FourBlockSpec s = line_spec(2);
    BrickVector y({1}, {{1, 2}, {-1, 0}});
    BrickTypeAssignment t = assign_brick_types(y, 1);
    CHECK_THROWS_AS(centralize(y, t, {}, {}), jobs_not_representable);
    // an addon with brick-0 mass is equally invalid
    BrickVector bad({1}, {{0, 0}, {0, 0}});
    CHECK_THROWS_AS(centralize(y, t, {y - bad}, {bad}), jobs_not_representable);
}

TEST_CASE("canonical_set on the line family") {
    FourBlockSpec s = line_spec(2);
    auto entries = canonical_set(s, 1);
    REQUIRE(entries.size() == 3);  // u in {-1, 0, 1}
    for (const auto& e : entries) {
        if (e.u == std::vector<i64>{0}) {
            CHECK(e.status == CanonicalStatus::zero);
        } else {
            REQUIRE(e.status == CanonicalStatus::found);
            REQUIRE(e.rep.has_value());
            CHECK(e.rep->brick0 == e.u);
            CHECK(in_kernel(s, *e.rep, true));
        }
    }
}

TEST_CASE("canonical_set marks lattice-infeasible brick-0 values") {
    // A = (2): B u = u must be even for A z = -B u to be solvable
    FourBlockSpec s(SmallMatrix(1, 1, {2}), SmallMatrix(1, 1, {1}),
                    SmallMatrix::zero(1, 1), SmallMatrix(1, 1, {0}), 2);
    auto entries = canonical_set(s, 1);
    for (const auto& e : entries) {
        if (e.u == std::vector<i64>{0})
            CHECK(e.status == CanonicalStatus::zero);
        else
            CHECK(e.status == CanonicalStatus::infeasible);
    }
    CHECK(!canonical_feasible(s, std::vector<i64>{1}));
    CHECK(canonical_feasible(s, std::vector<i64>{2}));
}

TEST_CASE("canonical feasibility agrees with a phase-one solve") {
    // residual system for fixed u: minimize 0 with brick0 pinned to u
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        int tA = 1 + (int)(rng() % 2);
        SmallMatrix A = SmallMatrix::zero(1, tA);
        for (int c = 0; c < tA; ++c) A.at(0, c) = (i64)(rng() % 5) - 2;
        SmallMatrix B(1, 1, {(i64)(rng() % 3) - 1});
        SmallMatrix D = SmallMatrix::zero(1, tA);
        for (int c = 0; c < tA; ++c) D.at(0, c) = (i64)(rng() % 3) - 1;
        FourBlockSpec s(A, B, SmallMatrix::zero(1, 1), D, 2);
        for (i64 u = -1; u <= 1; ++u) {
            if (u == 0) continue;
            bool exact = canonical_feasible(s, std::vector<i64>{u});
            // phase-one-style oracle: pin brick 0 by bounds and ask solve()
            int nv = s.num_cols();
            std::vector<Bound> lo(nv, Bound::finite(-6)), hi(nv, Bound::finite(6));
            lo[0] = hi[0] = Bound::finite(u);
            IPInstance inst = IPInstance::from_spec(
                s, true, std::vector<i64>(s.num_rows(), 0), lo, hi,
                std::vector<i64>(nv, 0));
            SolveResult r = solve(inst);
            if (r.status == SolveStatus::optimal) {
                // a bounded witness exists, so the lattice test must agree
                CHECK(exact);
            } else if (exact) {
                // the lattice is feasible but may need points outside the
                // test box; only a definite in-box solution contradicts
                CHECK(r.status == SolveStatus::infeasible);
            } else {
                CHECK(r.status == SolveStatus::infeasible);
            }
        }
    }
}

TEST_CASE("decompose_same_orthant: zero and single-vector cases") {
    FourBlockSpec s = line_spec(2);
    OrthantDecomposition od =
        decompose_same_orthant(BrickVector::zero(1, 2, 2), s);
    CHECK(od.principals.empty());
    CHECK(od.addons.empty());

    BrickVector g({1}, {{1, 2}, {-1, 0}});
    od = decompose_same_orthant(g, s, 2);
    REQUIRE(od.principals.size() == 1);
    CHECK(od.principals[0] == g);
    CHECK(od.addons.empty());
}

TEST_CASE("decompose_same_orthant invariants on random kernel vectors") {
    for (int n = 2; n <= 5; ++n) {
        FourBlockSpec s = line_spec(n);
        auto ys = random_kernel_vectors(s, 900 + n, 6);
        for (const auto& y : ys) {
            OrthantDecomposition od = decompose_same_orthant(y, s);
            BrickVector sum = BrickVector::zero(1, 2, n);
            for (const auto& p : od.principals) {
                CHECK(in_kernel(s, p, true));
                sum = sum + p;
            }
            for (const auto& d : od.addons) {
                CHECK(in_kernel(s, d, true));
                for (i64 e : d.brick0) CHECK(e == 0);
                sum = sum + d;
            }
            CHECK(sum == y);
            for (size_t a = 0; a < od.principals.size(); ++a)
                for (size_t b = a + 1; b < od.principals.size(); ++b)
                    CHECK(sign_compatible(od.principals[a].flatten(),
                                          od.principals[b].flatten()));
            for (size_t a = 0; a < od.addons.size(); ++a)
                for (size_t b = a + 1; b < od.addons.size(); ++b)
                    CHECK(sign_compatible(od.addons[a].flatten(),
                                          od.addons[b].flatten()));
        }
    }
}

TEST_CASE("assign_brick_types groups and isolates brick 1") {
    BrickVector y({0}, {{2, 2}, {2, 2}, {2, 2}});
    BrickTypeAssignment t = assign_brick_types(y, 3);
    REQUIRE(t.groups.size() == 2);
    CHECK(t.groups[0] == std::vector<int>{1});
    CHECK(t.groups[1] == std::vector<int>{2, 3});

    BrickVector y2({0}, {{0, 0}, {5, 0}, {-5, 0}});
    BrickTypeAssignment t2 = assign_brick_types(y2, 2);
    CHECK(t2.groups.size() == 3);  // {1}, {2}, {3}: pos_large vs neg_large
    CHECK(t2.quantity_types[1][0] == QuantityKind::pos_large);
    CHECK(t2.quantity_types[2][0] == QuantityKind::neg_large);
    CHECK(t2.quantity_types[1][1] == QuantityKind::small);

    // the n-line family at n=4 with Gamma = 2
    ThreeBlockLowerBound lb = gen_lower_3block(4);
    BrickTypeAssignment t3 = assign_brick_types(lb.witness, 2);
    REQUIRE(t3.groups.size() == 2);
    CHECK(t3.groups[0] == std::vector<int>{1});
    CHECK(t3.groups[1] == std::vector<int>{2, 3, 4});
}

TEST_CASE("centralize: singleton groups leave y unchanged") {
    FourBlockSpec s = line_spec(2);
    BrickVector y({1}, {{1, 2}, {-1, 0}});
    OrthantDecomposition od = decompose_same_orthant(y, s, 2);
    BrickTypeAssignment t = assign_brick_types(y, 1);
    Centralization c = centralize(y, t, od.principals, od.addons);
    CHECK(c.y_tilde == y);
}

TEST_CASE("centralize splits 4 copies over 3 bricks as 2,1,1") {
    // y = principal 0 + one job v = (1, 1) placed 4 times over bricks 2..4
    FourBlockSpec s(SmallMatrix(1, 2, {1, -1}), SmallMatrix(1, 1, {1}),
                    SmallMatrix::zero(1, 1), SmallMatrix(1, 2, {1, -1}), 4);
    BrickVector addon1({0}, {{0, 0}, {1, 1}, {1, 1}, {0, 0}});
    BrickVector addon2({0}, {{0, 0}, {1, 1}, {0, 0}, {1, 1}});
    REQUIRE(in_kernel(s, addon1, true));
    REQUIRE(in_kernel(s, addon2, true));
    BrickVector y = addon1 + addon2;
    BrickTypeAssignment t = assign_brick_types(y, 3);
    REQUIRE(t.groups.size() == 2);
    REQUIRE(t.groups[1] == std::vector<int>{2, 3, 4});
    Centralization c = centralize(y, t, {}, {addon1, addon2});
    REQUIRE(c.jobs.size() == 1);
    CHECK(c.job_counts[1][0] == 4);
    CHECK(c.assigned[1][0] == 2);  // brick 2: ceil share
    CHECK(c.assigned[2][0] == 1);
    CHECK(c.assigned[3][0] == 1);
    CHECK(c.y_tilde.bricks[0] == y.bricks[0]);
    // group totals preserved
    std::vector<i64> got(2, 0), want(2, 0);
    for (int i = 2; i <= 4; ++i)
        for (int cc = 0; cc < 2; ++cc) {
            got[cc] += c.y_tilde.bricks[i - 1][cc];
            want[cc] += y.bricks[i - 1][cc];
        }
    CHECK(got == want);
}

TEST_CASE("centralization bound holds exactly on random kernel vectors") {
    for (int n = 2; n <= 5; ++n) {
        FourBlockSpec s = line_spec(n);
        auto ys = random_kernel_vectors(s, 1300 + n, 5);
        for (const auto& y : ys) {
            OrthantDecomposition od = decompose_same_orthant(y, s);
            i64 gamma = 0;
            {
                std::map<std::vector<i64>, bool> jobs;
                for (const auto& d : od.addons)
                    for (const auto& b : d.bricks) {
                        bool zero = true;
                        for (i64 e : b) zero = zero && e == 0;
                        if (!zero) jobs.emplace(b, true);
                    }
                for (const auto& [v, used] : jobs) {
                    (void)used;
                    i64 ni = 0;
                    for (i64 e : v) ni = std::max(ni, abs_i64(e));
                    gamma += ni;
                }
            }
            gamma = std::max<i64>(gamma, 1);
            std::vector<int> labels(s.n, 0);
            {
                std::map<std::vector<i64>, int> ids;
                for (int i = 0; i < s.n; ++i) {
                    std::vector<i64> key;
                    for (const auto& p : od.principals)
                        key.insert(key.end(), p.bricks[i].begin(),
                                   p.bricks[i].end());
                    labels[i] = ids.emplace(key, (int)ids.size()).first->second;
                }
            }
            BrickTypeAssignment t = assign_brick_types(y, gamma, labels);
            Centralization c = centralize(y, t, od.principals, od.addons);

            // |y_tilde^i - y_f^i|_inf <= Gamma, checked with exact rationals:
            // |n_j * y_tilde^i[c] - sum_{i' in N_j} y^i'[c]| <= n_j * Gamma
            for (size_t j = 0; j < t.groups.size(); ++j) {
                i64 nj = (i64)t.groups[j].size();
                for (int cc = 0; cc < s.t_A(); ++cc) {
                    i64 group_sum = 0;
                    for (int bi : t.groups[j]) group_sum += y.bricks[bi - 1][cc];
                    for (int bi : t.groups[j]) {
                        i64 dev = nj * c.y_tilde.bricks[bi - 1][cc] - group_sum;
                        CHECK(abs_i64(dev) <= nj * gamma);
                    }
                }
            }

            // D-balance: sum_i D y_tilde^i == sum_i D y^i
            std::vector<i64> dl(s.s_C(), 0), dr(s.s_C(), 0);
            for (int i = 0; i < s.n; ++i) {
                apply_accumulate(s.D, c.y_tilde.bricks[i], 1, dl);
                apply_accumulate(s.D, y.bricks[i], 1, dr);
            }
            CHECK(dl == dr);

            // corollary: large coordinates keep their sign, small stay small
            for (int i = 0; i < s.n; ++i)
                for (int cc = 0; cc < s.t_A(); ++cc) {
                    i64 yv = y.bricks[i][cc], tv = c.y_tilde.bricks[i][cc];
                    if (yv > gamma) CHECK(tv > 0);
                    else if (yv < -gamma) CHECK(tv < 0);
                    else CHECK(abs_i64(tv) <= 2 * gamma);
                }
        }
    }
}

TEST_CASE("conformal census counts 0 and y for a minimal vector") {
    ThreeBlockLowerBound lb = gen_lower_3block(3);
    u64 c = conformal_kernel_count(lb.spec, true, lb.witness);
    CHECK(c == 2);
    CHECK(!strict_conformal_divisor(lb.spec, true, lb.witness).has_value());
}

TEST_CASE("strict divisor of a doubled vector") {
    ThreeBlockLowerBound lb = gen_lower_3block(2);
    BrickVector y = scale(lb.witness, 2);
    auto z = strict_conformal_divisor(lb.spec, true, y);
    REQUIRE(z.has_value());
    CHECK(in_kernel(lb.spec, *z, true));
    CHECK(conforms(z->flatten(), y.flatten()));
    CHECK(z->norm_1() > 0);
    CHECK(z->norm_1() < y.norm_1());
}

TEST_CASE("sign_compatible_witness: doubled witness yields a divisor") {
    ThreeBlockLowerBound lb = gen_lower_3block(3);
    BrickVector y = scale(lb.witness, 2);
    auto z = sign_compatible_witness(y, lb.spec);
    REQUIRE(z.has_value());
    CHECK(in_kernel(lb.spec, *z, true));
    CHECK(conforms(z->flatten(), y.flatten()));
    CHECK(0 < z->norm_1());
    CHECK(z->norm_1() < y.norm_1());
}

TEST_CASE("sign_compatible_witness: the lower-bound witnesses are minimal") {
    for (int n = 2; n <= 5; ++n) {
        ThreeBlockLowerBound lb = gen_lower_3block(n);
        CHECK(!sign_compatible_witness(lb.witness, lb.spec).has_value());
    }
}

TEST_CASE("the constructive pipeline alone finds witnesses at scale") {
    // large multiples push the part count past the pigeonhole threshold, so
    // the centralization + merging route must succeed without the fallback
    for (int n : {3, 4}) {
        ThreeBlockLowerBound lb = gen_lower_3block(n);
        BrickVector y = scale(lb.witness, 60);
        auto z = sign_compatible_witness_pipeline(y, lb.spec);
        REQUIRE(z.has_value());
        CHECK(in_kernel(lb.spec, *z, true));
        CHECK(conforms(z->flatten(), y.flatten()));
        CHECK(0 < z->norm_1());
        CHECK(z->norm_1() < y.norm_1());
    }
}

TEST_CASE("witness agrees with the census on random kernel vectors") {
    for (int n = 2; n <= 4; ++n) {
        FourBlockSpec s = line_spec(n);
        auto ys = random_kernel_vectors(s, 4200 + n, 5);
        for (const auto& y : ys) {
            auto z = sign_compatible_witness(y, s);
            u64 census = conformal_kernel_count(s, true, y);
            if (census <= 2) {
                CHECK(!z.has_value());
            } else {
                REQUIRE(z.has_value());
                CHECK(in_kernel(s, *z, true));
                CHECK(conforms(z->flatten(), y.flatten()));
                CHECK(0 < z->norm_1());
                CHECK(z->norm_1() < y.norm_1());
            }
        }
    }
}
