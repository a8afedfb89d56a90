#include "doctest.h"

#include "blockip/graver.hpp"
#include "blockip/instances.hpp"
#include "blockip/solver.hpp"

using namespace blockip;

TEST_CASE("gen_lower_4block shapes and the (n-1, -n) row") {
    FourBlockSpec s = gen_lower_4block(2, 2);
    CHECK(s.A == SmallMatrix::identity(2));
    CHECK(s.C.rows() == 1);
    CHECK(s.D == SmallMatrix(1, 2, {1, -1}));
    CHECK(s.C == SmallMatrix(1, 2, {-1, 0}));
    // C + nD row reads (n-1, -n) = (1, -2) for n = 2
    std::vector<i64> row(2);
    for (int c = 0; c < 2; ++c) row[c] = s.C.at(0, c) + 2 * s.D.at(0, c);
    CHECK(row == std::vector<i64>{1, -2});
}

TEST_CASE("4-block family: minimal kernel brick0 is k*(n, n-1) for t=2") {
    for (int n = 2; n <= 4; ++n) {
        FourBlockSpec s = gen_lower_4block(2, n);
        SmallMatrix h = assemble(s, MatrixKind::H);
        auto pts = kernel_points(h, n);
        REQUIRE(!pts.empty());
        for (const auto& p : pts) {
            // all bricks equal brick 0 and brick 0 is a multiple of (n, n-1)
            BrickVector v = BrickVector::from_flat(p, s.t_B(), s.t_A(), s.n);
            for (const auto& b : v.bricks) CHECK(b == v.brick0);
            CHECK(v.brick0[0] * (n - 1) == v.brick0[1] * n);
        }
    }
}

TEST_CASE("gen_lower_3block witnesses") {
    ThreeBlockLowerBound lb2 = gen_lower_3block(2);
    CHECK(lb2.witness == BrickVector({1}, {{1, 2}, {-1, 0}}));
    ThreeBlockLowerBound lb3 = gen_lower_3block(3);
    CHECK(lb3.witness == BrickVector({1}, {{2, 3}, {-1, 0}, {-1, 0}}));
    CHECK(in_kernel(lb3.spec, lb3.witness, true));
    for (int n = 2; n <= 6; ++n)
        CHECK(gen_lower_3block(n).witness.norm_inf() == n);
}

TEST_CASE("exhaustive certification of the 4-block family at t=2") {
    for (int n = 2; n <= 4; ++n) {
        FourBlockSpec s = gen_lower_4block(2, n);
        LowerBoundCertificate cert = certify_min_norm_exhaustive(s, n);
        CHECK(cert.ok);
        CHECK(cert.min_norm_verified == n);
    }
    // bound = 1 is trivially certified for any spec
    LowerBoundCertificate triv =
        certify_min_norm_exhaustive(gen_lower_4block(2, 2), 1);
    CHECK(triv.ok);
}

TEST_CASE("certification failure returns the violating vector") {
    FourBlockSpec s = gen_lower_4block(2, 2);
    LowerBoundCertificate cert = certify_min_norm_exhaustive(s, 3);
    CHECK(!cert.ok);
    REQUIRE(cert.counterexample.has_value());
    CHECK(in_kernel(s, *cert.counterexample, false));
    CHECK(cert.counterexample->norm_inf() < 3);
}

TEST_CASE("divisibility certificate replays the chain") {
    LowerBoundCertificate c22 = certify_min_norm_divisibility(2, 2);
    CHECK(c22.ok);
    CHECK(c22.min_norm_verified == 2);
    LowerBoundCertificate c32 = certify_min_norm_divisibility(3, 2);
    CHECK(c32.min_norm_verified == 4);  // n^{t-1} = 4
    LowerBoundCertificate c34 = certify_min_norm_divisibility(3, 4);
    CHECK(c34.min_norm_verified == 16);

    // witness y_1 is divisible by n^{t-1}
    CHECK(c32.witness.brick0[0] % 4 == 0);
}

TEST_CASE("certify_min_norm dispatches and records the family") {
    FourBlockSpec s = gen_lower_4block(2, 3);
    LowerBoundCertificate ce = certify_min_norm(s, 3, CertifyMethod::exhaustive);
    CHECK(ce.ok);
    CHECK(ce.family == LowerBoundFamily::four_block);
    CHECK(ce.t == 2);
    CHECK(ce.n == 3);
    LowerBoundCertificate cd = certify_min_norm(s, 3, CertifyMethod::divisibility);
    CHECK(cd.ok);
    CHECK(cd.min_norm_verified == 3);

    // divisibility refuses non-family specs
    FourBlockSpec other(SmallMatrix(1, 2, {1, -1}), SmallMatrix(1, 1, {1}),
                        SmallMatrix::zero(1, 1), SmallMatrix(1, 2, {1, 0}), 2);
    CHECK_THROWS_AS(certify_min_norm(other, 2, CertifyMethod::divisibility),
                    invariant_error);
}

TEST_CASE("divisibility and exhaustive certifiers agree where both run") {
    for (int n = 2; n <= 4; ++n) {
        LowerBoundCertificate div = certify_min_norm_divisibility(2, n);
        LowerBoundCertificate exh =
            certify_min_norm_exhaustive(gen_lower_4block(2, n), div.min_norm_verified);
        CHECK(div.ok);
        CHECK(exh.ok);
        // and the witness really attains the bound
        CHECK(div.witness.norm_inf() == div.min_norm_verified);
        CHECK(in_kernel(gen_lower_4block(2, n), div.witness, false));
    }
}

TEST_CASE("random corpus is reproducible and planted instances are feasible") {
    CorpusParams params;
    auto a = random_corpus(99, params, 8);
    auto b = random_corpus(99, params, 8);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].b == b[i].b);
        CHECK(a[i].w == b[i].w);
        CHECK(a[i].constraint_matrix() == b[i].constraint_matrix());
    }
    // planted instances (even positions) admit a feasible point
    for (size_t i = 0; i < a.size(); i += 2) {
        SolveResult r = brute_solve(a[i], 4);
        CHECK(r.status == SolveStatus::optimal);
    }
}

TEST_CASE("feasible fraction is stable across seeds") {
    CorpusParams params;
    auto frac = [&](u64 seed) {
        auto corpus = random_corpus(seed, params, 300);
        size_t feas = 0;
        for (const auto& inst : corpus)
            if (brute_solve(inst, 4).status == SolveStatus::optimal) ++feas;
        return (double)feas / (double)corpus.size();
    };
    double a = frac(1001), b = frac(2002);
    CHECK(a > 0.4);  // planted half keep the corpus at least half feasible
    CHECK(std::abs(a - b) <= 0.1);
}

TEST_CASE("random kernel vectors really are kernel vectors") {
    ThreeBlockLowerBound lb = gen_lower_3block(3);
    auto ys = random_kernel_vectors(lb.spec, 7, 10);
    CHECK(!ys.empty());
    for (const auto& y : ys) {
        CHECK(in_kernel(lb.spec, y, true));
        CHECK(!y.is_zero());
    }
}
