#include "doctest.h"

#include <random>

#include "blockip/instances.hpp"
#include "blockip/solver.hpp"

using namespace blockip;

namespace {

FourBlockSpec line_spec(int n) {
    return FourBlockSpec(SmallMatrix(1, 2, {1, -1}), SmallMatrix(1, 1, {1}),
                         SmallMatrix::zero(1, 1), SmallMatrix(1, 2, {1, 0}), n);
}

// independent oracle: enumerate the clamped box in reverse coordinate order
// with no pruning at all
struct ReverseEnum {
    const IPInstance& inst;
    SmallMatrix h;
    std::optional<i64> best;

    explicit ReverseEnum(const IPInstance& i) : inst(i), h(i.constraint_matrix()) {}

    void rec(std::vector<i64>& x, int depth, i64 radius) {
        if (depth < 0) {
            if (h.apply(x) == inst.b) {
                i64 obj = inst.objective(x);
                if (!best || obj < *best) best = obj;
            }
            return;
        }
        i64 lo = inst.lower[depth].is_finite()
                     ? std::max(inst.lower[depth].value, -radius)
                     : -radius;
        i64 hi = inst.upper[depth].is_finite()
                     ? std::min(inst.upper[depth].value, radius)
                     : radius;
        for (i64 v = hi; v >= lo; --v) {  // descending, reversed order
            x[depth] = v;
            rec(x, depth - 1, radius);
        }
    }

    std::optional<i64> run(i64 radius) {
        std::vector<i64> x(inst.num_vars(), 0);
        rec(x, inst.num_vars() - 1, radius);
        return best;
    }
};

}  // namespace

TEST_CASE("brute_solve: empty region and zero objective") {
    FourBlockSpec s = line_spec(2);
    std::vector<Bound> lo(5, Bound::finite(1)), hi(5, Bound::finite(2));
    IPInstance inf = IPInstance::from_spec(s, true, {9, 9, 9}, lo, hi,
                                           std::vector<i64>(5, 0));
    CHECK(brute_solve(inf, 3).status == SolveStatus::infeasible);

    std::vector<Bound> lo2(5, Bound::finite(-2)), hi2(5, Bound::finite(2));
    IPInstance ok = IPInstance::from_spec(s, true, {0, 0, 0}, lo2, hi2,
                                          std::vector<i64>(5, 0));
    SolveResult r = brute_solve(ok, 2);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(*r.objective == 0);
}

TEST_CASE("brute_solve agrees with an independent reversed enumeration") {
    FourBlockSpec s = line_spec(2);
    std::vector<Bound> lo(5, Bound::finite(-2)), hi(5, Bound::finite(2));
    IPInstance inst = IPInstance::from_spec(s, true, {0, 0, 0}, lo, hi,
                                            {1, 1, 1, 1, 1});
    SolveResult r = brute_solve(inst, 2);
    ReverseEnum oracle(inst);
    auto want = oracle.run(2);
    REQUIRE(r.status == SolveStatus::optimal);
    REQUIRE(want.has_value());
    CHECK(*r.objective == *want);
}

TEST_CASE("phase_one: b = 0 starts at zero") {
    FourBlockSpec s = line_spec(2);
    std::vector<Bound> lo(5, Bound::finite(-2)), hi(5, Bound::finite(2));
    IPInstance inst = IPInstance::from_spec(s, true, {0, 0, 0}, lo, hi,
                                            std::vector<i64>(5, 0));
    PhaseOne ph = phase_one(inst);
    CHECK(ph.start.flatten() == std::vector<i64>(ph.augmented.num_vars(), 0));
    CHECK(ph.augmented.objective(ph.start.flatten()) == 0);
}

TEST_CASE("phase_one start carries b on the slacks and reaches zero") {
    FourBlockSpec s = line_spec(2);
    std::vector<Bound> lo(5, Bound::finite(-2)), hi(5, Bound::finite(2));
    IPInstance inst = IPInstance::from_spec(s, true, {0, 1, 1}, lo, hi,
                                            std::vector<i64>(5, 0));
    PhaseOne ph = phase_one(inst);
    CHECK(ph.augmented.feasible_point(ph.start.flatten()));
    CHECK(ph.augmented.objective(ph.start.flatten()) == 2);  // |b|_1

    SolveResult ph_res = solve_from(ph.augmented, ph.start);
    REQUIRE(ph_res.status == SolveStatus::optimal);
    CHECK(*ph_res.objective == 0);
    BrickVector ph_x = BrickVector::from_flat(
        *ph_res.solution, ph.orig_t_B, ph.augmented.spec->t_A(), 2);
    std::vector<i64> x0 = ph.extract(ph_x);
    CHECK(inst.feasible_point(x0));

    // cross-check with the brute oracle
    CHECK(brute_solve(inst, 2).status == SolveStatus::optimal);
}

TEST_CASE("phase_one objective stays positive for an infeasible system") {
    // parity obstruction: brick row x0 + 2 z = 1 has no integer solution
    FourBlockSpec s(SmallMatrix(1, 1, {2}), SmallMatrix(1, 1, {2}),
                    SmallMatrix::zero(1, 1), SmallMatrix(1, 1, {0}), 1);
    std::vector<Bound> lo(2, Bound::finite(-4)), hi(2, Bound::finite(4));
    IPInstance inst = IPInstance::from_spec(s, true, {0, 1}, lo, hi,
                                            std::vector<i64>(2, 0));
    CHECK(brute_solve(inst, 4).status == SolveStatus::infeasible);
    SolveResult r = solve(inst);
    CHECK(r.status == SolveStatus::infeasible);
    CHECK(r.phase_one_objective > 0);
}

TEST_CASE("best_step_dp: n = 1 reduces to direct enumeration") {
    FourBlockSpec s(SmallMatrix(1, 2, {1, -1}), SmallMatrix(1, 1, {1}),
                    SmallMatrix(1, 1, {1}), SmallMatrix(1, 2, {1, 0}), 1);
    std::vector<Bound> lo(3, Bound::finite(-3)), hi(3, Bound::finite(3));
    IPInstance inst = IPInstance::from_spec(s, false, {0, 0}, lo, hi, {0, 1, -2});
    StepQuery q;
    q.base = BrickVector::zero(1, 2, 1);
    q.rho = 1;
    q.xi = 3;
    q.guess = {1};

    // with g0 = 1 the brick row forces 1 + z1 - z2 = 0 and the top row
    // 1 + z1 = 0, so z = (-1, 0) uniquely; w.g = 0*1 + 1*(-1) + (-2)*0 = -1
    auto step = best_step_dp(inst, q);
    REQUIRE(step.has_value());
    CHECK(step->g.brick0 == std::vector<i64>{1});
    CHECK(step->g.bricks[0] == std::vector<i64>{-1, 0});
    CHECK(step->delta == -1);
}

TEST_CASE("best_step_dp: v = 0 never reports an impossible improvement") {
    FourBlockSpec s = line_spec(2);
    std::vector<Bound> lo(5, Bound::finite(-2)), hi(5, Bound::finite(2));
    IPInstance inst = IPInstance::from_spec(s, true, {0, 0, 0}, lo, hi,
                                            {1, 1, 1, 1, 1});
    StepQuery q;
    q.base = BrickVector::zero(1, 2, 2);
    q.rho = 1;
    q.xi = 2;
    q.guess = {0};
    auto step = best_step_dp(inst, q);
    REQUIRE(step.has_value());
    // 0 is in the candidate set, so the minimum is at most 0; the kernel of
    // the line family does admit negative-cost directions only if w says so
    CHECK(step->delta <= 0);
}

TEST_CASE("best_step_dp delta equals the brute-forced candidate minimum") {
    std::mt19937_64 rng(123);
    CorpusParams params;
    params.n_max = 3;
    auto corpus = random_corpus(77, params, 12);
    for (const auto& inst : corpus) {
        const FourBlockSpec& s = *inst.spec;
        SolveResult base = brute_solve(inst, 4);
        if (base.status != SolveStatus::optimal) continue;
        BrickVector x0 =
            BrickVector::from_flat(*base.solution, s.t_B(), s.t_A(), s.n);

        std::vector<i64> guess(s.t_B());
        for (auto& e : guess) e = (i64)(rng() % 3) - 1;
        StepQuery q{x0, 1, 2, guess};
        auto step = best_step_dp(inst, q);

        // oracle: direct enumeration over the whole candidate box
        std::optional<i64> want;
        std::vector<i64> flat0 = x0.flatten();
        bool guess_ok = true;
        for (int c = 0; c < s.t_B(); ++c) {
            i64 moved = flat0[c] + guess[c];
            if (abs_i64(guess[c]) > 2 ||
                !within(inst.lower[c], moved, inst.upper[c]))
                guess_ok = false;
        }
        if (guess_ok) {
            int nb = s.n * s.t_A();
            std::vector<i64> g(s.num_cols());
            for (int c = 0; c < s.t_B(); ++c) g[c] = guess[c];
            std::vector<i64> z(nb, -2);
            SmallMatrix h = inst.constraint_matrix();
            while (true) {
                bool ok = true;
                for (int c = 0; c < nb && ok; ++c) {
                    g[s.t_B() + c] = z[c];
                    i64 moved = flat0[s.t_B() + c] + z[c];
                    if (!within(inst.lower[s.t_B() + c], moved,
                                inst.upper[s.t_B() + c]))
                        ok = false;
                }
                if (ok) {
                    auto hx = h.apply(g);
                    bool kernel = true;
                    for (i64 e : hx) kernel = kernel && e == 0;
                    if (kernel) {
                        i64 delta = inst.objective(g);
                        if (!want || delta < *want) want = delta;
                    }
                }
                int p = nb - 1;
                while (p >= 0 && z[p] == 2) { z[p] = -2; --p; }
                if (p < 0) break;
                ++z[p];
            }
        }
        if (want) {
            REQUIRE(step.has_value());
            CHECK(step->delta == *want);
        } else {
            CHECK(!step.has_value());
        }
    }
}

TEST_CASE("solve: already optimal start takes zero steps") {
    FourBlockSpec s = line_spec(2);
    std::vector<Bound> lo(5, Bound::finite(0)), hi(5, Bound::finite(2));
    IPInstance inst = IPInstance::from_spec(s, true, {0, 0, 0}, lo, hi,
                                            {1, 1, 1, 1, 1});
    SolveResult r = solve_from(inst, BrickVector::zero(1, 2, 2));
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.stats.augmentation_steps == 0);
    CHECK(*r.objective == 0);
}

TEST_CASE("solve: zero objective returns a feasible point immediately") {
    FourBlockSpec s = line_spec(2);
    std::vector<Bound> lo(5, Bound::finite(-2)), hi(5, Bound::finite(2));
    IPInstance inst = IPInstance::from_spec(s, true, {0, 1, 1}, lo, hi,
                                            std::vector<i64>(5, 0));
    SolveResult r = solve(inst);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(*r.objective == 0);
    CHECK(inst.feasible_point(*r.solution));
    CHECK(r.certified);
}

TEST_CASE("solve matches brute force on a random corpus slice") {
    CorpusParams params;
    auto corpus = random_corpus(2024, params, 10);
    for (const auto& inst : corpus) {
        SolveResult want = brute_solve(inst, 4);
        SolveResult got = solve(inst);
        REQUIRE(got.status != SolveStatus::budget_exceeded);
        REQUIRE(want.status != SolveStatus::budget_exceeded);
        if (want.status == SolveStatus::infeasible) {
            CHECK(got.status == SolveStatus::infeasible);
        } else {
            REQUIRE(got.status == SolveStatus::optimal);
            CHECK(*got.objective == *want.objective);
            CHECK(inst.feasible_point(*got.solution));
            CHECK(got.certified);
        }
    }
}

TEST_CASE("every accepted augmentation improves and stays feasible") {
    // indirectly asserted inside solve(); exercise a run that takes steps
    FourBlockSpec s = line_spec(3);
    int nv = s.num_cols();
    std::vector<Bound> lo(nv, Bound::finite(-3)), hi(nv, Bound::finite(3));
    std::vector<i64> w(nv, 1);
    w[0] = -2;
    IPInstance inst = IPInstance::from_spec(s, true, std::vector<i64>(4, 0),
                                            lo, hi, w);
    SolveResult got = solve(inst);
    SolveResult want = brute_solve(inst, 3);
    REQUIRE(got.status == SolveStatus::optimal);
    REQUIRE(want.status == SolveStatus::optimal);
    CHECK(*got.objective == *want.objective);
}

TEST_CASE("solve detects an unbounded ray") {
    // brick row x0 - z = 0, w = (-1, -1): pushing (1, 1) forever
    FourBlockSpec s(SmallMatrix(1, 1, {-1}), SmallMatrix(1, 1, {1}),
                    SmallMatrix::zero(1, 1), SmallMatrix(1, 1, {0}), 1);
    std::vector<Bound> lo(2, Bound::finite(0));
    std::vector<Bound> hi(2, Bound::pos_inf());
    IPInstance inst = IPInstance::from_spec(s, true, {0, 0}, lo, hi, {-1, -1});
    SolveResult r = solve(inst);
    CHECK(r.status == SolveStatus::unbounded);
}

TEST_CASE("solve matches brute force on a 3-block corpus slice") {
    CorpusParams params;
    params.three_block = true;
    auto corpus = random_corpus(3033, params, 8);
    for (const auto& inst : corpus) {
        SolveResult want = brute_solve(inst, 4);
        SolveResult got = solve(inst);
        if (want.status == SolveStatus::infeasible) {
            CHECK(got.status == SolveStatus::infeasible);
        } else {
            REQUIRE(got.status == SolveStatus::optimal);
            CHECK(*got.objective == *want.objective);
        }
    }
}

TEST_CASE("insufficient caps produce an uncertified local answer") {
    // 2 x0 + 3 z = 0 per brick: the only kernel moves need |g| >= 2, so a
    // cap of 1 freezes the start point
    FourBlockSpec s(SmallMatrix(1, 1, {3}), SmallMatrix(1, 1, {2}),
                    SmallMatrix::zero(1, 1), SmallMatrix::zero(1, 1), 2);
    std::vector<Bound> lo(3, Bound::finite(-3)), hi(3, Bound::finite(3));
    IPInstance inst =
        IPInstance::from_spec(s, true, {0, 0, 0}, lo, hi, {-1, -1, -1});
    SolveCaps small;
    small.xi = 1;
    small.guess_radius = 1;
    SolveResult stuck = solve(inst, small);
    REQUIRE(stuck.status == SolveStatus::optimal);
    CHECK(!stuck.certified);
    CHECK(*stuck.objective == 0);

    SolveResult full = solve(inst);
    REQUIRE(full.status == SolveStatus::optimal);
    CHECK(full.certified);
    CHECK(*full.objective < 0);
    SolveResult oracle = brute_solve(inst, 3);
    CHECK(*full.objective == *oracle.objective);
}

TEST_CASE("solve reports budget exhaustion instead of wrong answers") {
    FourBlockSpec s = line_spec(3);
    int nv = s.num_cols();
    std::vector<Bound> lo(nv, Bound::finite(-3)), hi(nv, Bound::finite(3));
    std::vector<i64> w(nv, 1);
    w[0] = -2;
    IPInstance inst =
        IPInstance::from_spec(s, true, std::vector<i64>(4, 0), lo, hi, w);
    SolveCaps caps;
    caps.dp_state_budget = 1;
    SolveResult r = solve(inst, caps);
    CHECK(r.status == SolveStatus::budget_exceeded);
}

TEST_CASE("solve is deterministic across thread counts") {
    CorpusParams params;
    auto corpus = random_corpus(55, params, 4);
    for (const auto& inst : corpus) {
        SolveCaps caps1, caps2;
        caps2.threads = 2;
        SolveResult a = solve(inst, caps1);
        SolveResult b = solve(inst, caps2);
        CHECK(a.status == b.status);
        if (a.status == SolveStatus::optimal) {
            CHECK(*a.objective == *b.objective);
            CHECK(*a.solution == *b.solution);
        }
    }
}
