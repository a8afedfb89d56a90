#include "doctest.h"

#include <random>

#include "blockip/graver.hpp"
#include "blockip/merging.hpp"

using namespace blockip;

namespace {

void check_partition(const SignPartition& p, size_t m) {
    std::vector<bool> seen(m, false);
    for (const auto& t : p.subsets) {
        CHECK(!t.empty());
        for (size_t i : t) {
            REQUIRE(i < m);
            CHECK(!seen[i]);
            seen[i] = true;
        }
    }
    for (size_t i = 0; i < m; ++i) CHECK(seen[i]);
}

}  // namespace

TEST_CASE("merge_1d: alternating signs summing to zero") {
    std::vector<i64> xs{1, -1, 1, -1, 1, -1};
    SignPartition p = merge_1d(xs);
    check_partition(p, xs.size());
    for (const auto& t : p.subsets) {
        i64 s = 0;
        for (size_t i : t) s += xs[i];
        CHECK(s == 0);  // total is 0, so conformal subsets sum to exactly 0
        CHECK(t.size() <= 8);
    }
}

TEST_CASE("merge_1d: all positive") {
    std::vector<i64> xs{2, 1, 3, 1, 2};
    SignPartition p = merge_1d(xs);
    check_partition(p, xs.size());
    for (const auto& t : p.subsets) {
        i64 s = 0;
        for (size_t i : t) s += xs[i];
        CHECK(s >= 0);
        CHECK(s <= 9);
    }
}

TEST_CASE("merge_1d: random sequences keep the hard 6*zeta+2 bound") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        size_t m = 1 + rng() % 100;
        std::vector<i64> xs(m);
        for (auto& e : xs) e = (i64)(rng() % 7) - 3;
        i64 zeta = 0, total = 0;
        for (i64 e : xs) {
            zeta = std::max(zeta, abs_i64(e));
            total += e;
        }
        SignPartition p = merge_1d(xs);
        check_partition(p, m);
        for (const auto& t : p.subsets) {
            CHECK((i64)t.size() <= 6 * zeta + 2);
            i64 s = 0;
            for (size_t i : t) s += xs[i];
            std::vector<i64> sv{s}, tv{total};
            CHECK(conforms(sv, tv));
        }
    }
}

TEST_CASE("merge_kd: singleton and cancelling pair") {
    SignPartition p1 = merge_kd({{3, -2}});
    check_partition(p1, 1);
    CHECK(p1.subsets.size() == 1);

    SignPartition p2 = merge_kd({{1, 1}, {-1, -1}});
    check_partition(p2, 2);
    CHECK(p2.subsets.size() == 1);  // sum 0 conforms only as the whole pair
}

TEST_CASE("merge_kd: random 2-D sequences are conformal partitions") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 60; ++trial) {
        size_t m = 1 + rng() % 120;
        std::vector<std::vector<i64>> xs(m, std::vector<i64>(2));
        for (auto& v : xs)
            for (auto& e : v) e = (i64)(rng() % 5) - 2;
        std::vector<i64> total(2, 0);
        for (const auto& v : xs)
            for (size_t c = 0; c < 2; ++c) total[c] += v[c];
        SignPartition p = merge_kd(xs);
        check_partition(p, m);
        for (const auto& t : p.subsets) {
            std::vector<i64> s(2, 0);
            for (size_t i : t)
                for (size_t c = 0; c < 2; ++c) s[c] += xs[i][c];
            CHECK(conforms(s, total));
        }
        CHECK(p.max_subset_size >= 1);
        CHECK(p.constant_c >= 1);
    }
}

TEST_CASE("merge_kd: 3-D sequences") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        size_t m = 5 + rng() % 60;
        std::vector<std::vector<i64>> xs(m, std::vector<i64>(3));
        for (auto& v : xs)
            for (auto& e : v) e = (i64)(rng() % 7) - 3;
        std::vector<i64> total(3, 0);
        for (const auto& v : xs)
            for (size_t c = 0; c < 3; ++c) total[c] += v[c];
        SignPartition p = merge_kd(xs);
        check_partition(p, m);
        for (const auto& t : p.subsets) {
            std::vector<i64> s(3, 0);
            for (size_t i : t)
                for (size_t c = 0; c < 3; ++c) s[c] += xs[i][c];
            CHECK(conforms(s, total));
        }
    }
}

TEST_CASE("merge_kd residual stays in the total's orthant during extraction") {
    // all-positive totals: every partial residual must stay nonnegative,
    // which check_partition + conformality imply only jointly; spot-check a
    // crafted mix of large cancellations
    std::vector<std::vector<i64>> xs{{2, 0},  {-2, 0}, {2, 1},  {0, -1},
                                     {1, 2},  {-1, 0}, {0, 2},  {1, -2},
                                     {-2, 1}, {2, 2},  {-1, -1}, {1, 0}};
    std::vector<i64> total(2, 0);
    for (const auto& v : xs)
        for (size_t c = 0; c < 2; ++c) total[c] += v[c];
    SignPartition p = merge_kd(xs);
    check_partition(p, xs.size());
    for (const auto& t : p.subsets) {
        std::vector<i64> s(2, 0);
        for (size_t i : t)
            for (size_t c = 0; c < 2; ++c) s[c] += xs[i][c];
        CHECK(conforms(s, total));
    }
}
