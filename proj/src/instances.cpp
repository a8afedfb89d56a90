#include "blockip/instances.hpp"

#include <algorithm>

#include "blockip/graver.hpp"

namespace blockip {

FourBlockSpec gen_lower_4block(int t, int n) {
    if (t < 2 || n < 2) throw dim_error("gen_lower_4block: need t, n >= 2");
    SmallMatrix A = SmallMatrix::identity(t);
    SmallMatrix B = SmallMatrix::zero(t, t);
    for (int i = 0; i < t; ++i) B.at(i, i) = -1;
    SmallMatrix D = SmallMatrix::zero(t - 1, t);
    for (int i = 0; i < t - 1; ++i) {
        D.at(i, i) = 1;
        D.at(i, i + 1) = -1;
    }
    SmallMatrix C = SmallMatrix::zero(t - 1, t);
    for (int i = 0; i < t - 1; ++i) C.at(i, i) = -1;
    return FourBlockSpec(A, B, C, D, n);
}

ThreeBlockLowerBound gen_lower_3block(int n) {
    if (n < 2) throw dim_error("gen_lower_3block: need n >= 2");
    SmallMatrix B(1, 1, {1});
    SmallMatrix A(1, 2, {1, -1});
    SmallMatrix D(1, 2, {1, 0});
    SmallMatrix C = SmallMatrix::zero(1, 1);
    ThreeBlockLowerBound out;
    out.spec = FourBlockSpec(A, B, C, D, n);
    std::vector<std::vector<i64>> bricks(n, std::vector<i64>{-1, 0});
    bricks[0] = {(i64)n - 1, (i64)n};
    out.witness = BrickVector({1}, bricks);
    if (!in_kernel(out.spec, out.witness, /*three_block=*/true))
        throw invariant_error("gen_lower_3block: witness left the kernel");
    return out;
}

namespace {

// recognizes the gen_lower_4block shape and recovers t
std::optional<int> four_block_family_t(const FourBlockSpec& spec) {
    int t = spec.t_A();
    if (spec.t_B() != t || spec.s_A() != t || spec.s_C() != t - 1 || t < 2)
        return std::nullopt;
    FourBlockSpec want = gen_lower_4block(t, std::max(spec.n, 2));
    if (!(spec.A == want.A) || !(spec.B == want.B) || !(spec.C == want.C) ||
        !(spec.D == want.D))
        return std::nullopt;
    return t;
}

}  // namespace

LowerBoundCertificate certify_min_norm_exhaustive(const FourBlockSpec& spec,
                                                  i64 bound, u64 node_budget) {
    if (bound < 1) throw dim_error("certify_min_norm_exhaustive: bound < 1");
    LowerBoundCertificate cert;
    cert.method = CertifyMethod::exhaustive;
    cert.min_norm_verified = bound;
    cert.n = spec.n;
    if (auto t = four_block_family_t(spec)) {
        cert.family = LowerBoundFamily::four_block;
        cert.t = *t;
    }
    SmallMatrix h = assemble(spec, MatrixKind::H);
    if (bound > 1) {
        auto points = kernel_points(h, bound - 1, node_budget,
                                    /*stop_at_first=*/true);
        if (!points.empty()) {
            cert.counterexample = BrickVector::from_flat(
                points.front(), spec.t_B(), spec.t_A(), spec.n);
            cert.ok = false;
            return cert;
        }
    }
    cert.ok = true;
    return cert;
}

LowerBoundCertificate certify_min_norm_divisibility(int t, int n) {
    FourBlockSpec spec = gen_lower_4block(t, n);

    // generator: y_i = n^{t-i} (n-1)^{i-1}; the chain (n-1) y_i = n y_{i+1}
    // forces n^{t-1} | y_1 for any kernel vector, and bricks all equal brick 0
    std::vector<i64> gen(t);
    for (int i = 0; i < t; ++i) {
        i64 v = 1;
        for (int k = 0; k < t - 1 - i; ++k) v = checked_mul(v, n);
        for (int k = 0; k < i; ++k) v = checked_mul(v, n - 1);
        gen[i] = v;
    }
    for (int i = 0; i + 1 < t; ++i)
        if (checked_mul((i64)n - 1, gen[i]) != checked_mul((i64)n, gen[i + 1]))
            throw invariant_error("divisibility chain broken");

    LowerBoundCertificate cert;
    cert.family = LowerBoundFamily::four_block;
    cert.t = t;
    cert.n = n;
    cert.method = CertifyMethod::divisibility;
    std::vector<std::vector<i64>> bricks(n, gen);
    cert.witness = BrickVector(gen, bricks);
    if (!in_kernel(spec, cert.witness, /*three_block=*/false))
        throw invariant_error("divisibility witness left the kernel");
    cert.min_norm_verified = *std::max_element(gen.begin(), gen.end());
    cert.ok = true;
    return cert;
}

LowerBoundCertificate certify_min_norm(const FourBlockSpec& spec, i64 bound,
                                       CertifyMethod method) {
    if (method == CertifyMethod::exhaustive)
        return certify_min_norm_exhaustive(spec, bound);
    auto t = four_block_family_t(spec);
    if (!t)
        throw invariant_error(
            "divisibility certification only applies to the 4-block family");
    LowerBoundCertificate cert = certify_min_norm_divisibility(*t, spec.n);
    if (cert.min_norm_verified < bound) {
        cert.ok = false;
        cert.counterexample = cert.witness;
    }
    return cert;
}

/////////////////////////////////////////////////////////////////////////////

namespace {

i64 rnd_range(std::mt19937_64& rng, i64 lo, i64 hi) {
    return lo + (i64)(rng() % (u64)(hi - lo + 1));
}

SmallMatrix rnd_matrix(std::mt19937_64& rng, int rows, int cols, i64 range) {
    SmallMatrix m = SmallMatrix::zero(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m.at(r, c) = rnd_range(rng, -range, range);
    return m;
}

}  // namespace

std::vector<IPInstance> random_corpus(u64 seed, const CorpusParams& p,
                                      size_t count) {
    std::mt19937_64 rng(seed);
    std::vector<IPInstance> out;
    out.reserve(count);
    while (out.size() < count) {
        int n = (int)rnd_range(rng, p.n_min, p.n_max);
        int tA = (int)rnd_range(rng, p.t_A_min, p.t_A_max);
        int tB = (int)rnd_range(rng, p.t_B_min, p.t_B_max);
        int sA = (int)rnd_range(rng, p.s_A_min, p.s_A_max);
        int sC = (int)rnd_range(rng, p.s_C_min, p.s_C_max);
        SmallMatrix A = rnd_matrix(rng, sA, tA, p.entry_range);
        SmallMatrix B = rnd_matrix(rng, sA, tB, p.entry_range);
        SmallMatrix D = rnd_matrix(rng, sC, tA, p.entry_range);
        SmallMatrix C = p.three_block ? SmallMatrix::zero(sC, tB)
                                      : rnd_matrix(rng, sC, tB, p.entry_range);
        FourBlockSpec spec(A, B, C, D, n);

        const int nv = spec.num_cols();
        std::vector<Bound> lo(nv), hi(nv);
        std::vector<i64> lov(nv), hiv(nv);
        for (int c = 0; c < nv; ++c) {
            lov[c] = rnd_range(rng, p.bound_low, p.bound_low + 2);
            hiv[c] = lov[c] + rnd_range(rng, 0, p.bound_width);
            lo[c] = Bound::finite(lov[c]);
            hi[c] = Bound::finite(hiv[c]);
        }
        std::vector<i64> w(nv);
        for (auto& e : w) e = rnd_range(rng, -p.w_range, p.w_range);

        std::vector<i64> b(spec.num_rows(), 0);
        if (out.size() % 2 == 0) {
            // plant a feasible point
            std::vector<i64> x(nv);
            for (int c = 0; c < nv; ++c) x[c] = rnd_range(rng, lov[c], hiv[c]);
            b = assemble(spec, p.three_block ? MatrixKind::H0 : MatrixKind::H)
                    .apply(x);
        } else {
            for (auto& e : b) e = rnd_range(rng, -2, 2);
        }
        out.push_back(IPInstance::from_spec(spec, p.three_block, b, lo, hi, w));
    }
    return out;
}

std::vector<BrickVector> random_kernel_vectors(const FourBlockSpec& spec,
                                               u64 seed, size_t count,
                                               i64 coeff_range) {
    SmallMatrix h0 = assemble(spec, MatrixKind::H0);
    auto basis = kernel_lattice_basis(h0);
    std::mt19937_64 rng(seed);
    std::vector<BrickVector> out;
    if (basis.empty()) return out;
    size_t attempts = 0;
    while (out.size() < count && attempts++ < count * 50) {
        std::vector<i64> flat(spec.num_cols(), 0);
        for (const auto& kb : basis) {
            i64 c = rnd_range(rng, -coeff_range, coeff_range);
            for (size_t j = 0; j < flat.size(); ++j)
                flat[j] = checked_add(flat[j], checked_mul(c, kb[j]));
        }
        BrickVector v = BrickVector::from_flat(flat, spec.t_B(), spec.t_A(), spec.n);
        if (v.is_zero()) continue;
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace blockip
