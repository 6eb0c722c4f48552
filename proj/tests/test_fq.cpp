// Exercises the finite-field engine: canonical moduli (against brute-force
// irreducibility oracles), field axioms, polynomial factorization (against
// reassembly and independently constructed products), charpoly (against
// determinant evaluation), kernels, and subfield embeddings.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <vector>

#include "ladderlab/fq.hpp"

using namespace ladderlab;
using namespace ladderlab::fq;

namespace {

Fq elt(const FqCtx& K, std::initializer_list<std::uint64_t> coords) {
    Fq r = K.zero();
    std::size_t i = 0;
    for (std::uint64_t v : coords) r.c[i++] = v % K.p();
    return r;
}

FqPoly poly_from(const FqCtx& K, std::initializer_list<std::uint64_t> constants) {
    // constants are F_p values, little-endian
    FqPoly f;
    for (std::uint64_t v : constants) f.push_back(K.from_u64(v));
    poly_trim(K, f);
    return f;
}

Fq random_elt(const FqCtx& K, std::mt19937_64& rng) {
    Fq r = K.zero();
    for (auto& v : r.c) v = rng() % K.p();
    return r;
}

// independent determinant via Gaussian elimination with row swaps
Fq det_oracle(const FqCtx& K, FqMat A) {
    REQUIRE(A.rows == A.cols);
    Fq det = K.one();
    const unsigned n = A.rows;
    for (unsigned col = 0; col < n; ++col) {
        unsigned sel = col;
        while (sel < n && K.is_zero(A.at(sel, col))) ++sel;
        if (sel == n) return K.zero();
        if (sel != col) {
            for (unsigned j = 0; j < n; ++j) std::swap(A.at(sel, j), A.at(col, j));
            det = K.neg(det);
        }
        det = K.mul(det, A.at(col, col));
        const Fq d = K.inv(A.at(col, col));
        for (unsigned r = col + 1; r < n; ++r) {
            if (K.is_zero(A.at(r, col))) continue;
            const Fq f = K.mul(A.at(r, col), d);
            for (unsigned j = col; j < n; ++j) A.at(r, j) = K.sub(A.at(r, j), K.mul(f, A.at(col, j)));
        }
    }
    return det;
}

// brute-force smallest-encoding irreducible of degree e over F_p, deciding
// irreducibility by trial division against every lower-degree monic
detail::FpPoly brute_canonical(std::uint64_t p, unsigned e) {
    auto decode = [&](std::uint64_t m, unsigned deg) {
        detail::FpPoly f(deg + 1, 0);
        f[deg] = 1;
        for (unsigned i = 0; i < deg && m; ++i) {
            f[i] = m % p;
            m /= p;
        }
        return f;
    };
    std::uint64_t count_e = 1;
    for (unsigned i = 0; i < e; ++i) count_e *= p;
    for (std::uint64_t m = 0; m < count_e; ++m) {
        detail::FpPoly h = decode(m, e);
        bool reducible = false;
        for (unsigned d = 1; !reducible && 2 * d <= e; ++d) {
            std::uint64_t count_d = 1;
            for (unsigned i = 0; i < d; ++i) count_d *= p;
            for (std::uint64_t md = 0; md < count_d; ++md) {
                detail::FpPoly g = decode(md, d);
                if (detail::fp_divrem(h, g, p).second.empty()) {
                    reducible = true;
                    break;
                }
            }
        }
        if (!reducible) return h;
    }
    FAIL("no irreducible found");
    return {};
}

} // namespace

TEST_CASE("canonical moduli are the least-encoding irreducibles") {
    // small cases against the exhaustive trial-division oracle
    CHECK(detail::canonical_modulus(2, 1) == detail::FpPoly{0, 1});          // x
    CHECK(detail::canonical_modulus(2, 2) == detail::FpPoly{1, 1, 1});       // x^2+x+1
    CHECK(detail::canonical_modulus(3, 2) == detail::FpPoly{1, 0, 1});       // x^2+1
    CHECK(detail::canonical_modulus(5, 2) == detail::FpPoly{2, 0, 1});       // x^2+2
    CHECK(detail::canonical_modulus(7, 3) == detail::FpPoly{2, 0, 0, 1});    // x^3+2
    for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL}) {
        for (unsigned e = 1; e <= 4; ++e) {
            CHECK(detail::canonical_modulus(p, e) == brute_canonical(p, e));
        }
    }
    // census-sized characteristic: degree-3 modulus has no roots in F_691
    const auto& m691 = detail::canonical_modulus(691, 3);
    REQUIRE(m691.size() == 4);
    bool has_root = false;
    for (std::uint64_t a = 0; a < 691 && !has_root; ++a) {
        std::uint64_t v = 0;
        for (std::size_t i = m691.size(); i-- > 0;) v = (mul_mod(v, a, 691) + m691[i]) % 691;
        has_root = (v == 0);
    }
    CHECK_FALSE(has_root);
}

TEST_CASE("context construction guards") {
    CHECK_THROWS_AS(FqCtx(4, 2), std::invalid_argument);
    CHECK_THROWS_AS(FqCtx(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(FqCtx(7, 0), std::invalid_argument);
    CHECK_THROWS_AS(FqCtx(1ULL << 25, 1), std::invalid_argument);
}

TEST_CASE("field axioms and Frobenius in F_125") {
    const FqCtx K(5, 3);
    std::mt19937_64 rng(12345);
    mpz_class q;
    mpz_ui_pow_ui(q.get_mpz_t(), 5, 3);
    for (int t = 0; t < 300; ++t) {
        const Fq a = random_elt(K, rng), b = random_elt(K, rng), c = random_elt(K, rng);
        CHECK(K.add(a, b) == K.add(b, a));
        CHECK(K.mul(a, b) == K.mul(b, a));
        CHECK(K.mul(a, K.mul(b, c)) == K.mul(K.mul(a, b), c));
        CHECK(K.mul(a, K.add(b, c)) == K.add(K.mul(a, b), K.mul(a, c)));
        CHECK(K.sub(K.add(a, b), b) == a);
        if (!K.is_zero(a)) {
            CHECK(K.mul(a, K.inv(a)) == K.one());
            CHECK(K.pow(a, q - 1) == K.one()); // Lagrange
        }
        // Frobenius: matrix form equals powering, and it is a ring hom
        CHECK(K.frob(a) == K.pow(a, mpz_class(5)));
        CHECK(K.frob(K.add(a, b)) == K.add(K.frob(a), K.frob(b)));
        CHECK(K.frob(K.mul(a, b)) == K.mul(K.frob(a), K.frob(b)));
        Fq fe = a;
        for (int i = 0; i < 3; ++i) fe = K.frob(fe);
        CHECK(fe == a); // frob^e = identity
    }
    // order agrees with the integer encoding
    const Fq x = elt(K, {0, 1, 0}), y = elt(K, {4, 0, 1});
    CHECK(fq_less(x, y));
    CHECK(K.encode(x) < K.encode(y));
    CHECK(K.encode(x) == 5);
    CHECK(K.encode(y) == 29);
}

TEST_CASE("polynomial division, gcd, powmod") {
    const FqCtx K(3, 2);
    std::mt19937_64 rng(777);
    auto rand_poly = [&](unsigned deg) {
        FqPoly f(deg + 1, K.zero());
        for (auto& c : f) c = random_elt(K, rng);
        while (K.is_zero(f.back())) f.back() = random_elt(K, rng);
        return f;
    };
    for (int t = 0; t < 100; ++t) {
        FqPoly a = rand_poly(1 + rng() % 8), b = rand_poly(1 + rng() % 5);
        auto [q, r] = poly_divrem(K, a, b);
        CHECK(poly_deg(r) < poly_deg(b));
        FqPoly back = poly_add(K, poly_mul(K, q, b), r);
        poly_trim(K, a);
        CHECK(back == a);
        FqPoly g = poly_gcd(K, a, b);
        if (!g.empty()) {
            CHECK(g.back() == K.one());
            CHECK(poly_divrem(K, a, g).second.empty());
            CHECK(poly_divrem(K, b, g).second.empty());
        }
        // gcd(a*h, b*h) is divisible by h
        FqPoly h = rand_poly(2);
        FqPoly gh = poly_gcd(K, poly_mul(K, a, h), poly_mul(K, b, h));
        CHECK(poly_divrem(K, gh, h).second.empty());
    }
    // small exponents against naive repeated multiplication
    FqPoly f = rand_poly(4);
    FqPoly m = rand_poly(3);
    FqPoly naive{K.one()};
    for (unsigned n = 0; n <= 10; ++n) {
        CHECK(poly_powmod(K, f, mpz_class(n), m) == poly_divrem(K, naive, m).second);
        naive = poly_mul(K, naive, f);
    }
    // unit group order: a^(q^d - 1) = 1 mod an irreducible of degree d
    const FqPoly irr = poly_from(K, {2, 2, 0, 1}); // x^3 - x - 1, irreducible over F_9 (nonzero trace)
    // confirm irreducibility: DDF leaves one block of full degree
    auto parts = distinct_degree_split(K, irr);
    REQUIRE(parts.size() == 1);
    REQUIRE(parts[0].second == 3);
    mpz_class q;
    mpz_ui_pow_ui(q.get_mpz_t(), 3, 2);
    mpz_class qd;
    mpz_pow_ui(qd.get_mpz_t(), q.get_mpz_t(), 3);
    for (int t = 0; t < 10; ++t) {
        FqPoly a = rand_poly(2);
        poly_trim(K, a);
        if (a.empty()) continue;
        CHECK(poly_powmod(K, a, qd - 1, irr) == FqPoly{K.one()});
    }
}

TEST_CASE("squarefree decomposition handles p-th powers") {
    const FqCtx K7(7, 1);
    // (x+1)^2 (x+2)^3 (x^2+1)
    const FqPoly f1 = poly_from(K7, {1, 1});
    const FqPoly f2 = poly_from(K7, {2, 1});
    const FqPoly f3 = poly_from(K7, {1, 0, 1});
    FqPoly f = poly_mul(K7, f1, f1);
    f = poly_mul(K7, f, poly_mul(K7, f2, poly_mul(K7, f2, f2)));
    f = poly_mul(K7, f, f3);
    auto dec = squarefree_decomposition(K7, f);
    REQUIRE(dec.size() == 3);
    CHECK(dec[0] == std::make_pair(f3, 1u));
    CHECK(dec[1] == std::make_pair(f1, 2u));
    CHECK(dec[2] == std::make_pair(f2, 3u));

    // derivative-zero path: (x^2+1)^3 over F_3 (exponent equal to p)
    const FqCtx K3(3, 1);
    const FqPoly g = poly_from(K3, {1, 0, 1});
    FqPoly gp = poly_mul(K3, g, poly_mul(K3, g, g));
    auto dec3 = squarefree_decomposition(K3, gp);
    REQUIRE(dec3.size() == 1);
    CHECK(dec3[0] == std::make_pair(g, 3u));
}

TEST_CASE("distinct-degree split over F_2") {
    const FqCtx K(2, 1);
    // x (x+1) (x^2+x+1) (x^4+x+1) (x^4+x^3+1) -- pairwise distinct irreducibles
    const FqPoly parts[] = {
        poly_from(K, {0, 1}),
        poly_from(K, {1, 1}),
        poly_from(K, {1, 1, 1}),
        poly_from(K, {1, 1, 0, 0, 1}),
        poly_from(K, {1, 0, 0, 1, 1}),
    };
    FqPoly f{K.one()};
    for (const auto& g : parts) f = poly_mul(K, f, g);
    auto dd = distinct_degree_split(K, f);
    REQUIRE(dd.size() == 3);
    CHECK(dd[0].second == 1);
    CHECK(dd[0].first == poly_mul(K, parts[0], parts[1]));
    CHECK(dd[1].second == 2);
    CHECK(dd[1].first == parts[2]);
    CHECK(dd[2].second == 4);
    CHECK(dd[2].first == poly_mul(K, parts[3], parts[4]));
}

TEST_CASE("full factorization reassembles and is deterministic") {
    const FqCtx K(3, 2);
    std::mt19937_64 gen(99);
    for (int t = 0; t < 50; ++t) {
        FqPoly f(2 + gen() % 8, K.zero());
        for (auto& c : f) c = random_elt(K, gen);
        f.push_back(K.one()); // monic
        poly_trim(K, f);
        if (poly_deg(f) < 1) continue;

        std::mt19937_64 rng_a(1), rng_b(42424242);
        auto fa = factor_monic(K, f, rng_a);
        auto fb = factor_monic(K, f, rng_b);
        // identical output regardless of the splitting randomness
        REQUIRE(fa.size() == fb.size());
        for (std::size_t i = 0; i < fa.size(); ++i) {
            CHECK(fa[i].factor == fb[i].factor);
            CHECK(fa[i].mult == fb[i].mult);
        }
        // product of factors with multiplicities gives back f
        FqPoly prod{K.one()};
        for (const auto& fp : fa) {
            CHECK(fp.factor.back() == K.one());
            // each factor is irreducible: its own DDF is a single block of full degree
            auto dd = distinct_degree_split(K, fp.factor);
            REQUIRE(dd.size() == 1);
            CHECK(dd[0].second == static_cast<unsigned>(poly_deg(fp.factor)));
            for (unsigned m = 0; m < fp.mult; ++m) prod = poly_mul(K, prod, fp.factor);
        }
        CHECK(prod == f);
    }
}

TEST_CASE("x^6 - 1 over F_7 splits into the six unit linear factors") {
    const FqCtx K(7, 1);
    FqPoly f(7, K.zero());
    f[0] = K.from_u64(6); // -1
    f[6] = K.one();
    std::mt19937_64 rng(5);
    auto fac = factor_monic(K, f, rng);
    REQUIRE(fac.size() == 6);
    std::vector<std::uint64_t> roots;
    for (const auto& fp : fac) {
        CHECK(fp.mult == 1);
        REQUIRE(fp.factor.size() == 2);
        roots.push_back(K.neg(fp.factor[0]).c[0]);
    }
    std::sort(roots.begin(), roots.end());
    CHECK(roots == std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("roots") {
    const FqCtx K(11, 1);
    // (x-3)(x-5)(x-7)^2
    FqPoly f{K.one()};
    for (std::uint64_t a : {3ULL, 5ULL, 7ULL, 7ULL}) {
        FqPoly lin{K.neg(K.from_u64(a)), K.one()};
        f = poly_mul(K, f, lin);
    }
    std::mt19937_64 rng(17);
    auto rts = poly_roots(K, f, rng);
    REQUIRE(rts.size() == 3);
    CHECK(rts[0].c[0] == 3);
    CHECK(rts[1].c[0] == 5);
    CHECK(rts[2].c[0] == 7);

    // x^9 - x over F_9 has every field element as a root, in canonical order
    const FqCtx K9(3, 2);
    FqPoly g(10, K9.zero());
    g[1] = K9.neg(K9.one());
    g[9] = K9.one();
    auto all = poly_roots(K9, g, rng);
    REQUIRE(all.size() == 9);
    for (std::size_t i = 0; i < all.size(); ++i) {
        CHECK(K9.encode(all[i]) == static_cast<long>(i));
        if (i) CHECK(fq_less(all[i - 1], all[i]));
    }
}

TEST_CASE("least root of a prime-field polynomial matches the generic factorizer") {
    // canonical moduli supply irreducibles of every needed degree; the fast
    // norm-chain extraction must agree with sorting all roots
    const std::vector<std::array<std::uint64_t, 3>> cases = {
        {13, 1, 3}, {11, 2, 4}, {11, 4, 4}, {23, 3, 6}, {23, 6, 6}, {7, 4, 8}, {691, 20, 20}};
    for (const auto& [p, n, E] : cases) {
        CAPTURE(p, n, E);
        const FqCtx S(p, static_cast<unsigned>(n));
        const FqCtx B(p, static_cast<unsigned>(E));
        std::mt19937_64 rng1(42), rng2(987654321);
        const Fq fast1 = least_root_of_fp_poly(B, S.modulus(), rng1);
        const Fq fast2 = least_root_of_fp_poly(B, S.modulus(), rng2);
        CHECK(fast1 == fast2); // randomness must not leak into the result
        FqPoly lifted;
        for (std::uint64_t c : S.modulus()) lifted.push_back(B.from_u64(c));
        CHECK(B.is_zero(poly_eval(B, lifted, fast1)));
        std::mt19937_64 rng3(5);
        const auto rts = poly_roots(B, lifted, rng3);
        REQUIRE(rts.size() == n);
        CHECK(fast1 == rts.front());
    }

    const FqCtx B(11, 4);
    const FqCtx S(11, 3);
    std::mt19937_64 rng(0);
    CHECK_THROWS_AS(least_root_of_fp_poly(B, S.modulus(), rng), std::invalid_argument);
    CHECK_THROWS_AS(least_root_of_fp_poly(B, {7}, rng), std::invalid_argument);
}

TEST_CASE("charpoly matches companion matrices and determinant evaluation") {
    const FqCtx K(7, 1);
    std::mt19937_64 rng(31337);
    // companion matrix of f has charpoly f
    FqPoly f = poly_from(K, {3, 1, 6, 0, 2, 1}); // monic degree 5
    const unsigned n = 5;
    FqMat C(K, n, n);
    for (unsigned i = 0; i + 1 < n; ++i) C.at(i + 1, i) = K.one();
    for (unsigned i = 0; i < n; ++i) C.at(i, n - 1) = K.neg(f[i]);
    CHECK(charpoly(K, C) == f);

    // random matrices: charpoly(s) == det(sI - A) at many sample points
    for (const auto& Kx : {FqCtx(11, 1), FqCtx(3, 2)}) {
        for (int t = 0; t < 10; ++t) {
            const unsigned m = 2 + t % 5;
            FqMat A(Kx, m, m);
            for (auto& v : A.a) v = random_elt(Kx, rng);
            FqPoly cp = charpoly(Kx, A);
            REQUIRE(cp.size() == m + 1);
            CHECK(cp.back() == Kx.one());
            for (int s = 0; s < 15; ++s) {
                const Fq pt = random_elt(Kx, rng);
                FqMat B = A;
                for (unsigned i = 0; i < m; ++i) B.at(i, i) = Kx.sub(pt, B.at(i, i));
                for (unsigned i = 0; i < m; ++i)
                    for (unsigned j = 0; j < m; ++j)
                        if (i != j) B.at(i, j) = Kx.neg(B.at(i, j));
                CHECK(poly_eval(Kx, cp, pt) == det_oracle(Kx, B));
            }
        }
    }

    // Cayley-Hamilton on a 4x4 over F_25
    const FqCtx K25(5, 2);
    FqMat A(K25, 4, 4);
    for (auto& v : A.a) v = random_elt(K25, rng);
    FqPoly cp = charpoly(K25, A);
    FqMat acc(K25, 4, 4); // horner: acc = cp(A)
    for (std::size_t i = cp.size(); i-- > 0;) {
        acc = mat_mul(K25, acc, A);
        for (unsigned d = 0; d < 4; ++d) acc.at(d, d) = K25.add(acc.at(d, d), cp[i]);
    }
    for (const auto& v : acc.a) CHECK(K25.is_zero(v));
}

TEST_CASE("kernel bases") {
    const FqCtx K(5, 2);
    std::mt19937_64 rng(2025);
    for (int t = 0; t < 20; ++t) {
        const unsigned n = 4 + t % 3, r = 1 + t % 3;
        // rank <= r product
        FqMat L(K, n, r), R(K, r, n);
        for (auto& v : L.a) v = random_elt(K, rng);
        for (auto& v : R.a) v = random_elt(K, rng);
        FqMat A = mat_mul(K, L, R);
        auto basis = mat_kernel(K, A);
        CHECK(basis.size() >= n - r);
        for (const auto& v : basis) {
            auto img = mat_apply(K, A, v);
            for (const auto& x : img) CHECK(K.is_zero(x));
        }
        // rank-nullity against an independent elimination
        FqMat B = A;
        unsigned rank = 0;
        for (unsigned col = 0; col < n && rank < n; ++col) {
            unsigned sel = rank;
            while (sel < n && K.is_zero(B.at(sel, col))) ++sel;
            if (sel == n) continue;
            for (unsigned j = 0; j < n; ++j) std::swap(B.at(sel, j), B.at(rank, j));
            const Fq d = K.inv(B.at(rank, col));
            for (unsigned j = 0; j < n; ++j) B.at(rank, j) = K.mul(d, B.at(rank, j));
            for (unsigned rr = 0; rr < n; ++rr) {
                if (rr == rank || K.is_zero(B.at(rr, col))) continue;
                const Fq fmul = B.at(rr, col);
                for (unsigned j = 0; j < n; ++j) B.at(rr, j) = K.sub(B.at(rr, j), K.mul(fmul, B.at(rank, j)));
            }
            ++rank;
        }
        CHECK(basis.size() == n - rank);
    }
    // identity has trivial kernel
    CHECK(mat_kernel(K, mat_identity(K, 5)).empty());
}

TEST_CASE("subfield embedding F_9 into F_81") {
    const FqCtx S(3, 2), B(3, 4);
    std::mt19937_64 rng(4242);
    const Embedding emb = make_embedding(S, B, rng);
    CHECK(emb.e_small == 2);
    CHECK(emb.e_big == 4);
    // ring homomorphism on every pair
    std::vector<Fq> all;
    for (std::uint64_t v = 0; v < 9; ++v) all.push_back(elt(S, {v % 3, v / 3}));
    for (const auto& a : all) {
        for (const auto& b : all) {
            CHECK(emb.embed(S.add(a, b)) == B.add(emb.embed(a), emb.embed(b)));
            CHECK(emb.embed(S.mul(a, b)) == B.mul(emb.embed(a), emb.embed(b)));
        }
    }
    CHECK(emb.embed(S.one()) == B.one());
    // injective with a working section
    std::map<std::vector<std::uint64_t>, int> seen;
    for (const auto& a : all) {
        const Fq img = emb.embed(a);
        CHECK(++seen[img.c] == 1);
        auto back = emb.section(img);
        REQUIRE(back.has_value());
        CHECK(*back == a);
        // image lands in the fixed field of frob^2
        CHECK(B.frob(B.frob(img)) == img);
    }
    // elements outside the subfield have no section
    unsigned outside = 0, rejected = 0;
    for (int t = 0; t < 50; ++t) {
        const Fq x = random_elt(B, rng);
        if (B.frob(B.frob(x)) != x) {
            ++outside;
            if (!emb.section(x).has_value()) ++rejected;
        }
    }
    CHECK(outside == rejected);
    CHECK(outside > 0);
    // determinism
    std::mt19937_64 rng2(999);
    const Embedding emb2 = make_embedding(S, B, rng2);
    CHECK(emb2.theta == emb.theta);
    CHECK(emb2.fwd == emb.fwd);
}

TEST_CASE("frobenius power matrices") {
    const FqCtx K(7, 4);
    std::mt19937_64 rng(1);
    const auto id = frob_power_matrix(K, 0);
    const auto f1 = frob_power_matrix(K, 1);
    const auto f2 = frob_power_matrix(K, 2);
    const auto f4 = frob_power_matrix(K, 4);
    CHECK(f1 == K.frob_matrix());
    CHECK(f4 == id);
    for (int t = 0; t < 50; ++t) {
        const Fq a = random_elt(K, rng);
        CHECK(apply_fp_matrix(K, id, a) == a);
        CHECK(apply_fp_matrix(K, f1, a) == K.frob(a));
        CHECK(apply_fp_matrix(K, f2, a) == K.frob(K.frob(a)));
    }
}

TEST_CASE("census-sized context smoke test") {
    const FqCtx K(691, 3);
    std::mt19937_64 rng(20260816);
    mpz_class q;
    mpz_ui_pow_ui(q.get_mpz_t(), 691, 3);
    for (int t = 0; t < 5; ++t) {
        Fq a = random_elt(K, rng);
        if (K.is_zero(a)) continue;
        CHECK(K.pow(a, q - 1) == K.one());
        CHECK(K.mul(a, K.inv(a)) == K.one());
        Fq fr = a;
        for (int i = 0; i < 3; ++i) fr = K.frob(fr);
        CHECK(fr == a);
    }
}
