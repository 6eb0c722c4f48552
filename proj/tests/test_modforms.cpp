#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <random>
#include <vector>

#include "ladderlab/modforms.hpp"

using namespace ladderlab;
using namespace ladderlab::modforms;

static ZSeries scale(const ZSeries& f, long c) {
    ZSeries g(f);
    for (auto& v : g) v *= c;
    return g;
}

TEST_CASE("eisenstein series expansions", "[modforms]") {
    const ZSeries e4 = eisenstein_e4(7);
    const long e4_expect[] = {1, 240, 2160, 6720, 17520, 30240, 60480};
    for (int n = 0; n < 7; ++n) CHECK(e4[n] == e4_expect[n]);

    const ZSeries e6 = eisenstein_e6(4);
    CHECK(e6[0] == 1);
    CHECK(e6[1] == -504);
    CHECK(e6[2] == -16632); // -504 * sigma_5(2), sigma_5(2) = 33
    CHECK(e6[3] == -122976);

    CHECK(sigma_power(6, 3) == 252);
    CHECK(sigma_power(1, 5) == 1);
    CHECK(sigma_power(12, 1) == 28);
}

TEST_CASE("discriminant form against the eta-product expansion", "[modforms]") {
    // independent oracle: q * prod_{n>=1} (1-q^n)^24, expanded directly
    const std::size_t prec = 101;
    ZSeries prod(prec, 0);
    prod[0] = 1;
    for (std::size_t n = 1; n < prec; ++n) {
        for (int rep = 0; rep < 24; ++rep) {
            // multiply by (1 - q^n) in place
            for (std::size_t i = prec; i-- > n;) prod[i] -= prod[i - n];
        }
    }
    ZSeries oracle(prec, 0);
    for (std::size_t i = 1; i < prec; ++i) oracle[i] = prod[i - 1];

    const ZSeries dl = delta_series(prec);
    REQUIRE(dl.size() == prec);
    CHECK(dl == oracle);

    const long tau_expect[] = {0,     1,      -24,     252,     -1472,  4830,
                               -6048, -16744, 84480,   -113643, -115920};
    for (int n = 1; n <= 10; ++n) CHECK(dl[n] == tau_expect[n]);
}

TEST_CASE("cusp space dimensions", "[modforms]") {
    CHECK(dim_cusp_forms(0) == 0);
    CHECK(dim_cusp_forms(2) == 0);
    CHECK(dim_cusp_forms(10) == 0);
    CHECK(dim_cusp_forms(11) == 0);
    CHECK(dim_cusp_forms(12) == 1);
    CHECK(dim_cusp_forms(14) == 0);
    CHECK(dim_cusp_forms(16) == 1);
    CHECK(dim_cusp_forms(22) == 1);
    CHECK(dim_cusp_forms(24) == 2);
    CHECK(dim_cusp_forms(26) == 1);
    CHECK(dim_cusp_forms(28) == 2);
    CHECK(dim_cusp_forms(36) == 3);
    CHECK(dim_cusp_forms(38) == 2);
    CHECK(dim_cusp_forms(68) == 5);
    for (std::uint64_t k = 1; k <= 60; k += 2) CHECK(dim_cusp_forms(k) == 0);
}

TEST_CASE("echelon bases are integral and unitriangular", "[modforms]") {
    for (std::uint64_t k = 12; k <= 60; k += 2) {
        const unsigned d = dim_cusp_forms(k);
        const std::size_t prec = d + 6;
        const auto basis = victor_miller_basis(k, prec);
        REQUIRE(basis.size() == d);
        for (unsigned i = 1; i <= d; ++i) {
            CHECK(basis[i - 1][0] == 0);
            for (unsigned j = 1; j <= d; ++j)
                CHECK(basis[i - 1][j] == (i == j ? 1 : 0));
        }
    }

    // weight 12: the single basis form is the discriminant form itself
    const auto b12 = victor_miller_basis(12, 30);
    REQUIRE(b12.size() == 1);
    CHECK(b12[0] == delta_series(30));

    // weight 16: basis form is E4 * Delta, whose q^2 coefficient is 216
    const auto b16 = victor_miller_basis(16, 10);
    REQUIRE(b16.size() == 1);
    CHECK(b16[0][2] == 216);
    CHECK(b16[0] == series_mul(eisenstein_e4(10), delta_series(10), 10));
}

TEST_CASE("hecke operators on exact expansions", "[modforms]") {
    // weight-12 eigenform: T_2 f = tau(2) f = -24 f
    const ZSeries dl = delta_series(40);
    CHECK(hecke_operator(dl, 2, 12, 20) == scale(ZSeries(dl.begin(), dl.begin() + 20), -24));
    CHECK(hecke_operator(dl, 3, 12, 13) == scale(ZSeries(dl.begin(), dl.begin() + 13), 252));

    // weight-16 eigenform with eigenvalue 216
    const auto b16 = victor_miller_basis(16, 20);
    CHECK(hecke_operator(b16[0], 2, 16, 10) ==
          scale(ZSeries(b16[0].begin(), b16[0].begin() + 10), 216));

    // Eisenstein series: T_n E6 = sigma_5(n) E6, exercising the a_0 term
    const ZSeries e6 = eisenstein_e6(10);
    CHECK(hecke_operator(e6, 2, 6, 5) == scale(ZSeries(e6.begin(), e6.begin() + 5), 33));

    CHECK_THROWS_AS(hecke_operator(dl, 0, 12, 5), std::invalid_argument);
    CHECK_THROWS_AS(hecke_operator(dl, 7, 12, 6), std::invalid_argument); // 7*6 > 40
}

TEST_CASE("hecke composition identities at weight 36", "[modforms]") {
    const std::uint64_t k = 36;
    const std::size_t out = 4;
    const auto basis = victor_miller_basis(k, 24);
    REQUIRE(basis.size() == 3);
    for (const auto& f : basis) {
        // coprime composition: T_6 = T_2 T_3 = T_3 T_2
        const ZSeries t3 = hecke_operator(f, 3, k, 8);
        const ZSeries t2 = hecke_operator(f, 2, k, 12);
        const ZSeries t23 = hecke_operator(t3, 2, k, out);
        const ZSeries t32 = hecke_operator(t2, 3, k, out);
        const ZSeries t6 = hecke_operator(f, 6, k, out);
        CHECK(t23 == t6);
        CHECK(t32 == t6);

        // prime-power recursion: T_4 = T_2 T_2 - 2^(k-1) Id
        const ZSeries t22 = hecke_operator(t2, 2, k, out);
        ZSeries rhs = t22;
        mpz_class pw;
        mpz_ui_pow_ui(pw.get_mpz_t(), 2, static_cast<unsigned long>(k - 1));
        for (std::size_t n = 0; n < out; ++n) rhs[n] -= pw * f[n];
        CHECK(hecke_operator(f, 4, k, out) == rhs);
    }
}

TEST_CASE("mod-p series arithmetic matches exact arithmetic", "[modforms]") {
    std::mt19937_64 rng(20260816);
    auto random_zseries = [&](std::size_t n) {
        ZSeries f(n);
        for (auto& v : f) {
            v = static_cast<long>(rng() % 2000001) - 1000000;
        }
        return f;
    };
    for (std::uint64_t p : {97ULL, 1000003ULL}) {
        const ZSeries a = random_zseries(200), b = random_zseries(200);
        const FpSeries got = fp_series_mul(reduce_series(a, p), reduce_series(b, p), 200, p);
        CHECK(got == reduce_series(series_mul(a, b, 200), p));
    }
    {
        // large characteristic forces the wide-accumulator path
        const std::uint64_t p = 2147483647ULL;
        const ZSeries a = random_zseries(50), b = random_zseries(50);
        FpSeries ar = reduce_series(a, p), br = reduce_series(b, p);
        for (auto& v : ar) v = (v * 2147480009ULL) % p; // spread values across [0, p)
        for (auto& v : br) v = (v * 2147480009ULL) % p;
        ZSeries al(50), bl(50);
        for (int i = 0; i < 50; ++i) { al[i] = static_cast<unsigned long>(ar[i]); bl[i] = static_cast<unsigned long>(br[i]); }
        CHECK(fp_series_mul(ar, br, 50, p) == reduce_series(series_mul(al, bl, 50), p));
    }

    for (std::uint64_t p : {11ULL, 23ULL, 691ULL}) {
        CHECK(reduce_series(eisenstein_e4(40), p) == eisenstein_e4_fp(40, p));
        CHECK(reduce_series(eisenstein_e6(40), p) == eisenstein_e6_fp(40, p));
        CHECK(reduce_series(delta_series(40), p) == delta_fp(40, p));
    }
    CHECK_THROWS_AS(delta_fp(10, 3), std::invalid_argument);
    CHECK_THROWS_AS(delta_fp(10, 2), std::invalid_argument);
}

TEST_CASE("mod-p echelon bases match exact bases", "[modforms]") {
    for (std::uint64_t p : {23ULL, 691ULL}) {
        for (std::uint64_t k = 12; k <= 60; k += 2) {
            const std::size_t prec = dim_cusp_forms(k) + 8;
            const auto exact = victor_miller_basis(k, prec);
            const auto fp = victor_miller_basis_fp(k, prec, p);
            REQUIRE(fp.size() == exact.size());
            for (std::size_t i = 0; i < fp.size(); ++i)
                CHECK(fp[i] == reduce_series(exact[i], p));
        }
    }

    // shared power tables must give the same answer as ad-hoc construction
    const std::uint64_t k = 48, p = 59;
    const std::size_t prec = 20;
    const auto tables = FpSeriesTables::build(p, prec, dim_cusp_forms(k), (k - 12) / 4);
    CHECK(victor_miller_basis_fp(k, prec, p, &tables) == victor_miller_basis_fp(k, prec, p));
}

TEST_CASE("hecke matrices mod p", "[modforms]") {
    {
        const auto basis = victor_miller_basis_fp(12, 6, 11);
        const auto M = hecke_matrix_fp(basis, 12, 2, 11);
        REQUIRE(M.size() == 1);
        CHECK(M[0][0] == 9); // tau(2) = -24 = 9 mod 11
    }
    {
        const auto basis = victor_miller_basis_fp(12, 6, 691);
        const auto M = hecke_matrix_fp(basis, 12, 2, 691);
        CHECK(M[0][0] == 667); // -24 mod 691
    }

    // matrix built mod p agrees with the exact operator reduced mod p
    for (std::uint64_t p : {11ULL, 23ULL}) {
        for (std::uint64_t k : {24ULL, 36ULL, 48ULL}) {
            for (std::uint64_t ell : {2ULL, 3ULL, 5ULL}) {
                const unsigned d = dim_cusp_forms(k);
                const std::size_t prec = ell * (d + 1) + 1;
                const auto exact = victor_miller_basis(k, prec);
                const auto fp = victor_miller_basis_fp(k, prec, p);
                const auto M = hecke_matrix_fp(fp, k, ell, p);
                for (unsigned i = 0; i < d; ++i) {
                    const ZSeries im = hecke_operator(exact[i], ell, k, d + 1);
                    for (unsigned j = 1; j <= d; ++j) {
                        mpz_class r;
                        mpz_fdiv_r_ui(r.get_mpz_t(), im[j].get_mpz_t(), static_cast<unsigned long>(p));
                        CHECK(M[j - 1][i] == r.get_ui());
                    }
                }
            }
        }
    }

    // the operators commute, so their matrices must too
    {
        const std::uint64_t k = 48, p = 31;
        const unsigned d = dim_cusp_forms(k);
        const std::size_t prec = 5 * (d + 1) + 1;
        const auto basis = victor_miller_basis_fp(k, prec, p);
        const auto A = hecke_matrix_fp(basis, k, 2, p);
        const auto B = hecke_matrix_fp(basis, k, 5, p);
        auto matmul = [&](const auto& X, const auto& Y) {
            std::vector<std::vector<std::uint64_t>> Z(d, std::vector<std::uint64_t>(d, 0));
            for (unsigned r = 0; r < d; ++r)
                for (unsigned m = 0; m < d; ++m)
                    for (unsigned c = 0; c < d; ++c)
                        Z[r][c] = fq::add_mod(Z[r][c], fq::mul_mod(X[r][m], Y[m][c], p), p);
            return Z;
        };
        CHECK(matmul(A, B) == matmul(B, A));
    }

    {
        const auto basis = victor_miller_basis_fp(24, 4, 11); // too short for ell=2, d=2
        CHECK_THROWS_AS(hecke_matrix_fp(basis, 24, 2, 11), std::invalid_argument);
    }
}
