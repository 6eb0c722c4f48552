#pragma once
// Level-one modular forms as truncated q-expansions, in two layers:
//
//  * exact integer series (mpz coefficients) -- Eisenstein series E4/E6, the
//    discriminant form, echelonized cusp-form bases, Hecke operators; used
//    as the reference layer in tests and for anything that must be exact;
//  * mod-p series (uint64 coefficients) -- the same constructions reduced,
//    with deferred-reduction convolution; this is what the eigensystem
//    census runs on.
//
// Series are coefficient vectors indexed by the q-exponent: f[n] is the
// coefficient of q^n, and the vector length is the truncation precision.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <gmpxx.h>

#include "ladderlab/fq.hpp"

namespace ladderlab::modforms {

// ---------------------------------------------------------------------------
// exact layer
// ---------------------------------------------------------------------------

using ZSeries = std::vector<mpz_class>;

inline mpz_class sigma_power(std::uint64_t n, unsigned k) {
    mpz_class s = 0, t;
    for (std::uint64_t d = 1; d * d <= n; ++d) {
        if (n % d) continue;
        mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(d), k);
        s += t;
        const std::uint64_t dd = n / d;
        if (dd != d) {
            mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(dd), k);
            s += t;
        }
    }
    return s;
}

inline ZSeries eisenstein_e4(std::size_t prec) {
    ZSeries f(prec, 0);
    if (prec) f[0] = 1;
    for (std::size_t n = 1; n < prec; ++n) f[n] = 240 * sigma_power(n, 3);
    return f;
}

inline ZSeries eisenstein_e6(std::size_t prec) {
    ZSeries f(prec, 0);
    if (prec) f[0] = 1;
    for (std::size_t n = 1; n < prec; ++n) f[n] = -504 * sigma_power(n, 5);
    return f;
}

inline ZSeries series_mul(const ZSeries& a, const ZSeries& b, std::size_t prec) {
    ZSeries c(prec, 0);
    for (std::size_t i = 0; i < a.size() && i < prec; ++i) {
        if (a[i] == 0) continue;
        const std::size_t jmax = std::min(b.size(), prec - i);
        for (std::size_t j = 0; j < jmax; ++j) {
            if (b[j] == 0) continue;
            c[i + j] += a[i] * b[j];
        }
    }
    return c;
}

// (E4^3 - E6^2) / 1728, checked to divide exactly
inline ZSeries delta_series(std::size_t prec) {
    const ZSeries e4 = eisenstein_e4(prec), e6 = eisenstein_e6(prec);
    ZSeries num = series_mul(series_mul(e4, e4, prec), e4, prec);
    const ZSeries e6sq = series_mul(e6, e6, prec);
    for (std::size_t n = 0; n < prec; ++n) {
        num[n] -= e6sq[n];
        mpz_class q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), num[n].get_mpz_t(), mpz_class(1728).get_mpz_t());
        if (r != 0) throw std::logic_error("delta_series: numerator not divisible by 1728");
        num[n] = q;
    }
    return num;
}

// dimension of the cusp space in level one at weight k
inline unsigned dim_cusp_forms(std::uint64_t k) {
    if (k % 2 != 0 || k < 12) return 0;
    unsigned d = static_cast<unsigned>(k / 12);
    if (k % 12 == 2) --d; // k = 12m+2 has one fewer form
    return d;
}

// echelonized integral basis f_1..f_d with f_i = q^i + O(q^(d+1));
// f_i is built from powers of the discriminant form times E4^a E6^b
inline std::vector<ZSeries> victor_miller_basis(std::uint64_t k, std::size_t prec) {
    const unsigned d = dim_cusp_forms(k);
    std::vector<ZSeries> basis;
    if (d == 0) return basis;
    const ZSeries e4 = eisenstein_e4(prec), e6 = eisenstein_e6(prec), dl = delta_series(prec);
    for (unsigned j = 1; j <= d; ++j) {
        const std::uint64_t m = k - 12ULL * j; // remaining weight; never 2 for j <= d
        const unsigned b = (m % 4 == 2) ? 1 : 0;
        const std::uint64_t a = (m - 6ULL * b) / 4;
        ZSeries g(prec, 0);
        if (prec) g[0] = 1;
        for (unsigned t = 0; t < j; ++t) g = series_mul(g, dl, prec);
        for (std::uint64_t t = 0; t < a; ++t) g = series_mul(g, e4, prec);
        if (b) g = series_mul(g, e6, prec);
        basis.push_back(std::move(g));
    }
    // unitriangular elimination (integer-preserving: all leading coeffs are 1)
    for (unsigned j = d; j >= 1; --j) {
        for (unsigned i = 1; i < j; ++i) {
            if (j >= prec) continue;
            const mpz_class c = basis[i - 1][j];
            if (c == 0) continue;
            for (std::size_t n = 0; n < prec; ++n) basis[i - 1][n] -= c * basis[j - 1][n];
        }
    }
    return basis;
}

// T_n acting on a weight-k expansion: a_m(T_n f) = sum over d | gcd(m,n) of
// d^(k-1) a_{mn/d^2}(f); the input must carry at least n * prec_out terms
inline ZSeries hecke_operator(const ZSeries& f, std::uint64_t n, std::uint64_t k,
                              std::size_t prec_out) {
    if (n == 0) throw std::invalid_argument("hecke_operator: n must be positive");
    if (f.size() < n * prec_out)
        throw std::invalid_argument("hecke_operator: input precision too small");
    ZSeries g(prec_out, 0);
    mpz_class t;
    for (std::size_t m = 0; m < prec_out; ++m) {
        const std::uint64_t gmn = m == 0 ? n : std::gcd<std::uint64_t>(m, n);
        for (std::uint64_t dd = 1; dd <= gmn; ++dd) {
            if (gmn % dd) continue;
            mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(dd), static_cast<unsigned long>(k - 1));
            g[m] += t * f[static_cast<std::size_t>(m / dd) * (n / dd)];
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// mod-p layer
// ---------------------------------------------------------------------------

using FpSeries = std::vector<std::uint64_t>;

inline FpSeries reduce_series(const ZSeries& f, std::uint64_t p) {
    FpSeries r(f.size(), 0);
    mpz_class t;
    for (std::size_t i = 0; i < f.size(); ++i) {
        mpz_fdiv_r_ui(t.get_mpz_t(), f[i].get_mpz_t(), static_cast<unsigned long>(p));
        r[i] = t.get_ui();
    }
    return r;
}

inline FpSeries fp_series_mul(const FpSeries& a, const FpSeries& b, std::size_t prec,
                              std::uint64_t p) {
    FpSeries c(prec, 0);
    const unsigned __int128 term = static_cast<unsigned __int128>(p - 1) * (p - 1);
    const bool fast = term == 0 || term * prec < (static_cast<unsigned __int128>(1) << 64);
    if (fast) {
        // raw uint64 accumulation, one reduction per output coefficient
        for (std::size_t i = 0; i < a.size() && i < prec; ++i) {
            const std::uint64_t av = a[i];
            if (!av) continue;
            const std::size_t jmax = std::min(b.size(), prec - i);
            std::uint64_t* out = c.data() + i;
            for (std::size_t j = 0; j < jmax; ++j) out[j] += av * b[j];
        }
        for (auto& v : c) v %= p;
    } else {
        for (std::size_t n = 0; n < prec; ++n) {
            unsigned __int128 acc = 0;
            const std::size_t lo = b.size() <= n ? n - b.size() + 1 : 0;
            for (std::size_t i = lo; i < a.size() && i <= n; ++i) {
                acc += static_cast<unsigned __int128>(a[i]) * b[n - i];
                if (acc >> 120) acc %= p;
            }
            c[n] = static_cast<std::uint64_t>(acc % p);
        }
    }
    return c;
}

inline FpSeries eisenstein_e4_fp(std::size_t prec, std::uint64_t p) {
    FpSeries f(prec, 0);
    if (prec) f[0] = 1 % p;
    for (std::size_t n = 1; n < prec; ++n) {
        std::uint64_t s = 0;
        for (std::uint64_t d = 1; d * d <= n; ++d) {
            if (n % d) continue;
            s = fq::add_mod(s, fq::pow_mod(d % p, 3, p), p);
            const std::uint64_t dd = n / d;
            if (dd != d) s = fq::add_mod(s, fq::pow_mod(dd % p, 3, p), p);
        }
        f[n] = fq::mul_mod(240 % p, s, p);
    }
    return f;
}

inline FpSeries eisenstein_e6_fp(std::size_t prec, std::uint64_t p) {
    FpSeries f(prec, 0);
    if (prec) f[0] = 1 % p;
    for (std::size_t n = 1; n < prec; ++n) {
        std::uint64_t s = 0;
        for (std::uint64_t d = 1; d * d <= n; ++d) {
            if (n % d) continue;
            s = fq::add_mod(s, fq::pow_mod(d % p, 5, p), p);
            const std::uint64_t dd = n / d;
            if (dd != d) s = fq::add_mod(s, fq::pow_mod(dd % p, 5, p), p);
        }
        f[n] = fq::mul_mod((p - 504 % p) % p, s, p);
    }
    return f;
}

inline FpSeries delta_fp(std::size_t prec, std::uint64_t p) {
    if (p < 5) throw std::invalid_argument("delta_fp: characteristic must be at least 5");
    const FpSeries e4 = eisenstein_e4_fp(prec, p), e6 = eisenstein_e6_fp(prec, p);
    FpSeries num = fp_series_mul(fp_series_mul(e4, e4, prec, p), e4, prec, p);
    const FpSeries e6sq = fp_series_mul(e6, e6, prec, p);
    const std::uint64_t s = fq::inv_mod(1728 % p, p);
    for (std::size_t n = 0; n < prec; ++n)
        num[n] = fq::mul_mod(fq::sub_mod(num[n], e6sq[n], p), s, p);
    return num;
}

// shared power tables for building many bases at one characteristic
struct FpSeriesTables {
    std::uint64_t p = 0;
    std::size_t prec = 0;
    std::vector<FpSeries> delta_pow; // delta_pow[j] = Delta^j, j = 0..jmax
    std::vector<FpSeries> e4_pow;    // e4_pow[a] = E4^a, a = 0..amax
    FpSeries e6;

    static FpSeriesTables build(std::uint64_t p, std::size_t prec, unsigned jmax,
                                std::uint64_t amax) {
        FpSeriesTables t;
        t.p = p;
        t.prec = prec;
        const FpSeries dl = delta_fp(prec, p);
        const FpSeries e4 = eisenstein_e4_fp(prec, p);
        t.e6 = eisenstein_e6_fp(prec, p);
        t.delta_pow.resize(jmax + 1);
        t.delta_pow[0].assign(prec, 0);
        if (prec) t.delta_pow[0][0] = 1 % p;
        for (unsigned j = 1; j <= jmax; ++j) t.delta_pow[j] = fp_series_mul(t.delta_pow[j - 1], dl, prec, p);
        t.e4_pow.resize(static_cast<std::size_t>(amax) + 1);
        t.e4_pow[0].assign(prec, 0);
        if (prec) t.e4_pow[0][0] = 1 % p;
        for (std::uint64_t a = 1; a <= amax; ++a) t.e4_pow[a] = fp_series_mul(t.e4_pow[a - 1], e4, prec, p);
        return t;
    }
};

inline std::vector<FpSeries> victor_miller_basis_fp(std::uint64_t k, std::size_t prec,
                                                    std::uint64_t p,
                                                    const FpSeriesTables* tables = nullptr) {
    const unsigned d = dim_cusp_forms(k);
    std::vector<FpSeries> basis;
    if (d == 0) return basis;
    FpSeriesTables local;
    if (tables == nullptr) {
        const std::uint64_t amax = k >= 12 ? (k - 12) / 4 : 0;
        local = FpSeriesTables::build(p, prec, d, amax);
        tables = &local;
    }
    if (tables->p != p || tables->prec < prec)
        throw std::invalid_argument("victor_miller_basis_fp: table mismatch");
    for (unsigned j = 1; j <= d; ++j) {
        const std::uint64_t m = k - 12ULL * j;
        const unsigned b = (m % 4 == 2) ? 1 : 0;
        const std::uint64_t a = (m - 6ULL * b) / 4;
        FpSeries g(tables->delta_pow.at(j).begin(), tables->delta_pow.at(j).begin() + prec);
        g = fp_series_mul(g, tables->e4_pow.at(a), prec, p);
        if (b) g = fp_series_mul(g, tables->e6, prec, p);
        basis.push_back(std::move(g));
    }
    for (unsigned j = d; j >= 1; --j) {
        for (unsigned i = 1; i < j; ++i) {
            if (j >= prec) continue;
            const std::uint64_t c = basis[i - 1][j];
            if (!c) continue;
            for (std::size_t n = 0; n < prec; ++n)
                basis[i - 1][n] = fq::sub_mod(basis[i - 1][n], fq::mul_mod(c, basis[j - 1][n], p), p);
        }
    }
    return basis;
}

// matrix of T_ell (ell prime, ell != p allowed to equal anything prime) on the
// echelon basis: column i holds the expansion coefficients a_1..a_d of T_ell f_i
inline std::vector<std::vector<std::uint64_t>> hecke_matrix_fp(
    const std::vector<FpSeries>& basis, std::uint64_t k, std::uint64_t ell, std::uint64_t p) {
    const std::size_t d = basis.size();
    std::vector<std::vector<std::uint64_t>> M(d, std::vector<std::uint64_t>(d, 0));
    if (d == 0) return M;
    for (const auto& f : basis)
        if (f.size() <= ell * d)
            throw std::invalid_argument("hecke_matrix_fp: basis precision too small");
    const std::uint64_t ellk = fq::pow_mod(ell % p, k - 1, p);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 1; j <= d; ++j) {
            std::uint64_t v = basis[i][j * ell];
            if (j % ell == 0) v = fq::add_mod(v, fq::mul_mod(ellk, basis[i][j / ell], p), p);
            M[j - 1][i] = v;
        }
    }
    return M;
}

} // namespace ladderlab::modforms
