#pragma once
// Finite-field engine: F_{p^e} contexts with deterministic canonical moduli,
// dense polynomial arithmetic and factorization over them, and the small
// dense linear algebra (kernel bases, characteristic polynomials, subfield
// embeddings) the eigensystem census is built on.
//
// Conventions: polynomial coefficient vectors are little-endian (index i =
// coefficient of x^i); field elements are fixed-size coefficient vectors in
// the power basis of the context modulus. The canonical modulus of F_{p^e}
// is the monic irreducible of degree e whose tail coefficient vector
// (c_0, ..., c_{e-1}) has the least integer encoding sum c_i * p^i; every
// context, factor list, root list and embedding is therefore reproducible
// across runs and thread counts.
//
// The engine targets small characteristic (p < 2^25): coefficient products
// are accumulated in raw 64-bit lanes and reduced late.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "ladderlab/error.hpp"
#include "ladderlab/numth.hpp"

namespace ladderlab::fq {

// ---------------------------------------------------------------------------
// scalar arithmetic mod p
// ---------------------------------------------------------------------------

inline std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    std::uint64_t s = a + b; // inputs < p < 2^63
    return s >= p ? s - p : s;
}

inline std::uint64_t sub_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return a >= b ? a - b : a + p - b;
}

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

inline std::uint64_t pow_mod(std::uint64_t a, std::uint64_t n, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    a %= p;
    while (n) {
        if (n & 1) r = mul_mod(r, a, p);
        a = mul_mod(a, a, p);
        n >>= 1;
    }
    return r;
}

inline std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
    a %= p;
    if (a == 0) throw std::invalid_argument("inv_mod: zero has no inverse");
    std::int64_t t = 0, nt = 1;
    std::int64_t r = static_cast<std::int64_t>(p), nr = static_cast<std::int64_t>(a);
    while (nr != 0) {
        std::int64_t q = r / nr;
        t -= q * nt;
        std::swap(t, nt);
        r -= q * nr;
        std::swap(r, nr);
    }
    if (r != 1) throw std::invalid_argument("inv_mod: modulus not prime or element not a unit");
    if (t < 0) t += static_cast<std::int64_t>(p);
    return static_cast<std::uint64_t>(t);
}

// ---------------------------------------------------------------------------
// dense polynomials over F_p (plain uint64 coefficients) -- used for modulus
// search, Frobenius matrices and the coefficient-level reduction step of
// extension-field products
// ---------------------------------------------------------------------------

namespace detail {

using FpPoly = std::vector<std::uint64_t>; // little-endian, no high zeros when trimmed

inline void fp_trim(FpPoly& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}

inline FpPoly fp_mul(const FpPoly& a, const FpPoly& b, std::uint64_t p) {
    if (a.empty() || b.empty()) return {};
    FpPoly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i]) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] = add_mod(c[i + j], mul_mod(a[i], b[j], p), p);
    }
    return c;
}

// reduce a in place by a monic divisor m (any degree >= 0 tail handled)
inline void fp_reduce(FpPoly& a, const FpPoly& m, std::uint64_t p) {
    const std::size_t dm = m.size() - 1;
    while (a.size() > dm) {
        const std::uint64_t c = a.back();
        a.pop_back();
        if (c)
            for (std::size_t j = 0; j < dm; ++j) {
                const std::size_t idx = a.size() - dm + j;
                a[idx] = sub_mod(a[idx], mul_mod(c, m[j], p), p);
            }
    }
    fp_trim(a);
}

inline FpPoly fp_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& m, std::uint64_t p) {
    FpPoly c = fp_mul(a, b, p);
    fp_reduce(c, m, p);
    return c;
}

inline FpPoly fp_powmod(FpPoly base, const mpz_class& n, const FpPoly& m, std::uint64_t p) {
    fp_reduce(base, m, p);
    FpPoly r{1};
    fp_reduce(r, m, p); // degree-0 modulus collapses everything to zero
    if (sgn(n) == 0) return r;
    const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    for (std::size_t i = bits; i-- > 0;) {
        r = fp_mulmod(r, r, m, p);
        if (mpz_tstbit(n.get_mpz_t(), i)) r = fp_mulmod(r, base, m, p);
    }
    return r;
}

inline void fp_make_monic(FpPoly& f, std::uint64_t p) {
    fp_trim(f);
    if (f.empty() || f.back() == 1) return;
    const std::uint64_t li = inv_mod(f.back(), p);
    for (auto& c : f) c = mul_mod(c, li, p);
}

inline std::pair<FpPoly, FpPoly> fp_divrem(FpPoly a, const FpPoly& b, std::uint64_t p) {
    fp_trim(a);
    if (b.empty()) throw std::invalid_argument("fp_divrem: division by zero");
    const std::size_t db = b.size() - 1;
    if (a.size() <= db) return {FpPoly{}, std::move(a)};
    const std::uint64_t li = inv_mod(b.back(), p);
    FpPoly q(a.size() - db, 0);
    while (a.size() > db) {
        const std::uint64_t c = mul_mod(a.back(), li, p);
        const std::size_t shift = a.size() - 1 - db;
        if (c) {
            q[shift] = c;
            for (std::size_t j = 0; j < db; ++j)
                a[shift + j] = sub_mod(a[shift + j], mul_mod(c, b[j], p), p);
        }
        a.pop_back();
    }
    fp_trim(a);
    return {std::move(q), std::move(a)};
}

inline FpPoly fp_gcd(FpPoly a, FpPoly b, std::uint64_t p) {
    fp_trim(a);
    fp_trim(b);
    while (!b.empty()) {
        FpPoly r = fp_divrem(std::move(a), b, p).second;
        a = std::move(b);
        b = std::move(r);
    }
    fp_make_monic(a, p);
    return a;
}

// returns (g, u) with g = gcd(a, m) monic and u*a == g (mod m)
inline std::pair<FpPoly, FpPoly> fp_ext_gcd(FpPoly a, FpPoly m, std::uint64_t p) {
    FpPoly r0 = std::move(a), r1 = std::move(m);
    fp_trim(r0);
    fp_trim(r1);
    FpPoly s0{1}, s1{};
    while (!r1.empty()) {
        auto [q, r] = fp_divrem(std::move(r0), r1, p);
        r0 = std::move(r1);
        r1 = std::move(r);
        FpPoly qs = fp_mul(q, s1, p);
        FpPoly ns(std::max(s0.size(), qs.size()), 0);
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const std::uint64_t x = i < s0.size() ? s0[i] : 0;
            const std::uint64_t y = i < qs.size() ? qs[i] : 0;
            ns[i] = sub_mod(x, y, p);
        }
        fp_trim(ns);
        s0 = std::move(s1);
        s1 = std::move(ns);
    }
    if (!r0.empty() && r0.back() != 1) {
        const std::uint64_t li = inv_mod(r0.back(), p);
        for (auto& c : r0) c = mul_mod(c, li, p);
        for (auto& c : s0) c = mul_mod(c, li, p);
    }
    return {std::move(r0), std::move(s0)};
}

// distinct-degree scan: h is irreducible iff it has no factor of degree <= deg/2
inline bool fp_is_irreducible(const FpPoly& h, std::uint64_t p) {
    const std::size_t n = h.size() - 1;
    if (n == 0) return false;
    if (n == 1) return true;
    if (h[0] == 0) return false; // divisible by x
    FpPoly u{0, 1};
    const mpz_class pe(static_cast<unsigned long>(p));
    for (std::size_t d = 1; 2 * d <= n; ++d) {
        u = fp_powmod(std::move(u), pe, h, p); // u = x^(p^d) mod h
        FpPoly g = u;
        if (g.size() < 2) g.resize(2, 0);
        g[1] = sub_mod(g[1], 1, p);
        fp_trim(g);
        g = fp_gcd(std::move(g), h, p);
        if (g.size() != 1) return false;
    }
    return true;
}

inline FpPoly canonical_irreducible(std::uint64_t p, unsigned e) {
    for (std::uint64_t m = 0; m < 100000000ULL; ++m) {
        FpPoly h(e + 1, 0);
        h[e] = 1;
        std::uint64_t t = m;
        for (unsigned i = 0; i < e && t; ++i) {
            h[i] = t % p;
            t /= p;
        }
        if (t) break; // encodings exhausted; unreachable before a hit exists
        if (fp_is_irreducible(h, p)) return h;
    }
    throw resource_limit("canonical_irreducible: search bound exceeded");
}

inline const FpPoly& canonical_modulus(std::uint64_t p, unsigned e) {
    static std::mutex mx;
    static std::map<std::pair<std::uint64_t, unsigned>, FpPoly> cache;
    std::lock_guard<std::mutex> lock(mx);
    const auto key = std::make_pair(p, e);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, canonical_irreducible(p, e)).first;
    return it->second;
}

} // namespace detail

// ---------------------------------------------------------------------------
// F_{p^e} elements and context
// ---------------------------------------------------------------------------

struct Fq {
    std::vector<std::uint64_t> c; // little-endian coords, size = context degree
};

inline bool operator==(const Fq& a, const Fq& b) { return a.c == b.c; }
inline bool operator!=(const Fq& a, const Fq& b) { return !(a == b); }

// total order matching the integer encoding sum c_i * p^i
inline bool fq_less(const Fq& a, const Fq& b) {
    for (std::size_t i = a.c.size(); i-- > 0;)
        if (a.c[i] != b.c[i]) return a.c[i] < b.c[i];
    return false;
}

class FqCtx {
public:
    FqCtx(std::uint64_t p, unsigned e) : p_(p), e_(e) {
        if (p >= (1ULL << 25)) throw std::invalid_argument("FqCtx: characteristic too large for the 64-bit lanes");
        if (!ladderlab::is_prime(p)) throw std::invalid_argument("FqCtx: p must be prime");
        if (e == 0 || e > 1024) throw std::invalid_argument("FqCtx: degree out of range");
        modulus_ = detail::canonical_modulus(p, e);
        build_frob();
    }

    std::uint64_t p() const { return p_; }
    unsigned degree() const { return e_; }
    const detail::FpPoly& modulus() const { return modulus_; }
    const std::vector<std::uint64_t>& frob_matrix() const { return frob_; }

    Fq zero() const { return Fq{std::vector<std::uint64_t>(e_, 0)}; }
    Fq one() const {
        Fq z = zero();
        z.c[0] = 1;
        return z;
    }
    Fq from_u64(std::uint64_t v) const {
        Fq z = zero();
        z.c[0] = v % p_;
        return z;
    }

    bool is_zero(const Fq& a) const {
        for (std::uint64_t v : a.c)
            if (v) return false;
        return true;
    }

    Fq add(const Fq& a, const Fq& b) const {
        Fq r = a;
        for (unsigned i = 0; i < e_; ++i) r.c[i] = add_mod(r.c[i], b.c[i], p_);
        return r;
    }

    Fq sub(const Fq& a, const Fq& b) const {
        Fq r = a;
        for (unsigned i = 0; i < e_; ++i) r.c[i] = sub_mod(r.c[i], b.c[i], p_);
        return r;
    }

    Fq neg(const Fq& a) const {
        Fq r = a;
        for (unsigned i = 0; i < e_; ++i) r.c[i] = r.c[i] ? p_ - r.c[i] : 0;
        return r;
    }

    Fq mul(const Fq& a, const Fq& b) const {
        // raw 64-bit accumulation: e * (p-1)^2 < 2^60 under the ctor guards
        std::vector<std::uint64_t> acc(2 * e_ - 1, 0);
        for (unsigned x = 0; x < e_; ++x) {
            const std::uint64_t av = a.c[x];
            if (!av) continue;
            for (unsigned y = 0; y < e_; ++y) acc[x + y] += av * b.c[y];
        }
        return reduce_raw(std::move(acc));
    }

    Fq scale(std::uint64_t s, const Fq& a) const {
        s %= p_;
        Fq r = zero();
        for (unsigned i = 0; i < e_; ++i) r.c[i] = mul_mod(s, a.c[i], p_);
        return r;
    }

    Fq inv(const Fq& a) const {
        detail::FpPoly ac = a.c;
        detail::fp_trim(ac);
        if (ac.empty()) throw std::invalid_argument("FqCtx::inv: zero has no inverse");
        auto [g, u] = detail::fp_ext_gcd(std::move(ac), modulus_, p_);
        if (g.size() != 1 || g[0] != 1) throw std::logic_error("FqCtx::inv: modulus is not irreducible");
        u.resize(e_, 0);
        return Fq{std::move(u)};
    }

    Fq div(const Fq& a, const Fq& b) const { return mul(a, inv(b)); }

    Fq pow(const Fq& a, const mpz_class& n) const {
        if (sgn(n) < 0) throw std::invalid_argument("FqCtx::pow: negative exponent");
        Fq r = one();
        if (sgn(n) == 0) return r;
        const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
        for (std::size_t i = bits; i-- > 0;) {
            r = mul(r, r);
            if (mpz_tstbit(n.get_mpz_t(), i)) r = mul(r, a);
        }
        return r;
    }

    // a |-> a^p via the precomputed F_p-linear matrix
    Fq frob(const Fq& a) const {
        Fq r = zero();
        for (unsigned row = 0; row < e_; ++row) {
            unsigned __int128 acc = 0;
            for (unsigned i = 0; i < e_; ++i)
                acc += static_cast<unsigned __int128>(frob_[row * e_ + i]) * a.c[i];
            r.c[row] = static_cast<std::uint64_t>(acc % p_);
        }
        return r;
    }

    mpz_class encode(const Fq& a) const {
        mpz_class v = 0;
        for (std::size_t i = a.c.size(); i-- > 0;) {
            v *= static_cast<unsigned long>(p_);
            v += static_cast<unsigned long>(a.c[i]);
        }
        return v;
    }

    // reduce a raw (unreduced-lane) coefficient vector to a field element
    Fq reduce_raw(std::vector<std::uint64_t> acc) const {
        for (auto& v : acc) v %= p_;
        detail::fp_reduce(acc, modulus_, p_);
        acc.resize(e_, 0);
        return Fq{std::move(acc)};
    }

private:
    void build_frob() {
        detail::FpPoly x{0, 1};
        detail::fp_reduce(x, modulus_, p_);
        const detail::FpPoly xp =
            detail::fp_powmod(x, mpz_class(static_cast<unsigned long>(p_)), modulus_, p_);
        frob_.assign(static_cast<std::size_t>(e_) * e_, 0);
        detail::FpPoly pw{1};
        for (unsigned i = 0; i < e_; ++i) {
            for (unsigned r = 0; r < e_; ++r) frob_[static_cast<std::size_t>(r) * e_ + i] = r < pw.size() ? pw[r] : 0;
            pw = detail::fp_mulmod(pw, xp, modulus_, p_);
        }
    }

    std::uint64_t p_;
    unsigned e_;
    detail::FpPoly modulus_;
    std::vector<std::uint64_t> frob_; // e x e, row-major
};

// F_p-linear e x e matrix applied to an element's coordinate vector
inline Fq apply_fp_matrix(const FqCtx& K, const std::vector<std::uint64_t>& M, const Fq& a) {
    const unsigned e = K.degree();
    Fq r = K.zero();
    for (unsigned row = 0; row < e; ++row) {
        unsigned __int128 acc = 0;
        for (unsigned i = 0; i < e; ++i)
            acc += static_cast<unsigned __int128>(M[static_cast<std::size_t>(row) * e + i]) * a.c[i];
        r.c[row] = static_cast<std::uint64_t>(acc % K.p());
    }
    return r;
}

// matrix of a |-> a^(p^t) on the context (t taken mod e)
inline std::vector<std::uint64_t> frob_power_matrix(const FqCtx& K, unsigned t) {
    const unsigned e = K.degree();
    const std::uint64_t p = K.p();
    t = static_cast<unsigned>(t % e);
    std::vector<std::uint64_t> r(static_cast<std::size_t>(e) * e, 0);
    for (unsigned i = 0; i < e; ++i) r[static_cast<std::size_t>(i) * e + i] = 1;
    auto matmul = [&](const std::vector<std::uint64_t>& A, const std::vector<std::uint64_t>& B) {
        std::vector<std::uint64_t> C(static_cast<std::size_t>(e) * e, 0);
        for (unsigned i = 0; i < e; ++i)
            for (unsigned j = 0; j < e; ++j) {
                unsigned __int128 acc = 0;
                for (unsigned k = 0; k < e; ++k)
                    acc += static_cast<unsigned __int128>(A[static_cast<std::size_t>(i) * e + k]) *
                           B[static_cast<std::size_t>(k) * e + j];
                C[static_cast<std::size_t>(i) * e + j] = static_cast<std::uint64_t>(acc % p);
            }
        return C;
    };
    std::vector<std::uint64_t> base = K.frob_matrix();
    while (t) {
        if (t & 1) r = matmul(r, base);
        t >>= 1;
        if (t) base = matmul(base, base);
    }
    return r;
}

// ---------------------------------------------------------------------------
// dense polynomials over F_{p^e}
// ---------------------------------------------------------------------------

using FqPoly = std::vector<Fq>;

inline void poly_trim(const FqCtx& K, FqPoly& f) {
    while (!f.empty() && K.is_zero(f.back())) f.pop_back();
}

inline long poly_deg(const FqPoly& f) { return static_cast<long>(f.size()) - 1; }

inline FqPoly poly_x(const FqCtx& K) { return FqPoly{K.zero(), K.one()}; }

inline FqPoly poly_add(const FqCtx& K, const FqPoly& a, const FqPoly& b) {
    FqPoly r(std::max(a.size(), b.size()), K.zero());
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i < a.size()) r[i] = K.add(r[i], a[i]);
        if (i < b.size()) r[i] = K.add(r[i], b[i]);
    }
    poly_trim(K, r);
    return r;
}

inline FqPoly poly_sub(const FqCtx& K, const FqPoly& a, const FqPoly& b) {
    FqPoly r(std::max(a.size(), b.size()), K.zero());
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i < a.size()) r[i] = K.add(r[i], a[i]);
        if (i < b.size()) r[i] = K.sub(r[i], b[i]);
    }
    poly_trim(K, r);
    return r;
}

inline FqPoly poly_scale(const FqCtx& K, const Fq& s, const FqPoly& f) {
    FqPoly r(f.size(), K.zero());
    for (std::size_t i = 0; i < f.size(); ++i) r[i] = K.mul(s, f[i]);
    poly_trim(K, r);
    return r;
}

// schoolbook product with deferred reduction: coefficient lanes stay raw
// uint64 sums of products < p^2 and are reduced once per output coefficient
inline FqPoly poly_mul(const FqCtx& K, const FqPoly& a, const FqPoly& b) {
    if (a.empty() || b.empty()) return {};
    const unsigned e = K.degree();
    const std::uint64_t p = K.p();
    const std::size_t lanes = 2 * static_cast<std::size_t>(e) - 1;
    const std::size_t out = a.size() + b.size() - 1;
    std::vector<std::uint64_t> acc(out * lanes, 0);
    // lane sums gather up to min(|a|,|b|) * e products of size < (p-1)^2
    const std::uint64_t term = (p - 1) * (p - 1);
    const std::uint64_t cap = term ? (~0ULL - term) / term : ~0ULL;
    std::uint64_t pairs_since_sweep = 0;
    const std::uint64_t sweep_every = std::max<std::uint64_t>(1, cap / std::max(1u, e));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            std::uint64_t* lane = acc.data() + (i + j) * lanes;
            for (unsigned x = 0; x < e; ++x) {
                const std::uint64_t av = a[i].c[x];
                if (!av) continue;
                for (unsigned y = 0; y < e; ++y) lane[x + y] += av * b[j].c[y];
            }
            if (++pairs_since_sweep >= sweep_every) {
                for (auto& v : acc) v %= p;
                pairs_since_sweep = 0;
            }
        }
    }
    FqPoly r(out, K.zero());
    std::vector<std::uint64_t> lane(lanes);
    for (std::size_t k = 0; k < out; ++k) {
        std::copy_n(acc.data() + k * lanes, lanes, lane.begin());
        r[k] = K.reduce_raw(lane);
    }
    poly_trim(K, r);
    return r;
}

inline void poly_make_monic(const FqCtx& K, FqPoly& f) {
    poly_trim(K, f);
    if (f.empty()) return;
    if (f.back() == K.one()) return;
    const Fq li = K.inv(f.back());
    for (auto& c : f) c = K.mul(li, c);
}

inline std::pair<FqPoly, FqPoly> poly_divrem(const FqCtx& K, FqPoly a, const FqPoly& b0) {
    FqPoly b = b0;
    poly_trim(K, b);
    if (b.empty()) throw std::invalid_argument("poly_divrem: division by zero");
    poly_trim(K, a);
    const std::size_t db = b.size() - 1;
    if (a.size() <= db) return {FqPoly{}, std::move(a)};
    const Fq li = K.inv(b.back());
    FqPoly q(a.size() - db, K.zero());
    while (a.size() > db) {
        const Fq c = K.mul(a.back(), li);
        const std::size_t shift = a.size() - 1 - db;
        if (!K.is_zero(c)) {
            q[shift] = c;
            for (std::size_t j = 0; j < db; ++j) a[shift + j] = K.sub(a[shift + j], K.mul(c, b[j]));
        }
        a.pop_back();
    }
    poly_trim(K, a);
    return {std::move(q), std::move(a)};
}

inline FqPoly poly_gcd(const FqCtx& K, FqPoly a, FqPoly b) {
    poly_trim(K, a);
    poly_trim(K, b);
    while (!b.empty()) {
        FqPoly r = poly_divrem(K, std::move(a), b).second;
        a = std::move(b);
        b = std::move(r);
    }
    poly_make_monic(K, a);
    return a;
}

inline FqPoly poly_powmod(const FqCtx& K, FqPoly base, const mpz_class& n, const FqPoly& mod) {
    if (sgn(n) < 0) throw std::invalid_argument("poly_powmod: negative exponent");
    base = poly_divrem(K, std::move(base), mod).second;
    FqPoly r = poly_divrem(K, FqPoly{K.one()}, mod).second;
    if (sgn(n) == 0) return r;
    const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    for (std::size_t i = bits; i-- > 0;) {
        r = poly_divrem(K, poly_mul(K, r, r), mod).second;
        if (mpz_tstbit(n.get_mpz_t(), i)) r = poly_divrem(K, poly_mul(K, r, base), mod).second;
    }
    return r;
}

inline FqPoly poly_deriv(const FqCtx& K, const FqPoly& f) {
    if (f.size() < 2) return {};
    FqPoly r(f.size() - 1, K.zero());
    for (std::size_t i = 1; i < f.size(); ++i)
        r[i - 1] = K.scale(static_cast<std::uint64_t>(i % K.p()), f[i]);
    poly_trim(K, r);
    return r;
}

inline Fq poly_eval(const FqCtx& K, const FqPoly& f, const Fq& x) {
    Fq r = K.zero();
    for (std::size_t i = f.size(); i-- > 0;) r = K.add(K.mul(r, x), f[i]);
    return r;
}

inline bool poly_less(const FqPoly& a, const FqPoly& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return fq_less(a[i], b[i]);
    }
    return false;
}

// ---------------------------------------------------------------------------
// factorization: squarefree / distinct-degree / equal-degree
// ---------------------------------------------------------------------------

// h with h^p = f (requires f's support on exponents divisible by p)
inline FqPoly poly_pth_root(const FqCtx& K, const FqPoly& f) {
    const std::uint64_t p = K.p();
    FqPoly g;
    g.reserve(f.size() / p + 1);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i % p == 0) {
            Fq c = f[i];
            for (unsigned t = 1; t < K.degree(); ++t) c = K.frob(c); // c^(p^(e-1)) inverts Frobenius
            g.push_back(std::move(c));
        } else if (!K.is_zero(f[i])) {
            throw std::logic_error("poly_pth_root: polynomial is not a p-th power");
        }
    }
    return g;
}

namespace detail {

inline void squarefree_rec(const FqCtx& K, FqPoly f, unsigned mult,
                           std::vector<std::pair<FqPoly, unsigned>>& out) {
    FqPoly d = poly_deriv(K, f);
    if (poly_deg(d) < 0) { // f = h^p
        squarefree_rec(K, poly_pth_root(K, f), mult * static_cast<unsigned>(K.p()), out);
        return;
    }
    FqPoly c = poly_gcd(K, f, std::move(d));
    FqPoly w = poly_divrem(K, std::move(f), c).first;
    unsigned i = 1;
    while (poly_deg(w) > 0) {
        FqPoly y = poly_gcd(K, w, c);
        FqPoly z = poly_divrem(K, std::move(w), y).first;
        if (poly_deg(z) > 0) out.emplace_back(std::move(z), mult * i);
        w = std::move(y);
        c = poly_divrem(K, std::move(c), w).first;
        ++i;
    }
    if (poly_deg(c) > 0) squarefree_rec(K, std::move(c), mult * static_cast<unsigned>(K.p()), out);
}

} // namespace detail

// monic squarefree parts with multiplicities, sorted by (multiplicity, poly order)
inline std::vector<std::pair<FqPoly, unsigned>> squarefree_decomposition(const FqCtx& K, FqPoly f) {
    poly_trim(K, f);
    if (poly_deg(f) < 1) throw std::invalid_argument("squarefree_decomposition: need degree >= 1");
    poly_make_monic(K, f);
    std::vector<std::pair<FqPoly, unsigned>> out;
    detail::squarefree_rec(K, std::move(f), 1, out);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second < b.second;
        return poly_less(a.first, b.first);
    });
    return out;
}

// f monic squarefree -> (product of all irreducible factors of degree d, d), d ascending
inline std::vector<std::pair<FqPoly, unsigned>> distinct_degree_split(const FqCtx& K, FqPoly f) {
    std::vector<std::pair<FqPoly, unsigned>> out;
    mpz_class q;
    mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(K.p()), K.degree());
    FqPoly h = poly_divrem(K, poly_x(K), f).second;
    unsigned d = 0;
    while (poly_deg(f) >= 2 * static_cast<long>(d + 1)) {
        ++d;
        h = poly_powmod(K, std::move(h), q, f); // h = x^(q^d) mod f
        FqPoly g = poly_gcd(K, poly_sub(K, h, poly_x(K)), f);
        if (poly_deg(g) > 0) {
            f = poly_divrem(K, std::move(f), g).first;
            h = poly_divrem(K, std::move(h), f).second;
            out.emplace_back(std::move(g), d);
        }
    }
    if (poly_deg(f) > 0) {
        const unsigned rest = static_cast<unsigned>(poly_deg(f));
        out.emplace_back(std::move(f), rest);
    }
    return out;
}

namespace detail {

inline FqPoly random_poly_below(const FqCtx& K, long deg_bound, std::mt19937_64& rng) {
    FqPoly r(static_cast<std::size_t>(deg_bound), K.zero());
    for (auto& c : r)
        for (auto& v : c.c) v = rng() % K.p();
    poly_trim(K, r);
    return r;
}

inline void edf_rec(const FqCtx& K, FqPoly f, unsigned d, const mpz_class& exp,
                    std::mt19937_64& rng, std::vector<FqPoly>& out) {
    const long n = poly_deg(f);
    if (n == static_cast<long>(d)) {
        out.push_back(std::move(f));
        return;
    }
    for (;;) {
        FqPoly r = random_poly_below(K, n, rng);
        if (poly_deg(r) < 1) continue;
        FqPoly g = poly_gcd(K, r, f);
        if (poly_deg(g) == 0) {
            FqPoly b = poly_powmod(K, std::move(r), exp, f);
            if (b.empty()) b.push_back(K.zero());
            b[0] = K.sub(b[0], K.one());
            poly_trim(K, b);
            g = poly_gcd(K, std::move(b), f);
        }
        if (poly_deg(g) > 0 && poly_deg(g) < n) {
            FqPoly rest = poly_divrem(K, std::move(f), g).first;
            edf_rec(K, std::move(g), d, exp, rng, out);
            edf_rec(K, std::move(rest), d, exp, rng, out);
            return;
        }
    }
}

} // namespace detail

// f monic squarefree with all irreducible factors of degree d; odd p
inline std::vector<FqPoly> equal_degree_split(const FqCtx& K, FqPoly f, unsigned d,
                                              std::mt19937_64& rng) {
    if (K.p() == 2) throw std::invalid_argument("equal_degree_split: characteristic 2 unsupported");
    mpz_class q, qd;
    mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(K.p()), K.degree());
    mpz_pow_ui(qd.get_mpz_t(), q.get_mpz_t(), d);
    const mpz_class exp = (qd - 1) / 2;
    std::vector<FqPoly> out;
    detail::edf_rec(K, std::move(f), d, exp, rng, out);
    std::sort(out.begin(), out.end(), poly_less);
    return out;
}

struct FactorPower {
    FqPoly factor; // monic irreducible
    unsigned mult = 0;
};

// full factorization of a monic polynomial; output sorted by (degree, poly
// order) so it is independent of the randomness used to split
inline std::vector<FactorPower> factor_monic(const FqCtx& K, FqPoly f, std::mt19937_64& rng) {
    std::vector<FactorPower> out;
    for (auto& [sf, mult] : squarefree_decomposition(K, std::move(f))) {
        for (auto& [prod, d] : distinct_degree_split(K, std::move(sf))) {
            if (static_cast<unsigned>(poly_deg(prod)) == d) {
                out.push_back({std::move(prod), mult});
            } else {
                for (auto& g : equal_degree_split(K, std::move(prod), d, rng))
                    out.push_back({std::move(g), mult});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const FactorPower& a, const FactorPower& b) {
        if (a.factor.size() != b.factor.size()) return a.factor.size() < b.factor.size();
        return poly_less(a.factor, b.factor);
    });
    return out;
}

// distinct roots in the context field, ascending in the canonical order
inline std::vector<Fq> poly_roots(const FqCtx& K, FqPoly f, std::mt19937_64& rng) {
    poly_trim(K, f);
    if (poly_deg(f) < 1) return {};
    std::vector<Fq> roots;
    for (auto& fp : factor_monic(K, std::move(f), rng))
        if (fp.factor.size() == 2) roots.push_back(K.neg(fp.factor[0]));
    std::sort(roots.begin(), roots.end(), fq_less);
    return roots;
}

// ---------------------------------------------------------------------------
// root extraction for prime-field polynomials inside an extension context
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::uint64_t> fp_mat_mul(const std::vector<std::uint64_t>& A,
                                             const std::vector<std::uint64_t>& B,
                                             unsigned e, std::uint64_t p) {
    std::vector<std::uint64_t> C(static_cast<std::size_t>(e) * e, 0);
    for (unsigned i = 0; i < e; ++i)
        for (unsigned j = 0; j < e; ++j) {
            unsigned __int128 acc = 0;
            for (unsigned k = 0; k < e; ++k)
                acc += static_cast<unsigned __int128>(A[static_cast<std::size_t>(i) * e + k]) *
                       B[static_cast<std::size_t>(k) * e + j];
            C[static_cast<std::size_t>(i) * e + j] = static_cast<std::uint64_t>(acc % p);
        }
    return C;
}

// outer evaluated at point, mod f, all over F_p
inline FpPoly fp_compose_mod(const FpPoly& outer, const FpPoly& point, const FpPoly& f,
                             std::uint64_t p) {
    FpPoly r;
    for (std::size_t i = outer.size(); i-- > 0;) {
        r = fp_mulmod(r, point, f, p);
        if (outer[i]) {
            if (r.empty()) r.assign(1, 0);
            r[0] = add_mod(r[0], outer[i], p);
        }
    }
    return r;
}

// t^(p^k) mod g. Substituting y -> y^(p^k) is read off hk = y^(p^k) mod f,
// whose powers keep prime-field coefficients, so only t's coefficients pass
// through the Frobenius matrix Phik; g must divide the lift of f.
inline FqPoly frob_poly_power(const FqCtx& K, const FqPoly& t,
                              const std::vector<std::uint64_t>& Phik, const FpPoly& hk,
                              const FpPoly& f, const FqPoly& g) {
    const std::uint64_t p = K.p();
    FqPoly acc(f.size() - 1, K.zero());
    FpPoly pw{1};
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) pw = fp_mulmod(pw, hk, f, p);
        if (K.is_zero(t[i])) continue;
        const Fq ci = apply_fp_matrix(K, Phik, t[i]);
        for (std::size_t j = 0; j < pw.size(); ++j)
            if (pw[j]) acc[j] = K.add(acc[j], K.scale(pw[j], ci));
    }
    poly_trim(K, acc);
    return poly_divrem(K, std::move(acc), g).second;
}

} // namespace detail

// Least root in the context of a monic polynomial irreducible over F_p whose
// degree divides the context degree. Equal-degree splitting with the exponent
// (p^E - 1)/2 factored as (1 + p + ... + p^(E-1)) * (p-1)/2: the norm stage
// walks a binary Frobenius chain in which y^(p^k) mod f keeps prime-field
// coefficients, so each step costs one context-level product instead of
// log2(p) squarings over the extension. The naive equal-degree split is
// quartic-plus in the degree here; this brings a degree-57 extraction from
// ~10 s to milliseconds. Randomness only steers which root the descent
// isolates first: the returned value is the least element of the full root
// orbit, hence deterministic.
inline Fq least_root_of_fp_poly(const FqCtx& K, std::vector<std::uint64_t> f,
                                std::mt19937_64& rng) {
    const std::uint64_t p = K.p();
    const unsigned E = K.degree();
    detail::fp_make_monic(f, p);
    if (f.size() < 2) throw std::invalid_argument("least_root_of_fp_poly: need degree >= 1");
    const unsigned n = static_cast<unsigned>(f.size()) - 1;
    if (E % n) throw std::invalid_argument("least_root_of_fp_poly: degree does not divide context degree");
    if (n == 1) return K.from_u64(f[0] ? p - f[0] : 0);
    if (p == 2) throw std::invalid_argument("least_root_of_fp_poly: characteristic 2 unsupported");

    const detail::FpPoly h1 =
        detail::fp_powmod(detail::FpPoly{0, 1}, mpz_class(static_cast<unsigned long>(p)), f, p);
    const mpz_class char_exp((p - 1) / 2);

    FqPoly g;
    g.reserve(f.size());
    for (std::uint64_t c : f) g.push_back(K.from_u64(c));

    while (poly_deg(g) > 1) {
        FqPoly r = detail::random_poly_below(K, poly_deg(g), rng);
        if (poly_deg(r) < 1) continue;
        FqPoly d = poly_gcd(K, r, g);
        if (poly_deg(d) < 1) {
            // norm stage: t = r^(1 + p + ... + p^(E-1)) mod g, doubling the
            // exponent prefix along the bits of E
            FqPoly t = r;
            detail::FpPoly h = h1;                             // y^(p^acc) mod f
            std::vector<std::uint64_t> Phi = K.frob_matrix();  // coords of x -> x^(p^acc)
            unsigned msb = 0;
            while ((E >> (msb + 1)) != 0) ++msb;
            for (unsigned b = msb; b-- > 0;) {
                t = poly_divrem(K, poly_mul(K, t, detail::frob_poly_power(K, t, Phi, h, f, g)), g)
                        .second;
                h = detail::fp_compose_mod(h, h, f, p);
                Phi = detail::fp_mat_mul(Phi, Phi, E, p);
                if ((E >> b) & 1) {
                    t = poly_divrem(
                            K, poly_mul(K, r, detail::frob_poly_power(K, t, K.frob_matrix(), h1, f, g)),
                            g)
                            .second;
                    h = detail::fp_compose_mod(h1, h, f, p);
                    Phi = detail::fp_mat_mul(Phi, K.frob_matrix(), E, p);
                }
            }
            // character stage over the prime field
            FqPoly s = poly_powmod(K, std::move(t), char_exp, g);
            if (s.empty()) s.push_back(K.zero());
            s[0] = K.sub(s[0], K.one());
            poly_trim(K, s);
            d = poly_gcd(K, std::move(s), g);
        }
        const long dd = poly_deg(d);
        if (dd > 0 && dd < poly_deg(g)) {
            FqPoly rest = poly_divrem(K, std::move(g), d).first;
            g = poly_deg(d) <= poly_deg(rest) ? std::move(d) : std::move(rest);
        }
    }

    Fq best = K.neg(g[0]);
    Fq cur = best;
    for (unsigned s = 1; s < n; ++s) {
        cur = K.frob(cur);
        if (fq_less(cur, best)) best = cur;
    }
    return best;
}

// ---------------------------------------------------------------------------
// dense matrices over F_{p^e}
// ---------------------------------------------------------------------------

struct FqMat {
    unsigned rows = 0, cols = 0;
    std::vector<Fq> a; // row-major

    FqMat() = default;
    FqMat(const FqCtx& K, unsigned r, unsigned c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, K.zero()) {}

    Fq& at(unsigned r, unsigned c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    const Fq& at(unsigned r, unsigned c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

inline FqMat mat_identity(const FqCtx& K, unsigned n) {
    FqMat I(K, n, n);
    for (unsigned i = 0; i < n; ++i) I.at(i, i) = K.one();
    return I;
}

inline FqMat mat_mul(const FqCtx& K, const FqMat& A, const FqMat& B) {
    if (A.cols != B.rows) throw std::invalid_argument("mat_mul: shape mismatch");
    FqMat C(K, A.rows, B.cols);
    for (unsigned i = 0; i < A.rows; ++i)
        for (unsigned k = 0; k < A.cols; ++k) {
            const Fq& aik = A.at(i, k);
            if (K.is_zero(aik)) continue;
            for (unsigned j = 0; j < B.cols; ++j)
                C.at(i, j) = K.add(C.at(i, j), K.mul(aik, B.at(k, j)));
        }
    return C;
}

inline std::vector<Fq> mat_apply(const FqCtx& K, const FqMat& A, const std::vector<Fq>& v) {
    if (A.cols != v.size()) throw std::invalid_argument("mat_apply: shape mismatch");
    std::vector<Fq> r(A.rows, K.zero());
    for (unsigned i = 0; i < A.rows; ++i)
        for (unsigned j = 0; j < A.cols; ++j)
            if (!K.is_zero(A.at(i, j))) r[i] = K.add(r[i], K.mul(A.at(i, j), v[j]));
    return r;
}

// right-kernel basis, deterministic (free columns in ascending order)
inline std::vector<std::vector<Fq>> mat_kernel(const FqCtx& K, FqMat A) {
    const unsigned n = A.rows, m = A.cols;
    std::vector<long> pivot_of_col(m, -1);
    unsigned rank = 0;
    for (unsigned col = 0; col < m && rank < n; ++col) {
        unsigned sel = rank;
        while (sel < n && K.is_zero(A.at(sel, col))) ++sel;
        if (sel == n) continue;
        if (sel != rank)
            for (unsigned j = 0; j < m; ++j) std::swap(A.at(sel, j), A.at(rank, j));
        const Fq d = K.inv(A.at(rank, col));
        for (unsigned j = col; j < m; ++j) A.at(rank, j) = K.mul(d, A.at(rank, j));
        for (unsigned r = 0; r < n; ++r) {
            if (r == rank || K.is_zero(A.at(r, col))) continue;
            const Fq f = A.at(r, col);
            for (unsigned j = col; j < m; ++j) A.at(r, j) = K.sub(A.at(r, j), K.mul(f, A.at(rank, j)));
        }
        pivot_of_col[col] = rank;
        ++rank;
    }
    std::vector<std::vector<Fq>> basis;
    for (unsigned j = 0; j < m; ++j) {
        if (pivot_of_col[j] >= 0) continue;
        std::vector<Fq> v(m, K.zero());
        v[j] = K.one();
        for (unsigned col = 0; col < m; ++col)
            if (pivot_of_col[col] >= 0) v[col] = K.neg(A.at(static_cast<unsigned>(pivot_of_col[col]), j));
        basis.push_back(std::move(v));
    }
    return basis;
}

// characteristic polynomial det(xI - A) via Hessenberg reduction, O(n^3)
inline FqPoly charpoly(const FqCtx& K, FqMat H) {
    if (H.rows != H.cols) throw std::invalid_argument("charpoly: square matrix required");
    const unsigned n = H.rows;
    if (n == 0) return {K.one()};
    for (unsigned j = 0; j + 2 < n; ++j) {
        unsigned piv = j + 1;
        while (piv < n && K.is_zero(H.at(piv, j))) ++piv;
        if (piv == n) continue;
        if (piv != j + 1) {
            for (unsigned c = 0; c < n; ++c) std::swap(H.at(piv, c), H.at(j + 1, c));
            for (unsigned r = 0; r < n; ++r) std::swap(H.at(r, piv), H.at(r, j + 1));
        }
        const Fq d = K.inv(H.at(j + 1, j));
        for (unsigned r = j + 2; r < n; ++r) {
            if (K.is_zero(H.at(r, j))) continue;
            const Fq m = K.mul(H.at(r, j), d);
            for (unsigned c = 0; c < n; ++c) H.at(r, c) = K.sub(H.at(r, c), K.mul(m, H.at(j + 1, c)));
            for (unsigned r2 = 0; r2 < n; ++r2) H.at(r2, j + 1) = K.add(H.at(r2, j + 1), K.mul(m, H.at(r2, r)));
        }
    }
    std::vector<FqPoly> pk(n + 1);
    pk[0] = {K.one()};
    for (unsigned k = 1; k <= n; ++k) {
        FqPoly t(pk[k - 1].size() + 1, K.zero());
        const Fq& diag = H.at(k - 1, k - 1);
        for (std::size_t i = 0; i < pk[k - 1].size(); ++i) {
            t[i + 1] = K.add(t[i + 1], pk[k - 1][i]);
            t[i] = K.sub(t[i], K.mul(diag, pk[k - 1][i]));
        }
        Fq beta = K.one();
        for (unsigned i = k - 1; i-- > 0;) {
            beta = K.mul(beta, H.at(i + 1, i));
            if (K.is_zero(beta)) break;
            if (K.is_zero(H.at(i, k - 1))) continue;
            const Fq coef = K.mul(H.at(i, k - 1), beta);
            for (std::size_t idx = 0; idx < pk[i].size(); ++idx) t[idx] = K.sub(t[idx], K.mul(coef, pk[i][idx]));
        }
        pk[k] = std::move(t);
    }
    return pk[n];
}

// ---------------------------------------------------------------------------
// subfield embeddings
// ---------------------------------------------------------------------------

struct Embedding {
    std::uint64_t p = 0;
    unsigned e_small = 0, e_big = 0;
    std::vector<std::uint64_t> fwd; // e_big x e_small: column i = coords of theta^i
    std::vector<std::uint64_t> sec; // e_small x e_big with sec * fwd = identity
    Fq theta;                       // image of the small field's generator

    Fq embed(const Fq& a) const {
        Fq r{std::vector<std::uint64_t>(e_big, 0)};
        for (unsigned row = 0; row < e_big; ++row) {
            unsigned __int128 acc = 0;
            for (unsigned i = 0; i < e_small; ++i)
                acc += static_cast<unsigned __int128>(fwd[static_cast<std::size_t>(row) * e_small + i]) * a.c[i];
            r.c[row] = static_cast<std::uint64_t>(acc % p);
        }
        return r;
    }

    // preimage when b lies in the embedded subfield
    std::optional<Fq> section(const Fq& b) const {
        Fq y{std::vector<std::uint64_t>(e_small, 0)};
        for (unsigned row = 0; row < e_small; ++row) {
            unsigned __int128 acc = 0;
            for (unsigned i = 0; i < e_big; ++i)
                acc += static_cast<unsigned __int128>(sec[static_cast<std::size_t>(row) * e_big + i]) * b.c[i];
            y.c[row] = static_cast<std::uint64_t>(acc % p);
        }
        if (embed(y) != b) return std::nullopt;
        return y;
    }
};

// canonical embedding: the small generator maps to the least root of the
// small modulus inside the big field
inline Embedding make_embedding(const FqCtx& S, const FqCtx& B, std::mt19937_64& rng) {
    if (S.p() != B.p()) throw std::invalid_argument("make_embedding: characteristic mismatch");
    if (B.degree() % S.degree() != 0)
        throw std::invalid_argument("make_embedding: small degree must divide big degree");

    Embedding emb;
    emb.p = B.p();
    emb.e_small = S.degree();
    emb.e_big = B.degree();
    if (S.degree() == B.degree()) {
        // identical canonical moduli: the generator encodes as p and every
        // other conjugate strictly larger, so it is its own least root and
        // the embedding is the identity
        emb.theta = B.zero();
        if (B.degree() > 1) emb.theta.c[1] = 1;
    } else {
        emb.theta = least_root_of_fp_poly(B, S.modulus(), rng);
    }
    emb.fwd.assign(static_cast<std::size_t>(emb.e_big) * emb.e_small, 0);
    Fq pw = B.one();
    for (unsigned i = 0; i < emb.e_small; ++i) {
        for (unsigned r = 0; r < emb.e_big; ++r)
            emb.fwd[static_cast<std::size_t>(r) * emb.e_small + i] = pw.c[r];
        pw = B.mul(pw, emb.theta);
    }

    // left inverse via reduced row echelon of [fwd | I]
    const unsigned E = emb.e_big, e = emb.e_small;
    const std::uint64_t p = emb.p;
    const unsigned width = e + E;
    std::vector<std::uint64_t> M(static_cast<std::size_t>(E) * width, 0);
    for (unsigned r = 0; r < E; ++r) {
        for (unsigned c = 0; c < e; ++c) M[static_cast<std::size_t>(r) * width + c] = emb.fwd[static_cast<std::size_t>(r) * e + c];
        M[static_cast<std::size_t>(r) * width + e + r] = 1;
    }
    unsigned rank = 0;
    for (unsigned col = 0; col < e; ++col) {
        unsigned sel = rank;
        while (sel < E && M[static_cast<std::size_t>(sel) * width + col] == 0) ++sel;
        if (sel == E) throw std::logic_error("make_embedding: generator powers are dependent");
        if (sel != rank)
            for (unsigned j = 0; j < width; ++j)
                std::swap(M[static_cast<std::size_t>(sel) * width + j], M[static_cast<std::size_t>(rank) * width + j]);
        const std::uint64_t d = inv_mod(M[static_cast<std::size_t>(rank) * width + col], p);
        for (unsigned j = 0; j < width; ++j)
            M[static_cast<std::size_t>(rank) * width + j] = mul_mod(d, M[static_cast<std::size_t>(rank) * width + j], p);
        for (unsigned r = 0; r < E; ++r) {
            if (r == rank) continue;
            const std::uint64_t f = M[static_cast<std::size_t>(r) * width + col];
            if (!f) continue;
            for (unsigned j = 0; j < width; ++j)
                M[static_cast<std::size_t>(r) * width + j] =
                    sub_mod(M[static_cast<std::size_t>(r) * width + j],
                            mul_mod(f, M[static_cast<std::size_t>(rank) * width + j], p), p);
        }
        ++rank;
    }
    emb.sec.assign(static_cast<std::size_t>(e) * E, 0);
    for (unsigned r = 0; r < e; ++r)
        for (unsigned j = 0; j < E; ++j) emb.sec[static_cast<std::size_t>(r) * E + j] = M[static_cast<std::size_t>(r) * width + e + j];
    return emb;
}

} // namespace ladderlab::fq
