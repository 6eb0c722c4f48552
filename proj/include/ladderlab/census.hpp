#pragma once
// Census of mod-p Hecke eigensystems in level one.
//
// For each even weight k with 12 <= k <= p+1, the cusp space mod p is split
// into simultaneous generalized eigenspaces of the Hecke operators T_ell for
// the "separator" primes ell <= L.  Splitting walks a tower of extension
// fields: whenever a characteristic polynomial factor has degree > 1 the
// working field is enlarged and one root (the least in the canonical
// encoding) is followed; the discarded roots are Frobenius conjugates of the
// kept one, so each weight yields a list of orbit representatives together
// with the minimal field F_{p^e} containing the eigenvalue tuple.
//
// Counting then uses the joint action of Frobenius and cyclotomic twisting
// (a_ell -> ell^i a_ell), an abelian group of order e*(p-1) acting on each
// representative's orbit: distinct systems are counted by orbit-stabilizer
// instead of being materialized.  Reducible systems (a_ell = ell^alpha +
// ell^beta) are recognized, excluded from the orbit seeding, and counted by
// the closed formula (p-1)^2/4.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "ladderlab/error.hpp"
#include "ladderlab/fq.hpp"
#include "ladderlab/modforms.hpp"
#include "ladderlab/numth.hpp"
#include "ladderlab/parallel.hpp"
#include "ladderlab/rational.hpp"

namespace ladderlab {

struct CensusOptions {
    std::uint64_t separator_override = 0; // 0 = default bound below
    unsigned threads = 1;                 // parallelism across weights
    std::uint64_t max_p = 1000;           // resource guard
    // Optional prebuilt series tables (e.g. loaded from an on-disk cache).
    // Must cover the geometry reported by census_geometry for this p.
    const modforms::FpSeriesTables* tables = nullptr;
};

// one Frobenius-orbit representative found in one weight
struct ModularSystem {
    unsigned e = 1;              // minimal field degree of the value tuple
    std::vector<fq::Fq> a;       // a_ell in canonical F_{p^e}, aligned with the separator primes
    unsigned multiplicity = 0;   // generalized-eigenspace dimension (same for each conjugate)
    bool reducible = false;
    std::uint64_t red_alpha = 0, red_beta = 0; // exponent pair when reducible
};

struct WeightCensus {
    std::uint64_t k = 0;
    unsigned dim = 0;
    std::vector<ModularSystem> systems; // deterministic construction order
};

// one deduplicated twist orbit, with the list of weights it shows up in
struct OrbitSummary {
    unsigned e = 1;                     // field degree of the representative
    std::uint64_t orbit_size = 0;       // distinct systems in the joint orbit
    std::vector<std::uint64_t> weights; // ascending, deduplicated
};

struct CensusReport {
    std::uint64_t p = 0;
    std::uint64_t separator = 0;
    std::vector<std::uint64_t> separator_primes;
    std::vector<WeightCensus> weights;   // weights with nonzero cusp space only
    std::vector<OrbitSummary> orbits;    // one entry per deduplicated orbit
    std::uint64_t orbit_count = 0;       // == orbits.size()
    std::uint64_t n_irreducible = 0;
    std::uint64_t n_reducible = 0;
    std::uint64_t n_total = 0;
    unsigned max_e = 1;
    std::uint64_t near_collisions = 0;
    std::vector<std::string> anomalies;
    Rational ratio;                      // 48 * n_total / p^3
};

inline std::uint64_t census_separator_bound(std::uint64_t p) {
    return std::max<std::uint64_t>(13, (p + 1 + 5) / 6); // ceil((p+1)/6)
}

inline std::vector<std::uint64_t> census_separator_primes(std::uint64_t p, std::uint64_t bound) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t q = 2; q <= bound; ++q)
        if (q != p && is_prime(q)) out.push_back(q);
    return out;
}

// Shape of the series tables the sweep needs: which weights have cusp forms,
// the common precision, and the largest Delta / E4 powers any weight uses.
// Exposed so callers can build (or cache) the tables up front.
struct CensusGeometry {
    std::vector<std::uint64_t> klist; // even weights in [12, p+1] with dim > 0
    std::size_t prec = 0;
    unsigned jmax = 0;                // largest cusp dimension
    std::uint64_t amax = 0;           // largest E4 exponent
};

inline CensusGeometry census_geometry(std::uint64_t p, std::uint64_t largest_separator) {
    CensusGeometry g;
    for (std::uint64_t k = 12; k <= p + 1; k += 2)
        if (modforms::dim_cusp_forms(k) > 0) g.klist.push_back(k);
    if (g.klist.empty()) return g;
    for (const std::uint64_t k : g.klist)
        g.jmax = std::max(g.jmax, modforms::dim_cusp_forms(k));
    g.prec = static_cast<std::size_t>(largest_separator) * (g.jmax + 1) + 1;
    g.amax = (g.klist.back() - 12) / 4;
    return g;
}

// reducible pattern check: a_ell = ell^alpha + ell^beta with
// alpha + beta = k-1 (mod p-1); returns the pair with alpha <= beta
inline std::optional<std::pair<std::uint64_t, std::uint64_t>> reducible_exponents(
    std::uint64_t p, std::uint64_t k, const std::vector<std::uint64_t>& primes,
    const std::vector<std::uint64_t>& values) {
    const std::uint64_t m = p - 1;
    const std::uint64_t target = (k - 1) % m;
    for (std::uint64_t alpha = 0; alpha < m; ++alpha) {
        const std::uint64_t beta = (target + m - alpha) % m;
        if (beta < alpha) continue;
        bool ok = true;
        for (std::size_t j = 0; j < primes.size(); ++j) {
            const std::uint64_t ell = primes[j] % p;
            const std::uint64_t want =
                fq::add_mod(fq::pow_mod(ell, alpha, p), fq::pow_mod(ell, beta, p), p);
            if (want != values[j]) { ok = false; break; }
        }
        if (ok) return std::make_pair(alpha, beta);
    }
    return std::nullopt;
}

namespace census_detail {

struct CtxCache {
    std::uint64_t p;
    std::map<unsigned, std::unique_ptr<fq::FqCtx>> ctx;
    explicit CtxCache(std::uint64_t p_) : p(p_) {}
    const fq::FqCtx& get(unsigned e) {
        auto& slot = ctx[e];
        if (!slot) slot = std::make_unique<fq::FqCtx>(p, e);
        return *slot;
    }
};

inline fq::FqMat mat_pow(const fq::FqCtx& K, fq::FqMat base, unsigned n) {
    fq::FqMat acc = fq::mat_identity(K, base.rows);
    while (n) {
        if (n & 1) acc = fq::mat_mul(K, acc, base);
        n >>= 1;
        if (n) base = fq::mat_mul(K, base, base);
    }
    return acc;
}

// basis of ker((A - lam)^mult), the generalized eigenspace of lam
inline std::vector<std::vector<fq::Fq>> generalized_kernel(const fq::FqCtx& K,
                                                           const fq::FqMat& A,
                                                           const fq::Fq& lam, unsigned mult) {
    fq::FqMat B = A;
    for (unsigned i = 0; i < B.rows; ++i) B.at(i, i) = K.sub(B.at(i, i), lam);
    return fq::mat_kernel(K, mat_pow(K, std::move(B), mult));
}

// matrix of A restricted to the span of W (columns), which must be invariant
inline fq::FqMat restrict_to(const fq::FqCtx& K, const fq::FqMat& A,
                             const std::vector<std::vector<fq::Fq>>& W) {
    const unsigned d = A.rows, r = static_cast<unsigned>(W.size());
    fq::FqMat M(K, d, 2 * r);
    for (unsigned j = 0; j < r; ++j) {
        const auto aw = fq::mat_apply(K, A, W[j]);
        for (unsigned i = 0; i < d; ++i) {
            M.at(i, j) = W[j][i];
            M.at(i, r + j) = aw[i];
        }
    }
    for (unsigned col = 0; col < r; ++col) {
        unsigned sel = col;
        while (sel < d && K.is_zero(M.at(sel, col))) ++sel;
        if (sel == d) throw std::logic_error("census: subspace basis is degenerate");
        if (sel != col)
            for (unsigned j = 0; j < 2 * r; ++j) std::swap(M.at(sel, j), M.at(col, j));
        const fq::Fq inv = K.inv(M.at(col, col));
        for (unsigned j = col; j < 2 * r; ++j) M.at(col, j) = K.mul(inv, M.at(col, j));
        for (unsigned i = 0; i < d; ++i) {
            if (i == col) continue;
            const fq::Fq f = M.at(i, col);
            if (K.is_zero(f)) continue;
            for (unsigned j = col; j < 2 * r; ++j)
                M.at(i, j) = K.sub(M.at(i, j), K.mul(f, M.at(col, j)));
        }
    }
    for (unsigned i = r; i < d; ++i)
        for (unsigned j = 0; j < r; ++j)
            if (!K.is_zero(M.at(i, r + j)))
                throw std::logic_error("census: subspace is not invariant");
    fq::FqMat C(K, r, r);
    for (unsigned i = 0; i < r; ++i)
        for (unsigned j = 0; j < r; ++j) C.at(i, j) = M.at(i, r + j);
    return C;
}

inline fq::FqMat embed_matrix(const fq::FqCtx& K2, const fq::Embedding& emb, const fq::FqMat& A) {
    fq::FqMat B(K2, A.rows, A.cols);
    for (unsigned i = 0; i < A.rows; ++i)
        for (unsigned j = 0; j < A.cols; ++j) B.at(i, j) = emb.embed(A.at(i, j));
    return B;
}

struct RawSystem {
    unsigned E = 1;              // working field at the end of the branch
    std::vector<fq::Fq> values;  // eigenvalue tuple over F_{p^E}
    unsigned mult = 0;
};

// depth-first simultaneous splitting; `mats` holds the operators still to be
// processed, already restricted to the current invariant subspace
inline void split_branch(CtxCache& cache, unsigned e, const std::vector<fq::FqMat>& mats,
                         std::vector<fq::Fq> vals, unsigned dim, std::mt19937_64& rng,
                         std::vector<RawSystem>& out) {
    if (mats.empty()) {
        out.push_back(RawSystem{e, std::move(vals), dim});
        return;
    }
    const auto& K = cache.get(e);
    const fq::FqMat& A = mats.front();
    const auto factors = fq::factor_monic(K, fq::charpoly(K, A), rng);
    for (const auto& fp : factors) {
        const long df = fq::poly_deg(fp.factor);
        if (df == 1) {
            const fq::Fq lam = K.neg(fp.factor[0]);
            const auto W = generalized_kernel(K, A, lam, fp.mult);
            if (W.size() != fp.mult)
                throw std::logic_error("census: eigenspace dimension mismatch");
            std::vector<fq::FqMat> rest;
            rest.reserve(mats.size() - 1);
            for (std::size_t t = 1; t < mats.size(); ++t)
                rest.push_back(restrict_to(K, mats[t], W));
            auto v2 = vals;
            v2.push_back(lam);
            split_branch(cache, e, rest, std::move(v2), static_cast<unsigned>(W.size()), rng, out);
        } else {
            const unsigned e2 = e * static_cast<unsigned>(df);
            const auto& K2 = cache.get(e2);
            const auto emb = fq::make_embedding(K, K2, rng);
            fq::Fq lam; // least root of the lifted factor, the canonical choice
            if (e == 1) {
                std::vector<std::uint64_t> fc;
                fc.reserve(fp.factor.size());
                for (const auto& c : fp.factor) fc.push_back(c.c[0]);
                lam = fq::least_root_of_fp_poly(K2, std::move(fc), rng);
            } else {
                fq::FqPoly f2;
                f2.reserve(fp.factor.size());
                for (const auto& c : fp.factor) f2.push_back(emb.embed(c));
                const auto roots = fq::poly_roots(K2, std::move(f2), rng);
                if (roots.empty()) throw std::logic_error("census: lifted factor has no root");
                lam = roots.front();
            }
            const fq::FqMat A2 = embed_matrix(K2, emb, A);
            const auto W = generalized_kernel(K2, A2, lam, fp.mult);
            if (W.size() != fp.mult)
                throw std::logic_error("census: eigenspace dimension mismatch");
            std::vector<fq::FqMat> rest;
            rest.reserve(mats.size() - 1);
            for (std::size_t t = 1; t < mats.size(); ++t)
                rest.push_back(restrict_to(K2, embed_matrix(K2, emb, mats[t]), W));
            std::vector<fq::Fq> v2;
            v2.reserve(vals.size() + 1);
            for (const auto& v : vals) v2.push_back(emb.embed(v));
            v2.push_back(lam);
            split_branch(cache, e2, rest, std::move(v2), static_cast<unsigned>(W.size()), rng, out);
        }
    }
}

// least divisor t of the field degree with Frob^t fixing every entry
inline unsigned minimal_field_degree(const fq::FqCtx& K, const std::vector<fq::Fq>& vals) {
    const unsigned E = K.degree();
    for (unsigned t = 1; t < E; ++t) {
        if (E % t) continue;
        const auto M = fq::frob_power_matrix(K, t);
        bool fixed = true;
        for (const auto& v : vals)
            if (!(fq::apply_fp_matrix(K, M, v) == v)) { fixed = false; break; }
        if (fixed) return t;
    }
    return E;
}

// rewrite the tuple into the canonical field of degree t | K.degree()
inline std::vector<fq::Fq> descend_values(CtxCache& cache, const fq::FqCtx& K, unsigned t,
                                          const std::vector<fq::Fq>& vals,
                                          std::mt19937_64& rng) {
    if (t == K.degree()) return vals;
    const auto& Kt = cache.get(t);
    const auto emb = fq::make_embedding(Kt, K, rng);
    std::vector<fq::Fq> out;
    out.reserve(vals.size());
    for (const auto& v : vals) {
        auto y = emb.section(v);
        if (!y) throw std::logic_error("census: field descent failed");
        out.push_back(std::move(*y));
    }
    return out;
}

// number of twist exponents i in [0, p-1) with ell_j^i * cur[j] == b[j] for
// every separator; the first nonzero coordinate of b pins the twist scalar,
// so only the exponents hitting it through a discrete-log lookup are tried
// instead of all p-1 (each candidate is still verified in full)
inline std::uint64_t count_twist_matches(const fq::FqCtx& K, std::uint64_t p,
                                         const std::vector<std::vector<std::uint64_t>>& powtab,
                                         const std::vector<fq::Fq>& cur,
                                         const std::vector<fq::Fq>& b, bool stop_at_one) {
    std::size_t anchor = b.size();
    for (std::size_t j = 0; j < b.size(); ++j)
        if (!K.is_zero(b[j])) { anchor = j; break; }
    if (anchor == b.size()) { // zero tuple: any twist works iff cur is zero too
        for (const auto& v : cur)
            if (!K.is_zero(v)) return 0;
        return stop_at_one ? 1 : p - 1;
    }
    if (K.is_zero(cur[anchor])) return 0;
    const fq::Fq d = K.mul(b[anchor], K.inv(cur[anchor]));
    for (std::size_t i = 1; i < d.c.size(); ++i)
        if (d.c[i]) return 0; // required twist is not a prime-field scalar
    const std::uint64_t want = d.c[0];
    std::uint64_t i0 = p, ord = p - 1;
    for (std::uint64_t i = 0; i + 1 < p; ++i) {
        if (i0 == p && powtab[anchor][i] == want) i0 = i;
        if (i && powtab[anchor][i] == 1) { ord = i; break; } // cycle closed
    }
    if (i0 == p) return 0;
    std::uint64_t hits = 0;
    for (std::uint64_t i = i0; i + 1 < p; i += ord) {
        bool ok = true;
        for (std::size_t j = 0; j < cur.size(); ++j)
            if (!(K.scale(powtab[j][i], cur[j]) == b[j])) { ok = false; break; }
        if (ok) {
            ++hits;
            if (stop_at_one) return hits;
        }
    }
    return hits;
}

// twist-and-Frobenius orbit equivalence: exists (sigma, i) with
// ell^i * Frob^sigma(a_ell) = b_ell for every separator prime
inline bool same_joint_orbit(const fq::FqCtx& K, std::uint64_t p,
                             const std::vector<std::vector<std::uint64_t>>& powtab,
                             const std::vector<fq::Fq>& a, const std::vector<fq::Fq>& b) {
    const unsigned e = K.degree();
    std::vector<fq::Fq> cur = a;
    for (unsigned sigma = 0; sigma < e; ++sigma) {
        if (sigma)
            for (auto& v : cur) v = K.frob(v);
        if (count_twist_matches(K, p, powtab, cur, b, true)) return true;
    }
    return false;
}

// orbit-stabilizer count of distinct systems in the joint orbit
inline std::uint64_t joint_orbit_size(const fq::FqCtx& K, std::uint64_t p,
                                      const std::vector<std::vector<std::uint64_t>>& powtab,
                                      const std::vector<fq::Fq>& a) {
    const unsigned e = K.degree();
    std::uint64_t stab = 0;
    std::vector<fq::Fq> cur = a;
    for (unsigned sigma = 0; sigma < e; ++sigma) {
        if (sigma)
            for (auto& v : cur) v = K.frob(v);
        stab += count_twist_matches(K, p, powtab, cur, a, false);
    }
    const std::uint64_t total = static_cast<std::uint64_t>(e) * (p - 1);
    if (stab == 0 || total % stab)
        throw std::logic_error("census: stabilizer does not divide the group order");
    return total / stab;
}

// bucket invariant for deduplication: minimal polynomial over F_p of
// a_2^(p-1), unchanged by both twisting and Frobenius
inline std::string orbit_bucket_key(const fq::FqCtx& K, std::uint64_t p,
                                    const ModularSystem& s) {
    const fq::Fq w = K.pow(s.a[0], mpz_class(static_cast<unsigned long>(p - 1)));
    std::vector<fq::Fq> conj;
    fq::Fq c = w;
    do {
        conj.push_back(c);
        c = K.frob(c);
    } while (!(c == w));
    fq::FqPoly mp{K.one()};
    for (const auto& r : conj) mp = fq::poly_mul(K, mp, fq::FqPoly{K.neg(r), K.one()});
    std::ostringstream os;
    os << s.e << '|';
    for (const auto& cf : mp) {
        for (std::size_t i = 1; i < cf.c.size(); ++i)
            if (cf.c[i]) throw std::logic_error("census: invariant polynomial left the prime field");
        os << (cf.c.empty() ? 0 : cf.c[0]) << ',';
    }
    return os.str();
}

// canonical string for the value tuple with the largest separator dropped:
// descend to its minimal field, then take the least Frobenius conjugate
inline std::string prefix_key(CtxCache& cache, const ModularSystem& s, std::mt19937_64& rng) {
    std::vector<fq::Fq> pre(s.a.begin(), s.a.end() - 1);
    const auto& K = cache.get(s.e);
    const unsigned t = minimal_field_degree(K, pre);
    auto vals = descend_values(cache, K, t, pre, rng);
    const auto& Kt = cache.get(t);
    const auto encode_tuple = [&](const std::vector<fq::Fq>& w) {
        std::ostringstream os;
        for (const auto& v : w) os << Kt.encode(v).get_str() << ',';
        return os.str();
    };
    std::string best = encode_tuple(vals);
    for (unsigned sigma = 1; sigma < t; ++sigma) {
        for (auto& v : vals) v = Kt.frob(v);
        best = std::min(best, encode_tuple(vals));
    }
    return std::to_string(t) + '|' + best;
}

} // namespace census_detail

// eigensystems of one weight: orbit representatives with minimal fields
inline WeightCensus census_weight(std::uint64_t p, std::uint64_t k,
                                  const std::vector<std::uint64_t>& primes,
                                  const modforms::FpSeriesTables* tables = nullptr) {
    WeightCensus wc;
    wc.k = k;
    wc.dim = modforms::dim_cusp_forms(k);
    if (wc.dim == 0) return wc;
    if (primes.empty()) throw std::invalid_argument("census_weight: no separator primes");
    const std::uint64_t lmax = primes.back();
    const std::size_t prec = static_cast<std::size_t>(lmax) * (wc.dim + 1) + 1;
    const auto basis = modforms::victor_miller_basis_fp(k, prec, p, tables);

    census_detail::CtxCache cache(p);
    const auto& K1 = cache.get(1);
    std::vector<fq::FqMat> mats;
    mats.reserve(primes.size());
    for (const std::uint64_t ell : primes) {
        const auto M = modforms::hecke_matrix_fp(basis, k, ell, p);
        fq::FqMat A(K1, wc.dim, wc.dim);
        for (unsigned r = 0; r < wc.dim; ++r)
            for (unsigned c = 0; c < wc.dim; ++c) A.at(r, c) = K1.from_u64(M[r][c]);
        mats.push_back(std::move(A));
    }

    std::mt19937_64 rng((p << 24) ^ (k << 4) ^ 0x73797374ULL);
    std::vector<census_detail::RawSystem> raw;
    census_detail::split_branch(cache, 1, mats, {}, wc.dim, rng, raw);

    std::uint64_t covered = 0;
    for (auto& rs : raw) {
        const auto& KE = cache.get(rs.E);
        ModularSystem ms;
        ms.e = census_detail::minimal_field_degree(KE, rs.values);
        ms.a = census_detail::descend_values(cache, KE, ms.e, rs.values, rng);
        ms.multiplicity = rs.mult;
        covered += static_cast<std::uint64_t>(rs.mult) * ms.e;
        if (ms.e == 1) {
            std::vector<std::uint64_t> flat;
            flat.reserve(ms.a.size());
            for (const auto& v : ms.a) flat.push_back(v.c.empty() ? 0 : v.c[0]);
            if (const auto red = reducible_exponents(p, k, primes, flat)) {
                ms.reducible = true;
                ms.red_alpha = red->first;
                ms.red_beta = red->second;
            }
        }
        wc.systems.push_back(std::move(ms));
    }
    // every conjugate of every representative, with multiplicity, fills the space
    if (covered != wc.dim)
        throw std::logic_error("census_weight: eigensystem dimensions do not add up");
    return wc;
}

// For p in {2, 3} every weight in [12, p+1] is empty, so the sweep below
// degenerates to the hardcoded answer N_irred = 0 with only the reducible
// count surviving ((p-1)^2/4, i.e. 0 and 1).
inline CensusReport census(std::uint64_t p, const CensusOptions& opts = CensusOptions{}) {
    if (!is_prime(p)) throw std::invalid_argument("census: p must be prime");
    if (p > opts.max_p)
        throw resource_limit("census: p exceeds the resource bound " + std::to_string(opts.max_p));

    CensusReport rep;
    rep.p = p;
    rep.separator = opts.separator_override ? opts.separator_override : census_separator_bound(p);
    if (rep.separator < 2) throw std::invalid_argument("census: separator bound must be at least 2");
    rep.separator_primes = census_separator_primes(p, rep.separator);
    if (rep.separator_primes.empty())
        throw std::invalid_argument("census: no separator primes available");

    const CensusGeometry geom = census_geometry(p, rep.separator_primes.back());
    const modforms::FpSeriesTables* tables = opts.tables;
    modforms::FpSeriesTables local_tables;
    if (!geom.klist.empty()) {
        if (tables) {
            if (tables->p != p || tables->prec < geom.prec ||
                tables->delta_pow.size() <= geom.jmax || tables->e4_pow.size() <= geom.amax)
                throw std::invalid_argument(
                    "census: supplied series tables do not cover the required geometry");
        } else {
            local_tables = modforms::FpSeriesTables::build(p, geom.prec, geom.jmax, geom.amax);
            tables = &local_tables;
        }
    }

    rep.weights.assign(geom.klist.size(), WeightCensus{});
    parallel_for(geom.klist.size(), opts.threads, [&](std::size_t i) {
        rep.weights[i] = census_weight(p, geom.klist[i], rep.separator_primes, tables);
    });

    census_detail::CtxCache cache(p);
    std::mt19937_64 rng(0x63656e73ULL ^ (p << 20));
    const std::size_t nsep = rep.separator_primes.size();
    std::vector<std::vector<std::uint64_t>> powtab(nsep,
                                                   std::vector<std::uint64_t>(p - 1, 1 % p));
    for (std::size_t j = 0; j < nsep; ++j)
        for (std::uint64_t i = 1; i + 1 < p; ++i)
            powtab[j][i] = fq::mul_mod(powtab[j][i - 1], rep.separator_primes[j] % p, p);

    struct RepRef {
        std::size_t wi, si;
    };
    std::vector<RepRef> reps;
    std::map<std::string, std::vector<std::size_t>> buckets;
    for (std::size_t wi = 0; wi < rep.weights.size(); ++wi) {
        const std::uint64_t k = rep.weights[wi].k;
        for (std::size_t si = 0; si < rep.weights[wi].systems.size(); ++si) {
            const ModularSystem& s = rep.weights[wi].systems[si];
            rep.max_e = std::max(rep.max_e, s.e);
            if (s.reducible) continue;
            const auto& K = cache.get(s.e);
            auto& bucket = buckets[census_detail::orbit_bucket_key(K, p, s)];
            std::size_t hit = reps.size();
            for (const std::size_t ri : bucket) {
                const ModularSystem& t = rep.weights[reps[ri].wi].systems[reps[ri].si];
                if (t.e == s.e && census_detail::same_joint_orbit(K, p, powtab, t.a, s.a)) {
                    hit = ri;
                    break;
                }
            }
            if (hit < reps.size()) { // twist of an orbit already seen
                auto& ws = rep.orbits[hit].weights;
                if (ws.back() != k) ws.push_back(k); // weights scan in ascending order
                continue;
            }
            bucket.push_back(reps.size());
            reps.push_back(RepRef{wi, si});
            const std::uint64_t size = census_detail::joint_orbit_size(K, p, powtab, s.a);
            rep.orbits.push_back(OrbitSummary{s.e, size, {k}});
            rep.n_irreducible += size;
        }
    }
    rep.orbit_count = reps.size();
    rep.n_reducible = (p - 1) * (p - 1) / 4;
    rep.n_total = rep.n_irreducible + rep.n_reducible;
    const mpz_class pz(static_cast<unsigned long>(p));
    rep.ratio = Rational(48 * mpz_class(static_cast<unsigned long>(rep.n_total)), pz * pz * pz);

    // near-collisions: systems that agree at every separator except the largest
    if (nsep >= 2) {
        const auto note = [&](const std::string& msg) {
            if (rep.anomalies.size() < 8) rep.anomalies.push_back(msg);
        };
        for (const auto& wc : rep.weights) {
            std::map<std::string, std::vector<std::size_t>> ph;
            for (std::size_t si = 0; si < wc.systems.size(); ++si)
                ph[census_detail::prefix_key(cache, wc.systems[si], rng)].push_back(si);
            for (const auto& [key, group] : ph) {
                (void)key;
                if (group.size() < 2) continue;
                const std::uint64_t pairs = group.size() * (group.size() - 1) / 2;
                rep.near_collisions += pairs;
                note("near-collision: weight " + std::to_string(wc.k) + " has " +
                     std::to_string(group.size()) + " systems separated only by ell=" +
                     std::to_string(rep.separator_primes.back()));
            }
        }
        std::map<std::string, std::vector<std::size_t>> ph;
        for (std::size_t ri = 0; ri < reps.size(); ++ri) {
            const ModularSystem& s = rep.weights[reps[ri].wi].systems[reps[ri].si];
            ph[census_detail::prefix_key(cache, s, rng)].push_back(ri);
        }
        for (const auto& [key, group] : ph) {
            (void)key;
            for (std::size_t x = 0; x < group.size(); ++x) {
                for (std::size_t y = x + 1; y < group.size(); ++y) {
                    if (reps[group[x]].wi == reps[group[y]].wi) continue; // counted above
                    ++rep.near_collisions;
                    note("near-collision: weights " +
                         std::to_string(rep.weights[reps[group[x]].wi].k) + " and " +
                         std::to_string(rep.weights[reps[group[y]].wi].k) +
                         " share a system prefix");
                }
            }
        }
    }
    return rep;
}

} // namespace ladderlab
