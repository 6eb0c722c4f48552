#pragma once
// Audits of prime-counting bounds  A*x <= pi(x)*ln x <= B*x  and of the
// prime-gap ratio bound p_next <= a*p, over exact prime data.
//
// The pi audit never evaluates ln x in floating point: each comparison uses
// a certified rational enclosure of ln x (interval.hpp) and yields a
// tri-state verdict. To keep the scan fast, x-values are grouped into blocks
// on which pi is constant; there n*ln x - A*x is increasing-then-decreasing
// and B*x - n*ln x is decreasing-then-increasing (turning points n/A, n/B),
// so each monotone piece is settled by probing its endpoints and, when the
// verdict flips inside, binary-searching the crossover. Verdicts for
// unprobed x follow from monotonicity, not from extra numerics.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "error.hpp"
#include "interval.hpp"
#include "numth.hpp"
#include "parallel.hpp"
#include "rational.hpp"

namespace ladderlab {

enum class TriState { holds, fails, indeterminate };

inline const char* to_string(TriState t) {
    switch (t) {
        case TriState::holds: return "holds";
        case TriState::fails: return "fails";
        default: return "indeterminate";
    }
}

struct PiAuditRecord {
    std::uint64_t x = 0;
    std::uint64_t pi_x = 0;
    TriState lower_ok = TriState::holds; // A*x <= pi(x)*ln x
    TriState upper_ok = TriState::holds; // pi(x)*ln x <= B*x

    bool operator==(const PiAuditRecord&) const = default;
};

struct GapAuditRecord {
    std::uint64_t p = 0;
    std::uint64_t p_next = 0;
    Rational bound;
    bool violated = false;
};

struct GapAuditResult {
    GapAuditRecord max_ratio_pair;
    std::vector<GapAuditRecord> violations;
};

inline constexpr unsigned kLogBitsBase = 64;
inline constexpr unsigned kLogRefineRounds = 4; // 64 -> 128 -> 256 -> 512

namespace detail {

// Tri-state of "n*ln(x) >= r" (ge=true) or "n*ln(x) <= r" (ge=false) from a
// single enclosure at the given precision.
inline TriState nlog_cmp_once(std::uint64_t x, std::uint64_t n, const mpq_class& r, bool ge,
                              unsigned bits) {
    ival::Interval lnx = ival::log_enclosure(mpq_class(static_cast<unsigned long>(x)), bits);
    mpq_class lo = n * lnx.lo, hi = n * lnx.hi;
    if (ge) {
        if (lo >= r) return TriState::holds;
        if (hi < r) return TriState::fails;
    } else {
        if (hi <= r) return TriState::holds;
        if (lo > r) return TriState::fails;
    }
    return TriState::indeterminate;
}

// Same comparison with adaptive refinement until the enclosure clears the
// threshold or the precision ladder is exhausted.
inline TriState nlog_cmp(std::uint64_t x, std::uint64_t n, const mpq_class& r, bool ge,
                         unsigned base_bits = kLogBitsBase) {
    unsigned bits = base_bits;
    for (unsigned round = 0; round < kLogRefineRounds; ++round, bits *= 2) {
        TriState t = nlog_cmp_once(x, n, r, ge, bits);
        if (t != TriState::indeterminate) return t;
    }
    return TriState::indeterminate;
}

} // namespace detail

// Exact prime count via a sieve owned by the caller.
inline std::uint64_t pi(const Sieve& sieve, std::uint64_t x) { return sieve.pi(x); }

inline std::uint64_t pi(std::uint64_t x, std::uint64_t cap = kDefaultSieveLimit) {
    if (x > cap) throw limit_exceeded("pi: x exceeds sieve limit");
    Sieve s(x < 2 ? 2 : x);
    return s.pi(x);
}

// Single-point audit record, exposed so callers can compare verdicts across
// precisions (a reported verdict must be stable under refinement).
inline PiAuditRecord audit_pi_point(std::uint64_t x, std::uint64_t pi_x, const Rational& A,
                                    const Rational& B, unsigned base_bits = kLogBitsBase) {
    PiAuditRecord rec{x, pi_x, TriState::holds, TriState::holds};
    mpq_class rA = A.raw() * static_cast<unsigned long>(x);
    mpq_class rB = B.raw() * static_cast<unsigned long>(x);
    rec.lower_ok = detail::nlog_cmp(x, pi_x, rA, /*ge=*/true, base_bits);
    rec.upper_ok = detail::nlog_cmp(x, pi_x, rB, /*ge=*/false, base_bits);
    return rec;
}

namespace detail {

// One pi-constant block [u, v] (so pi(x) = n throughout), one bound.
// `ge` selects the comparison n*ln x >= r(x) (lower bound) vs <= (upper);
// r(x) = c*x. Emits (x, verdict) pairs for every non-holding x via `emit`.
//
// On a piece where the quantity n*ln x - c*x is monotone, the holds-set is a
// prefix or suffix; endpoints are probed and an interior flip is located by
// binary search. If any probe stays indeterminate after refinement, the
// piece falls back to exhaustive per-point evaluation (prime gaps are small,
// so this is cheap and keeps every emitted verdict individually certified).
template <class Emit>
void audit_block_bound(std::uint64_t u, std::uint64_t v, std::uint64_t n, const mpq_class& c,
                       bool ge, Emit&& emit) {
    auto probe = [&](std::uint64_t x) {
        return nlog_cmp(x, n, mpq_class(c * static_cast<unsigned long>(x)), ge);
    };
    auto exhaustive = [&](std::uint64_t a, std::uint64_t b) {
        for (std::uint64_t x = a; x <= b; ++x) {
            TriState t = probe(x);
            if (t != TriState::holds) emit(x, t);
        }
    };
    // Piece handler: P(x) = "bound holds at x" is nondecreasing over the
    // piece when holds_right (false -> true), nonincreasing otherwise.
    // For nondecreasing P: P(a) holds => all hold; P(b) fails => all fail.
    // For nonincreasing P the ends swap roles.
    auto piece = [&](std::uint64_t a, std::uint64_t b, bool holds_right) {
        if (a > b) return;
        std::uint64_t hold_end = holds_right ? a : b; // holds here => holds everywhere
        std::uint64_t fail_end = holds_right ? b : a; // fails here => fails everywhere
        TriState t_hold = probe(hold_end);
        if (t_hold == TriState::indeterminate) return exhaustive(a, b);
        if (t_hold == TriState::holds) return; // entire piece holds
        if (a == b) {
            emit(a, TriState::fails);
            return;
        }
        TriState t_fail = probe(fail_end);
        if (t_fail == TriState::indeterminate) return exhaustive(a, b);
        if (t_fail == TriState::fails) { // entire piece fails
            for (std::uint64_t x = a; x <= b; ++x) emit(x, TriState::fails);
            return;
        }
        // P flips exactly once strictly inside; binary search the boundary.
        // Invariant: P fails at `bad`, holds at `good`.
        std::uint64_t bad = hold_end, good = fail_end;
        while (bad > good ? bad - good > 1 : good - bad > 1) {
            std::uint64_t mid = (bad + good) / 2;
            TriState tm = probe(mid);
            if (tm == TriState::indeterminate) return exhaustive(a, b);
            (tm == TriState::holds ? good : bad) = mid;
        }
        if (holds_right) { // [a, bad] fails, [good, b] holds
            for (std::uint64_t x = a; x <= bad; ++x) emit(x, TriState::fails);
        } else { // [a, good] holds, [bad, b] fails
            for (std::uint64_t x = bad; x <= b; ++x) emit(x, TriState::fails);
        }
    };
    // Turning point of n*ln x - c*x is x* = n/c; split [u, v] around it.
    // Lower bound (ge): increasing then decreasing => P false->true then
    // true->false. Upper bound: the pieces swap roles.
    mpq_class xstar(static_cast<unsigned long>(n));
    xstar /= c;
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), xstar.get_num().get_mpz_t(), xstar.get_den().get_mpz_t());
    std::uint64_t split; // last x of the first piece
    if (fl < 0) split = 0;
    else if (fl >= static_cast<unsigned long>(v)) split = v;
    else split = static_cast<std::uint64_t>(fl.get_ui());
    if (split >= u) {
        piece(u, split, /*holds_right=*/ge);
        if (split < v) piece(split + 1, v, /*holds_right=*/!ge);
    } else {
        piece(u, v, /*holds_right=*/!ge);
    }
}

} // namespace detail

// Scan integer x in (30, X]; return a record for every x where either bound
// fails or is indeterminate (both verdicts included in the record). Records
// are sorted by x and independent of the thread count.
inline std::vector<PiAuditRecord> audit_pi_bounds(std::uint64_t X, const Rational& A,
                                                  const Rational& B, unsigned threads = 1,
                                                  std::uint64_t cap = kDefaultSieveLimit,
                                                  const Sieve* pre = nullptr) {
    if (A.raw() <= 0 || B.raw() <= 0) throw std::invalid_argument("audit_pi_bounds: A, B must be positive");
    if (X > cap) throw limit_exceeded("audit_pi_bounds: X exceeds sieve limit");
    std::vector<PiAuditRecord> out;
    if (X <= 30) return out;
    std::optional<Sieve> own;
    const Sieve& sieve = (pre && pre->limit() >= X) ? *pre : own.emplace(X);
    const auto& ps = sieve.primes();
    // Blocks of constant pi: [p_i, p_{i+1}-1] clipped to (30, X]. x in
    // [31, first prime > 30) has pi = pi(30) = 10; 31 is prime so x = 31
    // starts a block and no pre-block is needed below it.
    struct Block { std::uint64_t u, v, n; };
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < ps.size(); ++i) {
        if (ps[i] > X) break;
        std::uint64_t u = ps[i];
        std::uint64_t v = (i + 1 < ps.size() && ps[i + 1] <= X) ? ps[i + 1] - 1 : X;
        if (v <= 30) continue;
        if (u < 31) u = 31;
        if (u > v) continue;
        blocks.push_back({u, v, i + 1});
    }
    std::vector<std::vector<PiAuditRecord>> per_block(blocks.size());
    parallel_for(blocks.size(), threads, [&](std::size_t bi) {
        const Block& b = blocks[bi];
        // Gather non-holding verdicts per bound, then merge on x.
        std::vector<std::pair<std::uint64_t, TriState>> low_bad, up_bad;
        detail::audit_block_bound(b.u, b.v, b.n, A.raw(), /*ge=*/true,
                                  [&](std::uint64_t x, TriState t) { low_bad.emplace_back(x, t); });
        detail::audit_block_bound(b.u, b.v, b.n, B.raw(), /*ge=*/false,
                                  [&](std::uint64_t x, TriState t) { up_bad.emplace_back(x, t); });
        if (low_bad.empty() && up_bad.empty()) return;
        std::size_t i = 0, j = 0;
        while (i < low_bad.size() || j < up_bad.size()) {
            std::uint64_t xl = i < low_bad.size() ? low_bad[i].first : UINT64_MAX;
            std::uint64_t xu = j < up_bad.size() ? up_bad[j].first : UINT64_MAX;
            std::uint64_t x = xl < xu ? xl : xu;
            PiAuditRecord rec{x, b.n, TriState::holds, TriState::holds};
            if (xl == x) rec.lower_ok = low_bad[i++].second;
            if (xu == x) rec.upper_ok = up_bad[j++].second;
            per_block[bi].push_back(rec);
        }
    });
    for (auto& v : per_block) out.insert(out.end(), v.begin(), v.end());
    return out;
}

// Scan consecutive prime pairs (p, p_next) with lo <= p <= hi; the violation
// test p_next*a.den > a.num*p and the max-ratio comparison are exact integer
// arithmetic throughout.
inline GapAuditResult audit_gap_ratio(const Rational& a, std::uint64_t lo, std::uint64_t hi,
                                      std::uint64_t cap = kDefaultSieveLimit,
                                      const Sieve* pre = nullptr) {
    if (lo < 2) throw std::invalid_argument("audit_gap_ratio: need lo >= 2");
    if (hi > cap) throw limit_exceeded("audit_gap_ratio: hi exceeds sieve limit");
    if (a.raw() <= 0) throw std::invalid_argument("audit_gap_ratio: bound must be positive");
    // Need the next prime after the largest p <= hi; extend the sieve until
    // it is present (gap margins are tiny at these sizes).
    std::vector<std::uint64_t> ps;
    if (pre && !pre->primes().empty() && pre->primes().back() > hi) {
        ps = pre->primes();
    } else {
        std::uint64_t limit = hi + 512;
        for (;;) {
            ps = segmented_primes(limit);
            if (!ps.empty() && ps.back() > hi) break;
            limit += limit / 2 + 512;
        }
    }
    GapAuditResult res;
    bool have_any = false;
    const mpz_class& anum = a.num();
    const mpz_class& aden = a.den();
    for (std::size_t i = 0; i + 1 < ps.size(); ++i) {
        std::uint64_t p = ps[i];
        if (p < lo) continue;
        if (p > hi) break;
        std::uint64_t pn = ps[i + 1];
        GapAuditRecord rec{p, pn, a, false};
        mpz_class lhs = mpz_class(static_cast<unsigned long>(pn)) * aden;
        mpz_class rhs = anum * static_cast<unsigned long>(p);
        rec.violated = lhs > rhs;
        if (rec.violated) res.violations.push_back(rec);
        if (!have_any) {
            res.max_ratio_pair = rec;
            have_any = true;
        } else {
            // pn/p > best.p_next/best.p  <=>  pn*best.p > best.p_next*p
            unsigned __int128 l = static_cast<unsigned __int128>(pn) * res.max_ratio_pair.p;
            unsigned __int128 r =
                static_cast<unsigned __int128>(res.max_ratio_pair.p_next) * p;
            if (l > r) res.max_ratio_pair = rec;
        }
    }
    if (!have_any) throw std::invalid_argument("audit_gap_ratio: no prime pair in range");
    return res;
}

namespace detail {

// Enclosure of max(30, base^expo) for interval base > 1, expo > 0, refined
// until the relative width is <= 10^-6.
inline ival::Interval threshold_from(const ival::Interval& base, const ival::Interval& expo) {
    const mpq_class rel_target(1, 1000000);
    for (unsigned bits = 48; bits <= 1024; bits *= 2) {
        ival::Interval v = ival::pow_enclosure(base, expo, bits);
        if (v.hi <= 30) return ival::Interval{30, 30};
        ival::Interval clamped{v.lo < 30 ? mpq_class(30) : v.lo, v.hi};
        if ((clamped.hi - clamped.lo) <= rel_target * clamped.lo) return clamped;
    }
    throw precision_too_small("gap_threshold: enclosure failed to narrow");
}

} // namespace detail

// Enclosure of max(30, a^(6/(5a-6))) — the point beyond which the gap bound
// p_next <= a*p is claimed.
inline ival::Interval gap_threshold(const Rational& a) {
    mpq_class denom = 5 * a.raw() - 6;
    if (denom <= 0) throw std::invalid_argument("gap_threshold: need a > 6/5");
    mpq_class q = 6 / denom;
    return detail::threshold_from(ival::Interval{a.raw(), a.raw()}, ival::Interval{q, q});
}

// Same threshold when only a^2 is rational: a is enclosed by a certified
// square root first and the exponent 6/(5a-6) becomes an interval.
inline ival::Interval gap_threshold_sqrt(const Rational& a_squared) {
    if (a_squared.raw() <= mpq_class(36, 25))
        throw std::invalid_argument("gap_threshold_sqrt: need a^2 > 36/25");
    const mpq_class rel_target(1, 1000000);
    for (unsigned bits = 48; bits <= 1024; bits *= 2) {
        ival::Interval a = ival::sqrt_enclosure(a_squared.raw(), bits);
        mpq_class d_lo = 5 * a.lo - 6, d_hi = 5 * a.hi - 6;
        if (d_lo <= 0) continue; // root enclosure still too wide
        ival::Interval expo{6 / d_hi, 6 / d_lo};
        ival::Interval v = ival::pow_enclosure(a, expo, bits);
        if (v.hi <= 30) return ival::Interval{30, 30};
        ival::Interval clamped{v.lo < 30 ? mpq_class(30) : v.lo, v.hi};
        if ((clamped.hi - clamped.lo) <= rel_target * clamped.lo) return clamped;
    }
    throw precision_too_small("gap_threshold_sqrt: enclosure failed to narrow");
}

} // namespace ladderlab
