#pragma once
// Exact elementary number theory: segmented sieve, deterministic 64-bit
// primality, Fermat-prime detection, exact odd prime-power divisors.
// Everything here is pure and value-based; a Sieve can be built once and
// shared read-only across threads.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ladderlab/error.hpp"

namespace ladderlab {

inline constexpr std::uint64_t kDefaultSieveLimit = 100'000'000;

// ---------------------------------------------------------------- modular --

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    if (m == 1) return 0;
    std::uint64_t acc = 1;
    base %= m;
    while (exp) {
        if (exp & 1) acc = mulmod_u64(acc, base, m);
        base = mulmod_u64(base, base, m);
        exp >>= 1;
    }
    return acc;
}

// -------------------------------------------------------------- primality --

// Deterministic Miller-Rabin for 64-bit inputs. The witness set
// {2,3,5,7,11,13,17,19,23,29,31,37} is known to be exact for n < 3.3e24,
// which covers the full uint64 range; certificates must not be probabilistic.
inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (std::uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        std::uint64_t x = powmod_u64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_u64(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

// True iff p is prime and p = 2^(2^t) + 1. Includes 3 (t=0) and 65537 (t=4):
// the predicate is the mathematical one, not just the members any particular
// range happens to contain.
inline bool is_fermat_prime(std::uint64_t p) {
    if (p < 3 || !is_prime(p)) return false;
    std::uint64_t q = p - 1;                       // must be 2^(2^t)
    if ((q & (q - 1)) != 0) return false;          // power of two?
    unsigned t = 0;
    while ((q & 1) == 0) { q >>= 1; ++t; }         // t = log2(p-1)
    return (t & (t - 1)) == 0;                     // exponent itself a power of two
}

// ------------------------------------------------------------------ sieve --

// Segmented sieve of Eratosthenes. Memory is bounded by the segment size
// (bytes of odd-index flags per chunk), not by the limit, so verification
// runs to 1e6..1e8 stay laptop-friendly.
inline std::vector<std::uint64_t> segmented_primes(std::uint64_t limit,
                                                   std::size_t segment_bytes = 1u << 20) {
    std::vector<std::uint64_t> out;
    if (limit < 2) return out;
    out.push_back(2);
    if (limit < 3) return out;

    // base primes up to sqrt(limit), simple odd sieve
    std::uint64_t root = 1;
    while ((root + 1) * (root + 1) <= limit) ++root;
    std::vector<std::uint8_t> base((root >> 1) + 1, 1); // base[i] ~ 2i+1
    for (std::uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= root; ++i) {
        if (!base[i]) continue;
        std::uint64_t p = 2 * i + 1;
        for (std::uint64_t j = (p * p) >> 1; j < base.size(); j += p) base[j] = 0;
    }
    std::vector<std::uint64_t> base_primes;
    for (std::uint64_t i = 1; i < base.size(); ++i)
        if (base[i]) base_primes.push_back(2 * i + 1);

    const std::uint64_t span = 2 * static_cast<std::uint64_t>(segment_bytes); // odds per segment
    std::vector<std::uint8_t> seg(segment_bytes);
    for (std::uint64_t lo = 3; lo <= limit; lo += span) {
        std::uint64_t hi = std::min(limit, lo + span - 1);
        std::size_t n = static_cast<std::size_t>((hi - lo) / 2 + 1); // odd candidates in [lo, hi]
        std::fill(seg.begin(), seg.begin() + n, 1);
        for (std::uint64_t p : base_primes) {
            if (p * p > hi) break;
            std::uint64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
            if ((start & 1) == 0) start += p;     // odd multiples only
            for (std::uint64_t v = start; v <= hi; v += 2 * p) seg[(v - lo) >> 1] = 0;
        }
        for (std::size_t i = 0; i < n; ++i)
            if (seg[i]) out.push_back(lo + 2 * i);
    }
    // lo starts at 3 (odd); even lo+2i stays odd. 2 was pushed up front.
    return out;
}

// Shared prime table with counting. Built once, read-only afterwards.
class Sieve {
  public:
    explicit Sieve(std::uint64_t limit, std::size_t segment_bytes = 1u << 20)
        : limit_(limit), primes_(segmented_primes(limit, segment_bytes)) {}

    // Adopt an already-computed table (e.g. from a checksummed cache). The
    // list must be exactly the ascending primes <= limit; only cheap shape
    // checks are performed here.
    Sieve(std::uint64_t limit, std::vector<std::uint64_t> primes)
        : limit_(limit), primes_(std::move(primes)) {
        if (!primes_.empty() && primes_.back() > limit_)
            throw std::invalid_argument("Sieve: prime table exceeds its declared limit");
    }

    std::uint64_t limit() const { return limit_; }
    const std::vector<std::uint64_t>& primes() const { return primes_; }

    // #{primes <= x}
    std::uint64_t pi(std::uint64_t x) const {
        if (x > limit_) throw limit_exceeded("pi(" + std::to_string(x) + ") beyond sieve limit " + std::to_string(limit_));
        return static_cast<std::uint64_t>(std::upper_bound(primes_.begin(), primes_.end(), x) - primes_.begin());
    }

    bool contains(std::uint64_t x) const {
        if (x > limit_) throw limit_exceeded("membership beyond sieve limit");
        return std::binary_search(primes_.begin(), primes_.end(), x);
    }

  private:
    std::uint64_t limit_;
    std::vector<std::uint64_t> primes_;
};

// All primes <= X, ascending. `cap` is the configured sieve limit.
inline std::vector<std::uint64_t> primes_up_to(std::uint64_t X, std::uint64_t cap = kDefaultSieveLimit) {
    if (X > cap)
        throw limit_exceeded("primes_up_to(" + std::to_string(X) + ") above configured cap " + std::to_string(cap));
    return segmented_primes(X);
}

// ---------------------------------------------------------- factorization --

struct PrimePower {
    std::uint64_t ell;   // odd prime
    unsigned r;          // exponent
    std::uint64_t value; // ell^r

    friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

// All (ell, r) with ell an odd prime, ell^r | n, ell^(r+1) ∤ n; ascending by
// value. Trial division; inputs here are ladder-scale (P-1 <= 2e8), for which
// this is plenty.
inline std::vector<PrimePower> exact_odd_prime_power_divisors(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("exact_odd_prime_power_divisors: n must be >= 1");
    while ((n & 1) == 0) n >>= 1;
    std::vector<PrimePower> out;
    for (std::uint64_t d = 3; d * d <= n; d += 2) {
        if (n % d) continue;
        PrimePower pp{d, 0, 1};
        while (n % d == 0) { n /= d; ++pp.r; pp.value *= d; }
        out.push_back(pp);
    }
    if (n > 1) out.push_back(PrimePower{n, 1, n});
    std::sort(out.begin(), out.end(), [](const PrimePower& a, const PrimePower& b) { return a.value < b.value; });
    return out;
}

} // namespace ladderlab
