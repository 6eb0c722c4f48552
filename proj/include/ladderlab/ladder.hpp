#pragma once
// Induction-step certificates p_n -> P with an exact odd prime-power divisor
// l^r = 2m+1 of P-1, and the nebentype-exponent / residual-weight arithmetic
// hanging off them. Everything here is exact integer arithmetic; the only
// inequality that matters is evaluated in the cleared form
// (m+1)*P <= (2m+1)*p_n - m.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "error.hpp"
#include "numth.hpp"
#include "parallel.hpp"

namespace ladderlab {

struct Certificate {
    std::uint64_t p_n = 0;
    std::uint64_t P = 0;
    std::uint64_t ell = 0; // odd prime
    unsigned r = 0;        // l^r exactly divides P-1
    std::uint64_t m = 0;   // 2m+1 = l^r
    std::uint64_t s = 0;   // s * (2m+1) = P-1

    bool operator==(const Certificate&) const = default;
};

// The selected nebentype exponent for one even weight k, together with the
// coset/window data that pins it down. p_n and the admissible set are filled
// only by nebentype_choice() — select_nebentype() does not know p_n.
struct NebentypeChoice {
    std::uint64_t P = 0;
    std::uint64_t p_n = 0; // 0 until assembled against a base prime
    std::uint64_t k = 0;
    std::uint64_t c = 0;         // coset base in [0, P-2]
    std::uint64_t s = 0;         // coset step
    std::uint64_t window_lo = 0; // window is (m*s, (m+1)*s]
    std::uint64_t window_hi = 0;
    std::uint64_t j = 0;                        // selected exponent
    std::array<std::uint64_t, 2> weights{0, 0}; // {j+2, P+1-j}
    bool contained = false;                     // both weights in [2, p_n+1]
    std::vector<std::uint64_t> admissible;      // all exponents passing containment
};

// (m+1)*P <= (2m+1)*p_n - m, exact integers.
inline bool check_inequality(std::uint64_t P, std::uint64_t p_n, std::uint64_t m) {
    if (!(P > p_n) || p_n < 2 || m < 1) throw std::invalid_argument("check_inequality: need P > p_n >= 2, m >= 1");
    unsigned __int128 lhs = static_cast<unsigned __int128>(m + 1) * P;
    unsigned __int128 rhs = static_cast<unsigned __int128>(2 * m + 1) * p_n;
    if (rhs < m) return false;
    return lhs <= rhs - m;
}

// p_n + 1 >= (m+1)(P-1)/(2m+1) + 2  and  p_n + 1 >= P - m(P-1)/(2m+1),
// where (P-1)/(2m+1) is required to be an integer.
inline bool containment_bounds(std::uint64_t P, std::uint64_t p_n, std::uint64_t m) {
    std::uint64_t block = 2 * m + 1;
    if (P < 2 || (P - 1) % block != 0)
        throw divisibility_violation("containment_bounds: 2m+1 must divide P-1");
    std::uint64_t s = (P - 1) / block;
    unsigned __int128 target = p_n + 1;
    unsigned __int128 first = static_cast<unsigned __int128>(m + 1) * s + 2;
    unsigned __int128 second = static_cast<unsigned __int128>(P) - static_cast<unsigned __int128>(m) * s;
    return first <= target && second <= target;
}

inline bool certificate_valid(const Certificate& c) {
    if (!(c.P > c.p_n) || !is_prime(c.P) || !is_prime(c.p_n)) return false;
    if (is_fermat_prime(c.P)) return false;
    if (c.ell < 3 || c.ell % 2 == 0 || !is_prime(c.ell) || c.r == 0) return false;
    std::uint64_t lr = 1;
    for (unsigned i = 0; i < c.r; ++i) lr *= c.ell;
    if (lr != 2 * c.m + 1) return false;
    if ((c.P - 1) % lr != 0 || ((c.P - 1) / lr) % c.ell == 0) return false; // exact divisor
    if (c.s * lr != c.P - 1 || c.s % 2 != 0) return false;
    return check_inequality(c.P, c.p_n, c.m);
}

namespace detail {

// Modular inverse via extended Euclid; gcd(a, m) must be 1.
inline std::uint64_t inv_mod(std::uint64_t a, std::uint64_t m) {
    std::int64_t t = 0, nt = 1;
    std::int64_t r = static_cast<std::int64_t>(m), nr = static_cast<std::int64_t>(a % m);
    while (nr != 0) {
        std::int64_t q = r / nr;
        std::int64_t tmp = t - q * nt;
        t = nt;
        nt = tmp;
        tmp = r - q * nr;
        r = nr;
        nr = tmp;
    }
    if (r != 1) throw std::invalid_argument("inv_mod: arguments not coprime");
    if (t < 0) t += static_cast<std::int64_t>(m);
    return static_cast<std::uint64_t>(t);
}

// Validates that ell is an odd prime and ell^r exactly divides P-1;
// returns l^r.
inline std::uint64_t exact_power_of(std::uint64_t P, std::uint64_t ell, unsigned r) {
    if (ell < 3 || ell % 2 == 0 || !is_prime(ell) || r == 0)
        throw std::invalid_argument("need an odd prime ell and r >= 1");
    std::uint64_t lr = 1;
    for (unsigned i = 0; i < r; ++i) {
        if (lr > (P - 1) / ell + 1) throw divisibility_violation("ell^r does not divide P-1");
        lr *= ell;
    }
    if (P < 3 || (P - 1) % lr != 0 || ((P - 1) / lr) % ell == 0)
        throw divisibility_violation("ell^r must exactly divide P-1");
    return lr;
}

} // namespace detail

// Unique c in [0, P-2] with c = 0 mod l^r and c = k-2 mod s, s = (P-1)/l^r.
inline std::uint64_t coset_base(std::uint64_t k, std::uint64_t P, std::uint64_t ell, unsigned r) {
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("coset_base: k must be even and >= 2");
    std::uint64_t lr = detail::exact_power_of(P, ell, r);
    std::uint64_t s = (P - 1) / lr;
    std::uint64_t target = (k - 2) % s;
    // c = lr * t with lr * t = target (mod s)
    std::uint64_t t = (target * static_cast<unsigned __int128>(detail::inv_mod(lr % s, s))) % s;
    return lr * t;
}

// j = the unique coset element in the window (m*s, (m+1)*s]; the coset
// {c + i*s mod P-1} is exactly the residues = c (mod s) in [0, P-2], and the
// window has length s, so existence and uniqueness are structural.
inline NebentypeChoice select_nebentype(std::uint64_t k, std::uint64_t P, std::uint64_t ell,
                                        unsigned r) {
    NebentypeChoice out;
    out.P = P;
    out.k = k;
    std::uint64_t lr = detail::exact_power_of(P, ell, r);
    out.s = (P - 1) / lr;
    out.c = coset_base(k, P, ell, r);
    std::uint64_t m = (lr - 1) / 2;
    out.window_lo = m * out.s;
    out.window_hi = (m + 1) * out.s;
    std::uint64_t delta = out.c % out.s;
    out.j = out.window_lo + (delta == 0 ? out.s : delta);
    out.weights = {out.j + 2, P + 1 - out.j};
    return out;
}

// All coset exponents j (even, 1 <= j <= P-2) whose weight pair fits below
// p_n + 1. May be empty.
inline std::vector<std::uint64_t> admissible_exponents(std::uint64_t k, std::uint64_t P,
                                                       std::uint64_t p_n, std::uint64_t ell,
                                                       unsigned r) {
    if (!(p_n < P)) throw std::invalid_argument("admissible_exponents: need p_n < P");
    std::uint64_t lr = detail::exact_power_of(P, ell, r);
    std::uint64_t s = (P - 1) / lr;
    std::uint64_t c = coset_base(k, P, ell, r);
    std::vector<std::uint64_t> out;
    std::uint64_t x = c;
    for (std::uint64_t i = 0; i < lr; ++i) {
        if (x >= 1 && x <= P - 2 && x % 2 == 0 && x + 2 <= p_n + 1 && P + 1 - x <= p_n + 1)
            out.push_back(x);
        x += s;
        if (x >= P - 1) x -= P - 1;
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Full assembly for one weight: selection + containment flag + admissible set.
inline NebentypeChoice nebentype_choice(std::uint64_t k, std::uint64_t P, std::uint64_t p_n,
                                        std::uint64_t ell, unsigned r) {
    NebentypeChoice out = select_nebentype(k, P, ell, r);
    out.p_n = p_n;
    out.contained = out.weights[0] >= 2 && out.weights[0] <= p_n + 1 && out.weights[1] >= 2 &&
                    out.weights[1] <= p_n + 1;
    out.admissible = admissible_exponents(k, P, p_n, ell, r);
    return out;
}

namespace detail {

// Core search over a prime table covering (p_n, 2*p_n].
inline std::optional<Certificate> find_certificate_with(std::uint64_t p_n,
                                                        const std::vector<std::uint64_t>& primes) {
    if (p_n < 2 || !is_prime(p_n)) throw std::invalid_argument("find_certificate: p_n must be prime");
    auto it = std::upper_bound(primes.begin(), primes.end(), p_n);
    for (; it != primes.end() && *it <= 2 * p_n; ++it) {
        std::uint64_t P = *it;
        if (is_fermat_prime(P)) continue;
        std::optional<PrimePower> best;
        for (const PrimePower& pp : exact_odd_prime_power_divisors(P - 1)) {
            std::uint64_t m = (pp.value - 1) / 2;
            if (check_inequality(P, p_n, m)) best = pp; // divisors ascend, keep largest passing
        }
        if (best) {
            Certificate c;
            c.p_n = p_n;
            c.P = P;
            c.ell = best->ell;
            c.r = best->r;
            c.m = (best->value - 1) / 2;
            c.s = (P - 1) / best->value;
            return c;
        }
    }
    return std::nullopt;
}

} // namespace detail

// Least non-Fermat prime P in (p_n, 2*p_n] admitting an exact odd
// prime-power divisor l^r = 2m+1 of P-1 that passes the step inequality;
// among valid divisors the largest l^r wins.
inline Certificate find_certificate(std::uint64_t p_n, std::uint64_t cap = kDefaultSieveLimit) {
    if (p_n > cap / 2) throw limit_exceeded("find_certificate: 2*p_n exceeds sieve limit");
    auto primes = segmented_primes(2 * p_n);
    auto c = detail::find_certificate_with(p_n, primes);
    if (!c) throw no_certificate("find_certificate: no admissible P <= 2*p_n for p_n=" +
                                 std::to_string(p_n));
    return *c;
}

// Table-backed variant for bulk runs over a shared sieve (which must reach
// 2*p_n): nullopt instead of throwing when the search is exhausted.
inline std::optional<Certificate> find_certificate(std::uint64_t p_n, const Sieve& sieve) {
    return detail::find_certificate_with(p_n, sieve.primes());
}

struct VerifyFailure {
    std::uint64_t p_n = 0;
    std::uint64_t k = 0; // 0 when the certificate itself is missing
    std::string reason;
};

struct VerifyReport {
    std::uint64_t lo = 0, hi = 0;
    std::uint64_t primes_checked = 0;
    std::uint64_t weights_checked = 0;
    std::vector<VerifyFailure> failures;
};

// For every prime p_n in [lo, hi]: a certificate must exist, and for every
// even k in [p_n+2, P+1] the selected weight pair must land in [2, p_n+1].
// The selection-invariant checks (j in window, j even, j = k-2 mod s) are
// asserted on every weight. Failures are data, not exceptions.
inline VerifyReport verify_range(std::uint64_t lo, std::uint64_t hi, unsigned threads = 1,
                                 std::uint64_t cap = kDefaultSieveLimit,
                                 const Sieve* pre = nullptr) {
    if (lo > hi) throw std::invalid_argument("verify_range: need lo <= hi");
    if (hi > cap / 2) throw limit_exceeded("verify_range: 2*hi exceeds sieve limit");
    std::optional<Sieve> own;
    const Sieve& sieve = (pre && pre->limit() >= 2 * hi + 2) ? *pre : own.emplace(2 * hi + 2);
    const auto& ps = sieve.primes();
    auto first = std::lower_bound(ps.begin(), ps.end(), lo);
    auto last = std::upper_bound(ps.begin(), ps.end(), hi);
    std::vector<std::uint64_t> targets(first, last);
    VerifyReport rep;
    rep.lo = lo;
    rep.hi = hi;
    rep.primes_checked = targets.size();
    std::vector<std::vector<VerifyFailure>> fails(targets.size());
    std::vector<std::uint64_t> weight_counts(targets.size(), 0);
    parallel_for(targets.size(), threads, [&](std::size_t i) {
        std::uint64_t p = targets[i];
        auto cert = detail::find_certificate_with(p, ps);
        if (!cert) {
            fails[i].push_back({p, 0, "no_certificate"});
            return;
        }
        std::uint64_t k0 = p + 2;
        if (k0 % 2 != 0) ++k0;
        for (std::uint64_t k = k0; k <= cert->P + 1; k += 2) {
            NebentypeChoice ch = select_nebentype(k, cert->P, cert->ell, cert->r);
            ++weight_counts[i];
            if (!(ch.j > ch.window_lo && ch.j <= ch.window_hi) || ch.j % 2 != 0 ||
                ch.j % ch.s != (k - 2) % ch.s) {
                fails[i].push_back({p, k, "selection_invariant"});
                continue;
            }
            if (!(ch.weights[0] >= 2 && ch.weights[0] <= p + 1 && ch.weights[1] >= 2 &&
                  ch.weights[1] <= p + 1))
                fails[i].push_back({p, k, "weight_out_of_range"});
        }
    });
    for (std::size_t i = 0; i < targets.size(); ++i) {
        rep.weights_checked += weight_counts[i];
        rep.failures.insert(rep.failures.end(), fails[i].begin(), fails[i].end());
    }
    return rep;
}

// Iterate p <- find_certificate(p).P, collecting each step, until P > limit.
inline std::vector<Certificate> chain(std::uint64_t start, std::uint64_t limit,
                                      std::uint64_t cap = kDefaultSieveLimit,
                                      const Sieve* pre = nullptr) {
    if (!is_prime(start)) throw std::invalid_argument("chain: start must be prime");
    if (limit > cap / 2) throw limit_exceeded("chain: 2*limit exceeds sieve limit");
    const std::uint64_t need = 2 * (limit < start ? start : limit) + 2;
    std::optional<Sieve> own;
    const Sieve& sieve = (pre && pre->limit() >= need) ? *pre : own.emplace(need);
    std::vector<Certificate> out;
    std::uint64_t p = start;
    while (p <= limit) {
        auto cert = detail::find_certificate_with(p, sieve.primes());
        if (!cert) throw no_certificate("chain: stuck at p=" + std::to_string(p));
        out.push_back(*cert);
        p = cert->P;
    }
    return out;
}

// One row of the published small-weight table: base prime p_n, step prime P,
// weight k, and the exponents the published argument names for that weight.
struct PublishedChoice {
    std::uint64_t P = 0, p_n = 0, k = 0;
    std::vector<std::uint64_t> published_exponents;
    std::vector<std::uint64_t> admissible; // what the model admits
    std::uint64_t model_j = 0;             // what select_nebentype picks
    bool published_in_admissible = false;  // every published exponent admissible
    bool published_contained = false;      // weight pairs of published exponents fit [2, p_n+1]
    bool flagged = false;                  // published choice outside the model's coset
};

// Re-derives the published choice table and checks each published exponent
// for membership in the admissible set. A row where the published exponent
// passes weight containment but is not in the coset is flagged rather than
// silently accepted or rejected.
inline std::vector<PublishedChoice> published_choice_table() {
    struct Row {
        std::uint64_t P, p_n, ell;
        unsigned r;
        std::uint64_t k;
        std::vector<std::uint64_t> published;
    };
    std::vector<Row> rows;
    rows.push_back({7, 5, 3, 1, 8, {2, 4}});
    for (std::uint64_t k : {10, 12}) rows.push_back({11, 7, 5, 1, k, {4, 6}});
    for (std::uint64_t k : {14, 16, 18, 20}) rows.push_back({19, 13, 3, 2, k, {8, 10}});
    for (std::uint64_t k : {22, 24, 26, 28, 30})
        rows.push_back({29, 23, 7, 1, k, {k % 4 == 2 ? std::uint64_t{16} : std::uint64_t{14}}});
    rows.push_back({31, 29, 5, 1, 32, {16}});
    std::vector<PublishedChoice> out;
    for (const Row& row : rows) {
        PublishedChoice pc;
        pc.P = row.P;
        pc.p_n = row.p_n;
        pc.k = row.k;
        pc.published_exponents = row.published;
        pc.admissible = admissible_exponents(row.k, row.P, row.p_n, row.ell, row.r);
        pc.model_j = select_nebentype(row.k, row.P, row.ell, row.r).j;
        pc.published_in_admissible = std::all_of(
            row.published.begin(), row.published.end(), [&](std::uint64_t e) {
                return std::binary_search(pc.admissible.begin(), pc.admissible.end(), e);
            });
        pc.published_contained = std::all_of(
            row.published.begin(), row.published.end(), [&](std::uint64_t e) {
                return e + 2 >= 2 && e + 2 <= row.p_n + 1 && row.P + 1 - e >= 2 &&
                       row.P + 1 - e <= row.p_n + 1;
            });
        pc.flagged = !pc.published_in_admissible;
        out.push_back(std::move(pc));
    }
    return out;
}

} // namespace ladderlab
