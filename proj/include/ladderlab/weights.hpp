#pragma once
// Weight-twist calculus in the normalized range 2 <= k <= p+1, the
// ordinarity-reduction step (weight p+1 counts as already ordinary), and the
// dihedral existence criterion driven by class numbers of Q(sqrt(-p)),
// computed by exhaustive enumeration of reduced binary quadratic forms.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "numth.hpp"

namespace ladderlab {

enum class LocalShape { ordinary_nonsplit, split, irreducible };

struct TwistResult {
    std::uint64_t twist_exponent = 0; // exponent mod p-1
    std::uint64_t new_weight = 0;     // in [2, p+1]

    bool operator==(const TwistResult&) const = default;
};

// Irreducible local shape: twist by power k' = p-k+1, new weight p+3-k.
inline TwistResult twist_irreducible(std::uint64_t k, std::uint64_t p) {
    if (!(k > 2 && k < p)) throw std::invalid_argument("twist_irreducible: need 2 < k < p");
    return TwistResult{p - k + 1, p + 3 - k};
}

// Split local shape: twist by 1-k mod p-1, new weight p+1-k.
inline TwistResult twist_split(std::uint64_t k, std::uint64_t p) {
    if (!(k > 2 && k < p)) throw std::invalid_argument("twist_split: need 2 < k < p");
    std::uint64_t e = ((p - 1) - ((k - 1) % (p - 1))) % (p - 1); // 1-k mod p-1
    return TwistResult{e, p + 1 - k};
}

struct OrdinarityReduction {
    enum class Status { already_ordinary, reducible_to };
    Status status = Status::already_ordinary;
    std::vector<std::uint64_t> weights; // {p+3-k, p+1-k} in the reducible case
    bool within_range = true;           // all listed weights <= p_n + 1
};

// For even k with 4 <= k <= p+1: weight p+1 is the ordinary/Steinberg case;
// otherwise the two possible twisted weights are reported together with
// whether both land back in the proven range [2, p_n+1]. (k may sit below
// p_n+2: steps re-derive weights the previous stage already covered.)
inline OrdinarityReduction ordinarity_reduction(std::uint64_t k, std::uint64_t p,
                                                std::uint64_t p_n) {
    if (k % 2 != 0 || k < 4 || k > p + 1)
        throw std::invalid_argument("ordinarity_reduction: k out of range");
    if (p_n < 2 || p_n >= p) throw std::invalid_argument("ordinarity_reduction: need 2 <= p_n < p");
    OrdinarityReduction out;
    if (k == p + 1) return out;
    out.status = OrdinarityReduction::Status::reducible_to;
    out.weights = {p + 3 - k, p + 1 - k};
    out.within_range = true;
    for (std::uint64_t w : out.weights)
        if (w > p_n + 1) out.within_range = false;
    return out;
}

// h(-p) for p = 3 mod 4: count reduced forms (a, b, c) with b^2 - 4ac = -p,
// |b| <= a <= c, and b >= 0 whenever |b| = a or a = c. Since -p = 1 mod 4,
// b is odd; a ranges up to sqrt(p/3).
inline std::uint64_t class_number(std::uint64_t p) {
    if (p % 4 != 3 || !is_prime(p)) throw std::invalid_argument("class_number: need prime p = 3 mod 4");
    std::uint64_t count = 0;
    for (std::uint64_t a = 1; 3 * a * a <= p; ++a) {
        // b in (-a, a], i.e. |b| <= a excluding b = -a
        for (std::int64_t b = -static_cast<std::int64_t>(a) + 1;
             b <= static_cast<std::int64_t>(a); ++b) {
            std::uint64_t b2 = static_cast<std::uint64_t>(b * b);
            if ((b2 + p) % (4 * a) != 0) continue;
            std::uint64_t c = (b2 + p) / (4 * a);
            if (c < a) continue;
            if (a == c && b < 0) continue;
            ++count;
        }
    }
    return count;
}

struct DihedralReport {
    std::uint64_t p = 0;
    bool exists = false;
    std::optional<std::uint64_t> weight;       // (p+1)/2 when exists
    std::optional<std::uint64_t> class_number; // h(-p), only when p = 3 mod 4
};

// Semistable dihedral representation exists iff p = 3 mod 4 and h(-p) > 1;
// its weight is then (p+1)/2.
inline DihedralReport dihedral_semistable(std::uint64_t p) {
    if (p < 3 || p % 2 == 0 || !is_prime(p))
        throw std::invalid_argument("dihedral_semistable: need an odd prime");
    DihedralReport rep;
    rep.p = p;
    if (p % 4 == 3) {
        rep.class_number = class_number(p);
        if (*rep.class_number > 1) {
            rep.exists = true;
            rep.weight = (p + 1) / 2;
        }
    }
    return rep;
}

// Weight of an irreducible dihedral representation: (p+3)/2.
inline std::uint64_t dihedral_irreducible_weight(std::uint64_t p) {
    if (p < 3 || p % 2 == 0 || !is_prime(p))
        throw std::invalid_argument("dihedral_irreducible_weight: need an odd prime");
    return (p + 3) / 2;
}

} // namespace ladderlab
