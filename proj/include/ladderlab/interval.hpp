#pragma once
// Certified enclosures of ln / exp / sqrt / pow over exact rational
// endpoints. Every operation returns [lo, hi] with the true value provably
// inside: series are evaluated with directed rounding onto the dyadic grid
// 1/2^work_bits and explicit tail bounds are added to the upper endpoint.
// No floating point is involved at any stage; an audit must never assert a
// bound via unproven rounding.

#include <map>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace ladderlab::ival {

struct Interval {
    mpq_class lo, hi; // lo <= value <= hi

    mpq_class width() const { return hi - lo; }
};

// floor(q * 2^bits) / 2^bits  — largest grid point <= q
inline mpq_class round_down(const mpq_class& q, unsigned bits) {
    mpz_class scaled_num = q.get_num() << bits;
    mpz_class g;
    mpz_fdiv_q(g.get_mpz_t(), scaled_num.get_mpz_t(), q.get_den().get_mpz_t());
    mpq_class r(g, mpz_class(1) << bits);
    r.canonicalize();
    return r;
}

// ceil(q * 2^bits) / 2^bits  — smallest grid point >= q
inline mpq_class round_up(const mpq_class& q, unsigned bits) {
    mpz_class scaled_num = q.get_num() << bits;
    mpz_class g;
    mpz_cdiv_q(g.get_mpz_t(), scaled_num.get_mpz_t(), q.get_den().get_mpz_t());
    mpq_class r(g, mpz_class(1) << bits);
    r.canonicalize();
    return r;
}

// Enclosure of artanh(t) = sum t^(2i+1)/(2i+1) for exact rational 0 <= t < 1.
// Terms are positive and the tail after the last added term is bounded by
// next_term / (1 - t^2), which is added to the upper endpoint.
inline Interval artanh_enclosure(const mpq_class& t, unsigned bits) {
    if (t < 0 || t >= 1) throw std::invalid_argument("artanh_enclosure: need 0 <= t < 1");
    const unsigned wb = bits + 16; // working grid
    Interval s{0, 0};
    if (t == 0) return s;
    mpq_class t2 = t * t;
    mpq_class t2_lo = round_down(t2, wb), t2_hi = round_up(t2, wb);
    mpq_class pw_lo = round_down(t, wb), pw_hi = round_up(t, wb); // t^(2i+1) enclosure
    mpq_class eps(mpz_class(1), mpz_class(1) << (bits + 4));      // absolute tail target
    mpq_class one_minus = 1 - t2_hi;                              // 0 < 1 - t^2 <= this bound's truth needs t2_hi >= t2
    for (unsigned long i = 0;; ++i) {
        unsigned long den = 2 * i + 1;
        s.lo = round_down(s.lo + pw_lo / den, wb);
        s.hi = round_up(s.hi + pw_hi / den, wb);
        // advance power
        pw_lo = round_down(pw_lo * t2_lo, wb);
        pw_hi = round_up(pw_hi * t2_hi, wb);
        if (pw_lo < 0) pw_lo = 0; // rounding must not push below zero
        // tail after this term: sum_{j>i} t^(2j+1)/(2j+1) <= pw_hi_next / (1 - t^2)
        mpq_class tail = pw_hi / one_minus;
        if (tail <= eps) {
            s.hi = round_up(s.hi + tail, wb);
            return s;
        }
        if (i > 100000) throw std::runtime_error("artanh_enclosure: series failed to converge");
    }
}

// Enclosure of ln 2 = 2 * artanh(1/3). Cached per precision: range audits
// request the same handful of precisions hundreds of thousands of times.
inline Interval log2_enclosure(unsigned bits) {
    thread_local std::map<unsigned, Interval> cache;
    auto it = cache.find(bits);
    if (it != cache.end()) return it->second;
    Interval a = artanh_enclosure(mpq_class(1, 3), bits + 2);
    Interval r{2 * a.lo, 2 * a.hi};
    cache.emplace(bits, r);
    return r;
}

// Enclosure of ln x for exact rational x > 0. Reduction: x = m * 2^k with
// m in [1, 2), ln x = k ln 2 + 2 artanh((m-1)/(m+1)); t <= 1/3 so the series
// converges geometrically with ratio <= 1/9.
inline Interval log_enclosure(const mpq_class& x, unsigned bits) {
    if (x <= 0) throw std::invalid_argument("log_enclosure: need x > 0");
    // k = floor(log2 x) via bit sizes, then corrected by exact comparison
    long k = static_cast<long>(mpz_sizeinbase(x.get_num().get_mpz_t(), 2)) -
             static_cast<long>(mpz_sizeinbase(x.get_den().get_mpz_t(), 2));
    auto scaled = [&x](long e) { // x / 2^e, exact
        mpq_class m = x;
        if (e >= 0) m /= mpq_class(mpz_class(1) << e);
        else m *= mpq_class(mpz_class(1) << (-e));
        return m;
    };
    mpq_class m = scaled(k);
    while (m >= 2) { ++k; m = scaled(k); }
    while (m < 1) { --k; m = scaled(k); }
    mpq_class t = (m - 1) / (m + 1); // in [0, 1/3)
    Interval lnm = artanh_enclosure(t, bits + 2);
    lnm.lo *= 2;
    lnm.hi *= 2;
    if (k == 0) return lnm;
    Interval l2 = log2_enclosure(bits + 8);
    if (k > 0) return Interval{lnm.lo + k * l2.lo, lnm.hi + k * l2.hi};
    return Interval{lnm.lo + k * l2.hi, lnm.hi + k * l2.lo}; // k < 0 swaps which endpoint is low
}

// Enclosure of exp(y) for exact rational y >= 0: partial sums of sum y^i/i!
// with directed rounding; once i >= 2y the term ratio is <= 1/2 and the tail
// is bounded by twice the next term.
inline Interval exp_enclosure_nonneg(const mpq_class& y, unsigned bits) {
    if (y < 0) throw std::invalid_argument("exp_enclosure_nonneg: need y >= 0");
    const unsigned wb = bits + 16;
    Interval s{1, 1}; // i = 0 term
    if (y == 0) return s;
    mpq_class y_lo = round_down(y, wb), y_hi = round_up(y, wb);
    mpq_class term_lo = 1, term_hi = 1;
    mpq_class eps(mpz_class(1), mpz_class(1) << (bits + 4));
    for (unsigned long i = 1;; ++i) {
        term_lo = round_down(term_lo * y_lo / i, wb);
        term_hi = round_up(term_hi * y_hi / i, wb);
        if (term_lo < 0) term_lo = 0;
        s.lo = round_down(s.lo + term_lo, wb);
        s.hi = round_up(s.hi + term_hi, wb);
        if (mpq_class(2 * i) >= 2 * y_hi) { // ratio of successive terms <= y/(i+1) <= 1/2
            mpq_class next_hi = round_up(term_hi * y_hi / (i + 1), wb);
            mpq_class tail = 2 * next_hi;
            if (tail <= eps) {
                s.hi = round_up(s.hi + tail, wb);
                return s;
            }
        }
        if (i > 100000) throw std::runtime_error("exp_enclosure_nonneg: series failed to converge");
    }
}

// Enclosure of exp over an interval; exp is monotone, negatives go through
// the reciprocal with outward-directed division.
inline Interval exp_enclosure(const Interval& x, unsigned bits) {
    auto point = [bits](const mpq_class& q, bool upper) {
        const unsigned wb = bits + 16;
        if (q >= 0) {
            Interval e = exp_enclosure_nonneg(q, bits);
            return upper ? e.hi : e.lo;
        }
        Interval e = exp_enclosure_nonneg(mpq_class(-q), bits + 8);
        // exp(q) = 1/exp(-q): lower endpoint needs the big denominator
        return upper ? round_up(1 / e.lo, wb) : round_down(1 / e.hi, wb);
    };
    return Interval{point(x.lo, false), point(x.hi, true)};
}

// Enclosure of sqrt(x) for exact rational x >= 0 via integer square root of
// the scaled radicand: r = isqrt(num*den*4^bits) gives
// r/(den*2^bits) <= sqrt(x) <= (r+1)/(den*2^bits).
inline Interval sqrt_enclosure(const mpq_class& x, unsigned bits) {
    if (x < 0) throw std::invalid_argument("sqrt_enclosure: need x >= 0");
    mpz_class radicand = x.get_num() * x.get_den();
    radicand <<= (2 * bits);
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), radicand.get_mpz_t());
    mpz_class scale = x.get_den() << bits;
    mpq_class lo(r, scale), hi(r + 1, scale);
    lo.canonicalize();
    hi.canonicalize();
    return Interval{lo, hi};
}

// Enclosure of base^expo for base > 1, expo > 0 (both intervals), via
// exp(expo * ln base); monotone in both arguments on this domain.
inline Interval pow_enclosure(const Interval& base, const Interval& expo, unsigned bits) {
    if (base.lo <= 1) throw std::invalid_argument("pow_enclosure: need base > 1");
    if (expo.lo <= 0) throw std::invalid_argument("pow_enclosure: need exponent > 0");
    Interval ln_lo = log_enclosure(base.lo, bits + 8);
    Interval ln_hi = (base.hi == base.lo) ? ln_lo : log_enclosure(base.hi, bits + 8);
    Interval prod{expo.lo * ln_lo.lo, expo.hi * ln_hi.hi}; // all factors positive
    return exp_enclosure(prod, bits);
}

} // namespace ladderlab::ival
