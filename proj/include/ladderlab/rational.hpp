#pragma once
// Exact rational numbers over unbounded integers, backed by GMP's mpq.
// Comparison is exact cross-multiplication on canonical forms (that is what
// mpq_cmp does); there is no rounding anywhere in this type.

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace ladderlab {

class Rational {
  public:
    Rational() : v_(0) {}
    Rational(long num, unsigned long den) : v_(num, den) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        v_.canonicalize();
    }
    explicit Rational(const mpz_class& z) : v_(z) {}
    Rational(const mpz_class& num, const mpz_class& den) : v_(num, den) {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        v_.canonicalize(); // gcd-reduce and move any sign to the numerator
    }
    explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }

    // Parse "n" or "n/d".
    static Rational parse(const std::string& s) {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(mpz_class(s));
        return Rational(mpz_class(s.substr(0, slash)), mpz_class(s.substr(slash + 1)));
    }

    const mpz_class& num() const { return v_.get_num(); }
    const mpz_class& den() const { return v_.get_den(); }
    const mpq_class& raw() const { return v_; }

    std::string str() const { return v_.get_str(); }

    Rational operator+(const Rational& o) const { return Rational(mpq_class(v_ + o.v_)); }
    Rational operator-(const Rational& o) const { return Rational(mpq_class(v_ - o.v_)); }
    Rational operator*(const Rational& o) const { return Rational(mpq_class(v_ * o.v_)); }
    Rational operator/(const Rational& o) const {
        if (o.v_ == 0) throw std::invalid_argument("Rational: division by zero");
        return Rational(mpq_class(v_ / o.v_));
    }
    Rational operator-() const { return Rational(mpq_class(-v_)); }

    bool operator==(const Rational& o) const { return v_ == o.v_; }
    bool operator!=(const Rational& o) const { return v_ != o.v_; }
    bool operator<(const Rational& o) const { return v_ < o.v_; }
    bool operator<=(const Rational& o) const { return v_ <= o.v_; }
    bool operator>(const Rational& o) const { return v_ > o.v_; }
    bool operator>=(const Rational& o) const { return v_ >= o.v_; }

  private:
    mpq_class v_;
};

// Exact three-way comparison: negative / zero / positive as a < b / a = b / a > b.
inline int rational_cmp(const Rational& a, const Rational& b) {
    return cmp(a.raw(), b.raw());
}

} // namespace ladderlab
