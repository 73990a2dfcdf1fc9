#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace replica {

using Int = mpz_class;
using Rat = mpq_class;

inline Int gcd(const Int& a, const Int& b) {
    Int r;
    mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

inline Int lcm(const Int& a, const Int& b) {
    Int r;
    mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return r;
}

// Smallest nonnegative residue of a mod m, m > 0.
inline Int mod_nonneg(const Int& a, const Int& m) {
    Int r;
    mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

// Inverse of a mod m (m > 0, gcd(a, m) = 1).
inline Int inv_mod(const Int& a, const Int& m) {
    if (m == 1) return 0;
    Int r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        throw std::domain_error("inv_mod: not invertible");
    return r;
}

inline bool divides(const Int& a, const Int& b) {
    if (a == 0) return b == 0;
    return mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t()) != 0;
}

inline Int exact_div(const Int& a, const Int& b) {
    Int q;
    mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

// Floor of sqrt for nonnegative integers.
inline Int isqrt(const Int& a) {
    Int r;
    mpz_sqrt(r.get_mpz_t(), a.get_mpz_t());
    return r;
}

inline bool is_square(const Int& a) {
    return a >= 0 && mpz_perfect_square_p(a.get_mpz_t()) != 0;
}

inline Rat make_rat(const Int& num, const Int& den) {
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

// Largest integer n with n <= r.
inline Int rat_floor(const Rat& r) {
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return q;
}

inline Int rat_ceil(const Rat& r) {
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), r.get_num().get_mpz_t(), r.get_den().get_mpz_t());
    return q;
}

// Nearest integer to r; half-integers round toward +infinity.
inline Int rat_round(const Rat& r) {
    return rat_floor(r + Rat(1, 2));
}

// A point of P^1(Q): a rational number or the single point at infinity.
class ExtRat {
public:
    ExtRat() : finite_(true), value_(0) {}
    ExtRat(const Rat& v) : finite_(true), value_(v) {}
    ExtRat(long v) : finite_(true), value_(v) {}

    static ExtRat infinity() {
        ExtRat e;
        e.finite_ = false;
        return e;
    }

    bool is_infinity() const { return !finite_; }
    const Rat& value() const {
        if (!finite_) throw std::domain_error("ExtRat: value() at infinity");
        return value_;
    }

    friend bool operator==(const ExtRat& a, const ExtRat& b) {
        if (a.finite_ != b.finite_) return false;
        return !a.finite_ || a.value_ == b.value_;
    }
    friend bool operator!=(const ExtRat& a, const ExtRat& b) { return !(a == b); }

    std::string str() const {
        return finite_ ? value_.get_str() : std::string("inf");
    }

private:
    bool finite_;
    Rat value_;
};

}  // namespace replica
