#pragma once

#include <mpfr.h>

#include <atomic>
#include <cstdlib>
#include <string>
#include <utility>

#include "replica/rational.hpp"
#include "replica/surd.hpp"

namespace replica {

// Working mantissa width. The default can be overridden by the
// REPLICA_PRECISION_BITS environment variable; zero-certification raises it
// per call as n grows.
inline std::atomic<long>& default_prec_bits() {
    static std::atomic<long> bits = [] {
        long b = 128;
        if (const char* env = std::getenv("REPLICA_PRECISION_BITS")) {
            long v = std::atol(env);
            if (v >= 24 && v <= 1 << 20) b = v;
        }
        return b;
    }();
    return bits;
}

// Thin RAII wrapper over mpfr_t with value semantics.
class Real {
public:
    Real() { mpfr_init2(x_, default_prec_bits().load()); mpfr_set_zero(x_, 1); }
    explicit Real(long prec) { mpfr_init2(x_, prec); mpfr_set_zero(x_, 1); }
    Real(const Real& o) {
        mpfr_init2(x_, mpfr_get_prec(o.x_));
        mpfr_set(x_, o.x_, MPFR_RNDN);
    }
    Real(Real&& o) noexcept {
        mpfr_init2(x_, mpfr_get_prec(o.x_));
        mpfr_swap(x_, o.x_);
    }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(x_, mpfr_get_prec(o.x_));
            mpfr_set(x_, o.x_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        mpfr_swap(x_, o.x_);
        return *this;
    }
    ~Real() { mpfr_clear(x_); }

    static Real of(double v, long prec = 0) {
        Real r(pick(prec));
        mpfr_set_d(r.x_, v, MPFR_RNDN);
        return r;
    }
    static Real of(long v, long prec = 0) {
        Real r(pick(prec));
        mpfr_set_si(r.x_, v, MPFR_RNDN);
        return r;
    }
    static Real of(const Int& v, long prec = 0) {
        Real r(pick(prec));
        mpfr_set_z(r.x_, v.get_mpz_t(), MPFR_RNDN);
        return r;
    }
    static Real of(const Rat& v, long prec = 0) {
        Real r(pick(prec));
        mpfr_set_q(r.x_, v.get_mpq_t(), MPFR_RNDN);
        return r;
    }
    static Real sqrt_of(const Rat& v, long prec = 0) {
        Real r = of(v, prec);
        mpfr_sqrt(r.x_, r.x_, MPFR_RNDN);
        return r;
    }
    static Real of(const Surd& s, long prec = 0) { return sqrt_of(s.square(), prec); }
    static Real pi(long prec = 0) {
        Real r(pick(prec));
        mpfr_const_pi(r.x_, MPFR_RNDN);
        return r;
    }

    long prec() const { return mpfr_get_prec(x_); }
    double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(x_) != 0; }
    int sign() const { return mpfr_sgn(x_); }

    std::string str(int digits = 20) const {
        char* s = nullptr;
        mpfr_asprintf(&s, "%.*Rg", digits, x_);
        std::string out(s);
        mpfr_free_str(s);
        return out;
    }

    friend Real operator+(const Real& a, const Real& b) {
        Real r(join(a, b));
        mpfr_add(r.x_, a.x_, b.x_, MPFR_RNDN);
        return r;
    }
    friend Real operator-(const Real& a, const Real& b) {
        Real r(join(a, b));
        mpfr_sub(r.x_, a.x_, b.x_, MPFR_RNDN);
        return r;
    }
    friend Real operator*(const Real& a, const Real& b) {
        Real r(join(a, b));
        mpfr_mul(r.x_, a.x_, b.x_, MPFR_RNDN);
        return r;
    }
    friend Real operator/(const Real& a, const Real& b) {
        Real r(join(a, b));
        mpfr_div(r.x_, a.x_, b.x_, MPFR_RNDN);
        return r;
    }
    Real operator-() const {
        Real r(prec());
        mpfr_neg(r.x_, x_, MPFR_RNDN);
        return r;
    }
    Real& operator+=(const Real& o) { mpfr_add(x_, x_, o.x_, MPFR_RNDN); return *this; }
    Real& operator-=(const Real& o) { mpfr_sub(x_, x_, o.x_, MPFR_RNDN); return *this; }
    Real& operator*=(const Real& o) { mpfr_mul(x_, x_, o.x_, MPFR_RNDN); return *this; }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.x_, b.x_) < 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.x_, b.x_) > 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.x_, b.x_) <= 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.x_, b.x_) >= 0; }

    friend Real abs(const Real& a) {
        Real r(a.prec());
        mpfr_abs(r.x_, a.x_, MPFR_RNDN);
        return r;
    }
    friend Real sqrt(const Real& a) {
        Real r(a.prec());
        mpfr_sqrt(r.x_, a.x_, MPFR_RNDN);
        return r;
    }
    friend Real exp(const Real& a) {
        Real r(a.prec());
        mpfr_exp(r.x_, a.x_, MPFR_RNDN);
        return r;
    }
    friend Real log(const Real& a) {
        Real r(a.prec());
        mpfr_log(r.x_, a.x_, MPFR_RNDN);
        return r;
    }
    friend Real cos(const Real& a) {
        Real r(a.prec());
        mpfr_cos(r.x_, a.x_, MPFR_RNDN);
        return r;
    }
    friend Real sin(const Real& a) {
        Real r(a.prec());
        mpfr_sin(r.x_, a.x_, MPFR_RNDN);
        return r;
    }
    friend Real cbrt(const Real& a) {
        Real r(a.prec());
        mpfr_cbrt(r.x_, a.x_, MPFR_RNDN);
        return r;
    }
    friend Real pow_int(const Real& a, long e) {
        Real r(a.prec());
        mpfr_pow_si(r.x_, a.x_, e, MPFR_RNDN);
        return r;
    }

private:
    static long pick(long prec) { return prec > 0 ? prec : default_prec_bits().load(); }
    static long join(const Real& a, const Real& b) {
        return a.prec() > b.prec() ? a.prec() : b.prec();
    }
    mpfr_t x_;
};

struct Complex {
    Real re, im;

    Complex() = default;
    Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

    friend Complex operator+(const Complex& a, const Complex& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend Complex operator-(const Complex& a, const Complex& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend Complex operator*(const Complex& a, const Complex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Complex operator*(const Real& s, const Complex& a) {
        return {s * a.re, s * a.im};
    }
    Real norm() const { return re * re + im * im; }
    Real magnitude() const { return sqrt(norm()); }
    friend Complex operator/(const Complex& a, const Complex& b) {
        Real n = b.norm();
        return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
    }
};

}  // namespace replica
