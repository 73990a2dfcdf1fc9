#pragma once

#include <cmath>
#include <string>

#include "replica/rational.hpp"

namespace replica {

// A nonnegative quadratic surd sqrt(r) with r rational >= 0, stored exactly by
// its square. Enough for the endpoint/imaginary-part data of fundamental
// domains, where all comparisons reduce to rational ones.
class Surd {
public:
    Surd() : sq_(0) {}
    explicit Surd(const Rat& square) : sq_(square) {
        if (sq_ < 0) throw std::domain_error("Surd: negative square");
    }
    static Surd of_rational(const Rat& r) {
        if (r < 0) throw std::domain_error("Surd: negative value");
        return Surd(Rat(r * r));
    }

    const Rat& square() const { return sq_; }

    bool is_rational() const {
        return is_square(sq_.get_num()) && is_square(sq_.get_den());
    }
    Rat rational_value() const {
        return make_rat(isqrt(sq_.get_num()), isqrt(sq_.get_den()));
    }

    // Smallest integer >= sqrt(sq).
    Int ceil() const {
        Int lo = isqrt(rat_floor(sq_));
        while (Rat(lo * lo) < sq_) ++lo;
        return lo;
    }

    double to_double() const { return std::sqrt(sq_.get_d()); }

    friend bool operator<(const Surd& a, const Surd& b) { return a.sq_ < b.sq_; }
    friend bool operator==(const Surd& a, const Surd& b) { return a.sq_ == b.sq_; }
    friend bool operator<=(const Surd& a, const Surd& b) { return a.sq_ <= b.sq_; }

    bool less_than_rat(const Rat& r) const {
        if (r < 0) return false;
        return sq_ < r * r;
    }
    bool geq_rat(const Rat& r) const { return !less_than_rat(r); }

    // Renders c*sqrt(d) with d squarefree when the pieces are small enough to
    // factor cheaply, e.g. sqrt(18) -> "3*sqrt(2)".
    std::string str() const {
        if (sq_ == 0) return "0";
        if (is_rational()) return rational_value().get_str();
        Int num = sq_.get_num(), den = sq_.get_den();
        // sqrt(num/den) = sqrt(num*den)/den
        Int m = num * den;
        Int outer = 1, inner = 1;
        Int p = 2;
        Int rem = m;
        while (p * p <= rem && p < 100000) {
            int e = 0;
            while (divides(p, rem)) {
                rem = exact_div(rem, p);
                ++e;
            }
            for (int i = 0; i + 1 < e; i += 2) outer *= p;
            if (e % 2) inner *= p;
            ++p;
        }
        inner *= rem;
        Rat coeff = make_rat(outer, den);
        std::string s;
        if (coeff != 1) s += coeff.get_str() + "*";
        s += "sqrt(" + inner.get_str() + ")";
        return s;
    }

private:
    Rat sq_;
};

}  // namespace replica
