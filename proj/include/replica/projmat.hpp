#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>

#include "replica/rational.hpp"
#include "replica/real.hpp"

namespace replica {

struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Half-circle orthogonal to the real axis: the isometric circle of a group
// element. center == inf encodes the "infinite arc" (all of H), used for
// elements fixing infinity.
struct Arc {
    ExtRat center;
    ExtRat sq_radius;

    Arc() : center(ExtRat::infinity()), sq_radius(ExtRat::infinity()) {}
    Arc(const Rat& c, const Rat& r2) : center(c), sq_radius(r2) {
        if (r2 <= 0) throw std::domain_error("Arc: radius^2 must be positive");
    }

    bool is_infinite() const { return center.is_infinity(); }

    // Squared height of the arc over real part x; negative off the arc's span.
    Rat height_sq(const Rat& x) const {
        Rat d = x - center.value();
        return sq_radius.value() - d * d;
    }

    friend bool operator==(const Arc& a, const Arc& b) {
        return a.center == b.center && a.sq_radius == b.sq_radius;
    }
    friend bool operator!=(const Arc& a, const Arc& b) { return !(a == b); }
};

// A point of the upper half-plane. Points produced by boundary sampling carry
// an exact tag (owning arc + rational real part) so that y^2 stays a rational
// and comparisons against other arcs are exact.
struct HPoint {
    Real x;
    Real y;

    struct ExactTag {
        Arc arc;
        Rat x;
    };
    std::optional<ExactTag> exact;

    HPoint() = default;
    HPoint(Real px, Real py) : x(std::move(px)), y(std::move(py)) {
        if (!(y > Real::of(0L, y.prec()))) throw std::domain_error("HPoint: y must be positive");
    }

    static HPoint on_arc(const Arc& arc, const Rat& rx, long prec = 0) {
        Rat y2 = arc.height_sq(rx);
        if (y2 <= 0) throw std::domain_error("HPoint::on_arc: point off the arc");
        HPoint p(Real::of(rx, prec), Real::sqrt_of(y2, prec));
        p.exact = ExactTag{arc, rx};
        return p;
    }

    static HPoint imaginary(const Rat& y2, long prec = 0) {
        // Purely imaginary point with exact y^2 (tagged on a synthetic arc).
        if (y2 <= 0) throw std::domain_error("HPoint::imaginary: y^2 must be positive");
        HPoint p(Real::of(0L, prec), Real::sqrt_of(y2, prec));
        p.exact = ExactTag{Arc(Rat(0), y2), Rat(0)};
        return p;
    }

    bool has_exact() const { return exact.has_value(); }
    Rat y_sq_exact() const { return exact->arc.height_sq(exact->x); }
};

// Normalized integral representative of an element of PGL2+(Q).
// Invariants: det > 0, gcd(a,b,c,d) = 1, and c > 0 or (c = 0 and a > 0).
class ProjMatrix {
public:
    ProjMatrix() : a_(1), b_(0), c_(0), d_(1) {}

    ProjMatrix(Int a, Int b, Int c, Int d)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
        normalize();
    }

    static ProjMatrix from_rationals(const Rat& a, const Rat& b, const Rat& c, const Rat& d) {
        Int m = lcm(lcm(a.get_den(), b.get_den()), lcm(c.get_den(), d.get_den()));
        auto scale = [&](const Rat& r) { return Int(r.get_num() * exact_div(m, r.get_den())); };
        return ProjMatrix(scale(a), scale(b), scale(c), scale(d));
    }

    static ProjMatrix identity() { return ProjMatrix(); }
    // T^x, the translation by x.
    static ProjMatrix translation(const Rat& x) {
        return ProjMatrix(x.get_den(), x.get_num(), 0, x.get_den());
    }
    // D_y, the dilation by y > 0.
    static ProjMatrix dilation(const Rat& y) {
        if (y <= 0) throw std::domain_error("dilation: y must be positive");
        return ProjMatrix(y.get_num(), 0, 0, y.get_den());
    }
    // S, the inversion tau -> -1/tau.
    static ProjMatrix inversion() { return ProjMatrix(0, -1, 1, 0); }

    const Int& a() const { return a_; }
    const Int& b() const { return b_; }
    const Int& c() const { return c_; }
    const Int& d() const { return d_; }

    Int det() const { return a_ * d_ - b_ * c_; }
    bool fixes_infinity() const { return c_ == 0; }
    Int trace() const { return a_ + d_; }
    bool is_involution() const { return a_ + d_ == 0; }

    friend ProjMatrix compose(const ProjMatrix& m, const ProjMatrix& n) {
        return ProjMatrix(m.a_ * n.a_ + m.b_ * n.c_, m.a_ * n.b_ + m.b_ * n.d_,
                          m.c_ * n.a_ + m.d_ * n.c_, m.c_ * n.b_ + m.d_ * n.d_);
    }

    friend ProjMatrix inverse(const ProjMatrix& m) {
        return ProjMatrix(-m.d_, m.b_, m.c_, -m.a_);
    }

    friend bool operator==(const ProjMatrix& m, const ProjMatrix& n) {
        return m.a_ == n.a_ && m.b_ == n.b_ && m.c_ == n.c_ && m.d_ == n.d_;
    }
    friend bool operator!=(const ProjMatrix& m, const ProjMatrix& n) { return !(m == n); }

    // pi(M) = -d/c, infinite on the stabilizer of infinity.
    ExtRat pi() const {
        if (c_ == 0) return ExtRat::infinity();
        return ExtRat(make_rat(-d_, c_));
    }
    // rho^2(M) = det/c^2.
    ExtRat rho_sq() const {
        if (c_ == 0) return ExtRat::infinity();
        return ExtRat(make_rat(det(), c_ * c_));
    }
    Rat sigma() const { return c_ == 0 ? make_rat(a_, d_) : Rat(1); }
    Rat theta() const { return c_ == 0 ? make_rat(b_, d_) : make_rat(a_, c_); }

    Arc arc() const {
        if (c_ == 0) return Arc();
        return Arc(pi().value(), rho_sq().value());
    }

    // M = T^theta D_sigma           when M fixes infinity,
    // M = T^theta D_{rho^2} S T^{-pi} otherwise.
    struct Decomposition {
        bool parabolic_case;  // true: (theta, sigma); false: (theta, rho_sq, pi)
        Rat theta;
        Rat sigma;
        Rat rho_sq;
        Rat pi;

        ProjMatrix recompose() const {
            if (parabolic_case)
                return compose(ProjMatrix::translation(theta), ProjMatrix::dilation(sigma));
            ProjMatrix m = compose(ProjMatrix::translation(theta), ProjMatrix::dilation(rho_sq));
            m = compose(m, ProjMatrix::inversion());
            return compose(m, ProjMatrix::translation(-pi));
        }
    };

    Decomposition involutory_decompose() const {
        Decomposition dec;
        dec.theta = theta();
        if (c_ == 0) {
            dec.parabolic_case = true;
            dec.sigma = sigma();
        } else {
            dec.parabolic_case = false;
            dec.rho_sq = rho_sq().value();
            dec.pi = pi().value();
        }
        return dec;
    }

    // Action on P^1(Q).
    ExtRat apply_boundary(const ExtRat& p) const {
        if (p.is_infinity()) {
            if (c_ == 0) return ExtRat::infinity();
            return ExtRat(make_rat(a_, c_));
        }
        const Rat& v = p.value();
        Rat den = Rat(c_) * v + Rat(d_);
        if (den == 0) return ExtRat::infinity();
        return ExtRat(Rat((Rat(a_) * v + Rat(b_)) / den));
    }

    // Action on the upper half-plane.  Im(M tau) = det * y / |c tau + d|^2.
    HPoint apply(const HPoint& t) const {
        long prec = t.x.prec();
        Real cb = Real::of(c_, prec), db = Real::of(d_, prec);
        Real ab = Real::of(a_, prec), bb = Real::of(b_, prec);
        Real u = cb * t.x + db;
        Real v = cb * t.y;
        Real n = u * u + v * v;
        if (n.is_zero()) throw PrecisionError("apply: |c tau + d|^2 underflowed");
        Real nx = ((ab * t.x + bb) * u + ab * t.y * v) / n;
        Real ny = Real::of(det(), prec) * t.y / n;
        if (!(ny > Real::of(0L, prec)))
            throw PrecisionError("apply: image imaginary part underflowed");
        return HPoint(std::move(nx), std::move(ny));
    }

    // Im(M tau) / Im(tau); equals sigma(M) on the stabilizer of infinity and
    // is exactly 1 iff tau lies on the arc of M.
    Real im_factor(const HPoint& t) const {
        long prec = t.x.prec();
        if (c_ == 0) return Real::of(sigma(), prec);
        if (t.has_exact()) {
            // |tau - pi|^2 = (x - pi)^2 + y^2 exactly in Q.
            Rat dx = t.exact->x - pi().value();
            Rat dist = dx * dx + t.y_sq_exact();
            return Real::of(Rat(rho_sq().value() / dist), prec);
        }
        Real dx = t.x - Real::of(pi().value(), prec);
        Real dist = dx * dx + t.y * t.y;
        return Real::of(rho_sq().value(), prec) / dist;
    }

    // Exact rational Im(M tau)/Im(tau) for exactly tagged points.
    Rat im_factor_exact(const Rat& x, const Rat& y_sq) const {
        if (c_ == 0) return sigma();
        Rat dx = x - pi().value();
        return rho_sq().value() / (dx * dx + y_sq);
    }

    std::string str() const {
        return "(" + a_.get_str() + " " + b_.get_str() + "; " + c_.get_str() + " " +
               d_.get_str() + ")";
    }

private:
    void normalize() {
        Int dt = a_ * d_ - b_ * c_;
        if (dt <= 0) throw std::domain_error("ProjMatrix: determinant must be positive");
        Int g = gcd(gcd(a_, b_), gcd(c_, d_));
        if (g > 1) {
            a_ = exact_div(a_, g);
            b_ = exact_div(b_, g);
            c_ = exact_div(c_, g);
            d_ = exact_div(d_, g);
        }
        bool flip = c_ < 0 || (c_ == 0 && a_ < 0);
        if (flip) {
            a_ = -a_;
            b_ = -b_;
            c_ = -c_;
            d_ = -d_;
        }
    }

    Int a_, b_, c_, d_;
};

// Modular-arithmetic view of the functionals, as a tuple in the order
// (pi, rho_sq, sigma, theta).
inline std::tuple<ExtRat, ExtRat, Rat, Rat> functionals(const ProjMatrix& m) {
    return {m.pi(), m.rho_sq(), m.sigma(), m.theta()};
}

}  // namespace replica
