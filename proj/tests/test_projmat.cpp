#include <doctest.h>

#include <random>

#include "replica/projmat.hpp"

using namespace replica;

namespace {

std::mt19937 rng(20240517);

Rat random_rat(int bound = 12) {
    std::uniform_int_distribution<int> num(-bound, bound);
    std::uniform_int_distribution<int> den(1, bound);
    return make_rat(num(rng), den(rng));
}

Rat random_pos_rat(int bound = 12) {
    std::uniform_int_distribution<int> num(1, bound);
    std::uniform_int_distribution<int> den(1, bound);
    return make_rat(num(rng), den(rng));
}

ProjMatrix random_matrix(int bound = 50) {
    std::uniform_int_distribution<int> e(-bound, bound);
    for (;;) {
        Int a = e(rng), b = e(rng), c = e(rng), d = e(rng);
        if (a * d - b * c > 0) return ProjMatrix(a, b, c, d);
    }
}

ProjMatrix random_upper(int bound = 12) {
    // Random element of Omega_infinity.
    Rat t = random_rat(bound);
    Rat y = random_pos_rat(bound);
    return compose(ProjMatrix::translation(t), ProjMatrix::dilation(y));
}

}  // namespace

TEST_CASE("compose basics") {
    auto T = [](const Rat& x) { return ProjMatrix::translation(x); };
    CHECK(compose(T(Rat(1, 2)), T(Rat(1, 3))) == T(Rat(5, 6)));

    ProjMatrix lhs = compose(ProjMatrix::dilation(Rat(2)), T(Rat(3)));
    ProjMatrix rhs = compose(T(Rat(6)), ProjMatrix::dilation(Rat(2)));
    CHECK(lhs == rhs);
    CHECK(lhs == ProjMatrix(2, 6, 0, 1));

    CHECK(compose(ProjMatrix::inversion(), ProjMatrix::inversion()) == ProjMatrix::identity());
}

TEST_CASE("inverse") {
    CHECK(inverse(ProjMatrix(1, 1, 0, 1)) == ProjMatrix(1, -1, 0, 1));
    ProjMatrix w2(0, -1, 2, 0);
    CHECK(inverse(w2) == w2);
    ProjMatrix m(2, 1, 3, 2);
    CHECK(inverse(m) == ProjMatrix(-2, 1, 3, -2));
    CHECK(compose(m, inverse(m)) == ProjMatrix::identity());
}

TEST_CASE("functionals") {
    ProjMatrix m(1, 0, 2, 1);
    auto [pi, rho_sq, sigma, theta] = functionals(m);
    CHECK(pi == ExtRat(Rat(-1, 2)));
    CHECK(rho_sq == ExtRat(Rat(1, 4)));
    CHECK(sigma == Rat(1));
    CHECK(theta == Rat(1, 2));
    CHECK(m.pi() == ExtRat(Rat(-1, 2)));
    CHECK(m.rho_sq() == ExtRat(Rat(1, 4)));
    CHECK(m.sigma() == Rat(1));
    CHECK(m.theta() == Rat(1, 2));

    ProjMatrix u(2, 1, 0, 1);
    CHECK(u.pi().is_infinity());
    CHECK(u.rho_sq().is_infinity());
    CHECK(u.sigma() == Rat(2));
    CHECK(u.theta() == Rat(1));

    ProjMatrix w(0, -1, 2, 0);
    CHECK(w.pi() == ExtRat(Rat(0)));
    CHECK(w.rho_sq() == ExtRat(Rat(1, 2)));
    CHECK(w.theta() == Rat(0));
}

TEST_CASE("involutory decomposition") {
    auto d = ProjMatrix::inversion().involutory_decompose();
    CHECK_FALSE(d.parabolic_case);
    CHECK(d.theta == 0);
    CHECK(d.rho_sq == 1);
    CHECK(d.pi == 0);

    auto e = ProjMatrix(3, 0, 9, 3).involutory_decompose();
    CHECK_FALSE(e.parabolic_case);
    CHECK(e.theta == Rat(1, 3));
    CHECK(e.rho_sq == Rat(1, 9));
    CHECK(e.pi == Rat(-1, 3));

    auto f = ProjMatrix(2, 1, 0, 1).involutory_decompose();
    CHECK(f.parabolic_case);
    CHECK(f.theta == Rat(1));
    CHECK(f.sigma == Rat(2));
}

TEST_CASE("involutory decomposition round-trips on random matrices") {
    for (int i = 0; i < 1000; ++i) {
        ProjMatrix m = random_matrix();
        CHECK(m.involutory_decompose().recompose() == m);
    }
}

TEST_CASE("matrix commutation identities") {
    auto T = [](const Rat& x) { return ProjMatrix::translation(x); };
    auto D = [](const Rat& y) { return ProjMatrix::dilation(y); };
    ProjMatrix S = ProjMatrix::inversion();
    ProjMatrix I = ProjMatrix::identity();

    for (int i = 0; i < 1000; ++i) {
        Rat s = random_rat(), t = random_rat();
        Rat x = random_pos_rat(), y = random_pos_rat();

        CHECK(compose(T(s), T(t)) == T(s + t));
        CHECK(compose(D(x), D(y)) == D(x * y));
        CHECK(inverse(D(x)) == D(Rat(1 / x)));
        CHECK(inverse(S) == S);
        CHECK(compose(D(y), T(t)) == compose(T(t * y), D(y)));
        CHECK(compose(D(y), S) == compose(S, inverse(D(y))));

        ProjMatrix sts = compose(compose(S, T(t)), S);
        if (t == 0) {
            CHECK(sts == I);
        } else {
            Rat it = -1 / t;
            ProjMatrix rhs = compose(compose(T(it), D(Rat(1 / (t * t)))), compose(S, T(it)));
            CHECK(sts == rhs);
        }
    }
}

TEST_CASE("pi/rho/theta under the stabilizer of infinity") {
    for (int i = 0; i < 1000; ++i) {
        ProjMatrix m = random_matrix(20);
        ProjMatrix h = random_upper();
        ProjMatrix hm = compose(h, m);

        CHECK(hm.pi() == m.pi());
        if (!m.fixes_infinity()) {
            CHECK(hm.rho_sq().value() == h.sigma() * m.rho_sq().value());
            CHECK(m.rho_sq() == inverse(m).rho_sq());
            CHECK(m.pi() == inverse(m).apply_boundary(ExtRat::infinity()));
        }
        CHECK(hm.theta() == h.theta() + h.sigma() * m.theta());
    }
}

TEST_CASE("trace zero iff involution") {
    int seen_involutions = 0;
    for (int i = 0; i < 1000; ++i) {
        ProjMatrix m = random_matrix(10);
        bool square_trivial = compose(m, m) == ProjMatrix::identity() && m != ProjMatrix::identity();
        CHECK(m.is_involution() == square_trivial);
        if (square_trivial) ++seen_involutions;
    }
    CHECK(seen_involutions > 0);
}

TEST_CASE("arcs") {
    CHECK(ProjMatrix(0, -1, 2, 0).arc() == Arc(Rat(0), Rat(1, 2)));
    CHECK(ProjMatrix(1, 1, 0, 1).arc().is_infinite());
    CHECK(ProjMatrix(0, -1, 9, -3).arc() == Arc(Rat(1, 3), Rat(1, 9)));

    // Arcs depend only on the left coset by the stabilizer of infinity.
    for (int i = 0; i < 200; ++i) {
        ProjMatrix m = random_matrix(20);
        ProjMatrix h = ProjMatrix::translation(random_rat());
        CHECK(compose(h, m).arc() == m.arc());
    }
}

TEST_CASE("action on H and its boundary") {
    HPoint p(Real::of(0.0), Real::of(0.25));
    HPoint q = ProjMatrix::inversion().apply(p);
    CHECK(q.y.to_double() == doctest::Approx(4.0));
    CHECK(q.x.to_double() == doctest::Approx(0.0));

    ProjMatrix w2(0, -1, 2, 0);
    CHECK(w2.apply_boundary(ExtRat::infinity()) == ExtRat(Rat(0)));

    // K = (0 -1; 9 0) acts on |tau|^2 = 1/9 as tau -> -conj(tau).
    ProjMatrix k(0, -1, 9, 0);
    HPoint t = HPoint::on_arc(Arc(Rat(0), Rat(1, 9)), Rat(1, 5));
    HPoint kt = k.apply(t);
    CHECK(kt.x.to_double() == doctest::Approx(-t.x.to_double()));
    CHECK(kt.y.to_double() == doctest::Approx(t.y.to_double()));
}

TEST_CASE("im_factor") {
    HPoint any(Real::of(0.37), Real::of(1.7));
    CHECK(ProjMatrix::translation(Rat(5, 7)).im_factor(any).to_double() == doctest::Approx(1.0));

    // tau exactly on the arc of (0 -1; 2 0): the factor is exactly 1.
    ProjMatrix w2(0, -1, 2, 0);
    HPoint on = HPoint::on_arc(w2.arc(), Rat(0));
    CHECK(w2.im_factor(on).to_double() == 1.0);
    CHECK(w2.im_factor_exact(Rat(0), Rat(1, 2)) == Rat(1));

    ProjMatrix s = ProjMatrix::inversion();
    HPoint two_i(Real::of(0.0), Real::of(2.0));
    CHECK(s.im_factor(two_i).to_double() == doctest::Approx(0.25));
}
