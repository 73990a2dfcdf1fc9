#include <doctest.h>

#include "replica/faber.hpp"

using namespace replica;

TEST_CASE("faber polynomials: small cases") {
    // n = 1: F = X for any normalized f.
    for (HId id : {HId::T1A, HId::T6A, HId::T3C}) {
        PolyQ f1 = faber_poly(hauptmodul(id, 8), 1);
        REQUIRE(f1.degree() == 1);
        CHECK(f1.c[1] == 1);
        CHECK(f1.c[0] == 0);
    }

    PolyQ f2_3a = faber_poly(hauptmodul(HId::T3A, 10), 2);
    REQUIRE(f2_3a.degree() == 2);
    CHECK(f2_3a.c[2] == 1);
    CHECK(f2_3a.c[1] == 0);
    CHECK(f2_3a.c[0] == -1566);

    // F_{3,2A} = X^3 - 3 a_1 X - 3 a_2 with a_1 = 4372, a_2 = 96256, so the
    // linear coefficient is -13116; F(152) = 1229408 feeds the special-value
    // chain ending at T_2A(i/(3 sqrt2)) = 614552.
    PolyQ f3_2a = faber_poly(hauptmodul(HId::T2A, 10), 3);
    REQUIRE(f3_2a.degree() == 3);
    CHECK(f3_2a.c[3] == 1);
    CHECK(f3_2a.c[2] == 0);
    CHECK(f3_2a.c[1] == -13116);
    CHECK(f3_2a.c[0] == -288768);
    CHECK(f3_2a.eval(Complex{Real::of(152L), Real::of(0L)}).re.to_double() ==
          doctest::Approx(1229408.0));

    CHECK_THROWS_AS((void)faber_poly(hauptmodul(HId::T2A, 8), 30), InsufficientTruncation);
}

TEST_CASE("faber defining property and uniqueness") {
    for (HId id : {HId::T2A, HId::T6A, HId::T3C, HId::T4x2}) {
        long depth = 40;
        LaurentSeries f = hauptmodul(id, depth + 14);
        for (long n : {1L, 2L, 5L, 9L, 12L}) {
            PolyQ fn = faber_poly(f, n);
            LaurentSeries comp = fn.eval_on_series(f);
            CHECK(comp.coeff(-n) == 1);
            for (long e = -n + 1; e <= 0; ++e) CHECK(comp.coeff(e) == 0);
            // Uniqueness margin: nothing constrains positive exponents, but
            // they must be well-defined up to the available truncation.
            CHECK(comp.trunc() >= depth - n);
        }
    }
}

TEST_CASE("twisted Hecke sums") {
    // n = 1 reproduces the function itself.
    LaurentSeries th1 = twisted_hecke_sum(HId::T1A, 1, 30);
    LaurentSeries t1a = hauptmodul(HId::T1A, 30);
    for (long e = -1; e < 30; ++e) CHECK(th1.coeff(e) == t1a.coeff(e));

    // 2A at n = 2: agrees with the Faber route, coefficient-wise to 60 terms.
    LaurentSeries th2 = twisted_hecke_sum(HId::T2A, 2, 60);
    LaurentSeries f = hauptmodul(HId::T2A, 64 + 2);
    LaurentSeries faber_route = faber_poly(f, 2).eval_on_series(f);
    CHECK(th2.coeff(-2) == 1);
    CHECK(th2.coeff(-1) == 0);
    CHECK(th2.coeff(0) == 0);
    for (long e = -2; e < 60; ++e) CHECK(th2.coeff(e) == faber_route.coeff(e));

    // 3C at n = 3 equals T_3C^3 - 744 as a series (harmonic oracle).
    LaurentSeries th3 = twisted_hecke_sum(HId::T3C, 3, 40);
    LaurentSeries harm = hauptmodul(HId::T3C, 48).pow(3) - Rat(744);
    for (long e = -3; e < 40; ++e) CHECK(th3.coeff(e) == harm.coeff(e));
}

TEST_CASE("replication spot checks") {
    CHECK(verify_replication(HId::T1A, 2, 40));
    CHECK(verify_replication(HId::T6A, 5, 40));
    CHECK(verify_replication(HId::T10A, 4, 30));
    CHECK(verify_replication(HId::T4x2, 3, 30));
    CHECK(verify_replication(HId::T2x2, 3, 30));
    for (HId id : all_hids(true)) CHECK(verify_replication(id, 1, 20));
}

TEST_CASE("harmonic Faber relations") {
    // F_{n,3C}(X) = F_{n/3,1A}(X^3 - 744)
    CHECK(harmonic_faber(HId::T3C, HId::T1A, 3, Rat(744), 3));
    CHECK(harmonic_faber(HId::T3C, HId::T1A, 3, Rat(744), 6));

    // Direct form at n = 3 and n = 6.
    PolyQ f3 = faber_poly(hauptmodul(HId::T3C, 10), 3);
    REQUIRE(f3.degree() == 3);
    CHECK(f3.c[0] == -744);
    CHECK(f3.c[1] == 0);
    CHECK(f3.c[2] == 0);

    PolyQ f6 = faber_poly(hauptmodul(HId::T3C, 12), 6);
    // (X^3 - 744)^2 - 2*196884
    PolyQ expect;
    expect.c.assign(7, Rat(0));
    expect.c[6] = 1;
    expect.c[3] = -1488;
    expect.c[0] = Rat(744) * Rat(744) - Rat(2) * Rat(196884);
    CHECK(f6 == expect);

    // d = 1, c = 0 is the identity relation.
    CHECK(harmonic_faber(HId::T2A, HId::T2A, 1, Rat(0), 5));

    // Wrong constant must throw.
    CHECK_THROWS_AS((void)harmonic_faber(HId::T3C, HId::T1A, 3, Rat(743), 3), HarmonicMismatch);
}

TEST_CASE("faber structure for h > 1") {
    auto [t4, g4] = faber_structure(HId::T3C, 4);
    CHECK(t4 == 1);
    CHECK(g4.degree() == 1);

    auto [t3, g3] = faber_structure(HId::T3C, 3);
    CHECK(t3 == 0);
    REQUIRE(g3.degree() == 1);
    CHECK(g3.c[0] == -744);
    CHECK(g3.c[1] == 1);

    auto [t1, g1] = faber_structure(HId::T3C, 1);
    CHECK(t1 == 1);
    CHECK(g1.degree() == 0);
    CHECK(g1.c[0] == 1);

    // The zero-rotation symmetry is literal: no stray coefficients for any
    // small n on the h > 1 entries.
    for (HId id : {HId::T3C, HId::T4x2, HId::T2x2})
        for (long n = 1; n <= 12; ++n) CHECK_NOTHROW((void)faber_structure(id, n));
}

TEST_CASE("the rejected 4||2+ branch has negative coefficients") {
    // sqrt(T2A(q^2) - 152) also satisfies the small replication gates; the
    // non-negativity gate is what pins the catalog construction at +104.
    LaurentSeries t2a = hauptmodul(HId::T2A, 40);
    LaurentSeries other = (t2a.scale_exponent(2) - Rat(152)).truncated(60).nth_root(2);
    CHECK(other.coeff(1) == -76);
}
