#include <doctest.h>

#include "replica/qseries.hpp"

using namespace replica;

namespace {

// Brute-force prod_{n=1}^{N} (1 - q^n), the oracle for the pentagonal-number
// expansion.
LaurentSeries euler_bruteforce(long trunc) {
    std::vector<Rat> c(trunc);
    c[0] = 1;
    for (long n = 1; n < trunc; ++n) {
        // multiply by (1 - q^n)
        for (long i = trunc - 1; i >= n; --i) c[i] -= c[i - n];
    }
    return LaurentSeries(1, 0, trunc, std::move(c));
}

}  // namespace

TEST_CASE("series arithmetic basics") {
    LaurentSeries qinv = LaurentSeries::monomial(-1, 1, 20);
    LaurentSeries cubed = qinv.pow(3);
    CHECK(cubed.lead() == -3);
    CHECK(cubed.coeff(-3) == 1);

    // invert(1 + q) = 1 - q + q^2 - ...
    std::vector<Rat> c(10, Rat(0));
    c[0] = 1;
    c[1] = 1;
    LaurentSeries one_plus_q(1, 0, 10, std::move(c));
    LaurentSeries inv = one_plus_q.invert();
    for (long e = 0; e < inv.trunc(); ++e) CHECK(inv.coeff(e) == (e % 2 == 0 ? 1 : -1));

    // mul truncation bookkeeping: (q^-1 + ... + O(q^T)) * (q^2 + O(q^T))
    LaurentSeries a = LaurentSeries::monomial(-1, 1, 8);
    LaurentSeries b = LaurentSeries::monomial(2, 1, 8);
    CHECK((a * b).trunc() == 7);
    CHECK((a * b).coeff(1) == 1);
}

TEST_CASE("euler product matches brute-force oracle") {
    LaurentSeries fast = euler_function(120);
    LaurentSeries slow = euler_bruteforce(120);
    for (long e = 0; e < 120; ++e) CHECK(fast.coeff(e) == slow.coeff(e));
}

TEST_CASE("eta quotients") {
    LaurentSeries t2b = eta_quotient({{1, 24}, {2, -24}}, 40);
    CHECK(t2b.lead() == -1);
    CHECK(t2b.coeff(-1) == 1);
    CHECK(t2b.coeff(0) == -24);
    CHECK(t2b.coeff(1) == 276);

    LaurentSeries t6b = eta_quotient({{2, 12}, {3, 12}, {1, -12}, {6, -12}}, 40);
    CHECK(t6b.lead() == -1);
    CHECK(t6b.coeff(-1) == 1);

    LaurentSeries one = eta_quotient({}, 12);
    CHECK(one.coeff(0) == 1);
    CHECK(one.lead() == 0);

    CHECK_THROWS_AS(eta_quotient({{1, 1}}, 10), SeriesError);
}

TEST_CASE("catalog q-expansion reference coefficients") {
    LaurentSeries t1a = hauptmodul(HId::T1A, 12);
    CHECK(t1a.coeff(1) == 196884);
    CHECK(t1a.coeff(2) == 21493760);
    CHECK(t1a.coeff(3) == 864299970);

    LaurentSeries t2a = hauptmodul(HId::T2A, 12);
    CHECK(t2a.coeff(1) == 4372);
    CHECK(t2a.coeff(2) == 96256);
    CHECK(t2a.coeff(3) == 1240002);

    LaurentSeries t6a = hauptmodul(HId::T6A, 12);
    CHECK(t6a.coeff(1) == 79);
    CHECK(t6a.coeff(2) == 352);
    CHECK(t6a.coeff(3) == 1431);
    CHECK(t6a.coeff(4) == 4160);
    CHECK(t6a.coeff(5) == 13015);

    LaurentSeries t3c = hauptmodul(HId::T3C, 12);
    CHECK(t3c.coeff(2) == 248);
    CHECK(t3c.coeff(5) == 4124);
    CHECK(t3c.coeff(8) == 34752);

    LaurentSeries t3a = hauptmodul(HId::T3A, 12);
    CHECK(t3a.coeff(1) == 783);
    CHECK(t3a.coeff(2) == 8672);

    LaurentSeries t5a = hauptmodul(HId::T5A, 12);
    CHECK(t5a.coeff(1) == 134);
    CHECK(t5a.coeff(2) == 760);

    LaurentSeries t7a = hauptmodul(HId::T7A, 12);
    CHECK(t7a.coeff(1) == 51);
    CHECK(t7a.coeff(2) == 204);

    LaurentSeries t10a = hauptmodul(HId::T10A, 12);
    CHECK(t10a.coeff(1) == 22);
    CHECK(t10a.coeff(2) == 56);
    CHECK(t10a.coeff(3) == 177);

    LaurentSeries t4 = hauptmodul(HId::T4x2, 12);
    CHECK(t4.coeff(1) == 52);
    CHECK(t4.coeff(3) == 834);

    LaurentSeries t22 = hauptmodul(HId::T2x2, 12);
    CHECK(t22.coeff(1) == -492);
}

TEST_CASE("catalog normalization, positivity and sparsity") {
    for (HId id : all_hids(true)) {
        LaurentSeries f = hauptmodul(id, 200);
        CHECK(f.lead() == -1);
        CHECK(f.coeff(-1) == 1);
        CHECK(f.coeff(0) == 0);
        long h = hid_group(id).h.get_si();
        for (long e = 1; e < f.trunc(); ++e) {
            if (!hid_allows_negative(id)) CHECK(f.coeff(e) >= 0);
            if (h > 1 && (e + 1) % h != 0) CHECK(f.coeff(e) == 0);
        }
    }
}

TEST_CASE("harmonic identities hold exactly to truncation") {
    long T = 80;
    // T_3C(q)^3 = T_1A(q^3) + 744
    LaurentSeries t3c = hauptmodul(HId::T3C, T);
    LaurentSeries t1a = hauptmodul(HId::T1A, T / 3 + 2);
    LaurentSeries lhs = t3c.pow(3);
    LaurentSeries rhs = t1a.scale_exponent(3) + Rat(744);
    for (long e = -3; e < std::min(lhs.trunc(), rhs.trunc()); ++e)
        CHECK(lhs.coeff_units(e) == rhs.coeff_units(e));

    // t_6A = t_6B + 1/t_6B with T_6A + 12 = t_6A
    LaurentSeries t6b = eta_quotient({{2, 12}, {3, 12}, {1, -12}, {6, -12}}, T);
    LaurentSeries t6a_harm = t6b + t6b.invert();
    LaurentSeries t6a = hauptmodul(HId::T6A, T) + Rat(12);
    for (long e = -1; e < std::min(t6a_harm.trunc(), t6a.trunc()); ++e)
        CHECK(t6a_harm.coeff_units(e) == t6a.coeff_units(e));

    // t_2A = t_2B + 4096/t_2B with T_2A - 24 = t_2A
    LaurentSeries t2b = eta_quotient({{1, 24}, {2, -24}}, T);
    LaurentSeries t2a_harm = t2b + Rat(4096) * t2b.invert();
    LaurentSeries t2a = hauptmodul(HId::T2A, T) - Rat(24);
    for (long e = -1; e < std::min(t2a_harm.trunc(), t2a.trunc()); ++e)
        CHECK(t2a_harm.coeff_units(e) == t2a.coeff_units(e));

    // T_4x2(q)^2 = T_2A(q^2) + 104; T_2x2(q)^2 = T_1A(q^2) - 984
    LaurentSeries t4 = hauptmodul(HId::T4x2, T);
    LaurentSeries rhs4 = hauptmodul(HId::T2A, T / 2 + 2).scale_exponent(2) + Rat(104);
    LaurentSeries lhs4 = t4.pow(2);
    for (long e = -2; e < std::min(lhs4.trunc(), rhs4.trunc()); ++e)
        CHECK(lhs4.coeff_units(e) == rhs4.coeff_units(e));

    LaurentSeries t22 = hauptmodul(HId::T2x2, T);
    LaurentSeries rhs22 = hauptmodul(HId::T1A, T / 2 + 2).scale_exponent(2) - Rat(984);
    LaurentSeries lhs22 = t22.pow(2);
    for (long e = -2; e < std::min(lhs22.trunc(), rhs22.trunc()); ++e)
        CHECK(lhs22.coeff_units(e) == rhs22.coeff_units(e));
}

TEST_CASE("cube root reproduces the 3C expansion from j(q^3)") {
    LaurentSeries t1a = hauptmodul(HId::T1A, 10);
    LaurentSeries j3 = (t1a + Rat(744)).scale_exponent(3);
    LaurentSeries root = j3.nth_root(3);
    CHECK(root.coeff(-1) == 1);
    CHECK(root.coeff(2) == 248);
    CHECK(root.coeff(5) == 4124);
    CHECK(root.coeff(8) == 34752);

    CHECK_THROWS_AS(LaurentSeries::monomial(-1, 1, 10).nth_root(2), SeriesError);
}

TEST_CASE("replicate_function") {
    CHECK(replicate_function(HId::T6A, 3) == HId::T2A);
    CHECK(replicate_function(HId::T6A, 2) == HId::T3A);
    CHECK(replicate_function(HId::T6A, 6) == HId::T1A);
    CHECK(replicate_function(HId::T6A, 5) == HId::T6A);
    CHECK(replicate_function(HId::T3C, 2) == HId::T3C);
    CHECK(replicate_function(HId::T3C, 3) == HId::T1A);
    CHECK(replicate_function(HId::T10A, 2) == HId::T5A);
    CHECK(replicate_function(HId::T10A, 5) == HId::T2A);
    CHECK(replicate_function(HId::T4x2, 2) == HId::T2A);
    CHECK(replicate_function(HId::T4x2, 4) == HId::T1A);
    CHECK(replicate_function(HId::T2x2, 2) == HId::T1A);
    for (HId id : all_hids(true)) {
        CHECK(replicate_function(id, 1) == id);
        // Composition law on a few pairs.
        for (long a : {2L, 3L})
            for (long b : {2L, 5L})
                CHECK(replicate_function(replicate_function(id, a), b) ==
                      replicate_function(id, a * b));
    }
}

TEST_CASE("evaluate at special points") {
    long prec = 192;
    LaurentSeries t2a = hauptmodul(HId::T2A, 128);
    HPoint half_i = HPoint::imaginary(Rat(1, 4), prec);  // i/2
    EvalResult r = evaluate(t2a, half_i, Real::of(1e-20, prec));
    CHECK_FALSE(r.truncation_insufficient);
    CHECK(abs(r.value.re - Real::of(544L, prec)).to_double() < 1e-15);
    CHECK(abs(r.value.im).to_double() < 1e-15);

    LaurentSeries t6a = hauptmodul(HId::T6A, 200);
    HPoint p6 = HPoint::imaginary(Rat(1, 18), prec);  // i/(3 sqrt 2)
    EvalResult r6 = evaluate(t6a, p6, Real::of(1e-15, prec));
    CHECK_FALSE(r6.truncation_insufficient);
    CHECK(abs(r6.value.re - Real::of(86L, prec)).to_double() < 1e-10);

    LaurentSeries t3a = hauptmodul(HId::T3A, 200);
    HPoint p3 = HPoint::imaginary(Rat(1, 12), prec);  // i/(2 sqrt 3)
    EvalResult r3 = evaluate(t3a, p3, Real::of(1e-15, prec));
    CHECK(abs(r3.value.re - Real::of(1416L, prec)).to_double() < 1e-10);
}

TEST_CASE("evaluate error contract is monotone under extra truncation") {
    // Reference at 4x truncation; halving target_err must keep the reported
    // value within err of the reference.
    LaurentSeries f256 = hauptmodul(HId::T2A, 256);
    LaurentSeries f64 = f256.truncated(64);
    long prec = 256;
    for (int k = 0; k < 8; ++k) {
        Rat x(k, 17);
        Arc arc(Rat(0), Rat(1, 2));
        if (arc.height_sq(x) <= 0) continue;
        HPoint tau = HPoint::on_arc(arc, x, prec);
        EvalResult ref = evaluate(f256, tau, Real::of(1e-40, prec));
        Real target = Real::of(1.0, prec);
        for (int halvings = 0; halvings < 10; ++halvings) {
            EvalResult got = evaluate(f64, tau, target);
            Real diff = (got.value - ref.value).magnitude();
            CHECK(diff <= got.err + ref.err);
            target = target * Real::of(0.5, prec);
        }
    }
}
