#include <doctest.h>

#include <random>

#include "replica/fundomain.hpp"

using namespace replica;

namespace {

std::mt19937 frng(5150);

ProjMatrix random_member_of(const GroupSpec& g, int bound = 6) {
    for (;;) {
        Int k = g.subgroup[std::uniform_int_distribution<size_t>(0, g.subgroup.size() - 1)(frng)];
        Int y(std::uniform_int_distribution<int>(1, bound)(frng));
        Int z(std::uniform_int_distribution<int>(-bound, bound)(frng));
        auto el = element_from_kyz(g, k, y, z);
        if (!el) continue;
        Int r(std::uniform_int_distribution<int>(-bound, bound)(frng));
        return compose(ProjMatrix::translation(make_rat(r, g.h)), *el);
    }
}

bool has_class(const CriticalSet& ks, const ProjMatrix& m) {
    for (auto& c : ks.classes) {
        if (c.is_identity()) {
            if (m.fixes_infinity()) return true;
        } else if (!m.fixes_infinity() && c.pi == m.pi() && c.rho_sq == m.rho_sq()) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("lower boundaries of the worked groups") {
    auto b2 = lower_boundary(fricke_group(2));
    REQUIRE(b2.size() == 1);
    CHECK(b2[0].arc == Arc(Rat(0), Rat(1, 2)));
    CHECK(b2[0].x_lo == 0);
    CHECK(b2[0].x_hi == Rat(1, 2));

    auto b6 = lower_boundary(fricke_group(6));
    REQUIRE(b6.size() == 2);
    CHECK(b6[0].arc == Arc(Rat(0), Rat(1, 6)));
    CHECK(b6[0].x_lo == 0);
    CHECK(b6[0].x_hi == Rat(1, 3));
    CHECK(b6[1].arc == Arc(Rat(1, 2), Rat(1, 12)));
    CHECK(b6[1].x_lo == Rat(1, 3));
    CHECK(b6[1].x_hi == Rat(1, 2));

    auto b1 = lower_boundary(fricke_group(1));
    REQUIRE(b1.size() == 1);
    CHECK(b1[0].arc == Arc(Rat(0), Rat(1)));
    CHECK(b1[0].x_lo == 0);
    CHECK(b1[0].x_hi == Rat(1, 2));

    GroupSpec g33 = make_group(1, 3, {}, true);
    auto b33 = lower_boundary(g33);
    REQUIRE(b33.size() == 1);
    CHECK(b33[0].arc == Arc(Rat(0), Rat(1, 9)));
    CHECK(b33[0].x_lo == 0);
    CHECK(b33[0].x_hi == Rat(1, 6));

    // Exact group: three copies laid side to side.
    GroupSpec g33x = make_group(1, 3, {}, true, true);
    auto bx = lower_boundary(g33x);
    REQUIRE(bx.size() == 3);
    CHECK(bx[0].arc.center == ExtRat(Rat(-1, 3)));
    CHECK(bx[1].arc.center == ExtRat(Rat(0)));
    CHECK(bx[2].arc.center == ExtRat(Rat(1, 3)));
    for (auto& b : bx) CHECK(b.arc.sq_radius == ExtRat(Rat(1, 9)));
}

TEST_CASE("critical sets of the reference groups") {
    auto k1 = critical_set(fricke_group(1));
    CHECK(k1.classes.size() == 3);
    CHECK(has_class(k1, ProjMatrix::identity()));
    CHECK(has_class(k1, ProjMatrix::inversion()));
    CHECK(has_class(k1, ProjMatrix(0, -1, 1, -1)));

    auto k2 = critical_set(fricke_group(2));
    CHECK(k2.classes.size() == 4);
    CHECK(has_class(k2, ProjMatrix(0, -1, 2, 0)));
    CHECK(has_class(k2, ProjMatrix(0, -1, 2, -2)));
    CHECK(has_class(k2, ProjMatrix(1, -1, 2, -1)));

    auto k6 = critical_set(fricke_group(6));
    CHECK(k6.classes.size() == 4);
    CHECK(has_class(k6, ProjMatrix(0, -1, 6, 0)));
    CHECK(has_class(k6, ProjMatrix(3, -2, 6, -3)));
    CHECK(has_class(k6, ProjMatrix(2, -1, 6, -2)));

    auto k33 = critical_set(make_group(1, 3, {}, true));
    CHECK(k33.classes.size() == 3);
    CHECK(has_class(k33, ProjMatrix(0, -1, 9, 0)));
    CHECK(has_class(k33, ProjMatrix(0, -1, 9, -3)));

    // Conjugation: the 3|3 critical set is the PSL2(Z) one scaled by 1/3.
    for (size_t i = 1; i < k1.classes.size(); ++i) {
        Rat p = k1.classes[i].pi.value() / 3;
        bool found = false;
        for (size_t j = 1; j < k33.classes.size(); ++j)
            if (k33.classes[j].pi == ExtRat(p)) found = true;
        CHECK(found);
    }
}

TEST_CASE("reduce: worked examples") {
    long prec = 128;
    // PSL2: i/4 -> 4i via S.
    {
        auto r = reduce(fricke_group(1), HPoint::imaginary(Rat(1, 16), prec));
        CHECK(r.k == ProjMatrix::inversion());
        CHECK(r.tau.y.to_double() == doctest::Approx(4.0));
    }
    // Fricke 2: i/10 -> 5i via (0 -1; 2 0).
    {
        auto r = reduce(fricke_group(2), HPoint::imaginary(Rat(1, 100), prec));
        CHECK(r.k == ProjMatrix(0, -1, 2, 0));
        CHECK(r.tau.y.to_double() == doctest::Approx(5.0));
    }
    // Gamma0(6)+: an interior point stays put.
    {
        HPoint t(Real::of(0.3, prec), Real::of(2.0, prec));
        auto r = reduce(fricke_group(6), t);
        CHECK(r.k == ProjMatrix::identity());
    }
}

TEST_CASE("reduce: idempotence and orbit invariance") {
    long prec = 192;
    for (const GroupSpec& g : {fricke_group(2), fricke_group(6), make_group(1, 3, {}, true)}) {
        for (int i = 0; i < 40; ++i) {
            std::uniform_real_distribution<double> ux(-1.4, 1.4), uy(0.02, 3.0);
            HPoint tau(Real::of(ux(frng), prec), Real::of(uy(frng), prec));
            auto r = reduce(g, tau);
            CHECK(contains(g, r.k));
            // Idempotence: reducing the reduced point gives the identity.
            auto r2 = reduce(g, r.tau);
            bool id_or_tiny_move =
                r2.k == ProjMatrix::identity() ||
                abs(r2.tau.y - r.tau.y) < Real::of(1e-25, prec) * r.tau.y;
            CHECK(id_or_tiny_move);
            // Orbit invariance.
            ProjMatrix m = random_member_of(g);
            auto r3 = reduce(g, m.apply(tau));
            CHECK(abs(r3.tau.y - r.tau.y).to_double() <= 1e-20 * r.tau.y.to_double());
            CHECK(abs(r3.tau.x - r.tau.x).to_double() <= 1e-20);
        }
    }
}

TEST_CASE("reduce: exact groups use the kernel translates") {
    GroupSpec g33x = make_group(1, 3, {}, true, true);
    long prec = 160;
    for (int i = 0; i < 25; ++i) {
        std::uniform_real_distribution<double> ux(-0.49, 0.49), uy(0.05, 1.5);
        HPoint tau(Real::of(ux(frng), prec), Real::of(uy(frng), prec));
        auto r = reduce(g33x, tau);
        CHECK(contains(g33x, r.k));
        CHECK(r.tau.x.to_double() <= 0.5 + 1e-20);
        CHECK(r.tau.x.to_double() > -0.5 - 1e-20);
    }
}

TEST_CASE("domain conjugation: D(Gamma0(m)+) scales to D(Gamma0(mh|h)+)") {
    GroupSpec psl2 = fricke_group(1);
    GroupSpec g33 = make_group(1, 3, {}, true);
    long prec = 160;
    for (int i = 0; i < 40; ++i) {
        std::uniform_real_distribution<double> ux(-0.6, 0.6), uy(0.3, 2.5);
        double x = ux(frng), y = uy(frng);
        HPoint t1(Real::of(x, prec), Real::of(y, prec));
        HPoint t3(Real::of(x / 3, prec), Real::of(y / 3, prec));
        bool in1 = reduce(psl2, t1).k == ProjMatrix::identity();
        bool in3 = reduce(g33, t3).k == ProjMatrix::identity();
        CHECK(in1 == in3);
    }
}

TEST_CASE("domain constants of the reference groups") {
    auto c2 = constants(fricke_group(2));
    CHECK(c2.c == Rat(1, 2));
    CHECK(c2.y0.square() == Rat(1, 4));            // y0 = 1/2
    CHECK(c2.N1.square() == Rat(18));              // N1 = 3 sqrt 2
    CHECK(c2.N2 == 2);
    CHECK(c2.N.square() == Rat(18));               // N = 3 sqrt 2
    CHECK(c2.N_int == 5);

    auto c6 = constants(fricke_group(6));
    CHECK(c6.c == Rat(1, 2));
    CHECK(c6.y0.square() == Rat(1, 18));           // y0 = 1/(3 sqrt 2)
    CHECK(c6.N1.square() == Rat(150));             // N1 = 5 sqrt 6
    CHECK(c6.N2 == 6);
    CHECK(c6.N.square() == Rat(150));
    CHECK(c6.N_int == 13);

    auto c33 = constants(make_group(1, 3, {}, true));
    CHECK(c33.c == Rat(1, 2));
    CHECK(c33.y0.square() == Rat(1, 12));          // y0 = sqrt(3)/6
    CHECK(c33.N2 == 9);
    CHECK(c33.N.square() == Rat(81));              // N = 9 exactly
    CHECK(c33.N_int == 9);

    auto c1 = constants(fricke_group(1));
    CHECK(c1.c == Rat(1, 2));
    CHECK(c1.y0.square() == Rat(3, 4));            // y0 = sqrt(3)/2
    CHECK(c1.N_int == 2);
}

TEST_CASE("y0 bound holds for every catalog core") {
    for (long m : {1L, 2L, 3L, 5L, 6L, 7L, 10L}) CHECK(y0_bound_check(fricke_group(m)));
    CHECK(y0_bound_check(make_group(1, 3, {}, true)));
    CHECK(y0_bound_check(make_group(2, 2, {}, true)));
    CHECK(y0_bound_check(make_group(1, 2, {}, true)));
}

TEST_CASE("boundary owners are critical; im-factor bound off the critical set") {
    for (const GroupSpec& g :
         {fricke_group(2), fricke_group(6), fricke_group(5), make_group(1, 3, {}, true)}) {
        auto ks = critical_set(g);
        auto bd = lower_boundary(g);
        auto dc = constants(g);
        for (auto& b : bd) {
            bool found = false;
            for (auto& c : ks.classes)
                if (!c.is_identity() && c.pi == b.owner.pi) found = true;
            CHECK(found);
        }
        // Every non-identity critical class owning positive boundary length
        // appears among the boundary owners.
        for (auto& c : ks.classes) {
            if (c.is_identity()) continue;
            bool owns = false;
            for (auto& b : bd)
                if (b.owner.pi == c.pi) owns = true;
            bool touches_endpoint = false;
            for (auto& e : dc.endpoints) {
                Rat d = e.first - c.pi.value();
                if (c.rho_sq.value() - d * d == e.second) touches_endpoint = true;
            }
            CHECK((owns || touches_endpoint));
        }
        // Off-critical bound: non-critical candidates have im-factor <= c at
        // every endpoint (exact rational test).
        auto cands = detail::candidate_arcs(g);
        for (auto& a : cands) {
            bool crit = false;
            for (auto& c : ks.classes)
                if (!c.is_identity() && c.pi == ExtRat(a.p)) crit = true;
            if (crit) continue;
            for (auto& e : dc.endpoints) {
                Rat d = e.first - a.p;
                CHECK(a.r2 / (d * d + e.second) <= dc.c);
            }
        }
    }
}

TEST_CASE("phi_n injects on the critical set above N; n Im K tau > 1") {
    for (const GroupSpec& g : {fricke_group(2), fricke_group(6), make_group(1, 3, {}, true)}) {
        auto ks = critical_set(g);
        auto dc = constants(g);
        Int n = dc.N_int + 1;
        while (gcd(n, g.h) != 1) ++n;
        std::vector<HeckeElement> images;
        for (auto& c : ks.classes) {
            HeckeElement he = c.is_identity() ? HeckeElement{n, 0, 1}
                                              : phi_n(g, canonical_rep(g, c.rep), n);
            for (auto& prev : images) CHECK_FALSE(prev == he);
            images.push_back(he);
        }
        // n Im K tau > 1 for critical classes and endpoint points.
        for (auto& c : ks.classes) {
            for (auto& e : dc.endpoints) {
                Rat factor = c.is_identity()
                                 ? Rat(1)
                                 : Rat(c.rho_sq.value() /
                                       ((e.first - c.pi.value()) * (e.first - c.pi.value()) +
                                        e.second));
                // (n * factor)^2 * y^2 > 1
                Rat nf = Rat(n) * factor;
                CHECK(nf * nf * e.second > 1);
            }
        }
    }
}

#include "replica/svg.hpp"

TEST_CASE("svg rendering of domains") {
    std::string s2 = render_domain_svg(fricke_group(2));
    // One bold lower-boundary path.
    size_t bold = 0, pos = 0;
    while ((pos = s2.find("stroke-width=\"3\"", pos)) != std::string::npos) {
        ++bold;
        pos += 10;
    }
    CHECK(bold == 1);
    CHECK(s2.find("<svg") == 0);

    std::string s6 = render_domain_svg(fricke_group(6));
    bold = 0;
    pos = 0;
    while ((pos = s6.find("stroke-width=\"3\"", pos)) != std::string::npos) {
        ++bold;
        pos += 10;
    }
    CHECK(bold == 2);

    std::string s33 = render_domain_svg(make_group(1, 3, {}, true, true));
    bold = 0;
    pos = 0;
    while ((pos = s33.find("stroke-width=\"3\"", pos)) != std::string::npos) {
        ++bold;
        pos += 10;
    }
    CHECK(bold == 3);  // three copies laid side to side
}
