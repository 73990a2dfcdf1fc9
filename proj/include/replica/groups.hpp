#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "replica/projmat.hpp"
#include "replica/rational.hpp"

namespace replica {

struct NotMember : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Unsupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline bool is_squarefree(const Int& m) {
    Int n = m < 0 ? Int(-m) : m;
    for (Int p = 2; p * p <= n; ++p)
        if (divides(p * p, n)) return false;
    return true;
}

// k * l = kl / gcd(k,l)^2, the operation of Ex(m).
inline Int exdiv_mul(const Int& k, const Int& l) {
    Int g = gcd(k, l);
    return exact_div(k * l, g * g);
}

// The abelian group Ex(m) of exact divisors of m: k | m with gcd(k, m/k) = 1.
struct ExactDivisorGroup {
    Int m;
    std::vector<Int> elements;  // sorted

    bool contains(const Int& k) const {
        return std::binary_search(elements.begin(), elements.end(), k);
    }
};

inline ExactDivisorGroup exact_divisors(const Int& m) {
    if (m < 1) throw std::domain_error("exact_divisors: m must be positive");
    ExactDivisorGroup g;
    g.m = m;
    for (Int k = 1; k * k <= m; ++k) {
        if (!divides(k, m)) continue;
        Int l = exact_div(m, k);
        if (gcd(k, l) == 1) {
            g.elements.push_back(k);
            if (l != k) g.elements.push_back(l);
        }
    }
    std::sort(g.elements.begin(), g.elements.end());
    return g;
}

// Closure of a set of exact divisors under the Ex(m) operation.
inline std::vector<Int> exdiv_closure(const Int& m, std::vector<Int> gens) {
    ExactDivisorGroup full = exact_divisors(m);
    std::set<Int> out{Int(1)};
    for (const Int& g : gens)
        if (!full.contains(g))
            throw std::domain_error("exdiv_closure: generator is not an exact divisor");
    bool grew = true;
    std::vector<Int> work(out.begin(), out.end());
    for (const Int& g : gens) out.insert(g);
    while (grew) {
        grew = false;
        std::vector<Int> cur(out.begin(), out.end());
        for (const Int& a : cur)
            for (const Int& b : cur)
                if (out.insert(exdiv_mul(a, b)).second) grew = true;
    }
    return {out.begin(), out.end()};
}

// The tuple naming Gamma_0(mh|h)+e,f,g,... (exact=false) or
// Gamma_0(mh||h)+e,f,g,... (exact=true).
struct GroupSpec {
    Int m = 1;
    Int h = 1;
    std::vector<Int> subgroup{Int(1)};  // sorted subgroup of Ex(m)
    bool exact = false;

    Int mh() const { return m * h; }

    bool subgroup_contains(const Int& k) const {
        return std::binary_search(subgroup.begin(), subgroup.end(), k);
    }
    bool full_subgroup() const {
        return (Int)subgroup.size() == (Int)exact_divisors(m).elements.size();
    }

    GroupSpec parent() const {
        GroupSpec g = *this;
        g.exact = false;
        return g;
    }

    friend bool operator==(const GroupSpec& a, const GroupSpec& b) {
        return a.m == b.m && a.h == b.h && a.exact == b.exact && a.subgroup == b.subgroup;
    }
    friend bool operator!=(const GroupSpec& a, const GroupSpec& b) { return !(a == b); }

    std::string str() const {
        std::string s = "Gamma0(" + mh().get_str();
        if (h > 1) s += (exact ? "||" : "|") + h.get_str();
        s += ")";
        if (full_subgroup()) {
            if (exact_divisors(m).elements.size() > 1) s += "+";
        } else if (subgroup.size() > 1) {
            s += "+";
            for (size_t i = 1; i < subgroup.size(); ++i) {
                if (i > 1) s += ",";
                s += subgroup[i].get_str();
            }
        }
        return s;
    }
};

inline bool lambda_supported(const GroupSpec& g) {
    if (g.h == 1) return true;
    return (g.m == 1 && g.h == 2) || (g.m == 1 && g.h == 3) || (g.m == 2 && g.h == 2);
}

inline GroupSpec make_group(const Int& m, const Int& h, std::vector<Int> gens, bool full,
                            bool exact = false) {
    GroupSpec g;
    g.m = m;
    g.h = h;
    g.subgroup = full ? exact_divisors(m).elements : exdiv_closure(m, std::move(gens));
    if (h == 1) exact = false;
    g.exact = exact;
    if (exact && !lambda_supported(g))
        throw Unsupported("make_group: no lambda character for " + g.str());
    return g;
}

// Gamma_0(m)+ with the full group of Atkin-Lehner involutions.
inline GroupSpec fricke_group(const Int& m) { return make_group(m, 1, {}, true); }

// Canonical coset representative (khw, x; mh^2 y, khz) with
// kwz - (m/k)xy = 1, y >= 0, and z > 0 when y = 0.
struct CanonicalRep {
    Int k, w, x, y, z;
    Int m, h;

    ProjMatrix matrix() const {
        return ProjMatrix(k * h * w, x, m * h * h * y, k * h * z);
    }
};

inline std::optional<CanonicalRep> canonical_rep_opt(const GroupSpec& g, const ProjMatrix& mat) {
    Int det = mat.det();
    for (const Int& k : g.subgroup) {
        Int target = k * g.h * g.h;
        if (!divides(det, target)) continue;
        Int s2 = exact_div(target, det);
        if (!is_square(s2)) continue;
        Int s = isqrt(s2);
        Int kh = k * g.h;
        Int mh2 = g.m * g.h * g.h;
        if (!divides(kh, s * mat.a()) || !divides(kh, s * mat.d()) ||
            !divides(mh2, s * mat.c()))
            continue;
        CanonicalRep rep;
        rep.k = k;
        rep.w = exact_div(s * mat.a(), kh);
        rep.x = s * mat.b();
        rep.y = exact_div(s * mat.c(), mh2);
        rep.z = exact_div(s * mat.d(), kh);
        rep.m = g.m;
        rep.h = g.h;
        return rep;
    }
    return std::nullopt;
}

namespace detail {
// Solve u*w - v*x = 1 for (w, x), given gcd(u, v) = 1.
inline std::pair<Int, Int> solve_unimodular(const Int& u, const Int& v) {
    Int gg, s, t;
    mpz_gcdext(gg.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t());
    if (gg != 1) throw std::domain_error("solve_unimodular: not coprime");
    // u*s + v*t = 1  =>  w = s, x = -t.
    return {s, -t};
}
}  // namespace detail

// Group element with the given canonical data (k, y, z), y > 0; (w, x) chosen
// by the extended Euclid algorithm.
inline std::optional<ProjMatrix> element_from_kyz(const GroupSpec& g, const Int& k, const Int& y,
                                                  const Int& z) {
    if (y <= 0 || !g.subgroup_contains(k)) return std::nullopt;
    Int u = k * z, v = exact_div(g.m, k) * y;
    if (gcd(u, v) != 1) return std::nullopt;
    auto [w, x] = detail::solve_unimodular(u, v);
    // k*w*z - (m/k)*x*y = 1 after matching shapes: u*w - v*x = 1.
    return ProjMatrix(k * g.h * w, x, g.m * g.h * g.h * y, k * g.h * z);
}

// ---------------------------------------------------------------------------
// The character lambda on the supported catalog, via word decomposition in
// the D_h-conjugated parent group.
// ---------------------------------------------------------------------------

// e^{2 pi i num / den}, num normalized into [0, den).
struct RootOfUnity {
    Int num = 0;
    Int den = 1;

    static RootOfUnity one() { return {}; }
    static RootOfUnity make(const Int& num, const Int& den) {
        RootOfUnity r;
        r.den = den;
        r.num = mod_nonneg(num, den);
        return r;
    }
    bool is_one() const { return num == 0; }
    RootOfUnity inverse() const { return make(-num, den); }
    friend RootOfUnity operator*(const RootOfUnity& a, const RootOfUnity& b) {
        Int d = lcm(a.den, b.den);
        return make(a.num * exact_div(d, a.den) + b.num * exact_div(d, b.den), d);
    }
    friend bool operator==(const RootOfUnity& a, const RootOfUnity& b) {
        return a.num * b.den == b.num * a.den;
    }
    Complex complex(long prec = 0) const {
        Real ang = Real::of(2L, prec) * Real::pi(prec) * Real::of(make_rat(num, den), prec);
        return {cos(ang), sin(ang)};
    }
    std::string str() const {
        if (num == 0) return "1";
        if (2 * num == den) return "-1";
        return "e^(2*pi*i*" + num.get_str() + "/" + den.get_str() + ")";
    }
};

namespace detail {

// Word statistics of an element of PSL2(Z) in the generators S, T:
// total T-exponent and S-count.
struct Psl2Word {
    Int t_exp = 0;
    long s_count = 0;
};

inline Psl2Word psl2_word(ProjMatrix u) {
    if (u.det() != 1) throw std::domain_error("psl2_word: determinant must be 1");
    Psl2Word word;
    // Peel S * T^{-q} from the left until the element fixes infinity.
    while (!u.fixes_infinity()) {
        Rat q_rat = make_rat(u.a(), u.c());
        Int q = rat_round(q_rat);
        u = compose(ProjMatrix::inversion(), compose(ProjMatrix::translation(Rat(-q)), u));
        word.t_exp += q;
        word.s_count += 1;
    }
    // Remaining element is T^b.
    word.t_exp += u.b() * u.d() > 0 ? Int(abs(u.b())) : Int(-abs(u.b()));
    return word;
}

// Word statistics of an element of Gamma_0(2)+ in the generators
// T, V = (1 0; 2 1), F2 = (0 -1; 2 0); the character values are
// chi(T) = chi(V) = -1, chi(F2) = +1, so only t+v counts matter.
inline long gamma02plus_word_parity(ProjMatrix u) {
    long parity = 0;
    if (u.det() == 2) {
        u = compose(ProjMatrix(0, -1, 2, 0), u);  // F2 prefix, character 1
    }
    if (u.det() != 1) throw std::domain_error("gamma02plus_word_parity: unexpected determinant");
    while (!u.fixes_infinity()) {
        // V^s step: minimize |c + 2 s a|.
        Rat s_rat = make_rat(-u.c(), 2 * u.a());
        Int s = rat_round(s_rat);
        if (s != 0) {
            u = compose(ProjMatrix(1, 0, 2 * s, 1), u);
            parity += mpz_odd_p(s.get_mpz_t()) ? 1 : 0;
        }
        if (u.fixes_infinity()) break;
        // T^t step: minimize |a + t c|.
        Rat t_rat = make_rat(-u.a(), u.c());
        Int t = rat_round(t_rat);
        if (t == 0) throw std::domain_error("gamma02plus_word_parity: reduction stalled");
        u = compose(ProjMatrix::translation(Rat(t)), u);
        parity += mpz_odd_p(t.get_mpz_t()) ? 1 : 0;
    }
    Int b = u.b() * u.d() > 0 ? Int(abs(u.b())) : Int(-abs(u.b()));
    parity += mpz_odd_p(b.get_mpz_t()) ? 1 : 0;
    return parity & 1;
}

}  // namespace detail

inline bool contains(const GroupSpec& g, const ProjMatrix& mat);

// lambda(M) for M in Gamma_0(mh|h)+W, catalog groups only. Values are h-th
// roots of unity with lambda(T^{1/h}) = e^{-2 pi i / h}.
inline RootOfUnity lambda(const GroupSpec& g, const ProjMatrix& mat) {
    if (!lambda_supported(g)) throw Unsupported("lambda: group outside catalog: " + g.str());
    if (g.h == 1) return RootOfUnity::one();
    if (!canonical_rep_opt(g.parent(), mat))
        throw NotMember("lambda: matrix not in " + g.parent().str());
    // Conjugate into the h = 1 parent: U = D_h M D_{1/h}.
    ProjMatrix u = compose(compose(ProjMatrix::dilation(Rat(g.h)), mat),
                           ProjMatrix::dilation(Rat(1, g.h)));
    if (g.m == 1) {
        auto word = detail::psl2_word(u);
        if (g.h == 3) return RootOfUnity::make(-word.t_exp, 3);
        return RootOfUnity::make(-(word.t_exp + word.s_count), 2);
    }
    // m = 2, h = 2: word in Gamma_0(2)+.
    return RootOfUnity::make(-Int(detail::gamma02plus_word_parity(u)), 2);
}

inline bool contains(const GroupSpec& g, const ProjMatrix& mat) {
    auto rep = canonical_rep_opt(g.parent(), mat);
    if (!rep) return false;
    if (!g.exact) return true;
    return lambda(g, mat).is_one();
}

inline CanonicalRep canonical_rep(const GroupSpec& g, const ProjMatrix& mat) {
    auto rep = canonical_rep_opt(g.parent(), mat);
    if (!rep) throw NotMember("canonical_rep: matrix not in " + g.parent().str());
    return *rep;
}

// r^2_{mh|h}(p/q) = (mhp, q)(hp, q) / (m h^2 q^2) for p/q in lowest terms.
inline ExtRat radius_from_pi(const GroupSpec& g, const ExtRat& p) {
    if (p.is_infinity()) return ExtRat::infinity();
    const Int& num = p.value().get_num();
    const Int& den = p.value().get_den();
    Int a = gcd(g.m * g.h * num, den);
    Int b = gcd(g.h * num, den);
    return ExtRat(make_rat(a * b, g.m * g.h * g.h * den * den));
}

inline bool has_one_cusp(const GroupSpec& g) {
    return is_squarefree(g.m) && g.full_subgroup();
}

// ---------------------------------------------------------------------------
// Hecke sets and phi_n
// ---------------------------------------------------------------------------

struct HeckeElement {
    Int a, b, d;  // upper triangular (a b; 0 d), ad = n, 0 <= b < d

    ProjMatrix matrix() const { return ProjMatrix(a, b, 0, d); }
    friend bool operator==(const HeckeElement& x, const HeckeElement& y) {
        return x.a == y.a && x.b == y.b && x.d == y.d;
    }
    std::string str() const {
        return "(" + a.get_str() + "," + b.get_str() + "," + d.get_str() + ")";
    }
};

inline std::vector<HeckeElement> hecke_set(const Int& n) {
    if (n < 1) throw std::domain_error("hecke_set: n must be positive");
    std::vector<HeckeElement> out;
    for (Int d = 1; d <= n; ++d) {
        if (!divides(d, n)) continue;
        Int a = exact_div(n, d);
        for (Int b = 0; b < d; ++b) out.push_back({a, b, d});
    }
    return out;
}

inline std::vector<HeckeElement> reduced_hecke_set(const Int& n) {
    std::vector<HeckeElement> out;
    for (auto& e : hecke_set(n))
        if (gcd(gcd(e.a, e.b), e.d) == 1) out.push_back(e);
    return out;
}

// phi_n of a canonical representative: a = (n, (m/k)y), d = n/a,
// b = z h^{-1} (my/(ak))^{-1} mod d.
inline HeckeElement phi_n(const GroupSpec& g, const CanonicalRep& rep, const Int& n) {
    if (gcd(n, g.h) != 1) throw std::invalid_argument("phi_n: requires gcd(n, h) = 1");
    Int my_over_k = exact_div(g.m, rep.k) * rep.y;
    Int a = gcd(n, my_over_k);
    if (a == 0) a = n;  // y = 0 case: gcd(n, 0) = n
    Int d = exact_div(n, a);
    Int b = 0;
    if (d > 1) {
        Int t = exact_div(my_over_k, a);
        b = mod_nonneg(rep.z * inv_mod(g.h, d) * inv_mod(t, d), d);
    }
    return {a, b, d};
}

inline HeckeElement phi_n(const GroupSpec& g, const ProjMatrix& mat, const Int& n) {
    return phi_n(g, canonical_rep(g, mat), n);
}

// ---------------------------------------------------------------------------
// Conjugation, extension, replication
// ---------------------------------------------------------------------------

// Gamma_t = D_t^{-1} Gamma D_t: multiplies h by t.
inline GroupSpec conjugate_group(const GroupSpec& g, const Int& t) {
    if (t < 1) throw std::domain_error("conjugate_group: t must be positive");
    GroupSpec out = g;
    out.h = g.h * t;
    return out;
}

// Gamma_{1/t} for t | h.
inline GroupSpec conjugate_group_down(const GroupSpec& g, const Int& t) {
    if (!divides(t, g.h)) throw std::domain_error("conjugate_group_down: t must divide h");
    GroupSpec out = g;
    out.h = exact_div(g.h, t);
    if (out.h == 1) out.exact = false;
    return out;
}

inline GroupSpec extend_group(const GroupSpec& g, const Int& k) {
    ExactDivisorGroup full = exact_divisors(g.m);
    if (!full.contains(k)) return g;
    GroupSpec out = g;
    std::vector<Int> gens = g.subgroup;
    gens.push_back(k);
    out.subgroup = exdiv_closure(g.m, gens);
    return out;
}

// Gamma^(a) = Gamma_0(mh/(mh,a) | h/(h,a)) + (subgroup intersected with
// Ex of the new m).
inline GroupSpec replicate_group(const GroupSpec& g, const Int& a) {
    if (a < 1) throw std::domain_error("replicate_group: a must be positive");
    Int new_mh = exact_div(g.mh(), gcd(g.mh(), a));
    Int new_h = exact_div(g.h, gcd(g.h, a));
    Int new_m = exact_div(new_mh, new_h);
    ExactDivisorGroup ex_new = exact_divisors(new_m);
    GroupSpec out;
    out.m = new_m;
    out.h = new_h;
    out.subgroup.clear();
    for (const Int& k : g.subgroup)
        if (ex_new.contains(k)) out.subgroup.push_back(k);
    out.exact = g.exact && new_h > 1;
    return out;
}

// ---------------------------------------------------------------------------
// solve_pi: a group element with prescribed pi value (single-cusp groups)
// ---------------------------------------------------------------------------

inline std::optional<ProjMatrix> solve_pi(const GroupSpec& g, const ExtRat& p) {
    if (p.is_infinity()) return ProjMatrix::identity();
    Int alpha = p.value().get_num();
    Int beta = p.value().get_den();
    // pi = -kz/(mhy) with (kz, y) = 1; the common factor of kz and mhy divides mh.
    Int mh = g.mh();
    for (Int gg = 1; gg <= mh; ++gg) {
        if (!divides(gg, mh)) continue;
        if (!divides(mh, beta * gg)) continue;
        Int y = exact_div(beta * gg, mh);
        if (y <= 0) continue;
        for (const Int& k : g.subgroup) {
            if (!divides(k, alpha * gg)) continue;
            Int z = exact_div(-alpha * gg, k);
            auto el = element_from_kyz(g, k, y, z);
            if (el && el->pi() == p) return el;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Brute-force check of the Hecke-set coset partition
// ---------------------------------------------------------------------------

struct CosetPartitionReport {
    long elements_checked = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Enumerates elements of g with canonical entries bounded by `bound` and
// verifies that D_n K H^{-1} lies in Gamma^(H) exactly for H = phi_n(K) and
// for no other H in the Hecke set.
inline CosetPartitionReport coset_partition_report(const GroupSpec& g, const Int& n, long bound) {
    if (gcd(n, g.h) != 1)
        throw std::invalid_argument("coset_partition_report: requires gcd(n, h) = 1");
    CosetPartitionReport report;
    auto hs = hecke_set(n);
    ProjMatrix dn = ProjMatrix::dilation(Rat(n));

    auto check = [&](const ProjMatrix& kmat, const CanonicalRep& rep) {
        HeckeElement expected = phi_n(g, rep, n);
        for (const auto& he : hs) {
            ProjMatrix cand = compose(compose(dn, kmat), inverse(he.matrix()));
            GroupSpec target = replicate_group(g, he.a);
            bool member = contains(target, cand);
            bool should = he == expected;
            if (member != should)
                report.violations.push_back(g.str() + " K=" + kmat.str() + " H=" + he.str() +
                                            (member ? " unexpectedly in" : " missing from") +
                                            " D_n K H^-1 partition");
        }
        ++report.elements_checked;
    };

    // y = 0 stratum: translations T^{x/h}.
    for (long x = -bound; x <= bound; ++x) {
        CanonicalRep rep{Int(1), Int(1), Int(x), Int(0), Int(1), g.m, g.h};
        check(rep.matrix(), rep);
    }
    for (const Int& k : g.subgroup) {
        Int mk = exact_div(g.m, k);
        for (Int y = 1; y <= bound; ++y) {
            for (Int z = -bound; z <= bound; ++z) {
                if (gcd(k * z, mk * y) != 1) continue;
                auto [w0, x0] = detail::solve_unimodular(k * z, mk * y);
                //  w = w0 + t*(m/k)y, x = x0 + t*k*z
                for (Int t = -bound; t <= bound; ++t) {
                    Int w = w0 + t * mk * y;
                    Int x = x0 + t * k * z;
                    if (abs(w) > bound || abs(x) > bound) continue;
                    CanonicalRep rep{k, w, x, y, z, g.m, g.h};
                    check(rep.matrix(), rep);
                }
            }
        }
    }
    return report;
}

}  // namespace replica
