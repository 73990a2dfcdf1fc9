#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "replica/qseries.hpp"

namespace replica {

struct InsufficientTruncation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct HarmonicMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StructureViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Polynomial with exact rational coefficients, ascending order.
struct PolyQ {
    std::vector<Rat> c;  // c[i] * X^i

    long degree() const { return (long)c.size() - 1; }

    friend bool operator==(const PolyQ& a, const PolyQ& b) { return a.c == b.c; }

    friend PolyQ operator*(const PolyQ& a, const PolyQ& b) {
        if (a.c.empty() || b.c.empty()) return {};
        PolyQ out;
        out.c.assign(a.c.size() + b.c.size() - 1, Rat(0));
        for (size_t i = 0; i < a.c.size(); ++i)
            for (size_t j = 0; j < b.c.size(); ++j) out.c[i + j] += a.c[i] * b.c[j];
        return out;
    }
    friend PolyQ operator+(const PolyQ& a, const PolyQ& b) {
        PolyQ out = a;
        if (out.c.size() < b.c.size()) out.c.resize(b.c.size(), Rat(0));
        for (size_t i = 0; i < b.c.size(); ++i) out.c[i] += b.c[i];
        return out;
    }

    // Substitute X -> inner(X).
    PolyQ compose(const PolyQ& inner) const {
        PolyQ acc;
        for (long i = degree(); i >= 0; --i) {
            acc = acc * inner;
            if (acc.c.empty()) acc.c.push_back(Rat(0));
            acc.c[0] += c[i];
        }
        return acc;
    }

    Complex eval(const Complex& x) const {
        long prec = x.re.prec();
        Complex acc{Real::of(0L, prec), Real::of(0L, prec)};
        for (long i = degree(); i >= 0; --i) {
            acc = acc * x;
            acc.re += Real::of(c[i], prec);
        }
        return acc;
    }
    Real eval_abs(const Real& x) const {
        // sum |c_i| x^i for x >= 0; majorant used in error propagation.
        Real acc = Real::of(0L, x.prec());
        for (long i = degree(); i >= 0; --i) {
            acc = acc * x;
            acc += abs(Real::of(c[i], x.prec()));
        }
        return acc;
    }
    PolyQ derivative() const {
        PolyQ out;
        for (size_t i = 1; i < c.size(); ++i) out.c.push_back(Rat((long)i) * c[i]);
        return out;
    }

    LaurentSeries eval_on_series(const LaurentSeries& f) const {
        LaurentSeries acc = LaurentSeries::zero(f.step_den(), f.trunc());
        for (long i = degree(); i >= 0; --i) {
            acc = acc * f;
            acc = acc + c[i];
        }
        return acc;
    }

    std::string str() const {
        std::string s;
        for (long i = degree(); i >= 0; --i) {
            if (c[i] == 0 && degree() > 0) continue;
            if (!s.empty()) s += " + ";
            if (i == 0 || c[i] != 1) s += c[i].get_str();
            if (i > 0) {
                if (c[i] != 1) s += "*";
                s += "X";
                if (i > 1) s += "^" + std::to_string(i);
            }
        }
        return s.empty() ? "0" : s;
    }
};

// The unique monic degree-n polynomial with F(f(q)) = q^{-n} + O(q), by
// greedy elimination of the principal part.
inline PolyQ faber_poly(const LaurentSeries& f_in, long n) {
    if (n < 0) throw std::invalid_argument("faber_poly: n must be >= 0");
    if (f_in.step_den() != 1 || f_in.lead() != -1 || f_in.coeff(-1) != 1 || f_in.coeff(0) != 0)
        throw SeriesError("faber_poly: series is not a normalized q^-1 + O(q) expansion");
    if (f_in.trunc() < n + 2)
        throw InsufficientTruncation("faber_poly: need truncation >= n + 2");
    LaurentSeries f = f_in.truncated(n + 2);

    std::vector<LaurentSeries> powers;
    powers.reserve(n + 1);
    powers.push_back(LaurentSeries::constant(Rat(1), 1, n + 2));
    for (long e = 1; e <= n; ++e) powers.push_back(powers.back() * f);

    PolyQ out;
    out.c.assign(n + 1, Rat(0));
    out.c[n] = 1;
    LaurentSeries r = powers[n];
    for (long e = n - 1; e >= 0; --e) {
        Rat alpha = r.coeff(-e);
        if (alpha != 0) {
            out.c[e] = -alpha;
            r = r - alpha * powers[e];
        }
    }
    return out;
}

// F_{n,f} as a q-series, computed exactly through the collapsed form of the
// twisted Hecke sum: sum over ad = n of d * sum_j a^{(a)}_{dj} q^{aj} (the
// root-of-unity sums over b vanish except when d divides the index).
inline LaurentSeries twisted_hecke_sum(HId id, const Int& n_int, long trunc) {
    long n = n_int.get_si();
    if (n < 1) throw std::invalid_argument("twisted_hecke_sum: n must be positive");
    long lead = -n;
    std::vector<Rat> out(trunc - lead, Rat(0));
    for (long a = 1; a <= n; ++a) {
        if (n % a != 0) continue;
        long d = n / a;
        HId rep = replicate_function(id, a);
        long max_j = (trunc - 1) / a;           // exponent a*j < trunc
        long needed = d * max_j + 1;            // need f^(a) through index d*max_j
        LaurentSeries fa = hauptmodul(rep, std::max(needed, 2L));
        for (long k = fa.lead(); k < fa.trunc(); ++k) {
            if (k % d != 0) continue;
            long e = a * (k / d);
            if (e >= trunc || e < lead) continue;
            const Rat& ck = fa.coeff(k);
            if (ck != 0) out[e - lead] += Rat(d) * ck;
        }
    }
    return LaurentSeries(1, lead, trunc, std::move(out));
}

// Coefficient-exact replication check: the twisted Hecke sum equals the Faber
// polynomial of the Hauptmodul evaluated on itself, through the given depth.
inline bool verify_replication(HId id, const Int& n_int, long depth) {
    long n = n_int.get_si();
    LaurentSeries lhs = twisted_hecke_sum(id, n_int, depth + 1);
    LaurentSeries f = hauptmodul(id, depth + n + 2);
    PolyQ fn = faber_poly(f, n);
    LaurentSeries rhs = fn.eval_on_series(f);
    for (long e = -n; e <= depth; ++e)
        if (lhs.coeff(e) != rhs.coeff(e)) return false;
    return true;
}

// f(q)^d = g(q^d) + c, coefficient-exact to the available truncation.
inline bool harmonic_check(const LaurentSeries& f, const LaurentSeries& g, long d, const Rat& c) {
    LaurentSeries lhs = f.pow(d);
    LaurentSeries rhs = g.scale_exponent(d) + c;
    long hi = std::min(lhs.trunc(), rhs.trunc());
    for (long e = -d; e < hi; ++e)
        if (lhs.coeff_units(e) != rhs.coeff_units(e)) return false;
    return true;
}

// Harmonic Faber relation: when f(q)^d = g(q^d) + c, the polynomials
// satisfy F_{n,f}(X) = F_{n/d,g}(X^d - c).
inline bool harmonic_faber(HId id_f, HId id_g, long d, const Rat& c, long n) {
    if (n % d != 0) throw std::invalid_argument("harmonic_faber: d must divide n");
    long depth = n + 8;
    LaurentSeries f = hauptmodul(id_f, depth);
    LaurentSeries g = hauptmodul(id_g, depth);
    if (!harmonic_check(f, g, d, c))
        throw HarmonicMismatch("harmonic_faber: f^d != g(q^d) + c for " + hid_name(id_f));
    PolyQ lhs = faber_poly(f, n);
    PolyQ inner;  // X^d - c
    inner.c.assign(d + 1, Rat(0));
    inner.c[0] = -c;
    inner.c[d] = 1;
    PolyQ rhs = faber_poly(g, n / d).compose(inner);
    return lhs == rhs;
}

// For h > 1 entries: F_{n,f}(X) = X^t g(X^h) with n = h s + t; returns (t, g).
inline std::pair<long, PolyQ> faber_structure(HId id, long n) {
    long h = hid_group(id).h.get_si();
    if (h <= 1) throw std::invalid_argument("faber_structure: requires h > 1");
    long t = n % h;
    PolyQ fn = faber_poly(hauptmodul(id, n + 4), n);
    PolyQ g;
    g.c.assign((n - t) / h + 1, Rat(0));
    for (long e = 0; e <= n; ++e) {
        if (fn.c[e] == 0) continue;
        if ((e - t) % h != 0)
            throw StructureViolation("faber_structure: stray coefficient at X^" +
                                     std::to_string(e) + " in F_{" + std::to_string(n) + "," +
                                     hid_name(id) + "}");
        g.c[(e - t) / h] = fn.c[e];
    }
    return {t, g};
}

}  // namespace replica
