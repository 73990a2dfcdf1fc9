#pragma once

#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "replica/groups.hpp"
#include "replica/projmat.hpp"
#include "replica/rational.hpp"
#include "replica/real.hpp"

namespace replica {

struct SeriesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct Diverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Truncated Laurent series sum_{u >= lead} c[u - lead] * q^(u / step_den),
// with exact rational coefficients. Exponents at or beyond trunc (in units of
// 1/step_den) are unknown; arithmetic never pretends to know them.
class LaurentSeries {
public:
    LaurentSeries() : step_den_(1), lead_(0), trunc_(0) {}

    LaurentSeries(long step_den, long lead, long trunc, std::vector<Rat> coeffs)
        : step_den_(step_den), lead_(lead), trunc_(trunc), c_(std::move(coeffs)) {
        if (step_den_ < 1) throw SeriesError("step_den must be positive");
        if ((long)c_.size() != trunc_ - lead_) throw SeriesError("coefficient span mismatch");
        strip();
    }

    static LaurentSeries zero(long step_den, long trunc) {
        return LaurentSeries(step_den, trunc, trunc, {});
    }
    static LaurentSeries constant(const Rat& v, long step_den, long trunc) {
        if (trunc <= 0 || v == 0) return zero(step_den, trunc);
        std::vector<Rat> c(trunc);
        c[0] = v;
        return LaurentSeries(step_den, 0, trunc, std::move(c));
    }
    // q^(e/step_den)
    static LaurentSeries monomial(long e, long step_den, long trunc) {
        if (e >= trunc) return zero(step_den, trunc);
        std::vector<Rat> c(trunc - e);
        c[0] = 1;
        return LaurentSeries(step_den, e, trunc, std::move(c));
    }

    long step_den() const { return step_den_; }
    long lead() const { return lead_; }
    long trunc() const { return trunc_; }
    bool is_zero() const { return c_.empty(); }

    // Coefficient of q^(u / step_den); u must be below the truncation.
    const Rat& coeff_units(long u) const {
        static const Rat zero_rat(0);
        if (u >= trunc_) throw SeriesError("coeff_units: beyond truncation");
        if (u < lead_) return zero_rat;
        return c_[u - lead_];
    }
    // Coefficient of q^e for integer exponent e.
    const Rat& coeff(long e) const { return coeff_units(e * step_den_); }

    LaurentSeries truncated(long new_trunc) const {
        if (new_trunc >= trunc_) return *this;
        long n = std::max(0L, new_trunc - lead_);
        return LaurentSeries(step_den_, std::min(lead_, new_trunc), new_trunc,
                             std::vector<Rat>(c_.begin(), c_.begin() + n));
    }

    // Reinterpret q -> q^d (exponents multiply by d).
    LaurentSeries scale_exponent(long d) const {
        if (d < 1) throw SeriesError("scale_exponent: d must be positive");
        std::vector<Rat> out;
        if (!c_.empty()) {
            out.resize((c_.size() - 1) * d + 1);
            for (size_t i = 0; i < c_.size(); ++i) out[i * d] = c_[i];
        }
        long lead = c_.empty() ? trunc_ * d : lead_ * d;
        long trunc = lead + (long)out.size();
        return LaurentSeries(step_den_, lead, trunc, std::move(out));
    }

    friend LaurentSeries operator+(const LaurentSeries& a, const LaurentSeries& b) {
        long sd = a.common_step(b);
        long trunc = std::min(a.trunc_, b.trunc_);
        long lead = std::min(a.c_.empty() ? trunc : a.lead_, b.c_.empty() ? trunc : b.lead_);
        if (lead >= trunc) return zero(sd, trunc);
        std::vector<Rat> c(trunc - lead);
        for (long u = lead; u < trunc; ++u) {
            Rat v(0);
            if (u >= a.lead_ && u < a.trunc_ && !a.c_.empty() && u - a.lead_ < (long)a.c_.size())
                v += a.c_[u - a.lead_];
            if (u >= b.lead_ && u < b.trunc_ && !b.c_.empty() && u - b.lead_ < (long)b.c_.size())
                v += b.c_[u - b.lead_];
            c[u - lead] = v;
        }
        return LaurentSeries(sd, lead, trunc, std::move(c));
    }
    friend LaurentSeries operator-(const LaurentSeries& a, const LaurentSeries& b) {
        return a + (Rat(-1) * b);
    }
    friend LaurentSeries operator*(const Rat& s, const LaurentSeries& a) {
        if (s == 0) return zero(a.step_den_, a.trunc_);
        std::vector<Rat> c = a.c_;
        for (Rat& v : c) v *= s;
        return LaurentSeries(a.step_den_, a.lead_, a.trunc_, std::move(c));
    }
    friend LaurentSeries operator+(const LaurentSeries& a, const Rat& s) {
        return a + constant(s, a.step_den_, a.trunc_);
    }
    friend LaurentSeries operator-(const LaurentSeries& a, const Rat& s) {
        return a + constant(-s, a.step_den_, a.trunc_);
    }

    friend LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
        long sd = a.common_step(b);
        if (a.is_zero() || b.is_zero())
            return zero(sd, std::min(a.trunc_, b.trunc_));
        // Known range: exponents below min(lead_a + trunc_b, lead_b + trunc_a).
        long trunc = std::min(a.lead_ + b.trunc_, b.lead_ + a.trunc_);
        long lead = a.lead_ + b.lead_;
        std::vector<Rat> c(trunc - lead);
        for (size_t i = 0; i < a.c_.size(); ++i) {
            if (a.c_[i] == 0) continue;
            long max_j = std::min((long)b.c_.size(), trunc - lead - (long)i);
            for (long j = 0; j < max_j; ++j) {
                if (b.c_[j] == 0) continue;
                c[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return LaurentSeries(sd, lead, trunc, std::move(c));
    }

    LaurentSeries pow(long e) const {
        if (e < 0) return invert().pow(-e);
        LaurentSeries acc = constant(Rat(1), step_den_, pow_trunc(e));
        LaurentSeries base = *this;
        bool first = true;
        while (e > 0) {
            if (e & 1) acc = first ? base : acc * base, first = false;
            e >>= 1;
            if (e > 0) base = base * base;
        }
        if (first) return constant(Rat(1), step_den_, trunc_);
        return acc;
    }

    // Multiplicative inverse; leading coefficient must be nonzero.
    LaurentSeries invert() const {
        if (is_zero()) throw SeriesError("invert: zero series");
        const Rat& c0 = c_[0];
        if (c0 == 0) throw SeriesError("invert: zero leading coefficient");
        long n = trunc_ - lead_;
        std::vector<Rat> inv(n);
        inv[0] = 1 / c0;
        for (long k = 1; k < n; ++k) {
            Rat s(0);
            long maxi = std::min<long>(k, (long)c_.size() - 1);
            for (long i = 1; i <= maxi; ++i)
                if (c_[i] != 0 && inv[k - i] != 0) s += c_[i] * inv[k - i];
            inv[k] = -s / c0;
        }
        return LaurentSeries(step_den_, -lead_, -lead_ + n, std::move(inv));
    }

    // r-th root: leading exponent divisible by r, leading coefficient an exact
    // r-th power.
    LaurentSeries nth_root(long r) const {
        if (r < 1) throw SeriesError("nth_root: r must be positive");
        if (is_zero()) throw SeriesError("nth_root: zero series");
        if (lead_ % r != 0) throw SeriesError("nth_root: leading exponent not divisible by r");
        Rat c0 = c_[0];
        Int num_root, den_root;
        if (mpz_root(num_root.get_mpz_t(), c0.get_num().get_mpz_t(), (unsigned long)r) == 0 ||
            mpz_root(den_root.get_mpz_t(), c0.get_den().get_mpz_t(), (unsigned long)r) == 0)
            throw SeriesError("nth_root: leading coefficient is not an exact r-th power");
        Rat g0 = make_rat(num_root, den_root);
        // f = c0 q^L (1 + u); v = (1+u)^(1/r) from r (1+u) v' = u' v.
        long n = trunc_ - lead_;
        std::vector<Rat> u(n);
        for (long i = 1; i < n; ++i) u[i] = i < (long)c_.size() ? Rat(c_[i] / c0) : Rat(0);
        std::vector<Rat> v(n);
        v[0] = 1;
        for (long k = 0; k + 1 < n; ++k) {
            // r (k+1) v_{k+1} = sum_i (i+1) u_{i+1} v_{k-i} - r sum_{i>=1} u_i (k-i+1) v_{k-i+1}
            Rat rhs(0);
            for (long i = 0; i <= k; ++i)
                if (i + 1 < n && u[i + 1] != 0 && v[k - i] != 0)
                    rhs += Rat(i + 1) * u[i + 1] * v[k - i];
            Rat lhs_known(0);
            for (long i = 1; i <= k; ++i)
                if (u[i] != 0 && v[k - i + 1] != 0)
                    lhs_known += u[i] * Rat(k - i + 1) * v[k - i + 1];
            v[k + 1] = (rhs - Rat(r) * lhs_known) / Rat(r * (k + 1));
        }
        for (Rat& x : v) x *= g0;
        return LaurentSeries(step_den_, lead_ / r, lead_ / r + n, std::move(v));
    }

    std::string str(long max_terms = 8) const {
        if (is_zero()) return "0 + O(q^" + std::to_string(trunc_) + ")";
        std::string s;
        long shown = 0;
        for (long u = lead_; u < trunc_ && shown < max_terms; ++u) {
            const Rat& v = c_[u - lead_];
            if (v == 0) continue;
            if (!s.empty()) s += " + ";
            s += v.get_str();
            if (u != 0) {
                s += "*q^";
                if (step_den_ == 1)
                    s += std::to_string(u);
                else
                    s += "(" + std::to_string(u) + "/" + std::to_string(step_den_) + ")";
            }
            ++shown;
        }
        return s + " + O(q^" + std::to_string(trunc_ / step_den_) + ")";
    }

private:
    long common_step(const LaurentSeries& o) const {
        if (step_den_ != o.step_den_) throw SeriesError("step mismatch");
        return step_den_;
    }
    long pow_trunc(long e) const {
        // trunc of f^e given trunc of f: lead*(e-1) + trunc.
        return lead_ * (e - 1) + trunc_;
    }
    void strip() {
        size_t i = 0;
        while (i < c_.size() && c_[i] == 0) ++i;
        if (i > 0) {
            c_.erase(c_.begin(), c_.begin() + i);
            lead_ += (long)i;
        }
        if (c_.empty()) lead_ = trunc_;
    }

    long step_den_;
    long lead_;
    long trunc_;
    std::vector<Rat> c_;
};

// ---------------------------------------------------------------------------
// Eta quotients
// ---------------------------------------------------------------------------

// Euler function prod (1 - q^n) to the given truncation, by the pentagonal
// number theorem.
inline LaurentSeries euler_function(long trunc) {
    std::vector<Rat> c(std::max(0L, trunc));
    for (long k = 0;; ++k) {
        long e1 = k * (3 * k - 1) / 2;
        long e2 = k * (3 * k + 1) / 2;
        if (e1 >= trunc && e2 >= trunc) break;
        Rat sign = (k % 2 == 0) ? Rat(1) : Rat(-1);
        if (e1 < trunc) c[e1] += sign;
        if (e2 < trunc && k > 0) c[e2] += sign;
    }
    return LaurentSeries(1, 0, trunc, std::move(c));
}

// prod_s eta(s*tau)^{e_s} including the q^{sum s*e_s/24} prefactor, as an
// integer-exponent series. The prefactor exponent must be an integer.
inline LaurentSeries eta_quotient(const std::vector<std::pair<long, long>>& spec, long trunc) {
    if (trunc < 1) throw SeriesError("eta_quotient: trunc must be >= 1");
    long pref_num = 0;
    for (auto& [scale, expo] : spec) pref_num += scale * expo;
    if (pref_num % 24 != 0)
        throw SeriesError("eta_quotient: leading exponent not integral for step 1");
    long pref = pref_num / 24;
    long work = trunc - std::min(pref, 0L) + 1;
    LaurentSeries acc = LaurentSeries::constant(Rat(1), 1, work);
    for (auto& [scale, expo] : spec) {
        if (scale < 1) throw SeriesError("eta_quotient: scale must be positive");
        LaurentSeries e = euler_function((work + scale - 1) / scale).scale_exponent(scale)
                              .truncated(work);
        acc = acc * e.pow(expo);
    }
    return (LaurentSeries::monomial(pref, 1, work + labs(pref) + 1) * acc).truncated(trunc);
}

// ---------------------------------------------------------------------------
// The Hauptmodul catalog
// ---------------------------------------------------------------------------

enum class HId { T1A, T2A, T3A, T5A, T6A, T7A, T10A, T3C, T4x2, T2x2 };

inline const std::vector<HId>& all_hids(bool with_optional = false) {
    static const std::vector<HId> core = {HId::T1A, HId::T2A,  HId::T3A, HId::T5A, HId::T6A,
                                          HId::T7A, HId::T10A, HId::T3C, HId::T4x2};
    static const std::vector<HId> all = {HId::T1A, HId::T2A,  HId::T3A, HId::T5A, HId::T6A,
                                         HId::T7A, HId::T10A, HId::T3C, HId::T4x2, HId::T2x2};
    return with_optional ? all : core;
}

inline std::string hid_name(HId id) {
    switch (id) {
        case HId::T1A: return "1A";
        case HId::T2A: return "2A";
        case HId::T3A: return "3A";
        case HId::T5A: return "5A";
        case HId::T6A: return "6A";
        case HId::T7A: return "7A";
        case HId::T10A: return "10A";
        case HId::T3C: return "3C";
        case HId::T4x2: return "4||2+";
        case HId::T2x2: return "2||2";
    }
    return "?";
}

inline std::optional<HId> hid_from_name(const std::string& s) {
    for (HId id : all_hids(true))
        if (hid_name(id) == s) return id;
    return std::nullopt;
}

// Invariance group of the Hauptmodul (exact groups for h > 1).
inline GroupSpec hid_group(HId id) {
    switch (id) {
        case HId::T1A: return fricke_group(1);
        case HId::T2A: return fricke_group(2);
        case HId::T3A: return fricke_group(3);
        case HId::T5A: return fricke_group(5);
        case HId::T6A: return fricke_group(6);
        case HId::T7A: return fricke_group(7);
        case HId::T10A: return fricke_group(10);
        case HId::T3C: return make_group(1, 3, {}, true, true);
        case HId::T4x2: return make_group(2, 2, {}, true, true);
        case HId::T2x2: return make_group(1, 2, {}, true, true);
    }
    throw Unsupported("hid_group");
}

// Eigengroup: the non-exact core on which the function transforms with
// character lambda.
inline GroupSpec hid_core(HId id) { return hid_group(id).parent(); }

// T_g^(a) is the Hauptmodul of the a-th replicate group.
inline HId replicate_function(HId id, const Int& a) {
    GroupSpec target = replicate_group(hid_core(id), a);
    for (HId cand : all_hids(true))
        if (hid_core(cand) == target) return cand;
    throw Unsupported("replicate_function: replicate of " + hid_name(id) + " at a=" +
                      a.get_str() + " is not in the catalog");
}

// True when the function has negative q-coefficients (only the optional 2||2
// entry; all single-cusp Fricke-invariant entries are non-negative).
inline bool hid_allows_negative(HId id) { return id == HId::T2x2; }

namespace detail {

// Harmonic pinning constants determined by the replication gate; see the
// catalog tests, which re-derive them by scanning.
inline constexpr long kFourX2HarmonicShift = 104;   // T4x2^2 = T2A(q^2) + 104
inline constexpr long kTwoX2HarmonicShift = -984;   // T2x2^2 = T1A(q^2) - 984
inline constexpr long kTenAFrickeScale = 16;        // T10A = u + 16/u + 4

inline LaurentSeries build_hauptmodul(HId id, long trunc) {
    long t = std::max(trunc, 8L);
    switch (id) {
        case HId::T2A: {
            LaurentSeries t2b = eta_quotient({{1, 24}, {2, -24}}, t);
            return t2b + Rat(4096) * t2b.invert() + Rat(24);
        }
        case HId::T1A: {
            // j = (t2B + 256)^3 / t2B^2, the level-2 resolution of j.
            LaurentSeries t2b = eta_quotient({{1, 24}, {2, -24}}, t + 3);
            LaurentSeries num = (t2b + Rat(256)).pow(3);
            LaurentSeries j = (num * t2b.invert().pow(2)).truncated(t);
            return j - Rat(744);
        }
        case HId::T3A: {
            LaurentSeries t3b = eta_quotient({{1, 12}, {3, -12}}, t);
            return t3b + Rat(729) * t3b.invert() + Rat(12);
        }
        case HId::T5A: {
            LaurentSeries t5b = eta_quotient({{1, 6}, {5, -6}}, t);
            return t5b + Rat(125) * t5b.invert() + Rat(6);
        }
        case HId::T7A: {
            LaurentSeries t7b = eta_quotient({{1, 4}, {7, -4}}, t);
            return t7b + Rat(49) * t7b.invert() + Rat(4);
        }
        case HId::T6A: {
            LaurentSeries t6b = eta_quotient({{2, 12}, {3, 12}, {1, -12}, {6, -12}}, t);
            return t6b + t6b.invert() - Rat(12);
        }
        case HId::T10A: {
            LaurentSeries u = eta_quotient({{1, 4}, {5, 4}, {2, -4}, {10, -4}}, t);
            LaurentSeries f = u + Rat(kTenAFrickeScale) * u.invert();
            return f - f.coeff(0);
        }
        case HId::T3C: {
            LaurentSeries t1a = build_hauptmodul(HId::T1A, (t + 3) / 3 + 2);
            return (t1a + Rat(744)).scale_exponent(3).truncated(t).nth_root(3);
        }
        case HId::T4x2: {
            LaurentSeries t2a = build_hauptmodul(HId::T2A, (t + 2) / 2 + 2);
            return (t2a.scale_exponent(2) + Rat(kFourX2HarmonicShift)).truncated(t).nth_root(2);
        }
        case HId::T2x2: {
            LaurentSeries t1a = build_hauptmodul(HId::T1A, (t + 2) / 2 + 2);
            return (t1a.scale_exponent(2) + Rat(kTwoX2HarmonicShift)).truncated(t).nth_root(2);
        }
    }
    throw Unsupported("build_hauptmodul");
}

}  // namespace detail

class HauptmodulCatalog {
public:
    static HauptmodulCatalog& instance() {
        static HauptmodulCatalog cat;
        return cat;
    }

    // Normalized Hauptmodul series with truncation at least min_trunc
    // (exponent units; all catalog series have step 1).
    LaurentSeries series(HId id, long min_trunc) {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(id);
        if (it != cache_.end() && it->second.trunc() >= min_trunc)
            return it->second.truncated(std::max(min_trunc, 8L));
        long t = 256;
        while (t < min_trunc) t *= 2;
        LaurentSeries s = detail::build_hauptmodul(id, t);
        validate(id, s);
        cache_.insert_or_assign(id, s);
        return s.truncated(std::max(min_trunc, 8L));
    }

private:
    static void validate(HId id, const LaurentSeries& s) {
        if (s.lead() != -1 || s.coeff(-1) != 1 || s.coeff(0) != 0)
            throw SeriesError("catalog: " + hid_name(id) + " is not normalized");
        long h = hid_group(id).h.get_si();
        for (long e = 1; e < s.trunc(); ++e) {
            const Rat& c = s.coeff(e);
            if (c < 0 && !hid_allows_negative(id))
                throw SeriesError("catalog: negative coefficient in " + hid_name(id));
            if (h > 1 && c != 0 && (e - (h - 1)) % h != 0)
                throw SeriesError("catalog: support of " + hid_name(id) +
                                  " violates the mod-h sparsity pattern");
        }
    }

    std::mutex mu_;
    std::map<HId, LaurentSeries> cache_;
};

inline LaurentSeries hauptmodul(HId id, long trunc) {
    return HauptmodulCatalog::instance().series(id, trunc);
}

// ---------------------------------------------------------------------------
// Certified numerical evaluation
// ---------------------------------------------------------------------------

struct EvalResult {
    Complex value;
    Real err;
    bool truncation_insufficient = false;
};

// Evaluates the series at tau with a tail bound from the measured decay ratio
// of the final retained terms. For the catalog's non-negative-coefficient
// series the bound is a clean geometric majorant.
inline EvalResult evaluate(const LaurentSeries& s, const HPoint& tau, const Real& target_err) {
    long prec = std::max(tau.x.prec(), default_prec_bits().load());
    Real two_pi = Real::of(2L, prec) * Real::pi(prec);
    // w = e^{2 pi i tau / step_den}
    Real ang = two_pi * tau.x / Real::of(s.step_den(), prec);
    Real damp = exp(-two_pi * tau.y / Real::of(s.step_den(), prec));
    Complex w{damp * cos(ang), damp * sin(ang)};

    if (s.is_zero()) return {Complex{Real::of(0L, prec), Real::of(0L, prec)}, Real::of(0L, prec)};

    // Horner from the top coefficient down to the lead, then multiply w^lead.
    Complex acc{Real::of(0L, prec), Real::of(0L, prec)};
    Real abs_acc = Real::of(0L, prec);
    for (long u = s.trunc() - 1; u >= s.lead(); --u) {
        acc = acc * w;
        abs_acc = abs_acc * damp;
        const Rat& cu = s.coeff_units(u);
        if (cu != 0) {
            Real c = Real::of(cu, prec);
            acc.re += c;
            abs_acc += abs(c);
        }
    }
    // w^lead for possibly negative lead.
    Complex wl{Real::of(1L, prec), Real::of(0L, prec)};
    long l = labs(s.lead());
    Complex base = w;
    if (s.lead() < 0) base = Complex{Real::of(1L, prec), Real::of(0L, prec)} / w;
    while (l > 0) {
        if (l & 1) wl = wl * base;
        l >>= 1;
        if (l) base = base * base;
    }
    acc = acc * wl;
    abs_acc = abs_acc * wl.magnitude();

    // Tail bound: magnitudes of the last up-to-10 nonzero terms.
    Real tail = Real::of(0L, prec);
    bool trunc_bad = false;
    {
        std::vector<std::pair<long, Rat>> last;
        for (long u = s.trunc() - 1; u >= s.lead() && (long)last.size() < 10; --u)
            if (s.coeff_units(u) != 0) last.push_back({u, rat_abs(s.coeff_units(u))});
        if (!last.empty() && last[0].first > 0) {
            Real rho = Real::of(0L, prec);
            Real prev_mag = Real::of(0L, prec);
            bool have_prev = false;
            Real top_mag = Real::of(0L, prec);
            for (auto it = last.rbegin(); it != last.rend(); ++it) {
                Real mag = Real::of(it->second, prec) * pow_int(damp, it->first);
                if (have_prev && !(prev_mag.is_zero())) {
                    Real r = mag / prev_mag;
                    if (r > rho) rho = r;
                }
                prev_mag = mag;
                have_prev = true;
                top_mag = mag;
            }
            if (rho >= Real::of(1L, prec))
                throw Diverged("evaluate: measured term ratio >= 1 at the truncation edge");
            Real safety = Real::of(Rat(21, 20), prec);  // 5% headroom on the measured ratio
            rho = rho * safety;
            if (rho >= Real::of(1L, prec)) {
                trunc_bad = true;
            } else {
                tail = Real::of(2L, prec) * top_mag * rho / (Real::of(1L, prec) - rho);
            }
        }
    }
    // Rounding: crude running bound, a few ulps per accumulated magnitude.
    Real round_err = abs_acc * Real::of(8.0 * (double)(s.trunc() - s.lead() + 4), prec) *
                     exp(Real::of((double)(1 - prec), prec) * log(Real::of(2L, prec)));
    Real err = tail + round_err;
    bool insufficient = trunc_bad || err > target_err;
    return {acc, err, insufficient};
}

inline EvalResult evaluate(const LaurentSeries& s, const HPoint& tau) {
    return evaluate(s, tau, Real::of(1e300));
}

}  // namespace replica
