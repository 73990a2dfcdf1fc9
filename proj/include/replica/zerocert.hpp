#pragma once

#include <atomic>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "replica/faber.hpp"
#include "replica/fundomain.hpp"
#include "replica/qseries.hpp"

namespace replica {

// ---------------------------------------------------------------------------
// The bound M of the exponential-sum approximation
// ---------------------------------------------------------------------------

struct BoundM {
    Real value;      // max over replicates of f^(r)(i y0^(r)) - e^{2 pi y0^(r)}
    Real err;
    Int reported;    // value rounded up to the next integer
};

inline BoundM bound_M(HId id, long prec = 256) {
    GroupSpec core = hid_core(id);
    Int mh = core.mh();
    Real best = Real::of(-1e30, prec);
    Real best_err = Real::of(0L, prec);
    for (Int r = 1; r <= mh; ++r) {
        if (!divides(r, mh)) continue;
        HId rep = replicate_function(id, r);
        DomainConstants dc = constants(hid_core(rep));
        HPoint iy0 = HPoint::imaginary(dc.y0.square(), prec);
        LaurentSeries f = hauptmodul(rep, 256);
        EvalResult ev = evaluate(f, iy0, Real::of(1e-30, prec));
        Real two_pi_y0 = Real::of(2L, prec) * Real::pi(prec) * iy0.y;
        Real v = ev.value.re - exp(two_pi_y0);
        if (v > best) {
            best = v;
            best_err = ev.err;
        }
    }
    BoundM out{best, best_err, 0};
    // Round up to the next integer beyond value + err.
    double up = (best + best_err).to_double();
    Int n((long)std::floor(up));
    while (Real::of(n, prec) < best + best_err) ++n;
    out.reported = n;
    return out;
}

// ---------------------------------------------------------------------------
// lambda_K and the critical exponential sum
// ---------------------------------------------------------------------------

struct ApproxModel {
    GroupSpec core;
    CriticalSet critical;
    std::vector<RootOfUnity> lambda_k;  // aligned with critical.classes
    Int N_int;
    Rat c;
};

// lambda_K = lambda^{(phi_n(K))}(D_n K phi_n(K)^{-1})^{-1} per critical class.
inline std::vector<RootOfUnity> lambda_K_values(const GroupSpec& core,
                                                const CriticalSet& critical, const Int& n) {
    std::vector<RootOfUnity> out;
    ProjMatrix dn = ProjMatrix::dilation(Rat(n));
    for (const CosetClass& cls : critical.classes) {
        const ProjMatrix& k = cls.rep;
        HeckeElement h = phi_n(core, k, n);
        ProjMatrix cand = compose(compose(dn, k), inverse(h.matrix()));
        GroupSpec rep_group = replicate_group(core, h.a);
        out.push_back(lambda(rep_group, cand).inverse());
    }
    return out;
}

inline ApproxModel approx_model(HId id, const Int& n) {
    ApproxModel m;
    m.core = hid_core(id);
    m.critical = critical_set(m.core);
    m.lambda_k = lambda_K_values(m.core, m.critical, n);
    DomainConstants dc = constants(m.core);
    m.N_int = dc.N_int;
    m.c = dc.c;
    return m;
}

// sum over critical classes of lambda_K e^{-2 pi i n K tau}.
inline Complex approx_sum(const ApproxModel& m, const Int& n, const HPoint& tau) {
    long prec = tau.x.prec();
    Real two_pi_n = Real::of(2L, prec) * Real::pi(prec) * Real::of(n, prec);
    Complex total{Real::of(0L, prec), Real::of(0L, prec)};
    for (size_t i = 0; i < m.critical.classes.size(); ++i) {
        const CosetClass& cls = m.critical.classes[i];
        Real re(prec), im(prec);
        if (cls.is_identity()) {
            re = tau.x;
            im = tau.y;
        } else if (tau.has_exact()) {
            auto img = detail::exact_apply(cls.rep, tau.exact->x, tau.y_sq_exact());
            re = Real::of(img.re, prec);
            im = Real::sqrt_of(img.im_sq, prec);
        } else {
            HPoint it = cls.rep.apply(tau);
            re = it.x;
            im = it.y;
        }
        // e^{-2 pi i n (re + i im)} = e^{2 pi n im} (cos(2 pi n re) - i sin(...))
        Real mag = exp(two_pi_n * im);
        Complex term{mag * cos(two_pi_n * re), -(mag * sin(two_pi_n * re))};
        total = total + m.lambda_k[i].complex(prec) * term;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Excluded windows around corner points
// ---------------------------------------------------------------------------

struct Window {
    Rat lo, hi;
    Rat center;
    bool at_strip_edge;
};

inline std::vector<Window> excluded_windows(const GroupSpec& g, const Int& n) {
    GroupSpec core = g.parent();
    auto bd = lower_boundary(core);
    auto crit = critical_set(core);
    std::vector<Window> out;
    Rat w = make_rat(1, 6 * n);
    // Interior corners: consecutive boundary arcs meeting at a point.
    for (size_t i = 0; i + 1 < bd.size(); ++i) {
        if (bd[i].x_hi == bd[i + 1].x_lo)
            out.push_back({bd[i].x_hi - w, bd[i].x_hi + w, bd[i].x_hi, false});
    }
    // Strip-edge corner: excluded only if a critical arc other than the
    // owner passes through the endpoint (there the cross term hits 2).
    if (!bd.empty()) {
        Rat xe = bd.back().x_hi;
        if (xe == make_rat(1, 2 * core.h)) {
            Rat y2 = bd.back().arc.height_sq(xe);
            for (size_t i = 1; i < crit.classes.size(); ++i) {
                if (crit.classes[i].pi == bd.back().owner.pi) continue;
                Rat d = xe - crit.classes[i].pi.value();
                if (crit.classes[i].rho_sq.value() - d * d == y2) {
                    Rat we = make_rat(1, 12 * n);
                    out.push_back({xe - we, xe, xe, true});
                    break;
                }
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Zero certification
// ---------------------------------------------------------------------------

struct SamplePoint {
    Rat x;
    double value;  // F_n(tau) e^{-2 pi n y}
    double err;
    int sign;
    double margin;   // |value - 2 cos(2 pi n x)|
    int aux_kind;    // 0 regular, 1 strip-edge window edge, 2 interior window edge
};

struct ZeroCertificate {
    HId id = HId::T1A;
    Int n;
    std::vector<SamplePoint> samples;
    std::vector<Window> excluded;
    long sign_changes = 0;
    Int zero_count;
    std::string status;  // "certified" | "empirical" | "inconclusive"
    std::string route;   // "direct" | "harmonic" | ...
    double max_margin = 0.0;
    double envelope = 0.0;
    bool audit_pass = false;
    std::string note;
};

namespace detail {

// The per-case audit envelope: per-group constants from the case analyses,
// else a conservative sign-forcing threshold.
inline double audit_envelope(HId id) {
    switch (id) {
        case HId::T2A: return 0.741;
        case HId::T6A: return 0.263;
        case HId::T3C: return 1.04;
        case HId::T1A: return 2.0;
        default: return 1.9;
    }
}

struct EvalContext {
    HId id;
    GroupSpec core;
    long prec;
    long trunc;
    LaurentSeries f;
    PolyQ fn;
    PolyQ fn_deriv;
    Int n;
};

// F_n(tau) e^{-2 pi n Im tau} with a rigorous error bound, via the Faber
// polynomial route.
inline std::pair<Real, Real> eval_faber_route(const EvalContext& cx, const HPoint& tau) {
    long prec = cx.prec;
    EvalResult x = evaluate(cx.f, tau, Real::of(1e-35, prec));
    Complex val = cx.fn.eval(x.value);
    Real xmag = x.value.magnitude() + x.err;
    Real deriv_bound = cx.fn_deriv.eval_abs(xmag);
    Real two_pi_n_y = Real::of(2L, prec) * Real::pi(prec) * Real::of(cx.n, prec) * tau.y;
    Real damp = exp(-two_pi_n_y);
    // Rounding slop in the Horner evaluation, a few ulps per term.
    Real round_err = cx.fn.eval_abs(xmag) *
                     Real::of((double)(cx.fn.degree() + 2) * 16.0, prec) *
                     exp(Real::of((double)(1 - prec), prec) * log(Real::of(2L, prec)));
    Real err = (deriv_bound * x.err + round_err + abs(val.im)) * damp;
    return {val.re * damp, err};
}

// Same quantity through the twisted Hecke sum: sum over the level-n Hecke set
// of character-corrected reduced evaluations.
inline std::pair<Real, Real> eval_hecke_route(const EvalContext& cx, const HPoint& tau) {
    long prec = cx.prec;
    Real total = Real::of(0L, prec);
    Real total_im = Real::of(0L, prec);
    Real err = Real::of(0L, prec);
    for (const HeckeElement& he : hecke_set(cx.n)) {
        GroupSpec ga = replicate_group(cx.core, he.a);
        HId fa_id = replicate_function(cx.id, he.a);
        // p = (a tau + b)/d, exactly tagged when tau is.
        HPoint p = tau;
        if (tau.has_exact()) {
            Rat px = (Rat(he.a) * tau.exact->x + Rat(he.b)) / Rat(he.d);
            Rat py2 = Rat(he.a * he.a) * tau.y_sq_exact() / Rat(he.d * he.d);
            p = HPoint::on_arc(Arc(px, py2), px, prec);
        } else {
            Real d = Real::of(he.d, prec);
            p = HPoint((Real::of(he.a, prec) * tau.x + Real::of(he.b, prec)) / d,
                       Real::of(he.a, prec) * tau.y / d);
        }
        ReduceResult rr = reduce(ga, p);
        LaurentSeries fa = hauptmodul(fa_id, cx.trunc);
        EvalResult ev = evaluate(fa, rr.tau, Real::of(1e-35, prec));
        // f(K tau) = lambda(K) f(tau) (the q-side multiplier convention:
        // lambda(T^{1/h}) = e^{-2 pi i/h} matches the mod-h support of f),
        // so the value at p is lambda(K)^{-1} times the reduced evaluation.
        Complex chi = lambda(ga, rr.k).inverse().complex(prec);
        Complex term = chi * ev.value;
        total += term.re;
        total_im += term.im;
        err += ev.err;
    }
    Real two_pi_n_y = Real::of(2L, prec) * Real::pi(prec) * Real::of(cx.n, prec) * tau.y;
    Real damp = exp(-two_pi_n_y);
    return {total * damp, (err + abs(total_im)) * damp};
}

}  // namespace detail

inline ZeroCertificate certify_zeros(HId id, const Int& n);

namespace detail {

inline ZeroCertificate certify_direct(HId id, const Int& n) {
    ZeroCertificate cert;
    cert.id = id;
    cert.n = n;
    cert.route = "direct";

    GroupSpec core = hid_core(id);
    long h = core.h.get_si();
    long nn = n.get_si();
    DomainConstants dc = constants(core);
    // The exponential-sum approximation holds for n >= N (exact surd
    // comparison); below that the scan still runs but only empirically.
    bool empirical = Rat(n * n) < dc.N.square();

    long prec = 128 + 8 * nn;
    long trunc = 256;
    EvalContext cx{id, core, prec, trunc, hauptmodul(id, trunc), {}, {}, n};
    cx.fn = faber_poly(hauptmodul(id, nn + 4), nn);
    cx.fn_deriv = cx.fn.derivative();

    auto bd = lower_boundary(core);
    auto windows = excluded_windows(core, n);
    cert.excluded = windows;

    // Samples x_k = k/(2n) across the boundary span, minus window interiors,
    // plus window edges whenever a sample was swallowed.
    Rat x_max = bd.back().x_hi;
    std::vector<std::pair<Rat, int>> pts;  // (x, aux_kind)
    for (long k = 0;; ++k) {
        Rat x = make_rat(k, 2 * n);
        if (x > x_max) break;
        bool swallowed = false;
        for (auto& w : windows) {
            bool inside = w.at_strip_edge ? (x > w.lo) : (x > w.lo && x < w.hi);
            if (inside) {
                swallowed = true;
                if (w.at_strip_edge) {
                    pts.push_back({w.lo, 1});
                } else {
                    pts.push_back({w.lo, 2});
                    pts.push_back({w.hi, 2});
                }
            }
        }
        if (!swallowed) pts.push_back({x, 0});
    }
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              pts.end());
    std::vector<Rat> xs;
    for (auto& pk : pts) xs.push_back(pk.first);

    auto owner_arc = [&](const Rat& x) -> const BoundaryArc* {
        for (auto& b : bd)
            if (x >= b.x_lo && x <= b.x_hi) return &b;
        return nullptr;
    };

    // Evaluate both routes at every sample, in parallel over samples.
    struct Row {
        Rat x;
        double value, err, margin, cos2;
        int sign;
        bool consistent;
    };
    std::vector<Row> rows(xs.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= xs.size()) return;
            const Rat& x = xs[i];
            const BoundaryArc* b = owner_arc(x);
            HPoint tau = HPoint::on_arc(b->arc, x, prec);
            auto [vf, ef] = eval_faber_route(cx, tau);
            auto [vh, eh] = eval_hecke_route(cx, tau);
            bool consistent = abs(vf - vh) <= ef + eh + Real::of(1e-12, prec);
            Real ang = Real::of(2L, prec) * Real::pi(prec) * Real::of(n, prec) *
                       Real::of(x, prec);
            Real cos2 = Real::of(2L, prec) * cos(ang);
            Real margin = abs(vf - cos2);
            Row r;
            r.x = x;
            r.value = vf.to_double();
            r.err = (ef + eh).to_double();
            r.margin = margin.to_double();
            r.cos2 = cos2.to_double();
            r.sign = vf.sign();
            r.consistent = consistent;
            rows[i] = r;
        }
    };
    {
        unsigned nthreads = std::max(1u, std::thread::hardware_concurrency());
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    bool all_signed = true;
    bool all_consistent = true;
    bool sign_forced = true;  // margins below |2 cos| pointwise
    double regular_margin = 0.0;
    for (size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        SamplePoint sp{r.x, r.value, r.err, r.sign, r.margin, pts[i].second};
        cert.samples.push_back(sp);
        cert.max_margin = std::max(cert.max_margin, r.margin);
        if (pts[i].second != 2) regular_margin = std::max(regular_margin, r.margin);
        if (!(r.margin < std::abs(r.cos2))) sign_forced = false;
        if (!(std::abs(r.value) > r.err)) all_signed = false;
        if (!r.consistent) all_consistent = false;
    }
    for (size_t i = 0; i + 1 < rows.size(); ++i)
        if (rows[i].sign * rows[i + 1].sign < 0) ++cert.sign_changes;

    long t_part = nn % h;
    long s_part = (nn - t_part) / h;
    long expected_changes = (h == 1) ? nn : s_part;
    Int count = (h == 1) ? Int(cert.sign_changes) : Int(h * cert.sign_changes + t_part);

    // Exceptional side-boundary zero for n = 2 on the Fricke groups of level
    // 5 and 7: one zero lies on Re tau = 1/2.
    if (n == 2 && (id == HId::T5A || id == HId::T7A) && cert.sign_changes == nn - 1) {
        Rat xe = bd.back().x_hi;
        Rat y2c = bd.back().arc.height_sq(xe);
        double ylo = std::sqrt(y2c.get_d()) * 1.0000001;
        int prev_sign = 0;
        long extra = 0;
        for (int i = 0; i <= 48; ++i) {
            double y = ylo * std::pow(1.06, i);
            HPoint tau(Real::of(0.5, prec), Real::of(y, prec));
            auto [v, e] = eval_faber_route(cx, tau);
            int s = v.sign();
            if (abs(v) > e && prev_sign != 0 && s * prev_sign < 0) ++extra;
            if (abs(v) > e) prev_sign = s;
        }
        if (extra >= 1) {
            count = Int(nn);
            cert.note = "one zero located on the side boundary Re tau = 1/2";
            expected_changes = cert.sign_changes;
        }
    }

    cert.zero_count = count;
    cert.envelope = audit_envelope(id);
    // The case envelope binds the regular samples and the strip-edge corner
    // point; at interior window edges the operative bound is the cosine
    // magnitude itself (the sign-forcing condition the case proofs use).
    cert.audit_pass = !empirical && regular_margin < cert.envelope && sign_forced;
    bool counted = cert.sign_changes == expected_changes && count == Int(nn);
    if (!all_signed || !all_consistent)
        cert.status = "inconclusive";
    else if (!counted)
        cert.status = "inconclusive";
    else
        cert.status = empirical ? "empirical" : (cert.audit_pass ? "certified" : "inconclusive");
    return cert;
}

}  // namespace detail

// Certify that F_{n,f} has all n zeros on the lower boundary. For h > 1 and
// gcd(n, h) > 1 the harmonic factorization delegates to the replicate.
inline ZeroCertificate certify_zeros(HId id, const Int& n) {
    GroupSpec core = hid_core(id);
    Int d = gcd(n, core.h);
    if (d > 1) {
        HId rep = replicate_function(id, d);
        // F_{n,f}(X) = F_{n/d,g}(X^d - c): verify the polynomial identity
        // exactly, then certify the factor.
        LaurentSeries f = hauptmodul(id, 16);
        LaurentSeries g = hauptmodul(rep, 16);
        Rat c = f.pow(d.get_si()).coeff(0) - g.scale_exponent(d.get_si()).coeff(0);
        ZeroCertificate inner = certify_zeros(rep, exact_div(n, d));
        ZeroCertificate cert;
        cert.id = id;
        cert.n = n;
        cert.route = "harmonic(" + hid_name(rep) + ")";
        cert.samples = inner.samples;
        cert.excluded = inner.excluded;
        cert.sign_changes = inner.sign_changes;
        cert.max_margin = inner.max_margin;
        cert.envelope = inner.envelope;
        cert.audit_pass = inner.audit_pass;
        bool poly_ok = harmonic_faber(id, rep, d.get_si(), c, n.get_si());
        cert.zero_count = poly_ok ? Int(d * inner.zero_count) : Int(0);
        cert.status = poly_ok ? inner.status : "inconclusive";
        cert.note = "zeros are d-th root lifts of the " + hid_name(rep) +
                    " zeros shifted by " + c.get_str();
        return cert;
    }
    return detail::certify_direct(id, n);
}

// ---------------------------------------------------------------------------
// Theoretical-gap audit
// ---------------------------------------------------------------------------

struct GapAuditRow {
    Rat x;
    double margin;
};

struct GapAudit {
    HId id;
    Int n;
    std::vector<GapAuditRow> rows;
    double max_margin = 0.0;
    double envelope = 0.0;
    bool pass = false;
};

// Margins |F_n(tau) e^{-2 pi n y} - 2 cos(2 pi n x)| at the given samples (or
// the certificate's own samples when none are passed).
inline GapAudit theoretical_gap_audit(HId id, const Int& n,
                                      const std::vector<Rat>& xs_in = {}) {
    GapAudit audit;
    audit.id = id;
    audit.n = n;
    audit.envelope = detail::audit_envelope(id);
    ZeroCertificate cert = certify_zeros(id, n);
    if (!xs_in.empty()) {
        GroupSpec core = hid_core(id);
        long nn = n.get_si();
        long prec = 128 + 8 * nn;
        detail::EvalContext cx{id, core, prec, 256, hauptmodul(id, 256), {}, {}, n};
        cx.fn = faber_poly(hauptmodul(id, nn + 4), nn);
        cx.fn_deriv = cx.fn.derivative();
        auto bd = lower_boundary(core);
        for (const Rat& x : xs_in) {
            const BoundaryArc* owner = nullptr;
            for (auto& b : bd)
                if (x >= b.x_lo && x <= b.x_hi) owner = &b;
            if (!owner) continue;
            HPoint tau = HPoint::on_arc(owner->arc, x, prec);
            auto [vf, ef] = detail::eval_faber_route(cx, tau);
            Real ang =
                Real::of(2L, prec) * Real::pi(prec) * Real::of(n, prec) * Real::of(x, prec);
            double m = abs(vf - Real::of(2L, prec) * cos(ang)).to_double();
            audit.rows.push_back({x, m});
            audit.max_margin = std::max(audit.max_margin, m);
        }
        audit.pass = audit.max_margin < audit.envelope;
        return audit;
    }
    double regular = 0.0;
    for (auto& s : cert.samples) {
        audit.rows.push_back({s.x, s.margin});
        audit.max_margin = std::max(audit.max_margin, s.margin);
        if (s.aux_kind != 2) regular = std::max(regular, s.margin);
    }
    audit.pass = regular < audit.envelope && cert.status != "inconclusive";
    return audit;
}

// ---------------------------------------------------------------------------
// JSON serialization of certificates
// ---------------------------------------------------------------------------

inline std::string certificate_to_json(const ZeroCertificate& cert) {
    std::ostringstream os;
    os << "{";
    os << "\"group\":\"" << hid_group(cert.id).str() << "\",";
    os << "\"function\":\"" << hid_name(cert.id) << "\",";
    os << "\"n\":" << cert.n.get_str() << ",";
    os << "\"samples\":[";
    for (size_t i = 0; i < cert.samples.size(); ++i) {
        const SamplePoint& s = cert.samples[i];
        if (i) os << ",";
        os << "{\"x_num\":" << s.x.get_num().get_str()
           << ",\"x_den\":" << s.x.get_den().get_str() << ",\"value\":" << s.value
           << ",\"err\":" << s.err << ",\"sign\":" << s.sign << "}";
    }
    os << "],";
    os << "\"excluded\":[";
    for (size_t i = 0; i < cert.excluded.size(); ++i) {
        if (i) os << ",";
        os << "[" << cert.excluded[i].lo.get_d() << "," << cert.excluded[i].hi.get_d() << "]";
    }
    os << "],";
    os << "\"sign_changes\":" << cert.sign_changes << ",";
    os << "\"zero_count\":" << cert.zero_count.get_str() << ",";
    os << "\"status\":\"" << cert.status << "\",";
    os << "\"route\":\"" << cert.route << "\",";
    os << "\"audit\":{\"max_margin\":" << cert.max_margin << ",\"envelope\":" << cert.envelope
       << ",\"pass\":" << (cert.audit_pass ? "true" : "false") << "}";
    if (!cert.note.empty()) os << ",\"note\":\"" << cert.note << "\"";
    os << "}";
    return os.str();
}

}  // namespace replica
