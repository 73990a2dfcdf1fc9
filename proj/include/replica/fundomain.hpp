#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <vector>

#include "replica/groups.hpp"
#include "replica/projmat.hpp"
#include "replica/surd.hpp"

namespace replica {

// A left coset of the stabilizer of infinity, named by its arc data.
struct CosetClass {
    ExtRat pi;
    ExtRat rho_sq;
    ProjMatrix rep;

    bool is_identity() const { return pi.is_infinity(); }
    Arc arc() const {
        if (is_identity()) return Arc();
        return Arc(pi.value(), rho_sq.value());
    }
};

// Piece of the lower boundary: a sub-interval of one arc, every point of
// which lies in the fundamental domain.
struct BoundaryArc {
    Arc arc;
    Rat x_lo, x_hi;
    CosetClass owner;
};

struct CriticalSet {
    std::vector<CosetClass> classes;  // classes[0] is the identity coset
};

struct DomainConstants {
    Surd y0;                                   // min Im over the endpoint set
    std::vector<std::pair<Rat, Rat>> endpoints;  // (x, y^2) of the set T
    Rat c;
    Surd N1;
    Int N2;
    Surd N;
    Int N_int;
};

namespace detail {

struct CandidateArc {
    Int k, y, z;      // canonical data; the matrix is (khw, x; mh^2 y, khz)
    ProjMatrix rep;
    Rat p;            // pi
    Rat r2;           // rho^2
};

// All classes whose arc could meet the fundamental domain:
// rho^2 >= 3/(2mh)^2 and |pi| <= 1/(2h) + rho.
inline std::vector<CandidateArc> candidate_arcs(const GroupSpec& g) {
    if (!has_one_cusp(g))
        throw std::invalid_argument("candidate_arcs: requires a single-cusp group");
    std::vector<CandidateArc> out;
    std::map<Rat, size_t> seen;  // by pi (rho^2 = r^2(pi) is determined)
    const Int mh = g.mh();
    for (const Int& k : g.subgroup) {
        // y bound: k/(mh y)^2 >= 3/(2mh)^2  <=>  3 y^2 <= 4k.
        for (Int y = 1; 3 * y * y <= 4 * k; ++y) {
            Int mk_y = exact_div(g.m, k) * y;
            // |z| bound from |pi| <= 1/(2h) + sqrt(k)/(mh y):
            // |k z| <= m y / 2 + sqrt(k) y ... conservatively pad by 1.
            Int zmax = (g.m * y) / (2 * k) + isqrt(k * y * y) / k + 2;
            for (Int z = -zmax; z <= zmax; ++z) {
                if (gcd(k * z, mk_y) != 1) continue;
                Rat p = make_rat(-k * z, mh * y);
                Rat r2 = make_rat(k, mh * mh * y * y);
                // Keep only arcs reaching the closed strip: (|p| - 1/(2h))^2 <= r2.
                Rat over = rat_abs(p) - make_rat(1, 2 * g.h);
                if (over > 0 && over * over > r2) continue;
                if (seen.count(p)) continue;
                auto el = element_from_kyz(g, k, y, z);
                if (!el) continue;
                seen[p] = out.size();
                out.push_back({k, y, z, *el, p, r2});
            }
        }
    }
    return out;
}

// Upper envelope of the arcs over the closed strip [-1/(2h), 1/(2h)].
// Height^2 of arc i at x is r2 - (x - p)^2 = L_i(x) - x^2 with the line
// L_i(x) = 2 p x + (r2 - p^2), so the envelope is an upper hull of lines.
struct EnvelopeSegment {
    size_t arc_index;
    Rat x_lo, x_hi;
};

inline std::vector<EnvelopeSegment> arc_envelope(const std::vector<CandidateArc>& arcs,
                                                 const Rat& x_min, const Rat& x_max) {
    struct Line {
        Rat s, b;
        size_t idx;
    };
    std::vector<Line> lines;
    for (size_t i = 0; i < arcs.size(); ++i)
        lines.push_back({2 * arcs[i].p, arcs[i].r2 - arcs[i].p * arcs[i].p, i});
    std::sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) {
        if (a.s != b.s) return a.s < b.s;
        return a.b > b.b;
    });
    // Drop parallel duplicates (keep the highest).
    std::vector<Line> uniq;
    for (auto& l : lines)
        if (uniq.empty() || uniq.back().s != l.s) uniq.push_back(l);

    auto meet = [](const Line& a, const Line& b) {  // x with a == b
        return Rat((b.b - a.b) / (a.s - b.s));
    };

    std::vector<Line> hull;
    for (auto& l : uniq) {
        while (hull.size() >= 2 &&
               meet(hull[hull.size() - 2], l) <= meet(hull[hull.size() - 2], hull.back()))
            hull.pop_back();
        hull.push_back(l);
    }

    std::vector<EnvelopeSegment> segs;
    for (size_t i = 0; i < hull.size(); ++i) {
        Rat lo = (i == 0) ? x_min : std::max(x_min, meet(hull[i - 1], hull[i]));
        Rat hi = (i + 1 == hull.size()) ? x_max : std::min(x_max, meet(hull[i], hull[i + 1]));
        if (lo < hi) segs.push_back({hull[i].idx, lo, hi});
    }
    return segs;
}

// Strip-normalization of t into (-1/(2h), 1/(2h)].
inline Rat wrap_into_strip(const Rat& t, const Int& h) {
    Int j = rat_ceil(Rat(t * h) - Rat(1, 2));
    return t - make_rat(j, h);
}

}  // namespace detail

// The lower boundary C(Gamma) of the canonical fundamental domain, as arcs
// with exact rational interval data. For exact groups the result is the h
// translated copies of the core boundary laid side to side.
inline std::vector<BoundaryArc> lower_boundary(const GroupSpec& g) {
    if (g.exact) {
        // h translated copies of the core boundary, wrapped into (-1/2, 1/2].
        std::vector<BoundaryArc> core = lower_boundary(g.parent());
        std::vector<BoundaryArc> out;
        auto emit = [&](const BoundaryArc& b, const Rat& shift) {
            if (!(b.x_lo + shift < b.x_hi + shift)) return;
            BoundaryArc t = b;
            t.arc = Arc(Rat(b.arc.center.value() + shift), b.arc.sq_radius.value());
            t.x_lo = b.x_lo + shift;
            t.x_hi = b.x_hi + shift;
            out.push_back(t);
        };
        for (long j = 0; j < g.h.get_si(); ++j) {
            Rat shift = make_rat(j, g.h);
            for (const BoundaryArc& b : core) {
                Rat lo = b.x_lo + shift, hi = b.x_hi + shift;
                if (hi <= Rat(1, 2)) {
                    emit(b, shift);
                } else if (lo >= Rat(1, 2)) {
                    emit(b, shift - 1);
                } else {
                    BoundaryArc left = b, right = b;
                    left.x_hi = Rat(1, 2) - shift;
                    right.x_lo = Rat(1, 2) - shift;
                    emit(left, shift);
                    emit(right, shift - 1);
                }
            }
        }
        std::sort(out.begin(), out.end(),
                  [](const BoundaryArc& a, const BoundaryArc& b) { return a.x_lo < b.x_lo; });
        return out;
    }

    auto arcs = detail::candidate_arcs(g);
    Rat edge = make_rat(1, 2 * g.h);
    auto segs = detail::arc_envelope(arcs, -edge, edge);

    // Clip each envelope segment to the fundamental domain: a boundary point
    // is kept iff its real part is >= that of its fold image
    // x -> theta + pi - x, normalized into the strip.
    std::vector<BoundaryArc> out;
    for (auto& s : segs) {
        const auto& a = arcs[s.arc_index];
        Rat c = a.rep.theta() + a.p;
        // Split [x_lo, x_hi] where the wrap index of c - x changes.
        std::vector<Rat> cuts{s.x_lo, s.x_hi};
        // j ranges with c - x - j/h in (-1/(2h), 1/(2h)]: j = ceil(h(c-x) - 1/2).
        Int j_hi = rat_ceil(Rat((c - s.x_lo) * g.h) - Rat(1, 2));
        Int j_lo = rat_ceil(Rat((c - s.x_hi) * g.h) - Rat(1, 2));
        for (Int j = j_lo; j <= j_hi; ++j) {
            // boundary where h(c-x) - 1/2 = j, i.e. x = c - (2j+1)/(2h)
            Rat xb = c - make_rat(2 * j + 1, 2 * g.h);
            if (xb > s.x_lo && xb < s.x_hi) cuts.push_back(xb);
        }
        std::sort(cuts.begin(), cuts.end());
        for (size_t i = 0; i + 1 < cuts.size(); ++i) {
            Rat lo = cuts[i], hi = cuts[i + 1];
            if (!(lo < hi)) continue;
            Rat mid = (lo + hi) / 2;
            Int j = rat_ceil(Rat((c - mid) * g.h) - Rat(1, 2));
            // keep where x >= c - x - j/h, i.e. x >= (c - j/h)/2
            Rat threshold = (c - make_rat(j, g.h)) / 2;
            Rat klo = std::max(lo, threshold);
            if (klo < hi) {
                CosetClass owner{ExtRat(a.p), ExtRat(a.r2), a.rep};
                out.push_back({Arc(a.p, a.r2), klo, hi, owner});
            }
        }
    }
    std::sort(out.begin(), out.end(),
              [](const BoundaryArc& x, const BoundaryArc& y) { return x.x_lo < y.x_lo; });
    // Merge adjacent pieces of the same arc.
    std::vector<BoundaryArc> merged;
    for (auto& b : out) {
        if (!merged.empty() && merged.back().arc == b.arc && merged.back().x_hi == b.x_lo)
            merged.back().x_hi = b.x_hi;
        else
            merged.push_back(b);
    }
    return merged;
}

// The critical set: all classes whose arc meets the fundamental domain.
inline CriticalSet critical_set(const GroupSpec& g) {
    const GroupSpec core = g.parent();
    auto arcs = detail::candidate_arcs(core);
    auto boundary = lower_boundary(core);

    CriticalSet ks;
    ks.classes.push_back(
        {ExtRat::infinity(), ExtRat::infinity(), ProjMatrix::identity()});

    std::vector<bool> critical(arcs.size(), false);
    // Owners of positive-length boundary pieces.
    for (auto& b : boundary)
        for (size_t i = 0; i < arcs.size(); ++i)
            if (ExtRat(arcs[i].p) == b.owner.pi) critical[i] = true;
    // Arcs passing exactly through a kept endpoint.
    for (auto& b : boundary) {
        for (const Rat& x : {b.x_lo, b.x_hi}) {
            Rat y2 = b.arc.height_sq(x);
            for (size_t i = 0; i < arcs.size(); ++i) {
                if (critical[i]) continue;
                Rat d = x - arcs[i].p;
                if (arcs[i].r2 - d * d == y2) critical[i] = true;
            }
        }
    }
    for (size_t i = 0; i < arcs.size(); ++i)
        if (critical[i])
            ks.classes.push_back({ExtRat(arcs[i].p), ExtRat(arcs[i].r2), arcs[i].rep});
    std::sort(ks.classes.begin() + 1, ks.classes.end(),
              [](const CosetClass& a, const CosetClass& b) {
                  return a.pi.value() < b.pi.value();
              });
    return ks;
}

// ---------------------------------------------------------------------------
// Reduction into the fundamental domain
// ---------------------------------------------------------------------------

struct ReduceResult {
    HPoint tau;
    ProjMatrix k;
};

namespace detail {

// Exact data of K tau for exactly tagged points: (Re, Im^2, Im-factor).
struct ExactImage {
    Rat re;
    Rat im_sq;
};

inline ExactImage exact_apply(const ProjMatrix& k, const Rat& x, const Rat& y2) {
    Rat cx_d = Rat(k.c()) * x + Rat(k.d());
    Rat denom = cx_d * cx_d + Rat(k.c() * k.c()) * y2;
    Rat ax_b = Rat(k.a()) * x + Rat(k.b());
    Rat re = (ax_b * cx_d + Rat(k.a() * k.c()) * y2) / denom;
    Rat det(k.det());
    Rat im_sq = det * det * y2 / (denom * denom);
    return {re, im_sq};
}

}  // namespace detail

// Unique representative of the orbit of tau in the canonical fundamental
// domain: maximal imaginary part, real part in (-1/(2h), 1/(2h)] (or
// (-1/2, 1/2] for exact groups), and maximal real part among the ties.
inline ReduceResult reduce(const GroupSpec& g, const HPoint& tau) {
    if (g.exact) {
        ReduceResult base = reduce(g.parent(), tau);
        // Translate by T^{r/h} with lambda(T^{r/h} K) = 1 (so the composite is
        // in the kernel) and real part in (-1/2, 1/2].
        RootOfUnity lk = lambda(g, base.k);
        // lambda(T^{r/h}) = e^{-2 pi i r/h}; cancellation needs
        // r = lk.num * (h/lk.den) mod h.
        Int r_mod = mod_nonneg(lk.num * exact_div(g.h, lk.den), g.h);
        Rat frac = make_rat(r_mod, g.h);
        Int j;
        if (base.tau.has_exact()) {
            j = rat_ceil(Rat(base.tau.exact->x + frac) - Rat(1, 2));
        } else {
            double xv = base.tau.x.to_double() + frac.get_d();
            j = (long)std::ceil(xv - 0.5 - 1e-15);
        }
        Rat shift = frac - Rat(j);
        ProjMatrix k = compose(ProjMatrix::translation(shift), base.k);
        if (base.tau.has_exact()) {
            Rat x_new = base.tau.exact->x + shift;
            Rat y2 = base.tau.y_sq_exact();
            return {HPoint::on_arc(Arc(x_new, y2), x_new, tau.x.prec()), k};
        }
        return {k.apply(tau), k};
    }

    bool exact = tau.has_exact();
    long prec = tau.x.prec();
    const Int mh2 = g.m * g.h * g.h;

    // Q(k,y,z) = |mh^2 y tau + k h z|^2 / (k h^2) = Im tau / Im K tau.
    struct Cand {
        Int k, y, z;
    };
    std::vector<Cand> best;
    Rat best_q_exact;
    Real best_q_float = Real::of(0L, prec);
    bool have = false;

    Rat x_exact = exact ? tau.exact->x : Rat(0);
    Rat y2_exact = exact ? tau.y_sq_exact() : Rat(0);
    Real x_f = tau.x, y_f = tau.y;
    Real tol = exp(Real::of((double)-(prec / 2), prec) * log(Real::of(2L, prec)));

    auto consider = [&](const Int& k, const Int& y, const Int& z) {
        if (y == 0) {
            if (k != 1 || z != 1) return;
        } else if (gcd(k * z, exact_div(g.m, k) * y) != 1) {
            return;
        }
        if (exact) {
            Rat u = Rat(mh2 * y) * x_exact + Rat(k * g.h * z);
            Rat q = (u * u + Rat(mh2 * mh2 * y * y) * y2_exact) / Rat(k * g.h * g.h);
            if (!have || q < best_q_exact) {
                best_q_exact = q;
                best = {{k, y, z}};
                have = true;
            } else if (q == best_q_exact) {
                best.push_back({k, y, z});
            }
        } else {
            Real u = Real::of(Int(mh2 * y), prec) * x_f + Real::of(Int(k * g.h * z), prec);
            Real v = Real::of(Int(mh2 * y), prec) * y_f;
            Real q = (u * u + v * v) / Real::of(Int(k * g.h * g.h), prec);
            if (!have || q < best_q_float * (Real::of(1L, prec) - tol)) {
                best_q_float = q;
                best = {{k, y, z}};
                have = true;
            } else if (q <= best_q_float * (Real::of(1L, prec) + tol)) {
                if (q < best_q_float) best_q_float = q;
                best.push_back({k, y, z});
            }
        }
    };

    consider(1, 0, 1);  // identity baseline: Q = 1
    for (const Int& k : g.subgroup) {
        for (Int y = 1;; ++y) {
            // Lower bound for this y: (mh^2 y Im tau)^2/(k h^2).
            bool prune;
            if (exact) {
                Rat lb = Rat(mh2 * mh2 * y * y) * y2_exact / Rat(k * g.h * g.h);
                prune = have && lb > best_q_exact;
            } else {
                Real lb = Real::of(Int(mh2 * mh2 * y * y), prec) * y_f * y_f /
                          Real::of(Int(k * g.h * g.h), prec);
                prune = have && lb > best_q_float * (Real::of(1L, prec) + tol);
            }
            if (prune) break;
            // z window around -mh^2 y x/(kh).
            double zc = -Int(mh2 * y).get_d() * (exact ? x_exact.get_d() : x_f.to_double()) /
                        Int(k * g.h).get_d();
            double half_w;
            {
                double q_best = exact ? best_q_exact.get_d() : best_q_float.to_double();
                double rest = Int(mh2 * y).get_d() * (exact ? std::sqrt(y2_exact.get_d())
                                                            : y_f.to_double());
                double room = q_best * Int(k * g.h * g.h).get_d() - rest * rest;
                half_w = room <= 0 ? 0.0 : std::sqrt(room) / Int(k * g.h).get_d();
            }
            long z_lo = (long)std::floor(zc - half_w) - 1;
            long z_hi = (long)std::ceil(zc + half_w) + 1;
            for (long z = z_lo; z <= z_hi; ++z) consider(k, y, Int(z));
        }
    }

    // Build matrices, normalize the real part into the strip, and pick the
    // maximal-real-part representative.
    struct Scored {
        ProjMatrix k;
        Rat re_exact;
        Real re_float;
    };
    std::vector<Scored> scored;
    for (const Cand& c : best) {
        ProjMatrix k0 = c.y == 0 ? ProjMatrix::identity() : *element_from_kyz(g, c.k, c.y, c.z);
        Rat re_e;
        Real re_f = Real::of(0L, prec);
        if (exact) {
            auto img = detail::exact_apply(k0, x_exact, y2_exact);
            Int j = rat_ceil(Rat(img.re * g.h) - Rat(1, 2));
            ProjMatrix k = compose(ProjMatrix::translation(make_rat(-j, g.h)), k0);
            re_e = img.re - make_rat(j, g.h);
            scored.push_back({k, re_e, re_f});
        } else {
            HPoint img = k0.apply(tau);
            double xv = img.x.to_double() * g.h.get_d();
            Int j((long)std::ceil(xv - 0.5 - 1e-12));
            ProjMatrix k = compose(ProjMatrix::translation(make_rat(-j, g.h)), k0);
            re_f = img.x - Real::of(make_rat(j, g.h), prec);
            scored.push_back({k, re_e, re_f});
        }
    }
    size_t pick = 0;
    for (size_t i = 1; i < scored.size(); ++i) {
        if (exact ? scored[i].re_exact > scored[pick].re_exact
                  : scored[i].re_float > scored[pick].re_float)
            pick = i;
    }
    const ProjMatrix& k = scored[pick].k;
    if (exact) {
        auto img = detail::exact_apply(k, x_exact, y2_exact);
        HPoint out = HPoint::on_arc(Arc(img.re, img.im_sq), img.re, prec);
        // Synthetic tag: centered at the point itself so height^2 is im_sq.
        return {out, k};
    }
    return {k.apply(tau), k};
}

// ---------------------------------------------------------------------------
// Constants of the bounding machinery
// ---------------------------------------------------------------------------

inline DomainConstants constants(const GroupSpec& g_in) {
    const GroupSpec g = g_in.parent();
    if (!has_one_cusp(g)) throw std::invalid_argument("constants: requires a single-cusp group");
    auto boundary = lower_boundary(g);
    if (boundary.empty()) throw std::logic_error("constants: empty lower boundary");

    DomainConstants dc;
    // Endpoint set T with exact (x, y^2); y0 = min_im.
    for (auto& b : boundary) {
        for (const Rat& x : {b.x_lo, b.x_hi}) {
            Rat y2 = b.arc.height_sq(x);
            bool dup = false;
            for (auto& e : dc.endpoints)
                if (e.first == x && e.second == y2) dup = true;
            if (!dup) dc.endpoints.push_back({x, y2});
        }
    }
    Rat y0_sq = dc.endpoints[0].second;
    for (auto& e : dc.endpoints) y0_sq = std::min(y0_sq, e.second);
    dc.y0 = Surd(y0_sq);

    // The candidate set U: k || m, 0 < y < sqrt(2k)/(mh y0),
    // |z| < (2 sqrt2 + sqrt(m+4))/(y0 h sqrt(2km)), (kz, (m/k)y) = 1.
    const Int mh = g.mh();
    auto crit = critical_set(g);
    auto is_critical_pi = [&](const Rat& p) {
        for (size_t i = 1; i < crit.classes.size(); ++i)
            if (crit.classes[i].pi == ExtRat(p)) return true;
        return false;
    };

    Rat c0(0);
    std::vector<std::pair<Rat, Rat>> ones;  // (pi, rho^2) of c(k,y,z) = 1 triples
    double y0d = std::sqrt(y0_sq.get_d());
    for (const Int& k : g.subgroup) {
        Int mk = exact_div(g.m, k);
        for (Int y = 1; Rat(y * y * mh * mh) * y0_sq < Rat(2 * k); ++y) {
            long zmax = (long)((2 * std::sqrt(2.0) + std::sqrt(g.m.get_d() + 4.0)) /
                               (y0d * g.h.get_d() * std::sqrt(2.0 * Int(k * g.m).get_d()))) +
                        2;
            for (Int z = -zmax; z <= zmax; ++z) {
                // |z| < (2 sqrt2 + sqrt(m+4)) / (y0 h sqrt(2km)), exactly:
                // z^2 2km h^2 y0^2 - (m+12) < 4 sqrt(2(m+4)).
                Rat lhs = Rat(z * z * 2 * k * g.m * g.h * g.h) * y0_sq - Rat(g.m + 12);
                if (lhs > 0 && lhs * lhs >= Rat(32 * (g.m + 4))) continue;
                if (gcd(k * z, mk * y) != 1) continue;
                Rat p = make_rat(-k * z, mh * y);
                Rat r2 = make_rat(k, mh * mh * y * y);
                Rat cval(0);
                for (auto& e : dc.endpoints) {
                    Rat d = e.first - p;
                    Rat v = r2 / (d * d + e.second);
                    if (v > cval) cval = v;
                }
                if (cval == 1)
                    ones.push_back({p, r2});
                else if (cval > c0)
                    c0 = cval;
            }
        }
    }
    dc.c = std::max(Rat(1, 2), c0);

    // Byproduct cross-check: triples with c = 1 are exactly the non-identity
    // critical classes.
    {
        std::vector<Rat> got, want;
        for (auto& o : ones) got.push_back(o.first);
        for (size_t i = 1; i < crit.classes.size(); ++i) want.push_back(crit.classes[i].pi.value());
        std::sort(got.begin(), got.end());
        got.erase(std::unique(got.begin(), got.end()), got.end());
        std::sort(want.begin(), want.end());
        if (got != want)
            throw std::logic_error("constants: c(k,y,z)=1 triples disagree with the critical set");
    }

    // N1 = max |tau - pi(K)|^2 / (Im tau rho^2(K)) over non-identity critical
    // classes and endpoints; exact as a Surd via squares.
    Rat n1_sq(0);
    for (size_t i = 1; i < crit.classes.size(); ++i) {
        Rat p = crit.classes[i].pi.value();
        Rat r2 = crit.classes[i].rho_sq.value();
        for (auto& e : dc.endpoints) {
            Rat d = e.first - p;
            Rat num = d * d + e.second;
            Rat val_sq = num * num / (e.second * r2 * r2);
            if (val_sq > n1_sq) n1_sq = val_sq;
        }
    }
    dc.N1 = Surd(n1_sq);

    // N2 = max mh^2 |k_i z_i y_j - k_j z_j y_i| / (k_i, k_j) over non-identity
    // critical representatives (canonical data).
    Int n2(0);
    std::vector<CanonicalRep> reps;
    for (size_t i = 1; i < crit.classes.size(); ++i)
        reps.push_back(canonical_rep(g, crit.classes[i].rep));
    for (auto& a : reps)
        for (auto& b : reps) {
            Int v = exact_div(g.m * g.h * g.h, gcd(a.k, b.k)) *
                    abs(a.k * a.z * b.y - b.k * b.z * a.y);
            if (v > n2) n2 = v;
        }
    dc.N2 = n2;

    dc.N = std::max(dc.N1, Surd::of_rational(Rat(n2)));
    dc.N_int = dc.N.ceil();
    return dc;
}

inline bool y0_bound_check(const GroupSpec& g) {
    DomainConstants dc = constants(g);
    // y0 >= sqrt(3)/(2mh), compared via squares.
    return dc.y0.square() >= make_rat(3, 4 * g.mh() * g.mh());
}

}  // namespace replica
