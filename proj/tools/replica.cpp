// Command-line front end: group inspection, fundamental domains, critical
// sets, Hauptmodul series, Faber polynomials, replication checks, and zero
// certification with JSON/SVG output.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "replica/faber.hpp"
#include "replica/fundomain.hpp"
#include "replica/qseries.hpp"
#include "replica/selftest.hpp"
#include "replica/svg.hpp"
#include "replica/zerocert.hpp"

using namespace replica;

namespace {

// Selector grammar: "<mh>", "<mh>+", "<mh>+e,f", "<mh>|<h>...", "<mh>||<h>...".
// "|" names Gamma0(mh|h)..., "||" the exact group Gamma0(mh||h)....
std::optional<GroupSpec> parse_group(const std::string& sel) {
    size_t i = 0;
    auto read_int = [&]() -> long {
        size_t start = i;
        while (i < sel.size() && isdigit(sel[i])) ++i;
        if (i == start) return -1;
        return std::stol(sel.substr(start, i - start));
    };
    long mh = read_int();
    if (mh < 1) return std::nullopt;
    long h = 1;
    bool exact = false;
    if (i + 1 < sel.size() && sel[i] == '|' && sel[i + 1] == '|') {
        exact = true;
        i += 2;
        h = read_int();
    } else if (i < sel.size() && sel[i] == '|') {
        i += 1;
        h = read_int();
    }
    if (h < 1 || mh % h != 0) return std::nullopt;
    long m = mh / h;
    bool full = false;
    std::vector<Int> gens;
    if (i < sel.size() && sel[i] == '+') {
        ++i;
        if (i == sel.size()) {
            full = true;
        } else {
            while (i < sel.size()) {
                long e = read_int();
                if (e < 1) return std::nullopt;
                gens.push_back(e);
                if (i < sel.size()) {
                    if (sel[i] != ',') return std::nullopt;
                    ++i;
                }
            }
        }
    }
    if (i != sel.size()) return std::nullopt;
    try {
        return make_group(m, h, gens, full, exact);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::string decimal(const Rat& r, int digits = 10) {
    std::ostringstream os;
    os.precision(digits);
    os << r.get_d();
    return os.str();
}

int fail_usage(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return 2;
}

void write_out(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    f << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"replica: genus-zero Hauptmodul machinery and certified Faber-polynomial zeros"};
    app.require_subcommand(1);

    std::string group_sel, id_sel, svg_path, out_path, tau_str;
    long n_flag = 5, terms = 32, depth = 60, prec_bits = 0;
    bool json = false;
    long zeros_mark = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_flag("--json", json, "emit JSON");
        cmd->add_option("--out", out_path, "write output to a file");
        cmd->add_option("--precision-bits", prec_bits, "working mantissa bits");
    };

    auto* c_group = app.add_subcommand("group", "inspect a group selector");
    c_group->add_option("selector", group_sel)->required();
    add_common(c_group);

    auto* c_reduce = app.add_subcommand("reduce", "reduce a point into the fundamental domain");
    c_reduce->add_option("selector", group_sel)->required();
    c_reduce->add_option("--tau", tau_str, "point as x,y with y > 0")->required();
    add_common(c_reduce);

    auto* c_domain = app.add_subcommand("domain", "lower boundary of the fundamental domain");
    c_domain->add_option("selector", group_sel)->required();
    c_domain->add_option("--svg", svg_path, "write an SVG rendering");
    c_domain->add_option("--zeros", zeros_mark, "mark the zeros of F_n on the boundary");
    add_common(c_domain);

    auto* c_crit = app.add_subcommand("critical-set", "critical coset classes");
    c_crit->add_option("selector", group_sel)->required();
    add_common(c_crit);

    auto* c_const = app.add_subcommand("constants", "domain constants y0, c, N");
    c_const->add_option("selector", group_sel)->required();
    add_common(c_const);

    auto* c_haupt = app.add_subcommand("haupt", "normalized Hauptmodul q-expansion");
    c_haupt->add_option("function", id_sel)->required();
    c_haupt->add_option("--terms", terms, "number of q-exponents to print");
    add_common(c_haupt);

    auto* c_faber = app.add_subcommand("faber", "Faber polynomial F_{n,f}");
    c_faber->add_option("function", id_sel)->required();
    c_faber->add_option("--n", n_flag)->required();
    add_common(c_faber);

    auto* c_repl = app.add_subcommand("replication-check", "coefficient-exact replication test");
    c_repl->add_option("function", id_sel)->required();
    c_repl->add_option("--n", n_flag)->required();
    c_repl->add_option("--depth", depth);
    add_common(c_repl);

    auto* c_zeros = app.add_subcommand("zeros", "certify the zeros of F_{n,f}");
    c_zeros->add_option("function", id_sel)->required();
    c_zeros->add_option("--n", n_flag)->required();
    add_common(c_zeros);

    auto* c_special = app.add_subcommand("special-values", "special values at quadratic points");
    add_common(c_special);

    app.add_subcommand("selftest", "run the full acceptance suite");

    CLI11_PARSE(app, argc, argv);

    if (prec_bits >= 24) default_prec_bits().store(prec_bits);

    std::ostringstream out;
    int rc = 0;

    try {
        if (c_group->parsed()) {
            auto g = parse_group(group_sel);
            if (!g) return fail_usage("bad group selector: " + group_sel);
            out << g->str() << "\n";
            out << "  m = " << g->m.get_str() << ", h = " << g->h.get_str()
                << (g->exact ? ", exact (kernel of lambda)" : "") << "\n  divisor subgroup = {";
            for (size_t i = 0; i < g->subgroup.size(); ++i)
                out << (i ? "," : "") << g->subgroup[i].get_str();
            out << "}\n  one cusp: " << (has_one_cusp(*g) ? "yes" : "no") << "\n";
            out << "  stabilizer of infinity: <T^(1/" << (g->exact ? Int(1) : g->h).get_str()
                << ")>\n";
        } else if (c_reduce->parsed()) {
            auto g = parse_group(group_sel);
            if (!g) return fail_usage("bad group selector: " + group_sel);
            double x = 0, y = 0;
            if (sscanf(tau_str.c_str(), "%lf,%lf", &x, &y) != 2 || y <= 0)
                return fail_usage("bad --tau, expected x,y with y > 0");
            ReduceResult r = reduce(*g, HPoint(Real::of(x), Real::of(y)));
            out << "tau' = " << r.tau.x.str(12) << " + " << r.tau.y.str(12) << " i\n";
            out << "K = " << r.k.str() << "\n";
        } else if (c_domain->parsed()) {
            auto g = parse_group(group_sel);
            if (!g) return fail_usage("bad group selector: " + group_sel);
            auto bd = lower_boundary(*g);
            for (auto& b : bd)
                out << "arc center " << b.arc.center.str() << ", r^2 = " << b.arc.sq_radius.str()
                    << ", x in [" << b.x_lo.get_str() << ", " << b.x_hi.get_str() << "]\n";
            if (!svg_path.empty()) {
                SvgOptions opt;
                if (zeros_mark > 0) {
                    for (HId id : all_hids(true)) {
                        if (hid_group(id).parent() != g->parent()) continue;
                        ZeroCertificate cert = certify_zeros(id, zeros_mark);
                        for (size_t i = 0; i + 1 < cert.samples.size(); ++i) {
                            if (cert.samples[i].sign * cert.samples[i + 1].sign < 0) {
                                Rat xm = (cert.samples[i].x + cert.samples[i + 1].x) / 2;
                                for (auto& b : bd)
                                    if (xm >= b.x_lo && xm <= b.x_hi) {
                                        double yv = std::sqrt(b.arc.height_sq(xm).get_d());
                                        opt.markers.push_back({xm.get_d(), yv});
                                    }
                            }
                        }
                        break;
                    }
                }
                write_out(svg_path, render_domain_svg(*g, opt));
                out << "svg written to " << svg_path << "\n";
            }
        } else if (c_crit->parsed()) {
            auto g = parse_group(group_sel);
            if (!g) return fail_usage("bad group selector: " + group_sel);
            CriticalSet ks = critical_set(*g);
            for (auto& c : ks.classes) {
                if (c.is_identity())
                    out << "[identity]  arc = H\n";
                else
                    out << c.rep.str() << "  pi = " << c.pi.str() << " (" << decimal(c.pi.value())
                        << "), rho^2 = " << c.rho_sq.str() << "\n";
            }
        } else if (c_const->parsed()) {
            auto g = parse_group(group_sel);
            if (!g) return fail_usage("bad group selector: " + group_sel);
            DomainConstants dc = constants(*g);
            if (json) {
                out << "{\"c\":\"" << dc.c.get_str() << "\",\"N\":\"" << dc.N.str()
                    << "\",\"N_int\":" << dc.N_int.get_str() << ",\"N1\":\"" << dc.N1.str()
                    << "\",\"N2\":" << dc.N2.get_str() << ",\"y0\":\"" << dc.y0.str() << "\"}\n";
            } else {
                out << "c = " << dc.c.get_str() << "\n";
                out << "N = " << dc.N.str() << " ~= " << dc.N.to_double()
                    << " (N_int = " << dc.N_int.get_str() << "; N1 = " << dc.N1.str()
                    << ", N2 = " << dc.N2.get_str() << ")\n";
                out << "y0 = " << dc.y0.str() << " ~= " << dc.y0.to_double() << "\n";
                out << "endpoints:";
                for (auto& e : dc.endpoints)
                    out << "  (" << e.first.get_str() << ", sqrt(" << e.second.get_str() << "))";
                out << "\n";
            }
        } else if (c_haupt->parsed()) {
            auto id = hid_from_name(id_sel);
            if (!id) return fail_usage("unknown function: " + id_sel);
            LaurentSeries f = hauptmodul(*id, terms);
            if (json) {
                out << "{\"function\":\"" << hid_name(*id) << "\",\"lead\":" << f.lead()
                    << ",\"coeffs\":[";
                for (long u = f.lead(); u < f.trunc(); ++u)
                    out << (u > f.lead() ? "," : "") << "\"" << f.coeff_units(u).get_str()
                        << "\"";
                out << "]}\n";
            } else {
                out << hid_name(*id) << " (" << hid_group(*id).str() << ")\n" << f.str(terms)
                    << "\n";
            }
        } else if (c_faber->parsed()) {
            auto id = hid_from_name(id_sel);
            if (!id) return fail_usage("unknown function: " + id_sel);
            PolyQ fn = faber_poly(hauptmodul(*id, n_flag + 4), n_flag);
            if (json) {
                out << "{\"coeffs\":[";
                for (size_t i = 0; i < fn.c.size(); ++i)
                    out << (i ? "," : "") << "\"" << fn.c[i].get_str() << "\"";
                out << "]}\n";
            } else {
                out << "F_{" << n_flag << "," << hid_name(*id) << "}(X) = " << fn.str() << "\n";
            }
        } else if (c_repl->parsed()) {
            auto id = hid_from_name(id_sel);
            if (!id) return fail_usage("unknown function: " + id_sel);
            bool ok = verify_replication(*id, n_flag, depth);
            out << (ok ? "replication holds" : "REPLICATION FAILS") << " for " << hid_name(*id)
                << " at n = " << n_flag << " to depth " << depth << "\n";
            rc = ok ? 0 : 1;
        } else if (c_zeros->parsed()) {
            auto id = hid_from_name(id_sel);
            if (!id) return fail_usage("unknown function: " + id_sel);
            ZeroCertificate cert = certify_zeros(*id, n_flag);
            if (json) {
                out << certificate_to_json(cert) << "\n";
            } else {
                out << "F_{" << n_flag << "," << hid_name(*id) << "}: zero_count = "
                    << cert.zero_count.get_str() << ", sign changes = " << cert.sign_changes
                    << ", status = " << cert.status << " (route " << cert.route << ")\n";
                out << "max margin " << cert.max_margin << " against envelope " << cert.envelope
                    << (cert.audit_pass ? " [audit pass]" : "") << "\n";
                if (!cert.note.empty()) out << "note: " << cert.note << "\n";
            }
            rc = (cert.status == "inconclusive") ? 1 : 0;
        } else if (c_special->parsed()) {
            long prec = 320;
            Real sqrt3 = sqrt(Real::of(3L, prec));
            struct Row {
                HId id;
                Rat y_sq;
                std::string point;
                Real target;
                std::string closed;
            };
            std::vector<Row> rows = {
                {HId::T2A, Rat(1, 4), "i/2", Real::of(544L, prec), "544"},
                {HId::T2A, Rat(1, 2), "i/sqrt2", Real::of(152L, prec), "152"},
                {HId::T2A, Rat(1, 18), "i/(3 sqrt2)", Real::of(614552L, prec), "614552"},
                {HId::T3A, Rat(1, 12), "i/(2 sqrt3)", Real::of(1416L, prec), "1416"},
                {HId::T6A, Rat(1, 18), "i/(3 sqrt2)", Real::of(86L, prec), "86"},
                {HId::T1A, Rat(3, 4), "i sqrt3/2",
                 Real::of(13500L, prec) *
                         pow_int(Real::of(30L, prec) - Real::of(17L, prec) * sqrt3, 3) -
                     Real::of(744L, prec),
                 "4*15^3*(30-17 sqrt3)^3 - 744"},
                {HId::T3C, Rat(1, 12), "i sqrt3/6",
                 Real::of(15L, prec) * cbrt(Real::of(4L, prec)) *
                     (Real::of(30L, prec) - Real::of(17L, prec) * sqrt3),
                 "15 cbrt(4) (30-17 sqrt3)"},
            };
            bool all_ok = true;
            for (auto& r : rows) {
                EvalResult ev = evaluate(hauptmodul(r.id, 256), HPoint::imaginary(r.y_sq, prec),
                                         Real::of(1e-20, prec));
                Real rel = abs(ev.value.re - r.target) / abs(r.target);
                bool ok = rel.to_double() < 1e-9;
                all_ok &= ok;
                out << "T_" << hid_name(r.id) << "(" << r.point << ") = " << ev.value.re.str(14)
                    << "  [" << r.closed << "]  rel err " << rel.str(3)
                    << (ok ? "" : "  MISMATCH") << "\n";
            }
            rc = all_ok ? 0 : 1;
        } else {
            return selftest_main(std::cout);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }

    if (!out_path.empty())
        write_out(out_path, out.str());
    else
        std::cout << out.str();
    return rc;
}
