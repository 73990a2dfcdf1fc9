#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "replica/fundomain.hpp"
#include "replica/zerocert.hpp"

namespace replica {

struct SvgOptions {
    double width = 720;
    double height = 540;
    double y_max = 1.25;     // world height shown above the real axis
    bool show_candidates = true;
    std::vector<std::pair<double, double>> markers;  // (x, y) dots
};

// Fundamental-domain picture: strip walls, candidate arcs, the lower boundary
// in bold, and optional zero markers.
inline std::string render_domain_svg(const GroupSpec& g, const SvgOptions& opt = {}) {
    GroupSpec core = g.parent();
    auto bd = lower_boundary(g);
    auto cands = detail::candidate_arcs(core);

    double half = g.exact ? 0.5 : 0.5 / core.h.get_d();
    double x_min = -half - 0.1, x_max = half + 0.1;
    double sx = opt.width / (x_max - x_min);
    double sy = opt.height / opt.y_max;
    auto X = [&](double x) { return (x - x_min) * sx; };
    auto Y = [&](double y) { return opt.height - y * sy; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opt.width << "\" height=\""
       << opt.height << "\" viewBox=\"0 0 " << opt.width << " " << opt.height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Real axis and strip walls.
    os << "<line x1=\"" << X(x_min) << "\" y1=\"" << Y(0) << "\" x2=\"" << X(x_max)
       << "\" y2=\"" << Y(0) << "\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    for (double wx : {-half, half})
        os << "<line x1=\"" << X(wx) << "\" y1=\"" << Y(0) << "\" x2=\"" << X(wx) << "\" y2=\""
           << Y(opt.y_max) << "\" stroke=\"#888\" stroke-width=\"1\" stroke-dasharray=\"6 4\"/>\n";

    auto arc_path = [&](double p, double r, double x0, double x1) {
        double y0 = std::sqrt(std::max(0.0, r * r - (x0 - p) * (x0 - p)));
        double y1 = std::sqrt(std::max(0.0, r * r - (x1 - p) * (x1 - p)));
        std::ostringstream s;
        // SVG arc; the y-axis flip makes sweep=1 the upper half-circle.
        s << "M " << X(x0) << " " << Y(y0) << " A " << r * sx << " " << r * sy
          << " 0 0 1 " << X(x1) << " " << Y(y1);
        return s.str();
    };

    if (opt.show_candidates) {
        std::vector<double> shifts{0.0};
        if (g.exact)
            for (long j = 1; j < g.h.get_si(); ++j) {
                shifts.push_back(j / g.h.get_d());
                shifts.push_back(-j / g.h.get_d());
            }
        for (auto& a : cands) {
            double p = a.p.get_d(), r = std::sqrt(a.r2.get_d());
            for (double sh : shifts) {
                double lo = std::max(p + sh - r, x_min), hi = std::min(p + sh + r, x_max);
                if (lo >= hi) continue;
                os << "<path d=\"" << arc_path(p + sh, r, lo, hi)
                   << "\" fill=\"none\" stroke=\"#b9c4d8\" stroke-width=\"1\"/>\n";
            }
        }
    }

    for (auto& b : bd) {
        double p = b.arc.center.value().get_d();
        double r = std::sqrt(b.arc.sq_radius.value().get_d());
        os << "<path d=\"" << arc_path(p, r, b.x_lo.get_d(), b.x_hi.get_d())
           << "\" fill=\"none\" stroke=\"black\" stroke-width=\"3\"/>\n";
    }

    for (auto& m : opt.markers)
        os << "<circle cx=\"" << X(m.first) << "\" cy=\"" << Y(m.second)
           << "\" r=\"3.5\" fill=\"#c22\"/>\n";

    os << "<text x=\"8\" y=\"18\" font-family=\"monospace\" font-size=\"14\">" << g.str()
       << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace replica
