#include "toposelect/svg.hpp"

#include "toposelect/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace toposelect::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    bool log = false;

    double transform(double v) const { return log ? std::log10(v) : v; }
    double frac(double v) const { return (transform(v) - lo) / (hi - lo); }

    std::vector<double> ticks() const {
        std::vector<double> out;
        if (log) {
            for (double e = std::ceil(lo - 1e-9); e <= hi + 1e-9; e += 1.0) out.push_back(std::pow(10.0, e));
            if (out.size() < 2) {
                out = {std::pow(10.0, lo), std::pow(10.0, hi)};
            }
            return out;
        }
        const double raw = (hi - lo) / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        const double norm = raw / mag;
        const double step = (norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0) * mag;
        for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
            out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
        }
        return out;
    }
};

Axis make_axis(const std::vector<PlotSeries>& series, bool use_x, bool log) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : series) {
        for (double v : use_x ? s.x : s.y) {
            if (!std::isfinite(v) || (log && v <= 0.0)) continue;
            const double t = log ? std::log10(v) : v;
            lo = std::min(lo, t);
            hi = std::max(hi, t);
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi - lo < 1e-12) {
        const double pad = std::max(std::abs(lo) * 0.05, 0.5);
        lo -= pad;
        hi += pad;
    } else if (!log) {
        const double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi, log};
}

}  // namespace

std::string chart(const std::vector<PlotSeries>& series, const PlotOptions& o) {
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw InvalidArgument("series '" + s.label + "' has mismatched x/y");
    }
    const double left = 72, right = 150, top = 36, bottom = 52;
    const double pw = o.width - left - right;
    const double ph = o.height - top - bottom;
    const Axis ax = make_axis(series, true, o.log_x);
    const Axis ay = make_axis(series, false, o.log_y);
    auto px = [&](double v) { return left + ax.frac(v) * pw; };
    auto py = [&](double v) { return top + (1.0 - ay.frac(v)) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width << "\" height=\"" << o.height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!o.title.empty()) {
        svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
            << escape(o.title) << "</text>\n";
    }
    svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\""
        << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double t : ax.ticks()) {
        const double x = px(t);
        svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(top + ph) << "\" x2=\"" << num(x) << "\" y2=\""
            << num(top + ph + 5) << "\" stroke=\"black\"/>";
        svg << "<text x=\"" << num(x) << "\" y=\"" << num(top + ph + 18) << "\" text-anchor=\"middle\">"
            << label(t) << "</text>\n";
    }
    for (double t : ay.ticks()) {
        const double y = py(t);
        svg << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(left) << "\" y2=\""
            << num(y) << "\" stroke=\"black\"/>";
        svg << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << label(t)
            << "</text>\n";
    }
    svg << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(o.height - 12.0)
        << "\" text-anchor=\"middle\">" << escape(o.x_label) << "</text>\n";
    svg << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << num(top + ph / 2) << ")\">" << escape(o.y_label) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const std::string color = s.color.empty() ? kPalette[k % std::size(kPalette)] : s.color;
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if ((o.log_x && s.x[i] <= 0.0) || (o.log_y && s.y[i] <= 0.0)) continue;
            pts.emplace_back(px(s.x[i]), py(s.y[i]));
        }
        if (s.line && pts.size() > 1) {
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < pts.size(); ++i) {
                svg << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
            }
            svg << "\"/>\n";
        }
        if (s.markers) {
            for (const auto& [x, y] : pts) {
                svg << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
            }
        }
        const double ly = top + 12 + 16.0 * static_cast<double>(k);
        const double lx = left + pw + 12;
        svg << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 18) << "\" y2=\""
            << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>";
        svg << "<text x=\"" << num(lx + 24) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string density_raster(const fem::Grid& grid, const fem::DensityField& field, int cell) {
    if (field.size() != static_cast<std::size_t>(grid.elements())) {
        throw InvalidArgument("density field does not match the grid");
    }
    if (cell < 1) throw InvalidArgument("raster cell size must be >= 1");
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << grid.nelx() * cell << "\" height=\""
        << grid.nely() * cell << "\" shape-rendering=\"crispEdges\">\n";
    for (int ey = 0; ey < grid.nely(); ++ey) {
        for (int ex = 0; ex < grid.nelx(); ++ex) {
            const double rho = std::clamp(field[static_cast<std::size_t>(grid.element_index(ex, ey))], 0.0, 1.0);
            const int g = static_cast<int>(std::lround(255.0 * (1.0 - rho)));
            svg << "<rect x=\"" << ex * cell << "\" y=\"" << ey * cell << "\" width=\"" << cell << "\" height=\""
                << cell << "\" fill=\"rgb(" << g << ',' << g << ',' << g << ")\"/>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace toposelect::svg
