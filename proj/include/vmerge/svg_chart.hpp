// Dependency-free SVG charts: multi-series line plots, bar charts, and the
// shaded gain-region panels. Output is standalone SVG meant for structural
// comparison in tests rather than byte equality.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vmerge/stability_analysis.hpp"

namespace vmerge {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

namespace svg {

inline constexpr int kWidth = 680;
inline constexpr int kHeight = 440;
inline constexpr int kMarginLeft = 64;
inline constexpr int kMarginRight = 18;
inline constexpr int kMarginTop = 34;
inline constexpr int kMarginBottom = 46;

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors = {
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
        "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#4e79a7", "#f28e2b"};
    return colors;
}

struct AxisScale {
    double lo = 0.0, hi = 1.0;
    double px0 = 0.0, px1 = 1.0;

    double map(double v) const { return px0 + (v - lo) / (hi - lo) * (px1 - px0); }
};

inline double nice_step(double range) {
    if (!(range > 0.0)) return 1.0;
    const double raw = range / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double mult : {1.0, 2.0, 5.0, 10.0})
        if (raw <= mult * mag) return mult * mag;
    return 10.0 * mag;
}

inline void pad_range(double& lo, double& hi) {
    if (lo == hi) {
        lo -= 1.0;
        hi += 1.0;
    } else {
        const double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

inline void open_document(std::ostream& out, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << escape(title) << "</text>\n";
}

inline void draw_axes(std::ostream& out, const AxisScale& xs, const AxisScale& ys,
                      const std::string& x_label, const std::string& y_label) {
    const double x0 = xs.px0, x1 = xs.px1, y0 = ys.px0, y1 = ys.px1;
    out << "<g class=\"axes\" stroke=\"#333\" fill=\"none\">\n";
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
        << "\"/>\n";
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
        << "\"/>\n";
    out << "</g>\n<g class=\"ticks\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#333\">\n";
    const double sx = nice_step(xs.hi - xs.lo);
    for (double v = std::ceil(xs.lo / sx) * sx; v <= xs.hi + 1e-12; v += sx) {
        const double px = xs.map(v);
        out << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\"" << y0 + 4
            << "\" stroke=\"#333\"/>\n";
        std::ostringstream lab;
        lab << v;
        out << "<text x=\"" << px << "\" y=\"" << y0 + 16 << "\" text-anchor=\"middle\">"
            << lab.str() << "</text>\n";
    }
    const double sy = nice_step(ys.hi - ys.lo);
    for (double v = std::ceil(ys.lo / sy) * sy; v <= ys.hi + 1e-12; v += sy) {
        const double py = ys.map(v);
        out << "<line x1=\"" << x0 - 4 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\"" << py
            << "\" stroke=\"#333\"/>\n";
        std::ostringstream lab;
        lab << v;
        out << "<text x=\"" << x0 - 7 << "\" y=\"" << py + 3 << "\" text-anchor=\"end\">"
            << lab.str() << "</text>\n";
    }
    out << "</g>\n";
    out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape(x_label) << "</text>\n";
    out << "<text x=\"14\" y=\"" << (y0 + y1) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 14 " << (y0 + y1) / 2 << ")\">" << escape(y_label)
        << "</text>\n";
}

} // namespace svg

/// Multi-series line chart. Long series are strided down to ~max_points
/// vertices per polyline.
inline void write_line_chart(const std::string& path, const std::string& title,
                             const std::string& x_label, const std::string& y_label,
                             const std::vector<Series>& series, std::size_t max_points = 1200) {
    if (series.empty()) throw std::invalid_argument("line chart needs at least one series");
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size() || s.x.empty())
            throw std::invalid_argument("series must be nonempty with matching x/y sizes");
        for (double v : s.x) {
            xlo = std::min(xlo, v);
            xhi = std::max(xhi, v);
        }
        for (double v : s.y) {
            ylo = std::min(ylo, v);
            yhi = std::max(yhi, v);
        }
    }
    svg::pad_range(xlo, xhi);
    svg::pad_range(ylo, yhi);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    svg::open_document(out, title);
    const svg::AxisScale xs{xlo, xhi, static_cast<double>(svg::kMarginLeft),
                            static_cast<double>(svg::kWidth - svg::kMarginRight)};
    const svg::AxisScale ys{ylo, yhi, static_cast<double>(svg::kHeight - svg::kMarginBottom),
                            static_cast<double>(svg::kMarginTop)};
    svg::draw_axes(out, xs, ys, x_label, y_label);

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const std::size_t stride = std::max<std::size_t>(1, s.x.size() / max_points);
        out << "<polyline class=\"series\" data-label=\"" << svg::escape(s.label)
            << "\" fill=\"none\" stroke=\"" << svg::palette()[si % svg::palette().size()]
            << "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); i += stride)
            out << xs.map(s.x[i]) << ',' << ys.map(s.y[i]) << ' ';
        if ((s.x.size() - 1) % stride != 0)
            out << xs.map(s.x.back()) << ',' << ys.map(s.y.back());
        out << "\"/>\n";
    }
    // Legend.
    out << "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"10\">\n";
    for (std::size_t si = 0; si < series.size(); ++si) {
        const double lx = svg::kWidth - svg::kMarginRight - 110;
        const double ly = svg::kMarginTop + 6 + 13 * static_cast<double>(si);
        out << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 16 << "\" y2=\"" << ly
            << "\" stroke=\"" << svg::palette()[si % svg::palette().size()] << "\"/>\n";
        out << "<text x=\"" << lx + 20 << "\" y=\"" << ly + 3 << "\">"
            << svg::escape(series[si].label) << "</text>\n";
    }
    out << "</g>\n</svg>\n";
}

/// Bar chart with one bar per label; bars may carry per-bar colors.
inline void write_bar_chart(const std::string& path, const std::string& title,
                            const std::string& y_label, const std::vector<std::string>& labels,
                            const std::vector<double>& values,
                            const std::vector<std::string>& colors = {}) {
    if (labels.size() != values.size() || labels.empty())
        throw std::invalid_argument("bar chart needs matching nonempty labels/values");
    double ylo = 0.0, yhi = *std::max_element(values.begin(), values.end());
    svg::pad_range(ylo, yhi);
    ylo = std::min(0.0, ylo);

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    svg::open_document(out, title);
    const svg::AxisScale xs{-0.6, static_cast<double>(labels.size()) - 0.4,
                            static_cast<double>(svg::kMarginLeft),
                            static_cast<double>(svg::kWidth - svg::kMarginRight)};
    const svg::AxisScale ys{ylo, yhi, static_cast<double>(svg::kHeight - svg::kMarginBottom),
                            static_cast<double>(svg::kMarginTop)};
    svg::draw_axes(out, xs, ys, "", y_label);
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double cx = static_cast<double>(i);
        const double x0 = xs.map(cx - 0.35), x1 = xs.map(cx + 0.35);
        const double y0 = ys.map(0.0), y1 = ys.map(values[i]);
        const std::string& color =
            colors.empty() ? svg::palette()[0] : colors[i % colors.size()];
        out << "<rect class=\"bar\" data-label=\"" << svg::escape(labels[i]) << "\" x=\"" << x0
            << "\" y=\"" << std::min(y0, y1) << "\" width=\"" << x1 - x0 << "\" height=\""
            << std::abs(y0 - y1) << "\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << ys.map(ylo) + 14
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"9\">"
            << svg::escape(labels[i]) << "</text>\n";
    }
    out << "</svg>\n";
}

/// Feasible-region panel: shaded cells for each grid (largest region drawn
/// first) plus the analytic boundary polylines.
inline void write_region_panel(const std::string& path, const std::string& title,
                               const std::vector<RegionGrid>& grids) {
    if (grids.empty()) throw std::invalid_argument("region panel needs at least one grid");
    const double we_max = grids.front().omega_e_max;
    const double wv_max = grids.front().omega_v_max;

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    svg::open_document(out, title);
    const svg::AxisScale xs{0.0, we_max, static_cast<double>(svg::kMarginLeft),
                            static_cast<double>(svg::kWidth - svg::kMarginRight)};
    const svg::AxisScale ys{0.0, wv_max, static_cast<double>(svg::kHeight - svg::kMarginBottom),
                            static_cast<double>(svg::kMarginTop)};
    svg::draw_axes(out, xs, ys, "omega_e [1/s^2]", "omega_v [1/s]");

    // Larger predecessor counts give larger regions; draw them first so the
    // nested smaller regions stay visible.
    std::vector<std::size_t> order(grids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return grids[a].area_fraction() > grids[b].area_fraction();
    });
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const auto& g = grids[order[rank]];
        const int opacity_pct = 14 + static_cast<int>(10 * rank);
        out << "<g class=\"region\" data-n=\"" << g.n_preds << "\" fill=\""
            << svg::palette()[order[rank] % svg::palette().size()] << "\" fill-opacity=\"0."
            << std::min(90, opacity_pct) << "\">\n";
        for (int r = 0; r < g.rows; ++r) {
            // Merge runs of feasible cells into one rect per row.
            int c = 0;
            while (c < g.cols) {
                if (!g.cell(r, c)) {
                    ++c;
                    continue;
                }
                int c2 = c;
                while (c2 < g.cols && g.cell(r, c2)) ++c2;
                const double x0 = xs.map(c * g.cell_w());
                const double x1 = xs.map(c2 * g.cell_w());
                const double y0 = ys.map(r * g.cell_h());
                const double y1 = ys.map((r + 1) * g.cell_h());
                out << "<rect class=\"cells\" x=\"" << x0 << "\" y=\"" << std::min(y0, y1)
                    << "\" width=\"" << x1 - x0 << "\" height=\"" << std::abs(y0 - y1) << "\"/>\n";
                c = c2;
            }
        }
        out << "</g>\n";
    }
    for (std::size_t i = 0; i < grids.size(); ++i) {
        const auto& g = grids[i];
        out << "<polyline class=\"boundary\" data-n=\"" << g.n_preds
            << "\" fill=\"none\" stroke=\"" << svg::palette()[i % svg::palette().size()]
            << "\" stroke-width=\"1.5\" points=\"";
        for (const auto& [we, wv] : g.boundary) out << xs.map(we) << ',' << ys.map(wv) << ' ';
        out << "\"/>\n";
        if (!g.boundary.empty()) {
            const auto& [we, wv] = g.boundary.back();
            out << "<text x=\"" << xs.map(we) - 4 << "\" y=\"" << ys.map(wv) - 4
                << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">N="
                << g.n_preds << "</text>\n";
        }
    }
    out << "</svg>\n";
}

} // namespace vmerge
