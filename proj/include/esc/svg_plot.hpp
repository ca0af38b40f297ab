#pragma once

// Minimal self-contained SVG output: multi-series line charts and a
// heatmap for alpha(x, t).

#include "esc/format.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace esc::svg {

struct Series {
    std::string label;
    std::vector<double> y;
    std::string color = "#1f77b4";
};

struct Axes {
    std::string title;
    std::string x_label = "t [s]";
    std::string y_label;
    int width = 720;
    int height = 360;
};

namespace detail {

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string num(double v) { return format_general(v, 6); }

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo <= hi)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-300) {
            const double pad = std::max(1e-12, std::abs(lo) * 0.05);
            lo -= pad;
            hi += pad;
        }
    }
};

}  // namespace detail

/// Line chart sharing one x vector across series.
inline void line_chart(std::ostream& os, const Axes& ax, std::span<const double> x, std::span<const Series> series) {
    if (x.empty()) throw std::invalid_argument("line_chart: empty x");
    for (const auto& s : series) {
        if (s.y.size() != x.size()) throw std::invalid_argument("line_chart: series '" + s.label + "' size mismatch");
    }
    const double left = 70, right = 20, top = 30, bottom = 45;
    const double pw = ax.width - left - right;
    const double ph = ax.height - top - bottom;
    detail::Range rx, ry;
    for (double v : x) rx.add(v);
    for (const auto& s : series)
        for (double v : s.y) ry.add(v);
    rx.finish();
    ry.finish();
    auto X = [&](double v) { return left + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto Y = [&](double v) { return top + (ry.hi - v) / (ry.hi - ry.lo) * ph; };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << ax.width << "\" height=\"" << ax.height
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << ax.width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << detail::escape(ax.title)
       << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = rx.lo + (rx.hi - rx.lo) * i / 4.0;
        const double fy = ry.lo + (ry.hi - ry.lo) * i / 4.0;
        os << "<text x=\"" << detail::num(X(fx)) << "\" y=\"" << top + ph + 15 << "\" text-anchor=\"middle\">"
           << detail::num(fx) << "</text>\n";
        os << "<text x=\"" << left - 5 << "\" y=\"" << detail::num(Y(fy) + 4) << "\" text-anchor=\"end\">" << detail::num(fy)
           << "</text>\n";
        os << "<line x1=\"" << left << "\" x2=\"" << left + pw << "\" y1=\"" << detail::num(Y(fy)) << "\" y2=\""
           << detail::num(Y(fy)) << "\" stroke=\"#ddd\"/>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << ax.height - 8 << "\" text-anchor=\"middle\">"
       << detail::escape(ax.x_label) << "</text>\n";
    os << "<text x=\"14\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << top + ph / 2
       << ")\">" << detail::escape(ax.y_label) << "</text>\n";

    // thin long series to at most ~2000 points per polyline
    const std::size_t stride = std::max<std::size_t>(1, x.size() / 2000);
    double ly = top + 12;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1\" points=\"";
        for (std::size_t i = 0; i < x.size(); i += stride) {
            if (!std::isfinite(s.y[i])) continue;
            os << detail::num(X(x[i])) << ',' << detail::num(Y(s.y[i])) << ' ';
        }
        os << "\"/>\n";
        os << "<text x=\"" << left + pw - 5 << "\" y=\"" << ly << "\" text-anchor=\"end\" fill=\"" << s.color << "\">"
           << detail::escape(s.label) << "</text>\n";
        ly += 14;
    }
    os << "</svg>\n";
}

/// Heatmap of values[row][col] with rows along t (vertical) and columns along x.
inline void heatmap(std::ostream& os, const Axes& ax, std::span<const double> t, std::span<const double> x,
                    const std::vector<std::vector<double>>& values) {
    if (t.size() != values.size() || t.empty() || x.empty()) throw std::invalid_argument("heatmap: shape mismatch");
    const double left = 70, right = 80, top = 30, bottom = 45;
    const double pw = ax.width - left - right;
    const double ph = ax.height - top - bottom;
    detail::Range rv;
    for (const auto& row : values) {
        if (row.size() != x.size()) throw std::invalid_argument("heatmap: row size mismatch");
        for (double v : row) rv.add(v);
    }
    rv.finish();
    auto color = [&](double v) {
        // blue -> white -> red
        const double s = std::clamp((v - rv.lo) / (rv.hi - rv.lo), 0.0, 1.0);
        int r, g, b;
        if (s < 0.5) {
            const double f = s / 0.5;
            r = static_cast<int>(40 + 215 * f);
            g = static_cast<int>(80 + 175 * f);
            b = 255;
        } else {
            const double f = (s - 0.5) / 0.5;
            r = 255;
            g = static_cast<int>(255 - 175 * f);
            b = static_cast<int>(255 - 215 * f);
        }
        char buf[8];
        static const char* hex = "0123456789abcdef";
        buf[0] = '#';
        buf[1] = hex[r >> 4];
        buf[2] = hex[r & 15];
        buf[3] = hex[g >> 4];
        buf[4] = hex[g & 15];
        buf[5] = hex[b >> 4];
        buf[6] = hex[b & 15];
        buf[7] = 0;
        return std::string(buf);
    };
    const std::size_t row_stride = std::max<std::size_t>(1, t.size() / 300);
    const std::size_t col_stride = std::max<std::size_t>(1, x.size() / 100);
    const std::size_t rows = (t.size() + row_stride - 1) / row_stride;
    const std::size_t cols = (x.size() + col_stride - 1) / col_stride;
    const double cw = pw / static_cast<double>(cols);
    const double ch = ph / static_cast<double>(rows);

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << ax.width << "\" height=\"" << ax.height
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << ax.width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" << detail::escape(ax.title)
       << "</text>\n";
    for (std::size_t ri = 0; ri < rows; ++ri) {
        const std::size_t i = ri * row_stride;
        for (std::size_t ci = 0; ci < cols; ++ci) {
            const std::size_t j = ci * col_stride;
            os << "<rect x=\"" << detail::num(left + ci * cw) << "\" y=\"" << detail::num(top + ph - (ri + 1) * ch)
               << "\" width=\"" << detail::num(cw + 0.5) << "\" height=\"" << detail::num(ch + 0.5) << "\" fill=\""
               << color(values[i][j]) << "\"/>\n";
        }
    }
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    os << "<text x=\"" << left << "\" y=\"" << top + ph + 15 << "\">" << detail::num(x.front()) << "</text>\n";
    os << "<text x=\"" << left + pw << "\" y=\"" << top + ph + 15 << "\" text-anchor=\"end\">" << detail::num(x.back())
       << "</text>\n";
    os << "<text x=\"" << left - 5 << "\" y=\"" << top + ph << "\" text-anchor=\"end\">" << detail::num(t.front())
       << "</text>\n";
    os << "<text x=\"" << left - 5 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">" << detail::num(t.back())
       << "</text>\n";
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << ax.height - 8 << "\" text-anchor=\"middle\">"
       << detail::escape(ax.x_label) << "</text>\n";
    os << "<text x=\"14\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << top + ph / 2
       << ")\">" << detail::escape(ax.y_label) << "</text>\n";
    // colour bar
    const double bx = left + pw + 20;
    for (int k = 0; k < 50; ++k) {
        const double v = rv.lo + (rv.hi - rv.lo) * k / 49.0;
        os << "<rect x=\"" << bx << "\" y=\"" << detail::num(top + ph - (k + 1) * ph / 50.0) << "\" width=\"14\" height=\""
           << detail::num(ph / 50.0 + 0.5) << "\" fill=\"" << color(v) << "\"/>\n";
    }
    os << "<text x=\"" << bx + 18 << "\" y=\"" << top + 10 << "\">" << detail::num(rv.hi) << "</text>\n";
    os << "<text x=\"" << bx + 18 << "\" y=\"" << top + ph << "\">" << detail::num(rv.lo) << "</text>\n";
    os << "</svg>\n";
}

}  // namespace esc::svg
