#include "qincompat/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "qincompat/io.hpp"

namespace qincompat {

namespace {

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    if (v != 0.0 && (std::abs(v) < 1e-2 || std::abs(v) >= 1e3)) {
        std::snprintf(buf, sizeof(buf), "%.0e", v);
    } else {
        std::snprintf(buf, sizeof(buf), "%g", v);
    }
    return buf;
}

} // namespace

SvgDocument::SvgDocument(double width, double height) : width_(width), height_(height) {}

void SvgDocument::rect(double x, double y, double w, double h, const std::string& fill,
                       const std::string& stroke, double stroke_width) {
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
             "\" height=\"" + num(h) + "\" fill=\"" + fill + "\" stroke=\"" + stroke +
             "\" stroke-width=\"" + num(stroke_width) + "\"/>\n";
}

void SvgDocument::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                       double width) {
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
             num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void SvgDocument::circle(double cx, double cy, double r, const std::string& fill) {
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
             "\" fill=\"" + fill + "\"/>\n";
}

void SvgDocument::polyline(const std::vector<std::pair<double, double>>& pts,
                           const std::string& stroke, double width, const std::string& dash) {
    if (pts.empty()) return;
    body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) +
             "\"";
    if (!dash.empty()) body_ += " stroke-dasharray=\"" + dash + "\"";
    body_ += " points=\"";
    for (const auto& [x, y] : pts) body_ += num(x) + "," + num(y) + " ";
    body_ += "\"/>\n";
}

void SvgDocument::text(double x, double y, const std::string& content, double size,
                       const std::string& anchor, double rotate_deg) {
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) +
             "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\"";
    if (rotate_deg != 0.0)
        body_ += " transform=\"rotate(" + num(rotate_deg) + " " + num(x) + " " + num(y) + ")\"";
    body_ += ">" + escape_xml(content) + "</text>\n";
}

std::string SvgDocument::str() const {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width_) << "\" height=\""
       << num(height_) << "\" viewBox=\"0 0 " << num(width_) << " " << num(height_) << "\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << num(width_) << "\" height=\"" << num(height_)
       << "\" fill=\"white\" stroke=\"none\" stroke-width=\"0\"/>\n"
       << body_ << "</svg>\n";
    return os.str();
}

void SvgDocument::save(const std::string& path) const { write_text_file(path, str()); }

std::string colormap(double t) {
    t = std::clamp(t, 0.0, 1.0);
    // piecewise-linear ramp through five stops
    static const double stops[5][3] = {{68, 1, 84},     // dark violet
                                       {59, 82, 139},   // blue
                                       {33, 145, 140},  // teal
                                       {94, 201, 98},   // green
                                       {253, 231, 37}}; // yellow
    const double pos = t * 4.0;
    const int lo = std::min(3, static_cast<int>(pos));
    const double frac = pos - lo;
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(stops[lo][0] + frac * (stops[lo + 1][0] - stops[lo][0])),
                  static_cast<int>(stops[lo][1] + frac * (stops[lo + 1][1] - stops[lo][1])),
                  static_cast<int>(stops[lo][2] + frac * (stops[lo + 1][2] - stops[lo][2])));
    return buf;
}

std::string heatmap_svg(const std::vector<SweepRow>& rows, const std::vector<double>& h_values,
                        const std::vector<double>& T_values, const std::string& title) {
    const double width = 640, height = 480;
    const double left = 70, right = 110, top = 40, bottom = 55;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    SvgDocument doc(width, height);
    doc.text(width / 2, top - 15, title, 14, "middle");

    const double h_min = h_values.front(), h_max = h_values.back();
    const double lt_min = std::log10(T_values.front()), lt_max = std::log10(T_values.back());
    auto x_of = [&](double h) {
        return h_max > h_min ? left + (h - h_min) / (h_max - h_min) * plot_w : left + plot_w / 2;
    };
    auto y_of = [&](double t) {
        const double lt = std::log10(t);
        return lt_max > lt_min ? top + (lt_max - lt) / (lt_max - lt_min) * plot_h
                               : top + plot_h / 2;
    };

    // cell edges at midpoints between grid values
    auto edges = [](const std::vector<double>& v, bool log_scale) {
        std::vector<double> e(v.size() + 1);
        auto coord = [&](double x) { return log_scale ? std::log10(x) : x; };
        for (std::size_t i = 1; i < v.size(); ++i) e[i] = 0.5 * (coord(v[i - 1]) + coord(v[i]));
        if (v.size() > 1) {
            e[0] = coord(v[0]) - (e[1] - coord(v[0]));
            e[v.size()] = coord(v.back()) + (coord(v.back()) - e[v.size() - 1]);
        } else {
            e[0] = coord(v[0]) - 0.5;
            e[1] = coord(v[0]) + 0.5;
        }
        return e;
    };
    const auto hx = edges(h_values, false);
    const auto ty = edges(T_values, true);
    auto x_edge = [&](double e) {
        return h_max > h_min ? left + (e - h_min) / (h_max - h_min) * plot_w : left;
    };
    auto y_edge = [&](double e) {
        return lt_max > lt_min ? top + (lt_max - e) / (lt_max - lt_min) * plot_h : top;
    };

    const std::size_t nt = T_values.size();
    for (std::size_t i = 0; i < h_values.size(); ++i)
        for (std::size_t j = 0; j < nt; ++j) {
            const SweepRow& row = rows[i * nt + j];
            const std::string fill = row.error.empty() ? colormap(row.R) : "#bbbbbb";
            const double x0 = x_edge(hx[i]), x1 = x_edge(hx[i + 1]);
            const double y0 = y_edge(ty[j + 1]), y1 = y_edge(ty[j]);
            doc.rect(x0, y0, std::max(0.1, x1 - x0), std::max(0.1, y1 - y0), fill);
        }

    // frame and axes
    doc.rect(left, top, plot_w, plot_h, "none", "black", 1.0);
    const int h_ticks = 5;
    for (int i = 0; i <= h_ticks; ++i) {
        const double h = h_min + (h_max - h_min) * i / h_ticks;
        doc.line(x_of(h), top + plot_h, x_of(h), top + plot_h + 5, "black", 1.0);
        doc.text(x_of(h), top + plot_h + 20, tick_label(h), 11, "middle");
    }
    for (int d = static_cast<int>(std::ceil(lt_min)); d <= static_cast<int>(std::floor(lt_max));
         ++d) {
        const double t = std::pow(10.0, d);
        doc.line(left - 5, y_of(t), left, y_of(t), "black", 1.0);
        doc.text(left - 8, y_of(t) + 4, tick_label(t), 11, "end");
    }
    doc.text(left + plot_w / 2, height - 15, "h", 13, "middle");
    doc.text(18, top + plot_h / 2, "T", 13, "middle", -90);

    // colourbar
    const double bar_x = width - right + 25, bar_w = 18;
    const int bar_steps = 64;
    for (int i = 0; i < bar_steps; ++i) {
        const double v = static_cast<double>(i) / (bar_steps - 1);
        const double y = top + plot_h * (1.0 - v) - plot_h / bar_steps;
        doc.rect(bar_x, y, bar_w, plot_h / bar_steps + 0.5, colormap(v));
    }
    doc.rect(bar_x, top, bar_w, plot_h, "none", "black", 1.0);
    for (int i = 0; i <= 5; ++i) {
        const double v = i / 5.0;
        const double y = top + plot_h * (1.0 - v);
        doc.line(bar_x + bar_w, y, bar_x + bar_w + 4, y, "black", 1.0);
        doc.text(bar_x + bar_w + 7, y + 4, tick_label(v), 10, "start");
    }
    doc.text(bar_x + bar_w / 2, top - 8, "R", 12, "middle");
    return doc.str();
}

std::string loglog_svg(const std::vector<std::pair<double, double>>& data,
                       const std::function<double(double)>& fit_curve, const std::string& x_label,
                       const std::string& title) {
    const double width = 640, height = 480;
    const double left = 80, right = 30, top = 40, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    for (const auto& [x, y] : data) {
        if (x <= 0.0 || y <= 0.0) continue;
        x_min = std::min(x_min, x);
        x_max = std::max(x_max, x);
        y_min = std::min(y_min, y);
        y_max = std::max(y_max, y);
    }
    if (x_min > x_max) { x_min = 0.1; x_max = 1.0; y_min = 0.1; y_max = 1.0; }
    const double lx0 = std::log10(x_min) - 0.08, lx1 = std::log10(x_max) + 0.08;
    const double ly0 = std::log10(y_min) - 0.15, ly1 = std::log10(y_max) + 0.15;

    SvgDocument doc(width, height);
    doc.text(width / 2, top - 15, title, 14, "middle");
    auto px = [&](double x) { return left + (std::log10(x) - lx0) / (lx1 - lx0) * plot_w; };
    auto py = [&](double y) { return top + (ly1 - std::log10(y)) / (ly1 - ly0) * plot_h; };

    doc.rect(left, top, plot_w, plot_h, "none", "black", 1.0);
    for (int d = static_cast<int>(std::ceil(lx0)); d <= static_cast<int>(std::floor(lx1)); ++d) {
        const double x = std::pow(10.0, d);
        doc.line(px(x), top, px(x), top + plot_h, "#dddddd", 0.7);
        doc.line(px(x), top + plot_h, px(x), top + plot_h + 5, "black", 1.0);
        doc.text(px(x), top + plot_h + 20, tick_label(x), 11, "middle");
    }
    for (int d = static_cast<int>(std::ceil(ly0)); d <= static_cast<int>(std::floor(ly1)); ++d) {
        const double y = std::pow(10.0, d);
        doc.line(left, py(y), left + plot_w, py(y), "#dddddd", 0.7);
        doc.line(left - 5, py(y), left, py(y), "black", 1.0);
        doc.text(left - 8, py(y) + 4, tick_label(y), 11, "end");
    }
    doc.text(left + plot_w / 2, height - 18, x_label, 13, "middle");
    doc.text(20, top + plot_h / 2, "R", 13, "middle", -90);

    if (fit_curve) {
        std::vector<std::pair<double, double>> curve;
        const int samples = 200;
        for (int i = 0; i <= samples; ++i) {
            const double lx = lx0 + (lx1 - lx0) * i / samples;
            const double x = std::pow(10.0, lx);
            const double y = fit_curve(x);
            if (y > 0.0 && std::isfinite(y)) curve.emplace_back(px(x), py(y));
        }
        doc.polyline(curve, "#c0392b", 1.8, "6,4");
    }
    for (const auto& [x, y] : data)
        if (x > 0.0 && y > 0.0) doc.circle(px(x), py(y), 3.0, "#1f5fa8");
    return doc.str();
}

} // namespace qincompat
