#ifndef QINCOMPAT_SVG_HPP
#define QINCOMPAT_SVG_HPP

#include <functional>
#include <string>
#include <vector>

#include "qincompat/analysis.hpp"

namespace qincompat {

/// Self-contained SVG builder: primitive shapes only, no external
/// references, text escaped. Good enough for the two figure types the CLI
/// emits.
class SvgDocument {
  public:
    SvgDocument(double width, double height);

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "none", double stroke_width = 0.0);
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0);
    void circle(double cx, double cy, double r, const std::string& fill);
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                  double width = 1.5, const std::string& dash = "");
    void text(double x, double y, const std::string& content, double size = 12.0,
              const std::string& anchor = "start", double rotate_deg = 0.0);

    std::string str() const;
    void save(const std::string& path) const;

  private:
    double width_, height_;
    std::string body_;
};

/// Map t in [0, 1] to a hex colour (dark blue -> teal -> yellow ramp).
std::string colormap(double t);

/// R(h, T) heatmap with a log temperature axis and a [0, 1] colourbar.
std::string heatmap_svg(const std::vector<SweepRow>& rows, const std::vector<double>& h_values,
                        const std::vector<double>& T_values, const std::string& title);

/// Log-log scatter of (x, y) data plus an optional fitted curve.
std::string loglog_svg(const std::vector<std::pair<double, double>>& data,
                       const std::function<double(double)>& fit_curve, const std::string& x_label,
                       const std::string& title);

} // namespace qincompat

#endif
