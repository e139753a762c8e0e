#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fmmtool {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 20.0;
constexpr double kMarginBottom = 50.0;

const char* kPalette[] = {"#d95f02", "#7570b3", "#1b9e77", "#e7298a",
                          "#66a61e", "#e6ab02", "#a6761d", "#666666"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string sig(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

struct Scale {
    double x_lo, x_hi, y_lo, y_hi;
    double px(double x) const {
        return kMarginLeft + (x - x_lo) / (x_hi - x_lo) * (kWidth - kMarginLeft - kMarginRight);
    }
    double py(double y) const {
        return kHeight - kMarginBottom -
               (y - y_lo) / (y_hi - y_lo) * (kHeight - kMarginTop - kMarginBottom);
    }
};

void extend_range(const std::vector<double>& v, double* lo, double* hi) {
    for (double x : v) {
        *lo = std::min(*lo, x);
        *hi = std::max(*hi, x);
    }
}

void append_polyline(std::string& out, const Curve& c, const Scale& s, const char* color,
                     const char* cls) {
    out += "  <polyline class=\"";
    out += cls;
    out += "\" fill=\"none\" stroke=\"";
    out += color;
    out += "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < c.x.size(); ++i) {
        if (i) out += ' ';
        out += num(s.px(c.x[i])) + "," + num(s.py(c.y[i]));
    }
    out += "\"/>\n";
}

}  // namespace

std::string render_plot_svg(const std::vector<double>& data_t,
                            const std::vector<double>& data_y,
                            const Curve& fit,
                            const std::vector<Curve>& components) {
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    extend_range(data_t, &x_lo, &x_hi);
    extend_range(fit.x, &x_lo, &x_hi);
    extend_range(data_y, &y_lo, &y_hi);
    extend_range(fit.y, &y_lo, &y_hi);
    for (const Curve& c : components) extend_range(c.y, &y_lo, &y_hi);
    if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    if (y_hi <= y_lo) y_hi = y_lo + 1.0;
    const double pad = 0.05 * (y_hi - y_lo);
    Scale s{x_lo, x_hi, y_lo - pad, y_hi + pad};

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
           "\" height=\"" + num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " +
           num(kHeight) + "\">\n";
    out += "  <rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" fill=\"white\"/>\n";
    out += "  <rect x=\"" + num(kMarginLeft) + "\" y=\"" + num(kMarginTop) + "\" width=\"" +
           num(kWidth - kMarginLeft - kMarginRight) + "\" height=\"" +
           num(kHeight - kMarginTop - kMarginBottom) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    // corner tick labels
    out += "  <text x=\"" + num(kMarginLeft) + "\" y=\"" + num(kHeight - kMarginBottom + 18.0) +
           "\" font-size=\"12\" fill=\"#333333\">" + sig(s.x_lo) + "</text>\n";
    out += "  <text x=\"" + num(kWidth - kMarginRight - 30.0) + "\" y=\"" +
           num(kHeight - kMarginBottom + 18.0) + "\" font-size=\"12\" fill=\"#333333\">" +
           sig(s.x_hi) + "</text>\n";
    out += "  <text x=\"" + num(kMarginLeft - 52.0) + "\" y=\"" + num(kHeight - kMarginBottom) +
           "\" font-size=\"12\" fill=\"#333333\">" + sig(s.y_lo) + "</text>\n";
    out += "  <text x=\"" + num(kMarginLeft - 52.0) + "\" y=\"" + num(kMarginTop + 12.0) +
           "\" font-size=\"12\" fill=\"#333333\">" + sig(s.y_hi) + "</text>\n";

    for (size_t i = 0; i < data_t.size(); ++i) {
        out += "  <circle cx=\"" + num(s.px(data_t[i])) + "\" cy=\"" + num(s.py(data_y[i])) +
               "\" r=\"2\" fill=\"#7f7f7f\"/>\n";
    }

    for (size_t c = 0; c < components.size(); ++c) {
        append_polyline(out, components[c], s, kPalette[(c + 1) % 8], "component");
    }
    append_polyline(out, fit, s, kPalette[0], "fit");

    if (!components.empty()) {
        double lx = kMarginLeft + 10.0;
        const double ly = kMarginTop + 16.0;
        for (size_t c = 0; c < components.size(); ++c) {
            out += "  <rect x=\"" + num(lx) + "\" y=\"" + num(ly - 9.0) +
                   "\" width=\"10\" height=\"10\" fill=\"" +
                   kPalette[(c + 1) % 8] + "\"/>\n";
            out += "  <text x=\"" + num(lx + 14.0) + "\" y=\"" + num(ly) +
                   "\" font-size=\"12\" fill=\"#333333\">" + components[c].label + "</text>\n";
            lx += 90.0;
        }
    }

    out += "</svg>\n";
    return out;
}

}  // namespace fmmtool
