#include "cbw/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace cbw::io {

namespace {

constexpr double kWidth = 800, kHeight = 480;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 60;

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s)
{
    std::string out;
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

struct Range
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v)
    {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void settle()
    {
        if (!(lo <= hi)) {
            lo = 0;
            hi = 1;
        }
        if (hi == lo) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

} // namespace

std::string render_svg(const Plot& plot)
{
    Range xr, yr;
    for (const auto& s : plot.series) {
        for (double x : s.x)
            xr.add(x);
        for (double y : s.y)
            yr.add(y);
    }
    for (const auto& m : plot.markers) {
        for (double x : m.x)
            xr.add(x);
        for (double y : m.y)
            yr.add(y);
    }
    xr.settle();
    yr.settle();
    const double pad = 0.05 * (yr.hi - yr.lo);
    yr.lo -= pad;
    yr.hi += pad;

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto sy = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) +
                      "\" height=\"" + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(plot.title) + "</text>\n";
    svg += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" + num(pw) +
           "\" height=\"" + num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double xv = xr.lo + (xr.hi - xr.lo) * i / kTicks;
        const double yv = yr.lo + (yr.hi - yr.lo) * i / kTicks;
        const double px = sx(xv), py = sy(yv);
        svg += "<line x1=\"" + num(px) + "\" y1=\"" + num(kTop + ph) + "\" x2=\"" + num(px) +
               "\" y2=\"" + num(kTop + ph + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(px) + "\" y=\"" + num(kTop + ph + 18) +
               "\" text-anchor=\"middle\">" + tick_label(xv) + "</text>\n";
        svg += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(py) + "\" x2=\"" + num(kLeft) +
               "\" y2=\"" + num(py) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py + 4) +
               "\" text-anchor=\"end\">" + tick_label(yv) + "</text>\n";
    }
    svg += "<text x=\"" + num(kLeft + pw / 2) + "\" y=\"" + num(kHeight - 15) +
           "\" text-anchor=\"middle\">" + escape(plot.x_label) + "</text>\n";
    svg += "<text x=\"18\" y=\"" + num(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           num(kTop + ph / 2) + ")\">" + escape(plot.y_label) + "</text>\n";

    double legend_y = kTop + 15;
    for (const auto& s : plot.series) {
        svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\"";
        if (s.dashed)
            svg += " stroke-dasharray=\"4 3\"";
        svg += " points=\"";
        const std::size_t n = std::min(s.x.size(), s.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                continue;
            svg += num(sx(s.x[i])) + "," + num(sy(s.y[i])) + " ";
        }
        svg += "\"/>\n";
        svg += "<line x1=\"" + num(kLeft + pw - 140) + "\" y1=\"" + num(legend_y) + "\" x2=\"" +
               num(kLeft + pw - 115) + "\" y2=\"" + num(legend_y) + "\" stroke=\"" + s.color +
               "\" stroke-width=\"2\"" + (s.dashed ? " stroke-dasharray=\"4 3\"" : "") + "/>\n";
        svg += "<text x=\"" + num(kLeft + pw - 110) + "\" y=\"" + num(legend_y + 4) + "\">" +
               escape(s.label) + "</text>\n";
        legend_y += 16;
    }
    for (const auto& m : plot.markers) {
        const std::size_t n = std::min(m.x.size(), m.y.size());
        for (std::size_t i = 0; i < n; ++i)
            svg += "<circle cx=\"" + num(sx(m.x[i])) + "\" cy=\"" + num(sy(m.y[i])) +
                   "\" r=\"4\" fill=\"none\" stroke=\"black\"/>\n";
        svg += "<circle cx=\"" + num(kLeft + pw - 128) + "\" cy=\"" + num(legend_y) +
               "\" r=\"4\" fill=\"none\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + num(kLeft + pw - 110) + "\" y=\"" + num(legend_y + 4) + "\">" +
               escape(m.label) + "</text>\n";
        legend_y += 16;
    }
    svg += "</svg>\n";
    return svg;
}

void write_svg(const std::filesystem::path& file, const Plot& plot)
{
    write_text(file, render_svg(plot));
}

} // namespace cbw::io
