#include "eecm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "eecm/errors.hpp"

namespace eecm {

void write_svg_chart(const std::string& path, const std::string& title,
                     const std::vector<SvgSeries>& series, int width, int height) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write svg: " + path);

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            if (!std::isfinite(v)) continue;
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    const int ml = 60, mr = 20, mt = 30, mb = 40;
    const double pw = width - ml - mr, ph = height - mt - mb;
    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    const auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << width / 2 << "' y='18' text-anchor='middle' font-size='14'>" << title
        << "</text>\n";
    out << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='" << ph
        << "' fill='none' stroke='#999'/>\n";
    for (int g = 0; g <= 4; ++g) {
        const double y = ymin + g * (ymax - ymin) / 4;
        out << "<line x1='" << ml << "' y1='" << py(y) << "' x2='" << ml + pw << "' y2='" << py(y)
            << "' stroke='#eee'/>\n";
        out << "<text x='" << ml - 6 << "' y='" << py(y) + 4
            << "' text-anchor='end' font-size='11'>" << y << "</text>\n";
        const double x = xmin + g * (xmax - xmin) / 4;
        out << "<text x='" << px(x) << "' y='" << mt + ph + 16
            << "' text-anchor='middle' font-size='11'>" << x << "</text>\n";
    }
    int legend_y = mt + 14;
    for (const auto& s : series) {
        out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.2' points='";
        const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 4000);
        for (std::size_t i = 0; i < s.x.size(); i += stride) {
            if (!std::isfinite(s.y[i])) continue;
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        out << "'/>\n";
        out << "<text x='" << ml + pw - 8 << "' y='" << legend_y
            << "' text-anchor='end' font-size='12' fill='" << s.color << "'>" << s.label
            << "</text>\n";
        legend_y += 16;
    }
    out << "</svg>\n";
}

} // namespace eecm
