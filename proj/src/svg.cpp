#include "relrep/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "relrep/io.hpp"

namespace relrep {

namespace {

std::string num(double v) { return format_double(v, 6); }

// two-point linear color scale, blue -> red
std::string cell_color(double t) {
    const int lo[3] = {33, 102, 172};
    const int hi[3] = {178, 24, 43};
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(lo[0] + t * (hi[0] - lo[0]))),
                  static_cast<int>(std::lround(lo[1] + t * (hi[1] - lo[1]))),
                  static_cast<int>(std::lround(lo[2] + t * (hi[2] - lo[2]))));
    return buf;
}

std::string svg_header(int width, int height) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
           " " + std::to_string(height) + "\">\n";
}

std::string text(double x, double y, const std::string& s, int size = 12,
                 const std::string& anchor = "middle") {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + std::to_string(size) +
           "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\">" + s + "</text>\n";
}

} // namespace

std::string render_heatmap(const SweepResult& result, const std::string& metric,
                           const std::string& variant) {
    const auto& names = sweep_metric_names();
    if (std::find(names.begin(), names.end(), metric) == names.end())
        throw std::invalid_argument("render_heatmap: unknown metric " + metric);
    variant_from_string(variant); // validates the name
    bool found = false;
    for (const SweepRow& r : result.rows)
        if (r.variant == variant) found = true;
    if (!found) throw std::invalid_argument("render_heatmap: no rows for variant " + variant);

    std::set<double> taus_set, ps_set;
    for (const SweepRow& r : result.rows) {
        if (r.variant != variant) continue;
        taus_set.insert(r.tau);
        ps_set.insert(r.p);
    }
    std::vector<double> taus(taus_set.begin(), taus_set.end());
    std::vector<double> ps(ps_set.begin(), ps_set.end());

    std::vector<std::vector<double>> grid(taus.size(), std::vector<double>(ps.size(), 0.0));
    double vmin = 0.0, vmax = 0.0;
    bool first = true;
    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
        for (std::size_t pi = 0; pi < ps.size(); ++pi) {
            double v = mean_metric(result, metric, variant, taus[ti], ps[pi]);
            grid[ti][pi] = v;
            if (first || v < vmin) vmin = v;
            if (first || v > vmax) vmax = v;
            first = false;
        }
    }

    const int cell_w = 84, cell_h = 52;
    const int margin_l = 70, margin_t = 46, margin_b = 54, margin_r = 30;
    const int plot_w = cell_w * static_cast<int>(ps.size());
    const int plot_h = cell_h * static_cast<int>(taus.size());
    const int width = margin_l + plot_w + margin_r;
    const int height = margin_t + plot_h + margin_b;

    std::string svg = svg_header(width, height);
    svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" fill=\"white\"/>\n";
    svg += text(width / 2.0, 20, metric + " (" + variant + ")", 14);

    const double span = vmax - vmin;
    for (std::size_t ti = 0; ti < taus.size(); ++ti) {
        // tau ascends from the bottom row upward
        double y = margin_t + plot_h - static_cast<double>(ti + 1) * cell_h;
        for (std::size_t pi = 0; pi < ps.size(); ++pi) {
            double x = margin_l + static_cast<double>(pi) * cell_w;
            double t = span > 0.0 ? (grid[ti][pi] - vmin) / span : 0.5;
            svg += "<rect class=\"cell\" x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
                   std::to_string(cell_w) + "\" height=\"" + std::to_string(cell_h) + "\" fill=\"" +
                   cell_color(t) + "\" stroke=\"white\"/>\n";
            svg += text(x + cell_w / 2.0, y + cell_h / 2.0 + 4,
                        format_double(grid[ti][pi], 3), 11);
        }
        svg += text(margin_l - 8, y + cell_h / 2.0 + 4, format_double(taus[ti], 6), 11, "end");
    }
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
        double x = margin_l + (static_cast<double>(pi) + 0.5) * cell_w;
        svg += text(x, margin_t + plot_h + 16, format_double(ps[pi], 6), 11);
    }
    svg += text(margin_l + plot_w / 2.0, margin_t + plot_h + 34, "p", 12);
    svg += text(16, margin_t + plot_h / 2.0, "tau", 12);
    if (span > 0.0) {
        svg += text(margin_l, height - 8,
                    "min=" + format_double(vmin, 6) + " max=" + format_double(vmax, 6), 11, "start");
    } else {
        svg += text(margin_l, height - 8, "constant value " + format_double(vmin, 6), 11, "start");
    }
    svg += "</svg>\n";
    return svg;
}

std::string render_risk_coverage_chart(const std::vector<LabeledCurve>& curves,
                                       const std::string& title) {
    if (curves.empty()) throw std::invalid_argument("render_risk_coverage_chart: no curves");
    const int width = 520, height = 380;
    const int margin_l = 60, margin_t = 44, margin_b = 50, margin_r = 150;
    const int plot_w = width - margin_l - margin_r;
    const int plot_h = height - margin_t - margin_b;

    double risk_max = 0.0;
    for (const LabeledCurve& lc : curves)
        for (const RiskCoveragePoint& p : lc.curve.points) risk_max = std::max(risk_max, p.risk);
    if (risk_max <= 0.0) risk_max = 1.0;

    auto sx = [&](double cov) { return margin_l + cov * plot_w; };
    auto sy = [&](double risk) { return margin_t + plot_h - (risk / risk_max) * plot_h; };

    static const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                    "#66a61e", "#e6ab02", "#a6761d", "#666666"};

    std::string svg = svg_header(width, height);
    svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" +
           std::to_string(height) + "\" fill=\"white\"/>\n";
    svg += text(width / 2.0, 20, title, 14);
    svg += "<rect x=\"" + num(margin_l) + "\" y=\"" + num(margin_t) + "\" width=\"" +
           std::to_string(plot_w) + "\" height=\"" + std::to_string(plot_h) +
           "\" fill=\"none\" stroke=\"black\"/>\n";

    for (std::size_t c = 0; c < curves.size(); ++c) {
        std::string pts;
        for (const RiskCoveragePoint& p : curves[c].curve.points)
            pts += num(sx(p.coverage)) + "," + num(sy(p.risk)) + " ";
        const char* color = palette[c % 8];
        svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
               "\" stroke-width=\"1.5\"/>\n";
        svg += text(margin_l + plot_w + 10, margin_t + 14 + 16 * static_cast<double>(c),
                    curves[c].label, 11, "start");
        svg += "<rect x=\"" + num(margin_l + plot_w + 118) + "\" y=\"" +
               num(margin_t + 7 + 16 * static_cast<double>(c)) +
               "\" width=\"10\" height=\"4\" fill=\"" + color + "\"/>\n";
    }

    svg += text(margin_l + plot_w / 2.0, height - 14, "coverage", 12);
    svg += text(18, margin_t + plot_h / 2.0, "risk", 12);
    svg += text(margin_l, margin_t + plot_h + 16, "0", 11);
    svg += text(margin_l + plot_w, margin_t + plot_h + 16, "1", 11);
    svg += text(margin_l - 8, margin_t + plot_h + 4, "0", 11, "end");
    svg += text(margin_l - 8, margin_t + 4, format_double(risk_max, 3), 11, "end");
    svg += "</svg>\n";
    return svg;
}

} // namespace relrep
