// SVG emission: (p, tau) heatmaps and risk-coverage line charts.
#ifndef RELREP_SVG_HPP
#define RELREP_SVG_HPP

#include <string>
#include <vector>

#include "relrep/selective.hpp"
#include "relrep/sweep.hpp"

namespace relrep {

/// Grid-aligned heatmap of one metric for one variant, averaged over
/// corruption seeds. p runs horizontally, tau vertically; every cell carries
/// a numeric annotation and a rect with class="cell". The color scale is
/// linear between the printed min and max.
std::string render_heatmap(const SweepResult& result, const std::string& metric,
                           const std::string& variant);

struct LabeledCurve {
    std::string label;
    RiskCoverageCurve curve;
};

/// Coverage on x, selective risk on y, one polyline per labeled curve.
std::string render_risk_coverage_chart(const std::vector<LabeledCurve>& curves,
                                       const std::string& title);

} // namespace relrep

#endif
