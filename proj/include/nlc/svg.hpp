#pragma once

#include <optional>
#include <string>
#include <vector>

namespace nlc {

struct PlotSeries {
  std::string label;
  std::vector<double> y;
};

/// Minimal line chart; NaN points break the polyline. `reference` draws a
/// dotted horizontal line (e.g. a threshold).
std::string render_svg(const std::string& title, const std::string& x_label, const std::vector<double>& x,
                       const std::vector<PlotSeries>& series, std::optional<double> reference = std::nullopt);

}  // namespace nlc
