#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace hdlda {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<PlotSeries> series;
  int width = 960;
  int height = 600;
};

/// Minimal line-plot SVG emitter: frame, ticks, legend, one polyline per
/// series. CSV stays the canonical output format.
void write_svg_plot(const PlotSpec& spec, std::ostream& out);

}  // namespace hdlda
