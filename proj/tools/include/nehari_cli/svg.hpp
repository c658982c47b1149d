#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nehari/problem.hpp"

namespace nehari::cli {

/// A plotted series; nullopt y values break the polyline (gaps, never zeros).
struct Series {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<std::optional<double>> y;
  bool markers = false;
  bool dashed = false;
};

struct VerticalMarker {
  std::string label;
  double x = 0.0;
  std::string color = "#555555";
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::vector<VerticalMarker> markers;
  int width = 720;
  int height = 480;
};

/// Deterministic SVG document (fixed number formatting, no timestamps).
std::string line_plot(const PlotSpec& spec);

/// Profile of a state: line plot in 1D, filled triangles (heat map) in 2D.
std::string profile_svg(const ProblemInstance& pi, const Vector& u, const std::string& title);

}  // namespace nehari::cli
