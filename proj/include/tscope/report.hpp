#pragma once

#include <json.hpp>

#include <string>
#include <vector>

namespace tscope {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string str() const;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};

struct PlotLine {
  std::string label;
  double slope = 0.0;
  double intercept = 0.0;  // natural-log intercept
  double x_min = 0.0, x_max = 0.0;
};

// Log-log SVG with optional fitted lines.
std::string svg_loglog(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series, const std::vector<PlotLine>& lines = {});

// Writes text to dir/name, creating dir.
void write_file(const std::string& dir, const std::string& name, const std::string& content);

// Fixed-precision number formatting shared by every report.
std::string format_number(double x);

}  // namespace tscope
