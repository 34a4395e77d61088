#include "tscope/report.hpp"

#include "tscope/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace tscope {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(10) << std::scientific << x;
  return os.str();
}

std::string CsvTable::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_number(r[i]);
    os << '\n';
  }
  return os.str();
}

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string svg_loglog(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<PlotSeries>& series, const std::vector<PlotLine>& lines) {
  const double W = 640, H = 440, ml = 70, mr = 20, mt = 40, mb = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0 && s.y[i] > 0)) continue;
      x0 = std::min(x0, std::log10(s.x[i]));
      x1 = std::max(x1, std::log10(s.x[i]));
      y0 = std::min(y0, std::log10(s.y[i]));
      y1 = std::max(y1, std::log10(s.y[i]));
    }
  if (!(x1 > x0)) x0 -= 0.5, x1 += 0.5;
  if (!std::isfinite(x0)) x0 = 0, x1 = 1;
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
  if (!std::isfinite(y0)) y0 = 0, y1 = 1;
  x0 = std::floor(x0), x1 = std::ceil(x1), y0 = std::floor(y0), y1 = std::ceil(y1);
  auto px = [&](double lx) { return ml + (lx - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double ly) { return H - mb - (ly - y0) / (y1 - y0) * (H - mt - mb); };

  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  for (int d = static_cast<int>(x0); d <= static_cast<int>(x1); ++d) {
    os << "<line x1=\"" << px(d) << "\" y1=\"" << py(y0) << "\" x2=\"" << px(d) << "\" y2=\"" << py(y1) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << px(d) << "\" y=\"" << H - mb + 16 << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  }
  for (int d = static_cast<int>(y0); d <= static_cast<int>(y1); ++d) {
    os << "<line x1=\"" << px(x0) << "\" y1=\"" << py(d) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(d) << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << py(d) + 4 << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  }
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\"" << H - mt - mb
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << (mt + H - mb) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (mt + H - mb) / 2 << ")\">" << escape(y_label) << "</text>\n";

  int legend = 0;
  auto legend_entry = [&](const std::string& label, const char* color, bool dashed) {
    const double ly = mt + 14 + 16 * legend++;
    os << "<line x1=\"" << W - mr - 190 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - mr - 170 << "\" y2=\"" << ly - 4
       << "\" stroke=\"" << color << "\"" << (dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
    os << "<text x=\"" << W - mr - 164 << "\" y=\"" << ly << "\">" << escape(label) << "</text>\n";
  };
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = palette[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (std::size_t i = 0; i < series[k].x.size(); ++i)
      if (series[k].x[i] > 0 && series[k].y[i] > 0)
        os << px(std::log10(series[k].x[i])) << "," << py(std::log10(series[k].y[i])) << " ";
    os << "\"/>\n";
    legend_entry(series[k].label, color, false);
  }
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto& l = lines[k];
    const char* color = palette[(k + 3) % 6];
    auto y_at = [&](double x) { return (l.intercept + l.slope * std::log(x)) / std::log(10.0); };
    os << "<line x1=\"" << px(std::log10(l.x_min)) << "\" y1=\"" << py(y_at(l.x_min)) << "\" x2=\""
       << px(std::log10(l.x_max)) << "\" y2=\"" << py(y_at(l.x_max)) << "\" stroke=\"" << color
       << "\" stroke-dasharray=\"5,3\"/>\n";
    legend_entry(l.label, color, true);
  }
  os << "</svg>\n";
  return os.str();
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace tscope
