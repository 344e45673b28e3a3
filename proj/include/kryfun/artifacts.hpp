#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "kryfun/record.hpp"
#include "kryfun/types.hpp"

namespace kryfun {

namespace detail {

inline std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

inline std::string sci_or_empty(double v) { return std::isnan(v) ? "" : sci(v); }

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// Convergence trace as CSV. Base schema:
///   step,xi1_rel,xi2_rel,true_rel,wall_ms
/// with the bound columns appended for bounds tables. Missing values are
/// empty fields; numbers use scientific notation with 10 significant digits.
inline void write_csv(const std::string& path, const std::vector<ConvergenceRecord>& records,
                      bool with_bounds = false) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
  out << "step,xi1_rel,xi2_rel,true_rel,wall_ms";
  if (with_bounds)
    out << ",bound41,bound42,bound43,bound44,gamma1,gamma2,gamma3,mu2";
  out << "\n";
  for (const ConvergenceRecord& r : records) {
    out << r.step << "," << detail::sci(r.xi1_rel) << "," << detail::sci(r.xi2_rel) << ","
        << (r.true_rel ? detail::sci(*r.true_rel) : "") << "," << detail::sci(r.wall_ms);
    if (with_bounds) {
      const BoundReport b = r.bounds.value_or(BoundReport{});
      out << "," << detail::sci_or_empty(b.bound41) << "," << detail::sci_or_empty(b.bound42)
          << "," << detail::sci_or_empty(b.bound43) << "," << detail::sci_or_empty(b.bound44)
          << "," << detail::sci_or_empty(b.gamma1) << "," << detail::sci_or_empty(b.gamma2)
          << "," << detail::sci_or_empty(b.gamma3) << "," << detail::sci_or_empty(b.mu2);
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write_csv: write failed for '" + path + "'");
}

/// Plain-text vector, one value per line.
inline Vector read_vector(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_vector: cannot open '" + path + "'");
  std::vector<double> values;
  double x;
  while (in >> x) values.push_back(x);
  Vector v(static_cast<Index>(values.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = values[static_cast<std::size_t>(i)];
  return v;
}

/// Plain-text vector, one entry per line, 17 significant digits.
inline void write_vector(const std::string& path, const Vector& v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_vector: cannot open '" + path + "'");
  char buf[40];
  for (Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v(i));
    out << buf;
  }
  if (!out) throw std::runtime_error("write_vector: write failed for '" + path + "'");
}

/// Self-contained SVG log-scale plot of the relative estimates and, when
/// present, the true relative error, against the step column. Values are
/// floored at 1e-16 (double precision noise floor).
inline void write_svg(const std::string& path, const std::string& title,
                      const std::vector<ConvergenceRecord>& records) {
  const double floor_value = 1e-16;
  const double width = 760, height = 560;
  const double left = 70, right = 730, top = 50, bottom = 510;

  double x_min = 1e300, x_max = -1e300;
  double log_min = 0.0, log_max = -300.0;
  bool any_true = false;
  for (const ConvergenceRecord& r : records) {
    x_min = std::min(x_min, static_cast<double>(r.step));
    x_max = std::max(x_max, static_cast<double>(r.step));
    for (double v : {r.xi1_rel, r.xi2_rel, r.true_rel.value_or(1.0)}) {
      const double lv = std::log10(std::max(std::abs(v), floor_value));
      log_min = std::min(log_min, lv);
      log_max = std::max(log_max, lv);
    }
    if (r.true_rel) any_true = true;
  }
  if (records.empty()) {
    x_min = 0;
    x_max = 1;
  }
  if (x_max == x_min) x_max = x_min + 1;
  log_min = std::floor(std::max(log_min, -16.0)) - 0.5;
  log_max = std::ceil(log_max) + 0.5;

  auto x_of = [&](double step) {
    return left + (right - left) * (step - x_min) / (x_max - x_min);
  };
  auto y_of = [&](double value) {
    const double lv = std::log10(std::max(std::abs(value), floor_value));
    return bottom - (bottom - top) * (lv - log_min) / (log_max - log_min);
  };

  auto polyline = [&](auto get, const char* color, const char* dash) {
    std::string pts;
    char buf[64];
    for (const ConvergenceRecord& r : records) {
      double v;
      if (!get(r, v)) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", x_of(static_cast<double>(r.step)), y_of(v));
      pts += buf;
    }
    if (pts.empty()) return std::string();
    std::string elem = "  <polyline fill=\"none\" stroke=\"";
    elem += color;
    elem += "\" stroke-width=\"1.6\"";
    if (dash[0]) elem += std::string(" stroke-dasharray=\"") + dash + "\"";
    elem += " points=\"" + pts + "\"/>\n";
    return elem;
  };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_svg: cannot open '" + path + "'");
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  out << "  <text x=\"" << (width / 2) << "\" y=\"28\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << detail::xml_escape(title)
      << "</text>\n";

  // frame
  out << "  <rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << (right - left)
      << "\" height=\"" << (bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n";

  // y ticks at powers of ten
  const int lo_dec = static_cast<int>(std::ceil(log_min));
  const int hi_dec = static_cast<int>(std::floor(log_max));
  int decade_step = 1;
  while ((hi_dec - lo_dec) / decade_step > 12) ++decade_step;
  for (int d = lo_dec; d <= hi_dec; d += decade_step) {
    const double y = bottom - (bottom - top) * (d - log_min) / (log_max - log_min);
    out << "  <line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << right << "\" y2=\"" << y
        << "\" stroke=\"#dddddd\"/>\n";
    out << "  <text x=\"" << (left - 8) << "\" y=\"" << (y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << d
        << "</text>\n";
  }

  // x ticks
  const int tick_count = 6;
  for (int i = 0; i <= tick_count; ++i) {
    const double step = x_min + (x_max - x_min) * i / tick_count;
    const double x = x_of(step);
    out << "  <line x1=\"" << x << "\" y1=\"" << bottom << "\" x2=\"" << x << "\" y2=\""
        << (bottom + 5) << "\" stroke=\"black\"/>\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", step);
    out << "  <text x=\"" << x << "\" y=\"" << (bottom + 20)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << buf
        << "</text>\n";
  }
  out << "  <text x=\"" << ((left + right) / 2) << "\" y=\"" << (bottom + 38)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << "Krylov dimension</text>\n";

  out << polyline([](const ConvergenceRecord& r, double& v) { v = r.xi1_rel; return true; },
                  "#1f77b4", "6,3");
  out << polyline([](const ConvergenceRecord& r, double& v) { v = r.xi2_rel; return true; },
                  "#d62728", "2,2");
  if (any_true)
    out << polyline(
        [](const ConvergenceRecord& r, double& v) {
          if (!r.true_rel) return false;
          v = *r.true_rel;
          return true;
        },
        "#000000", "");

  // legend
  const double lx = right - 150, ly = top + 14;
  auto legend_row = [&](int row, const char* color, const char* dash, const char* label) {
    const double y = ly + 18 * row;
    out << "  <line x1=\"" << lx << "\" y1=\"" << y << "\" x2=\"" << (lx + 28) << "\" y2=\"" << y
        << "\" stroke=\"" << color << "\" stroke-width=\"1.6\"";
    if (dash[0]) out << " stroke-dasharray=\"" << dash << "\"";
    out << "/>\n  <text x=\"" << (lx + 34) << "\" y=\"" << (y + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << label << "</text>\n";
  };
  legend_row(0, "#1f77b4", "6,3", "xi1_rel");
  legend_row(1, "#d62728", "2,2", "xi2_rel");
  if (any_true) legend_row(2, "#000000", "", "true_rel");

  out << "</svg>\n";
  if (!out) throw std::runtime_error("write_svg: write failed for '" + path + "'");
}

}  // namespace kryfun
