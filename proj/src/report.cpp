#include "robustlm/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "robustlm/errors.hpp"

namespace robustlm {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 400;
constexpr int kMargin = 48;

const char* kPalette[] = {"#4477aa", "#ee6677", "#228833", "#ccbb44",
                          "#66ccee", "#aa3377"};

std::ofstream open_svg(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path.string());
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out;
}

void title_and_axes(std::ofstream& out, const std::string& title) {
  out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
      << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n";
}

}  // namespace

void write_histogram_svg(const std::filesystem::path& path, const std::string& title,
                         const std::vector<std::string>& categories,
                         const std::vector<BarSeries>& series) {
  auto out = open_svg(path);
  title_and_axes(out, title);

  double vmax = 0.0;
  for (const auto& s : series)
    for (double v : s.values) vmax = std::max(vmax, v);
  if (vmax <= 0.0) vmax = 1.0;

  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  const auto ncat = categories.size();
  const auto nser = series.size();
  const double group_w = plot_w / static_cast<double>(ncat);
  const double bar_w = group_w / static_cast<double>(nser + 1);

  for (std::size_t s = 0; s < nser; ++s) {
    for (std::size_t c = 0; c < categories.size() && c < series[s].values.size(); ++c) {
      const double v = series[s].values[c];
      const double h = plot_h * v / vmax;
      const double x = kMargin + group_w * static_cast<double>(c) +
                       bar_w * (0.5 + static_cast<double>(s));
      out << "<rect x=\"" << x << "\" y=\"" << kHeight - kMargin - h << "\" width=\""
          << bar_w * 0.9 << "\" height=\"" << h << "\" fill=\""
          << kPalette[s % 6] << "\"/>\n";
    }
    out << "<text x=\"" << kWidth - kMargin << "\" y=\""
        << kMargin + 16 * static_cast<double>(s) << "\" text-anchor=\"end\" "
        << "font-family=\"sans-serif\" font-size=\"11\" fill=\"" << kPalette[s % 6]
        << "\">" << series[s].label << "</text>\n";
  }
  for (std::size_t c = 0; c < categories.size(); ++c) {
    out << "<text x=\"" << kMargin + group_w * (static_cast<double>(c) + 0.5)
        << "\" y=\"" << kHeight - kMargin + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << categories[c] << "</text>\n";
  }
  out << "</svg>\n";
}

void write_line_chart_svg(const std::filesystem::path& path, const std::string& title,
                          const std::vector<LineSeries>& series) {
  auto out = open_svg(path);
  title_and_axes(out, title);

  double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        first = false;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;

  const double plot_w = kWidth - 2 * kMargin;
  const double plot_h = kHeight - 2 * kMargin;
  const auto sx = [&](double x) { return kMargin + plot_w * (x - xmin) / (xmax - xmin); };
  const auto sy = [&](double y) {
    return kHeight - kMargin - plot_h * (y - ymin) / (ymax - ymin);
  };

  for (std::size_t s = 0; s < series.size(); ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << kPalette[s % 6]
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].x.size(); ++i)
      out << sx(series[s].x[i]) << ',' << sy(series[s].y[i]) << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << kWidth - kMargin << "\" y=\""
        << kMargin + 16 * static_cast<double>(s) << "\" text-anchor=\"end\" "
        << "font-family=\"sans-serif\" font-size=\"11\" fill=\"" << kPalette[s % 6]
        << "\">" << series[s].label << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace robustlm
