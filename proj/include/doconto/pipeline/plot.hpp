#pragma once

// Static SVG scatter of a 2-D embedding coloured by cluster.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "doconto/errors.hpp"
#include "doconto/manifold/clusters.hpp"
#include "doconto/manifold/kmeans.hpp"
#include "doconto/manifold/tsne.hpp"

namespace doconto {

inline constexpr std::size_t kPaletteSize = 50;

// 50 hues around the wheel in a stride of 17 (coprime with 50), two
// lightness bands.
inline const std::array<std::string, kPaletteSize>& cluster_palette() {
  static const std::array<std::string, kPaletteSize> palette = [] {
    std::array<std::string, kPaletteSize> p;
    for (std::size_t i = 0; i < kPaletteSize; ++i) {
      const double h = static_cast<double>((i * 17) % kPaletteSize) / static_cast<double>(kPaletteSize) * 6.0;
      const double s = 0.70;
      const double v = i % 2 == 0 ? 0.85 : 0.60;
      const double c = v * s;
      const double x = c * (1.0 - std::fabs(std::fmod(h, 2.0) - 1.0));
      double r = 0, g = 0, b = 0;
      switch (static_cast<int>(h)) {
        case 0: r = c, g = x; break;
        case 1: r = x, g = c; break;
        case 2: g = c, b = x; break;
        case 3: g = x, b = c; break;
        case 4: r = x, b = c; break;
        default: r = c, b = x; break;
      }
      const double m = v - c;
      char buf[8];
      std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<unsigned>(std::lround((r + m) * 255.0)),
                    static_cast<unsigned>(std::lround((g + m) * 255.0)), static_cast<unsigned>(std::lround((b + m) * 255.0)));
      p[i] = buf;
    }
    return p;
  }();
  return palette;
}

struct PlotOptions {
  double width = 800.0;
  double height = 600.0;
  double margin = 0.05;  // fraction of each side
  double radius = 4.0;
  bool medoid_labels = true;
};

struct PlotLabel {
  std::size_t point = 0;
  std::string text;
};

namespace detail {

inline std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

inline std::string render_clusters_svg(const LowDimEmbedding& lowdim, const ClusterAssignment& assign,
                                       const std::vector<PlotLabel>& labels = {}, const PlotOptions& opt = {}) {
  const std::size_t n = lowdim.size();
  if (assign.labels.size() != n || lowdim.points.rows != n) throw ParameterError("plot: points and clusters differ in length");
  if (n > 0 && lowdim.points.cols != 2) throw ParameterError("plot: points must be 2-D");
  if (!(opt.width > 0 && opt.height > 0) || !(opt.margin >= 0 && opt.margin < 0.5)) throw ParameterError("plot: bad viewport");

  double lo[2] = {0, 0}, hi[2] = {0, 0};
  for (std::size_t i = 0; i < n; ++i)
    for (int d = 0; d < 2; ++d) {
      const double v = lowdim.points(i, static_cast<std::size_t>(d));
      lo[d] = i == 0 ? v : std::min(lo[d], v);
      hi[d] = i == 0 ? v : std::max(hi[d], v);
    }
  const double extent[2] = {opt.width, opt.height};
  auto map = [&](double v, int d) {
    const double usable = extent[d] * (1.0 - 2.0 * opt.margin);
    const double span = hi[d] - lo[d];
    double t = span > 0 ? (v - lo[d]) / span : 0.5;
    if (d == 1) t = 1.0 - t;  // y grows downward in SVG
    return extent[d] * opt.margin + t * usable;
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fixed3(opt.width) << "\" height=\""
     << detail::fixed3(opt.height) << "\" viewBox=\"0 0 " << detail::fixed3(opt.width) << ' ' << detail::fixed3(opt.height)
     << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << detail::fixed3(opt.width) << "\" height=\"" << detail::fixed3(opt.height)
     << "\" fill=\"#ffffff\"/>\n";
  const auto& palette = cluster_palette();
  for (std::size_t i = 0; i < n; ++i) {
    os << "<circle cx=\"" << detail::fixed3(map(lowdim.points(i, 0), 0)) << "\" cy=\""
       << detail::fixed3(map(lowdim.points(i, 1), 1)) << "\" r=\"" << detail::fixed3(opt.radius) << "\" fill=\""
       << palette[assign.labels[i] % kPaletteSize] << "\"><title>" << detail::xml_escape(lowdim.labels[i])
       << "</title></circle>\n";
  }
  if (opt.medoid_labels) {
    for (const auto& l : labels) {
      if (l.point >= n) throw ParameterError("plot: label refers to a missing point");
      os << "<text x=\"" << detail::fixed3(map(lowdim.points(l.point, 0), 0) + opt.radius + 2.0) << "\" y=\""
         << detail::fixed3(map(lowdim.points(l.point, 1), 1)) << "\" font-family=\"sans-serif\" font-size=\"11\">"
         << detail::xml_escape(l.text) << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

// One label per summary, placed on the medoid's point.
inline std::vector<PlotLabel> medoid_labels(const LowDimEmbedding& lowdim, const ClusterAssignment& assign,
                                            const std::vector<ClusterSummary>& summaries) {
  std::vector<PlotLabel> out;
  for (const auto& s : summaries)
    for (std::size_t i = 0; i < lowdim.size(); ++i)
      if (assign.labels[i] == s.cluster && lowdim.labels[i] == s.medoid) {
        out.push_back({i, s.medoid});
        break;
      }
  return out;
}

}  // namespace doconto
