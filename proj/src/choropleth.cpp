#include "geoclust/choropleth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "geoclust/csv.hpp"
#include "geoclust/errors.hpp"

namespace geoclust {

namespace {

struct Rgb {
  double r, g, b;
};

std::vector<Rgb> palette_anchors(const std::string& name) {
  if (name == "viridis") {
    return {{0x44, 0x01, 0x54}, {0x3b, 0x52, 0x8b}, {0x21, 0x91, 0x8c},
            {0x5e, 0xc9, 0x62}, {0xfd, 0xe7, 0x25}};
  }
  if (name == "blues") {
    return {{0xf7, 0xfb, 0xff}, {0x6b, 0xae, 0xd6}, {0x08, 0x30, 0x6b}};
  }
  if (name == "reds") {
    return {{0xff, 0xf5, 0xf0}, {0xfb, 0x6a, 0x4a}, {0x67, 0x00, 0x0d}};
  }
  throw ValidationError("unknown palette '" + name +
                        "' (viridis | blues | reds)");
}

std::string sample_palette(const std::vector<Rgb>& anchors, double t) {
  t = std::clamp(t, 0.0, 1.0);
  const double pos = t * static_cast<double>(anchors.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, anchors.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  auto mix = [&](double a, double b) { return a + (b - a) * frac; };
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                static_cast<int>(std::lround(mix(anchors[lo].r, anchors[hi].r))),
                static_cast<int>(std::lround(mix(anchors[lo].g, anchors[hi].g))),
                static_cast<int>(std::lround(mix(anchors[lo].b, anchors[hi].b))));
  return buf;
}

struct Bounds {
  double min_x = 0, min_y = 0, max_x = 1, max_y = 1;
};

Bounds region_bounds(const RegionSet& regions) {
  Bounds b{1e300, 1e300, -1e300, -1e300};
  for (const Region& r : regions.regions()) {
    for (const Ring& ring : r.rings) {
      for (const Point& p : ring) {
        b.min_x = std::min(b.min_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_x = std::max(b.max_x, p.x);
        b.max_y = std::max(b.max_y, p.y);
      }
    }
  }
  if (b.min_x > b.max_x) b = {0, 0, 1, 1};
  return b;
}

std::string svg_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Shared SVG skeleton: polygons with per-region fills plus a legend column.
std::string render_svg(const RegionSet& regions,
                       const std::vector<std::string>& fills,
                       const std::vector<std::pair<std::string, std::string>>&
                           legend,  // (color, text)
                       const ChoroplethOptions& options,
                       const std::string& note) {
  const Bounds b = region_bounds(regions);
  const double legend_w = 220.0;
  const double margin = 12.0;
  const double map_w = static_cast<double>(options.width) - legend_w - 2 * margin;
  const double map_h = static_cast<double>(options.height) - 2 * margin -
                       (options.title.empty() ? 0.0 : 24.0);
  const double span_x = std::max(b.max_x - b.min_x, 1e-12);
  const double span_y = std::max(b.max_y - b.min_y, 1e-12);
  const double scale = std::min(map_w / span_x, map_h / span_y);
  const double top = margin + (options.title.empty() ? 0.0 : 24.0);

  auto tx = [&](double x) { return margin + (x - b.min_x) * scale; };
  auto ty = [&](double y) { return top + (b.max_y - y) * scale; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width
      << "\" height=\"" << options.height << "\">\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << margin << "\" y=\"" << margin + 8
        << "\" font-family=\"sans-serif\" font-size=\"16\">"
        << svg_escape(options.title) << "</text>\n";
  }
  for (std::size_t i = 0; i < regions.size(); ++i) {
    svg << "<path d=\"";
    for (const Ring& ring : regions[i].rings) {
      for (std::size_t v = 0; v + 1 < ring.size(); ++v) {
        svg << (v == 0 ? 'M' : 'L') << format_double(tx(ring[v].x), 6) << ' '
            << format_double(ty(ring[v].y), 6);
      }
      svg << 'Z';
    }
    svg << "\" fill=\"" << fills[i]
        << "\" fill-rule=\"evenodd\" stroke=\"#333333\" stroke-width=\"0.5\"/>\n";
  }

  const double lx = static_cast<double>(options.width) - legend_w;
  double ly = top + 6.0;
  for (const auto& [color, text] : legend) {
    svg << "<rect x=\"" << lx << "\" y=\"" << ly
        << "\" width=\"16\" height=\"16\" fill=\"" << color
        << "\" stroke=\"#333333\" stroke-width=\"0.5\"/>\n";
    svg << "<text x=\"" << lx + 22 << "\" y=\"" << ly + 12
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << svg_escape(text) << "</text>\n";
    ly += 22.0;
  }
  if (!note.empty()) {
    svg << "<text x=\"" << lx << "\" y=\"" << ly + 12
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << svg_escape(note) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::vector<double> quantile_breaks(std::vector<double> values, int classes) {
  if (classes < 1) throw ValidationError("class count must be >= 1");
  if (values.empty()) throw ValidationError("no values to classify");
  std::sort(values.begin(), values.end());
  std::vector<double> breaks;
  const auto n = values.size();
  for (int j = 1; j < classes; ++j) {
    // Linear-interpolation quantile at probability j / classes.
    const double p = static_cast<double>(j) / static_cast<double>(classes);
    const double h = p * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, n - 1);
    breaks.push_back(values[lo] + (h - static_cast<double>(lo)) *
                                      (values[hi] - values[lo]));
  }
  return breaks;
}

std::string render_choropleth(const RegionSet& regions,
                              const std::vector<double>& values,
                              const ChoroplethOptions& options) {
  if (values.size() != regions.size())
    throw ValidationError("values/regions size mismatch");
  for (double v : values)
    if (!std::isfinite(v))
      throw ValidationError("choropleth values must be finite");
  if (values.empty()) throw ValidationError("nothing to render");

  const auto anchors = palette_anchors(options.palette);
  const std::vector<double> breaks = quantile_breaks(values, options.classes);
  const double vmin = *std::min_element(values.begin(), values.end());
  const double vmax = *std::max_element(values.begin(), values.end());
  const bool degenerate = vmin == vmax;

  auto class_of = [&](double v) {
    int c = 0;
    for (double brk : breaks)
      if (v > brk) ++c;
    return c;
  };

  std::vector<std::string> class_color(
      static_cast<std::size_t>(options.classes));
  for (int c = 0; c < options.classes; ++c) {
    const double t = options.classes > 1
                         ? static_cast<double>(c) /
                               static_cast<double>(options.classes - 1)
                         : 0.5;
    class_color[static_cast<std::size_t>(c)] = sample_palette(anchors, t);
  }

  std::vector<std::string> fills(values.size());
  std::vector<bool> used(static_cast<std::size_t>(options.classes), false);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int c = class_of(values[i]);
    fills[i] = class_color[static_cast<std::size_t>(c)];
    used[static_cast<std::size_t>(c)] = true;
  }

  std::vector<std::pair<std::string, std::string>> legend;
  for (int c = 0; c < options.classes; ++c) {
    if (!used[static_cast<std::size_t>(c)]) continue;
    const double lo = c == 0 ? vmin : breaks[static_cast<std::size_t>(c - 1)];
    const double hi =
        c == options.classes - 1 ? vmax : breaks[static_cast<std::size_t>(c)];
    legend.emplace_back(class_color[static_cast<std::size_t>(c)],
                        "[" + format_double(lo, 4) + ", " +
                            format_double(hi, 4) + "]");
  }
  return render_svg(regions, fills, legend, options,
                    degenerate ? "all values equal" : "");
}

std::string render_categorical_map(const RegionSet& regions,
                                   const std::vector<int>& labels,
                                   const std::vector<std::string>& label_names,
                                   const ChoroplethOptions& options) {
  if (labels.size() != regions.size())
    throw ValidationError("labels/regions size mismatch");
  int k = 0;
  for (int l : labels) {
    if (l < 0) throw ValidationError("negative label");
    k = std::max(k, l + 1);
  }
  if (k == 0) throw ValidationError("nothing to render");
  const auto anchors = palette_anchors(options.palette);

  std::vector<std::string> colors(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    colors[static_cast<std::size_t>(c)] = sample_palette(
        anchors,
        k > 1 ? static_cast<double>(c) / static_cast<double>(k - 1) : 0.5);
  }
  std::vector<std::string> fills(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i)
    fills[i] = colors[static_cast<std::size_t>(labels[i])];

  std::vector<std::pair<std::string, std::string>> legend;
  for (int c = 0; c < k; ++c) {
    const std::string name = static_cast<std::size_t>(c) < label_names.size()
                                 ? label_names[static_cast<std::size_t>(c)]
                                 : "cluster " + std::to_string(c);
    legend.emplace_back(colors[static_cast<std::size_t>(c)], name);
  }
  return render_svg(regions, fills, legend, options, "");
}

}  // namespace geoclust
