#pragma once

#include <string>
#include <vector>

#include "geoclust/geometry.hpp"

namespace geoclust {

struct ChoroplethOptions {
  int classes = 5;
  std::string palette = "viridis";  // viridis | blues | reds
  std::string title;
  int width = 840;
  int height = 640;
};

// Interior quantile breaks (classes - 1 of them) of the given values,
// linear-interpolation quantiles.
std::vector<double> quantile_breaks(std::vector<double> values, int classes);

// Quantile-classed SVG choropleth with a legend listing class bounds.
// All-equal values collapse to a single class with a legend note.
// Deterministic for fixed input.
std::string render_choropleth(const RegionSet& regions,
                              const std::vector<double>& values,
                              const ChoroplethOptions& options = {});

// Categorical map: one fill per label, legend lists the label names.
std::string render_categorical_map(const RegionSet& regions,
                                   const std::vector<int>& labels,
                                   const std::vector<std::string>& label_names,
                                   const ChoroplethOptions& options = {});

}  // namespace geoclust
