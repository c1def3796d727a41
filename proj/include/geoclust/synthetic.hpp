#pragma once

#include <cstdint>
#include <string>

namespace geoclust {

enum class SurfaceKind { constant, two_block, smooth_gradient };

std::string to_string(SurfaceKind kind);
SurfaceKind surface_kind_from_string(const std::string& name);

// Synthetic areal dataset: a width x height grid of unit squares with
// seeded uniform covariates and a response assembled from a chosen
// coefficient surface plus Gaussian noise. The two_block surface splits the
// grid at width/2 and shifts the right block sideways by `gap`, so compact
// local windows never span both coefficient regimes.
struct SyntheticSpec {
  int width = 10;
  int height = 10;
  SurfaceKind surface = SurfaceKind::two_block;
  double noise_sd = 0.0;
  std::uint64_t seed = 1;
  int n_covariates = 2;
  double gap = 5.0;
};

struct SyntheticData {
  std::string regions_geojson;  // FeatureCollection, id property "id"
  std::string covariates_csv;   // region_id, x1..xm, y
  std::string truth_csv;        // region_id, beta_intercept, beta_x1..
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace geoclust
