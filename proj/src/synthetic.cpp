#include "geoclust/synthetic.hpp"

#include <sstream>
#include <vector>

#include "json.hpp"

#include "geoclust/csv.hpp"
#include "geoclust/errors.hpp"
#include "geoclust/random.hpp"

namespace geoclust {

namespace {

// Base coefficient pattern: intercept first, then one entry per covariate.
double base_coefficient(int j) {
  static const double pattern[] = {1.0, 2.0, -1.0, 0.5, -0.25, 0.125};
  if (j < 6) return pattern[j];
  return (j % 2 == 0 ? 1.0 : -1.0) / static_cast<double>(j);
}

// Second regime for the two-block surface; differs in every entry.
double block_b_coefficient(int j) {
  static const double pattern[] = {-1.0, -1.0, 1.5, -0.75, 0.5, -0.375};
  if (j < 6) return pattern[j];
  return (j % 2 == 0 ? -1.5 : 1.5) / static_cast<double>(j);
}

}  // namespace

std::string to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::constant: return "constant";
    case SurfaceKind::two_block: return "two_block";
    case SurfaceKind::smooth_gradient: return "smooth_gradient";
  }
  return "constant";
}

SurfaceKind surface_kind_from_string(const std::string& name) {
  if (name == "constant") return SurfaceKind::constant;
  if (name == "two_block") return SurfaceKind::two_block;
  if (name == "smooth_gradient") return SurfaceKind::smooth_gradient;
  throw ValidationError("unknown surface '" + name +
                        "' (constant | two_block | smooth_gradient)");
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.width < 1 || spec.height < 1)
    throw ValidationError("grid dimensions must be positive");
  if (spec.noise_sd < 0.0)
    throw ValidationError("noise standard deviation must be >= 0");
  if (spec.n_covariates < 1 || spec.n_covariates > 16)
    throw ValidationError("covariate count must be in [1, 16]");

  const int w = spec.width;
  const int h = spec.height;
  const int m = spec.n_covariates;
  const int split = w / 2;

  Rng covariate_rng = seeded_stream(spec.seed, 0);
  Rng noise_rng = seeded_stream(spec.seed, 1);

  nlohmann::ordered_json collection;
  collection["type"] = "FeatureCollection";
  auto& features = collection["features"] = nlohmann::json::array();

  std::ostringstream cov_csv;
  cov_csv << "region_id";
  for (int j = 1; j <= m; ++j) cov_csv << ",x" << j;
  cov_csv << ",y\n";

  std::ostringstream truth_csv;
  truth_csv << "region_id,beta_intercept";
  for (int j = 1; j <= m; ++j) truth_csv << ",beta_x" << j;
  truth_csv << '\n';

  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const bool right_block =
          spec.surface == SurfaceKind::two_block && col >= split;
      const double x0 =
          static_cast<double>(col) + (right_block ? spec.gap : 0.0);
      const double y0 = static_cast<double>(row);
      const double u = x0 + 0.5;
      const double v = y0 + 0.5;
      const std::string id = "r" + std::to_string(row) + "c" +
                             std::to_string(col);

      nlohmann::ordered_json feature;
      feature["type"] = "Feature";
      feature["properties"] = {{"id", id}};
      feature["geometry"] = {
          {"type", "Polygon"},
          {"coordinates",
           nlohmann::json::array(
               {nlohmann::json::array({nlohmann::json::array({x0, y0}),
                                       nlohmann::json::array({x0 + 1.0, y0}),
                                       nlohmann::json::array({x0 + 1.0, y0 + 1.0}),
                                       nlohmann::json::array({x0, y0 + 1.0}),
                                       nlohmann::json::array({x0, y0})})})}};
      features.push_back(feature);

      std::vector<double> beta(static_cast<std::size_t>(m) + 1);
      for (int j = 0; j <= m; ++j) {
        switch (spec.surface) {
          case SurfaceKind::constant:
            beta[static_cast<std::size_t>(j)] = base_coefficient(j);
            break;
          case SurfaceKind::two_block:
            beta[static_cast<std::size_t>(j)] =
                right_block ? block_b_coefficient(j) : base_coefficient(j);
            break;
          case SurfaceKind::smooth_gradient:
            beta[static_cast<std::size_t>(j)] =
                base_coefficient(j) +
                static_cast<double>(j + 1) *
                    (u / static_cast<double>(w) +
                     0.5 * v / static_cast<double>(h));
            break;
        }
      }

      double y = beta[0];
      cov_csv << id;
      for (int j = 1; j <= m; ++j) {
        const double x = uniform01(covariate_rng);
        y += beta[static_cast<std::size_t>(j)] * x;
        cov_csv << ',' << format_double(x, 17);
      }
      y += spec.noise_sd * normal01(noise_rng);
      cov_csv << ',' << format_double(y, 17) << '\n';

      truth_csv << id;
      for (int j = 0; j <= m; ++j)
        truth_csv << ',' << format_double(beta[static_cast<std::size_t>(j)], 17);
      truth_csv << '\n';
    }
  }

  return {collection.dump(), cov_csv.str(), truth_csv.str()};
}

}  // namespace geoclust
