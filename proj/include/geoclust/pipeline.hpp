#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "geoclust/clustering.hpp"
#include "geoclust/geometry.hpp"
#include "geoclust/kernels.hpp"
#include "geoclust/moran.hpp"
#include "geoclust/regression.hpp"
#include "geoclust/choropleth.hpp"

namespace geoclust {

struct MoranSettings {
  int permutations = 9999;
  std::uint64_t seed = 1;
  bool row_standardize = true;
};

struct ClusteringSettings {
  bool fixed_k = false;
  int k = 3;          // when fixed_k
  int k_min = 2;      // otherwise scan [k_min, k_max]
  int k_max = 6;
  std::uint64_t seed = 1;
  int restarts = 20;
  int max_iter = 100;
  bool standardize = false;
  bool include_intercept = false;
};

struct KernelConfig {
  KernelKind kind = KernelKind::adaptive_bisquare;
  bool auto_bandwidth = true;
  double bandwidth = 0.0;  // fixed_gaussian
  int neighbors = 0;       // adaptive_bisquare
};

struct CovariateSpec {
  std::string name;
  bool categorical = false;
  std::string baseline;  // categorical only
};

// One config file fully determines a run. Paths are resolved against the
// directory of the config file at load time.
struct PipelineConfig {
  std::filesystem::path regions_path;
  std::filesystem::path covariates_path;  // empty: covariates live in the GeoJSON
  std::string id_property = "id";
  std::string csv_id_column = "region_id";
  std::string response;
  std::vector<CovariateSpec> covariates;
  KernelConfig kernel;
  MoranSettings moran;
  ClusteringSettings clustering;
  ChoroplethOptions choropleth;
  double snap_tolerance = 1e-9;
  std::filesystem::path output_dir = "out";
};

PipelineConfig parse_config(const nlohmann::json& doc,
                            const std::filesystem::path& base_dir);
nlohmann::ordered_json config_to_json(const PipelineConfig& config);
PipelineConfig load_config_file(const std::filesystem::path& path);

// Loaded, joined, imputed and reduced dataset: the regions that enter the
// fit, their adjacency and the typed analysis columns.
struct PreparedDataset {
  RegionSet regions;        // fit regions only
  AdjacencyGraph adjacency; // over fit regions
  std::vector<double> response;
  std::vector<CovariateColumn> columns;
  std::vector<std::string> excluded_ids;
  std::string imputation_report_csv;
  std::size_t n_total = 0;
};

PreparedDataset prepare_dataset(const PipelineConfig& config);

struct PipelineResult {
  std::vector<std::filesystem::path> outputs;
  std::size_t n_total = 0;
  std::size_t n_fit = 0;
  OlsFit ols;
  GwrFit gwr;
  MoranResult moran_response;
  MoranResult moran_residuals;
  ClusterResult clusters;
  std::vector<std::pair<int, double>> per_k_silhouette;
};

// Full run: load -> join -> impute -> exclude -> OLS -> Moran(response) ->
// bandwidth -> GWR -> Moran(residuals) -> k-means -> exports. Any stage
// error removes the files already written and rethrows with a stage tag.
PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace geoclust
