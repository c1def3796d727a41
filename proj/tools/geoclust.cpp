#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "geoclust/choropleth.hpp"
#include "geoclust/csv.hpp"
#include "geoclust/errors.hpp"
#include "geoclust/geojson.hpp"
#include "geoclust/moran.hpp"
#include "geoclust/pipeline.hpp"
#include "geoclust/synthetic.hpp"

namespace fs = std::filesystem;
using namespace geoclust;

namespace {

int cmd_run(const std::string& config_path) {
  const PipelineConfig config = load_config_file(config_path);
  const PipelineResult result = run_pipeline(config);
  std::cout << "fit " << result.n_fit << " of " << result.n_total
            << " regions; quasi-global R2 = "
            << format_double(result.gwr.quasi_global_r2, 6)
            << "; clusters k = " << result.clusters.k << "\n";
  std::cout << "outputs in " << config.output_dir.string() << ":\n";
  for (const auto& path : result.outputs)
    std::cout << "  " << path.filename().string() << "\n";
  return 0;
}

int cmd_synth(const SyntheticSpec& spec, const std::string& out_dir) {
  const SyntheticData data = generate_synthetic(spec);
  fs::create_directories(out_dir);
  const fs::path base(out_dir);
  write_text_file(base / "regions.geojson", data.regions_geojson);
  write_text_file(base / "covariates.csv", data.covariates_csv);
  write_text_file(base / "truth.csv", data.truth_csv);

  // Ready-to-run config for the generated dataset.
  PipelineConfig config;
  config.regions_path = "regions.geojson";
  config.covariates_path = "covariates.csv";
  config.response = "y";
  for (int j = 1; j <= spec.n_covariates; ++j)
    config.covariates.push_back({"x" + std::to_string(j), false, ""});
  config.kernel.kind = KernelKind::adaptive_bisquare;
  config.kernel.auto_bandwidth = true;
  config.moran.permutations = 999;
  config.clustering.k_min = 2;
  config.clustering.k_max = 5;
  config.output_dir = "out";
  write_text_file(base / "config.json", config_to_json(config).dump(2) + "\n");

  std::cout << "wrote regions.geojson, covariates.csv, truth.csv, config.json"
            << " to " << out_dir << "\n";
  return 0;
}

int cmd_moran(const std::string& config_path, const std::string& variable,
              const std::string& adjacency_out) {
  PipelineConfig config = load_config_file(config_path);
  if (!variable.empty()) config.response = variable;
  const PreparedDataset data = prepare_dataset(config);
  const MoranResult result = moran_permutation_test(
      data.response, data.adjacency, config.moran.permutations,
      config.moran.seed, config.moran.row_standardize);
  std::cout << moran_to_json(result) << "\n";
  if (!adjacency_out.empty())
    write_text_file(adjacency_out, adjacency_to_csv(data.regions, data.adjacency));
  return 0;
}

int cmd_render(const std::string& values_path, const std::string& regions_path,
               const std::string& column, const std::string& id_column,
               const std::string& id_property, const ChoroplethOptions& options,
               const std::string& out_path) {
  const RegionSet regions = load_regions_file(regions_path, {id_property});
  const CsvTable table = read_csv_file(values_path);
  const std::size_t id_col = table.column(id_column);
  const std::size_t value_col =
      column.empty() ? (id_col == 0 ? 1 : 0) : table.column(column);
  if (value_col >= table.header.size())
    throw ValidationError("values CSV needs a value column");

  std::vector<double> values(regions.size(), 0.0);
  std::vector<bool> seen(regions.size(), false);
  for (const auto& row : table.rows) {
    const auto idx = regions.index_of(row[id_col]);
    if (!idx)
      throw ValidationError("values row '" + row[id_col] +
                            "' matches no region");
    try {
      values[*idx] = std::stod(row[value_col]);
    } catch (const std::exception&) {
      throw ValidationError("value '" + row[value_col] + "' for region '" +
                            row[id_col] + "' is not numeric");
    }
    seen[*idx] = true;
  }
  for (std::size_t i = 0; i < regions.size(); ++i)
    if (!seen[i])
      throw ValidationError("no value for region '" + regions[i].id + "'");

  write_text_file(out_path, render_choropleth(regions, values, options));
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "geoclust: geographically weighted regression, spatial autocorrelation "
      "and coefficient clustering for areal data.\n"
      "Coordinates are treated as planar; project geographic data first."};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run the full analysis pipeline");
  run->add_option("config", config_path, "pipeline config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);

  SyntheticSpec spec;
  std::string surface = "two_block";
  std::string out_dir = "synthetic";
  auto* synth =
      app.add_subcommand("synth", "generate a synthetic grid dataset");
  synth->add_option("--width", spec.width, "grid width");
  synth->add_option("--height", spec.height, "grid height");
  synth->add_option("--surface", surface,
                    "coefficient surface: constant | two_block | smooth_gradient");
  synth->add_option("--noise", spec.noise_sd, "noise standard deviation");
  synth->add_option("--seed", spec.seed, "random seed");
  synth->add_option("--covariates", spec.n_covariates, "covariate count");
  synth->add_option("--gap", spec.gap, "two-block spatial gap");
  synth->add_option("--out-dir", out_dir, "output directory");

  std::string moran_config, moran_variable, adjacency_out;
  auto* moran = app.add_subcommand(
      "moran", "Moran's I permutation test for one variable");
  moran->add_option("config", moran_config, "pipeline config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  moran->add_option("--variable", moran_variable,
                    "column to test (default: the response)");
  moran->add_option("--adjacency-out", adjacency_out,
                    "also write the queen adjacency edge list CSV");

  std::string values_path, regions_path, render_column, render_out = "map.svg";
  std::string render_id_column = "region_id", render_id_property = "id";
  ChoroplethOptions render_options;
  auto* render = app.add_subcommand("render", "render a choropleth SVG");
  render->add_option("values", values_path, "CSV with region_id and a value column")
      ->required()
      ->check(CLI::ExistingFile);
  render->add_option("regions", regions_path, "regions GeoJSON")
      ->required()
      ->check(CLI::ExistingFile);
  render->add_option("--column", render_column, "value column name");
  render->add_option("--id-column", render_id_column, "CSV id column");
  render->add_option("--id-property", render_id_property,
                     "GeoJSON id property");
  render->add_option("--classes", render_options.classes, "quantile classes");
  render->add_option("--palette", render_options.palette,
                     "viridis | blues | reds");
  render->add_option("--out", render_out, "output SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*synth) {
      spec.surface = surface_kind_from_string(surface);
      return cmd_synth(spec, out_dir);
    }
    if (*moran) return cmd_moran(moran_config, moran_variable, adjacency_out);
    if (*render)
      return cmd_render(values_path, regions_path, render_column,
                        render_id_column, render_id_property, render_options,
                        render_out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
