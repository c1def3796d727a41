#include "geoclust/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "geoclust/csv.hpp"
#include "geoclust/errors.hpp"
#include "geoclust/geojson.hpp"
#include "geoclust/imputation.hpp"

namespace geoclust {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Rethrows any stage failure with a stage-tagged message, preserving the
// error class so the CLI keeps the right exit code.
template <typename Fn>
auto with_stage(const std::string& stage, Fn&& fn) {
  try {
    return fn();
  } catch (const LocalSingularityError& e) {
    throw LocalSingularityError(e.location(),
                                "[" + stage + "] " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError("[" + stage + "] " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError("[" + stage + "] " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

std::optional<double> parse_cell_number(const std::string& raw,
                                        const std::string& column,
                                        const std::string& region_id) {
  if (raw.empty() || raw == "NA" || raw == "NaN" || raw == "nan")
    return std::nullopt;
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size())
      throw ValidationError("");
    return v;
  } catch (const std::exception&) {
    throw ValidationError("column '" + column + "': value '" + raw +
                          "' for region '" + region_id + "' is not numeric");
  }
}

std::string attribute_as_category(const AttributeValue& v) {
  if (v.kind == AttributeValue::Kind::number)
    return format_double(v.number, 12);
  return v.text;
}

// One analysis column gathered from the covariate CSV or, failing that, the
// region attributes. Values stay optional until imputation resolves them.
struct RawColumn {
  std::vector<std::optional<double>> numbers;
  std::vector<std::optional<std::string>> categories;
};

RawColumn gather_column(const std::string& name, bool categorical,
                        const RegionSet& regions, const CsvTable* csv,
                        const std::vector<const std::vector<std::string>*>&
                            csv_row_per_region) {
  RawColumn out;
  const std::size_t n = regions.size();
  std::optional<std::size_t> csv_col =
      csv ? csv->find_column(name) : std::nullopt;
  bool in_attributes = false;
  for (std::size_t i = 0; i < n && !in_attributes; ++i)
    in_attributes = regions[i].attributes.count(name) > 0;
  if (csv_col && in_attributes)
    throw ValidationError("column '" + name +
                          "' is present in both the covariate CSV and the "
                          "region attributes");
  if (!csv_col && !in_attributes)
    throw ValidationError("column '" + name +
                          "' not found in the covariate CSV or the region "
                          "attributes");

  if (categorical) out.categories.resize(n);
  else out.numbers.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const std::string& id = regions[i].id;
    if (csv_col) {
      const std::string& raw = (*csv_row_per_region[i])[*csv_col];
      if (categorical) {
        if (!raw.empty() && raw != "NA") out.categories[i] = raw;
      } else {
        out.numbers[i] = parse_cell_number(raw, name, id);
      }
    } else {
      auto it = regions[i].attributes.find(name);
      const AttributeValue v = it == regions[i].attributes.end()
                                   ? AttributeValue::make_missing()
                                   : it->second;
      if (v.is_missing()) continue;
      if (categorical) {
        out.categories[i] = attribute_as_category(v);
      } else {
        if (v.kind != AttributeValue::Kind::number)
          throw ValidationError("column '" + name + "': region '" + id +
                                "' has a non-numeric attribute value");
        out.numbers[i] = v.number;
      }
    }
  }
  return out;
}

std::string sanitize_filename(const std::string& name) {
  std::string out;
  for (char c : name)
    out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
  return out;
}

}  // namespace

PipelineConfig parse_config(const json& doc,
                            const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  PipelineConfig config;

  auto require = [&](const char* key) -> const json& {
    if (!doc.contains(key))
      throw ValidationError(std::string("config is missing '") + key + "'");
    return doc.at(key);
  };

  config.regions_path =
      resolve(base_dir, require("regions").get<std::string>());
  if (doc.contains("covariates") && !doc["covariates"].is_null())
    config.covariates_path =
        resolve(base_dir, doc["covariates"].get<std::string>());
  config.id_property = doc.value("id_property", std::string("id"));
  config.csv_id_column = doc.value("csv_id_column", std::string("region_id"));
  config.response = require("response").get<std::string>();
  config.snap_tolerance = doc.value("snap_tolerance", 1e-9);
  config.output_dir =
      resolve(base_dir, doc.value("output_dir", std::string("out")));

  if (doc.contains("covariate_spec")) {
    const json& spec = doc["covariate_spec"];
    if (!spec.is_array())
      throw ValidationError("covariate_spec must be an array");
    for (const json& item : spec) {
      CovariateSpec cov;
      if (item.is_string()) {
        cov.name = item.get<std::string>();
      } else if (item.is_object()) {
        if (!item.contains("name"))
          throw ValidationError("covariate_spec entries need a 'name'");
        cov.name = item["name"].get<std::string>();
        const std::string type = item.value("type", std::string("continuous"));
        if (type == "categorical") {
          cov.categorical = true;
          if (!item.contains("baseline"))
            throw ValidationError("categorical covariate '" + cov.name +
                                  "' needs a 'baseline' level");
          cov.baseline = item["baseline"].get<std::string>();
        } else if (type != "continuous") {
          throw ValidationError("covariate '" + cov.name +
                                "': unknown type '" + type + "'");
        }
      } else {
        throw ValidationError("covariate_spec entries must be strings or objects");
      }
      config.covariates.push_back(std::move(cov));
    }
  }

  const json kernel = doc.value("kernel", json("adaptive_bisquare"));
  if (kernel.is_string()) {
    config.kernel.kind = kernel_kind_from_string(kernel.get<std::string>());
  } else {
    throw ValidationError("'kernel' must be a kernel name");
  }
  config.kernel.auto_bandwidth = true;
  if (doc.contains("bandwidth") && !doc["bandwidth"].is_null()) {
    const json& bw = doc["bandwidth"];
    if (bw.is_string() && bw.get<std::string>() == "auto") {
      config.kernel.auto_bandwidth = true;
    } else if (bw.is_number()) {
      config.kernel.auto_bandwidth = false;
      config.kernel.bandwidth = bw.get<double>();
    } else {
      throw ValidationError("'bandwidth' must be a number or \"auto\"");
    }
  }
  if (doc.contains("neighbors") && !doc["neighbors"].is_null()) {
    const json& nb = doc["neighbors"];
    if (nb.is_string() && nb.get<std::string>() == "auto") {
      config.kernel.auto_bandwidth = true;
    } else if (nb.is_number_integer()) {
      config.kernel.auto_bandwidth = false;
      config.kernel.neighbors = nb.get<int>();
    } else {
      throw ValidationError("'neighbors' must be an integer or \"auto\"");
    }
  }

  if (doc.contains("moran")) {
    const json& m = doc["moran"];
    config.moran.permutations = m.value("permutations", 9999);
    config.moran.seed = m.value("seed", std::uint64_t{1});
    config.moran.row_standardize = m.value("row_standardize", true);
  }

  if (doc.contains("clustering")) {
    const json& c = doc["clustering"];
    if (c.contains("k")) {
      const json& k = c["k"];
      if (k.is_number_integer()) {
        config.clustering.fixed_k = true;
        config.clustering.k = k.get<int>();
      } else if (k.is_array() && k.size() == 2) {
        config.clustering.fixed_k = false;
        config.clustering.k_min = k[0].get<int>();
        config.clustering.k_max = k[1].get<int>();
      } else {
        throw ValidationError("clustering 'k' must be an integer or [min, max]");
      }
    }
    config.clustering.seed = c.value("seed", std::uint64_t{1});
    config.clustering.restarts = c.value("restarts", 20);
    config.clustering.max_iter = c.value("max_iter", 100);
    config.clustering.standardize = c.value("standardize", false);
    config.clustering.include_intercept = c.value("include_intercept", false);
  }

  if (doc.contains("choropleth")) {
    const json& ch = doc["choropleth"];
    config.choropleth.classes = ch.value("classes", 5);
    config.choropleth.palette = ch.value("palette", std::string("viridis"));
  }

  return config;
}

ordered_json config_to_json(const PipelineConfig& config) {
  ordered_json doc;
  doc["regions"] = config.regions_path.string();
  if (!config.covariates_path.empty())
    doc["covariates"] = config.covariates_path.string();
  doc["id_property"] = config.id_property;
  doc["csv_id_column"] = config.csv_id_column;
  doc["response"] = config.response;
  ordered_json spec = json::array();
  for (const CovariateSpec& cov : config.covariates) {
    ordered_json item;
    item["name"] = cov.name;
    item["type"] = cov.categorical ? "categorical" : "continuous";
    if (cov.categorical) item["baseline"] = cov.baseline;
    spec.push_back(item);
  }
  doc["covariate_spec"] = spec;
  doc["kernel"] = to_string(config.kernel.kind);
  if (config.kernel.auto_bandwidth) {
    doc[config.kernel.kind == KernelKind::fixed_gaussian ? "bandwidth"
                                                         : "neighbors"] =
        "auto";
  } else if (config.kernel.kind == KernelKind::fixed_gaussian) {
    doc["bandwidth"] = config.kernel.bandwidth;
  } else {
    doc["neighbors"] = config.kernel.neighbors;
  }
  doc["moran"] = {{"permutations", config.moran.permutations},
                  {"seed", config.moran.seed},
                  {"row_standardize", config.moran.row_standardize}};
  ordered_json clustering;
  if (config.clustering.fixed_k) {
    clustering["k"] = config.clustering.k;
  } else {
    clustering["k"] = json::array(
        {config.clustering.k_min, config.clustering.k_max});
  }
  clustering["seed"] = config.clustering.seed;
  clustering["restarts"] = config.clustering.restarts;
  clustering["max_iter"] = config.clustering.max_iter;
  clustering["standardize"] = config.clustering.standardize;
  clustering["include_intercept"] = config.clustering.include_intercept;
  doc["clustering"] = clustering;
  doc["choropleth"] = {{"classes", config.choropleth.classes},
                       {"palette", config.choropleth.palette}};
  doc["snap_tolerance"] = config.snap_tolerance;
  doc["output_dir"] = config.output_dir.string();
  return doc;
}

PipelineConfig load_config_file(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("config parse error at byte " +
                          std::to_string(e.byte) + ": " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

PreparedDataset prepare_dataset(const PipelineConfig& config) {
  const RegionSet all = with_stage("load", [&] {
    return load_regions_file(config.regions_path, {config.id_property});
  });

  // Join covariate CSV rows to regions, strictly one-to-one.
  CsvTable csv;
  std::vector<const std::vector<std::string>*> row_per_region;
  const bool has_csv = !config.covariates_path.empty();
  with_stage("join", [&] {
    if (!has_csv) return 0;
    csv = read_csv_file(config.covariates_path);
    const std::size_t id_col = csv.column(config.csv_id_column);
    std::map<std::string, const std::vector<std::string>*> by_id;
    for (const auto& row : csv.rows) {
      if (!by_id.emplace(row[id_col], &row).second)
        throw ValidationError("covariate CSV has duplicate rows for region '" +
                              row[id_col] + "'");
    }
    for (const auto& [id, row] : by_id) {
      if (!all.index_of(id))
        throw ValidationError("covariate CSV row '" + id +
                              "' matches no region");
    }
    row_per_region.resize(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
      auto it = by_id.find(all[i].id);
      if (it == by_id.end())
        throw ValidationError("region '" + all[i].id +
                              "' has no covariate CSV row");
      row_per_region[i] = it->second;
    }
    return 0;
  });

  const AdjacencyGraph full_graph = with_stage(
      "adjacency", [&] { return queen_adjacency(all, config.snap_tolerance); });

  // Typed columns, then spatial imputation of the covariates. The response
  // is never imputed; regions with a missing response are excluded.
  struct WorkColumn {
    CovariateSpec spec;
    RawColumn raw;
    ImputationReport report;
  };
  RawColumn response_raw;
  std::vector<WorkColumn> work;
  with_stage("impute", [&] {
    response_raw = gather_column(config.response, false, all,
                                 has_csv ? &csv : nullptr, row_per_region);
    for (const CovariateSpec& cov : config.covariates) {
      WorkColumn wc;
      wc.spec = cov;
      wc.raw = gather_column(cov.name, cov.categorical, all,
                             has_csv ? &csv : nullptr, row_per_region);
      if (cov.categorical) {
        auto [filled, report] = impute_categorical(wc.raw.categories, full_graph);
        wc.raw.categories = std::move(filled);
        wc.report = std::move(report);
      } else {
        auto [filled, report] = impute_continuous(wc.raw.numbers, full_graph);
        wc.raw.numbers = std::move(filled);
        wc.report = std::move(report);
      }
      work.push_back(std::move(wc));
    }
    return 0;
  });

  // Imputation report and the exclusion set.
  std::set<std::size_t> excluded;
  std::ostringstream report_csv;
  report_csv << "region_id,variable,action,value,neighbor_count\n";
  for (const WorkColumn& wc : work) {
    for (const auto& entry : wc.report.imputed) {
      report_csv << csv_escape(all[entry.region].id) << ','
                 << csv_escape(wc.spec.name) << ",imputed,"
                 << (wc.spec.categorical ? csv_escape(entry.category)
                                         : format_double(entry.value, 12))
                 << ',' << entry.neighbor_count << '\n';
    }
    for (std::size_t region : wc.report.unimputable) {
      excluded.insert(region);
      report_csv << csv_escape(all[region].id) << ','
                 << csv_escape(wc.spec.name) << ",unimputable,,0\n";
    }
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!response_raw.numbers[i].has_value()) {
      excluded.insert(i);
      report_csv << csv_escape(all[i].id) << ',' << csv_escape(config.response)
                 << ",unimputable,,0\n";
    }
  }

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (!excluded.count(i)) keep.push_back(i);
  if (keep.size() < 3)
    throw ValidationError("[impute] fewer than 3 usable regions remain");

  PreparedDataset prepared;
  prepared.n_total = all.size();
  prepared.regions = all.subset(keep);
  for (std::size_t i : excluded) prepared.excluded_ids.push_back(all[i].id);
  prepared.imputation_report_csv = report_csv.str();
  prepared.adjacency = with_stage("adjacency", [&] {
    return queen_adjacency(prepared.regions, config.snap_tolerance);
  });

  prepared.response.reserve(keep.size());
  for (std::size_t i : keep) prepared.response.push_back(*response_raw.numbers[i]);
  for (const WorkColumn& wc : work) {
    CovariateColumn col;
    col.name = wc.spec.name;
    col.categorical = wc.spec.categorical;
    col.baseline = wc.spec.baseline;
    for (std::size_t i : keep) {
      if (wc.spec.categorical)
        col.categories.push_back(*wc.raw.categories[i]);
      else
        col.numeric.push_back(*wc.raw.numbers[i]);
    }
    prepared.columns.push_back(std::move(col));
  }
  return prepared;
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  PipelineResult result;
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, std::string_view content) {
    const std::filesystem::path path = config.output_dir / name;
    write_text_file(path, content);
    written.push_back(path);
  };

  try {
    const PreparedDataset data = prepare_dataset(config);
    result.n_total = data.n_total;
    result.n_fit = data.regions.size();
    const std::size_t n = data.regions.size();

    const DistanceMatrix dists = with_stage(
        "distance", [&] { return distance_matrix(data.regions); });
    const DesignMatrix design = with_stage(
        "design", [&] { return build_design(data.response, data.columns); });

    result.ols = with_stage("ols", [&] { return ols_fit(design); });
    result.moran_response = with_stage("moran", [&] {
      return moran_permutation_test(data.response, data.adjacency,
                                    config.moran.permutations,
                                    config.moran.seed,
                                    config.moran.row_standardize);
    });

    KernelSpec kernel;
    if (config.kernel.auto_bandwidth) {
      kernel = with_stage("bandwidth", [&] {
        return optimize_bandwidth(design, dists, config.kernel.kind);
      });
    } else {
      kernel = config.kernel.kind == KernelKind::fixed_gaussian
                   ? KernelSpec::fixed_gaussian(config.kernel.bandwidth)
                   : KernelSpec::adaptive_bisquare(config.kernel.neighbors);
      with_stage("bandwidth", [&] {
        kernel.validate(n);
        return 0;
      });
    }

    result.gwr = with_stage("gwr", [&] {
      try {
        return gwr_fit(design, dists, kernel);
      } catch (const LocalSingularityError& e) {
        throw LocalSingularityError(
            e.location(), std::string(e.what()) + " (region '" +
                              data.regions[e.location()].id + "')");
      }
    });

    std::vector<double> residuals(
        result.gwr.residuals.data(),
        result.gwr.residuals.data() + result.gwr.residuals.size());
    result.moran_residuals = with_stage("moran_residuals", [&] {
      return moran_permutation_test(residuals, data.adjacency,
                                    config.moran.permutations,
                                    config.moran.seed,
                                    config.moran.row_standardize);
    });

    // Clustering features: GWR coefficient rows, intercept excluded unless
    // requested, optional z-scoring.
    FeatureTable features;
    const Eigen::Index first_col = config.clustering.include_intercept ? 0 : 1;
    const Eigen::Index m = result.gwr.beta.cols() - first_col;
    if (m < 1)
      throw ValidationError(
          "[clustering] no coefficient columns to cluster (enable "
          "include_intercept or add covariates)");
    features.values = result.gwr.beta.rightCols(m);
    for (Eigen::Index j = first_col; j < result.gwr.beta.cols(); ++j)
      features.names.push_back(design.names[static_cast<std::size_t>(j)]);
    if (config.clustering.standardize)
      features = standardize_features(features);

    KmeansOptions kopts;
    kopts.n_restarts = config.clustering.restarts;
    kopts.max_iter = config.clustering.max_iter;
    with_stage("clustering", [&] {
      int k = config.clustering.k;
      if (!config.clustering.fixed_k) {
        const int k_max =
            std::min(config.clustering.k_max, static_cast<int>(n) - 1);
        const KSelection selection = select_k(
            features, config.clustering.k_min, k_max,
            config.clustering.seed, kopts);
        result.per_k_silhouette = selection.per_k_silhouette;
        k = selection.k_best;
      }
      result.clusters = kmeans(features, k, config.clustering.seed, kopts);
      return 0;
    });

    with_stage("export", [&] {
      std::filesystem::create_directories(config.output_dir);

      emit("imputation_report.csv", data.imputation_report_csv);
      emit("adjacency.csv", adjacency_to_csv(data.regions, data.adjacency));

      // coefficients.csv: region_id, beta_<name>..., local_r2, residual
      std::ostringstream coef;
      coef << "region_id";
      for (const std::string& name : design.names)
        coef << ",beta_" << csv_escape(name);
      coef << ",local_r2,residual\n";
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        coef << csv_escape(data.regions[i].id);
        for (Eigen::Index j = 0; j < result.gwr.beta.cols(); ++j)
          coef << ',' << format_double(result.gwr.beta(row, j), 12);
        coef << ',' << format_double(result.gwr.local_r2[row], 12) << ','
             << format_double(result.gwr.residuals[row], 12) << '\n';
      }
      emit("coefficients.csv", coef.str());

      std::ostringstream clusters;
      clusters << "region_id,cluster\n";
      for (std::size_t i = 0; i < n; ++i)
        clusters << csv_escape(data.regions[i].id) << ','
                 << result.clusters.labels[i] << '\n';
      emit("clusters.csv", clusters.str());

      // model.json: kernel, fit quality, OLS table and the per-term summary
      // (mean and range of the local coefficients with the global p-value).
      ordered_json model;
      ordered_json kernel_doc;
      kernel_doc["kind"] = to_string(kernel.kind);
      if (kernel.kind == KernelKind::fixed_gaussian)
        kernel_doc["bandwidth"] = kernel.bandwidth;
      else
        kernel_doc["neighbors"] = kernel.neighbors;
      kernel_doc["auto"] = config.kernel.auto_bandwidth;
      model["kernel"] = kernel_doc;
      model["n_regions_total"] = result.n_total;
      model["n_regions_fit"] = result.n_fit;
      model["cv_score"] = result.gwr.cv_score;
      model["quasi_global_r2"] = result.gwr.quasi_global_r2;

      ordered_json ols_doc;
      ols_doc["r2"] = result.ols.r2;
      ols_doc["sigma2"] = result.ols.sigma2;
      ols_doc["terms"] = json::array();
      for (std::size_t j = 0; j < design.names.size(); ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        ols_doc["terms"].push_back(
            {{"name", design.names[j]},
             {"coefficient", result.ols.coefficients[col]},
             {"std_error", result.ols.std_errors[col]},
             {"t_value", result.ols.t_values[col]},
             {"p_value", result.ols.p_values[col]}});
      }
      model["ols"] = ols_doc;

      model["terms"] = json::array();
      for (std::size_t j = 0; j < design.names.size(); ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        model["terms"].push_back(
            {{"name", design.names[j]},
             {"mean_gwr_coefficient", result.gwr.beta.col(col).mean()},
             {"min_gwr_coefficient", result.gwr.beta.col(col).minCoeff()},
             {"max_gwr_coefficient", result.gwr.beta.col(col).maxCoeff()},
             {"ols_p_value", result.ols.p_values[col]}});
      }

      model["moran_response"] = json::parse(moran_to_json(result.moran_response));
      model["moran_residuals"] =
          json::parse(moran_to_json(result.moran_residuals));

      ordered_json cluster_doc;
      cluster_doc["k"] = result.clusters.k;
      cluster_doc["wss"] = result.clusters.wss;
      cluster_doc["silhouette_mean"] = result.clusters.silhouette_mean;
      cluster_doc["iterations"] = result.clusters.iterations;
      cluster_doc["converged"] = result.clusters.converged;
      cluster_doc["standardized"] = config.clustering.standardize;
      cluster_doc["include_intercept"] = config.clustering.include_intercept;
      ordered_json per_k = json::object();
      for (const auto& [k, silh] : result.per_k_silhouette)
        per_k[std::to_string(k)] = silh;
      cluster_doc["per_k_silhouettes"] = per_k;
      model["clustering"] = cluster_doc;
      emit("model.json", model.dump(2));

      // Annotated GeoJSON: cluster label and local fit quality per region.
      std::vector<std::map<std::string, json>> extras(n);
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        extras[i]["cluster"] = result.clusters.labels[i];
        extras[i]["local_r2"] = result.gwr.local_r2[row];
        extras[i]["residual"] = result.gwr.residuals[row];
      }
      emit("regions_annotated.geojson",
           write_annotated_geojson(data.regions, extras));

      // Choropleths: response, each coefficient surface, local R^2, clusters.
      ChoroplethOptions copts = config.choropleth;
      copts.title = "response: " + config.response;
      emit("response.svg",
           render_choropleth(data.regions, data.response, copts));
      for (std::size_t j = 0; j < design.names.size(); ++j) {
        const auto col = static_cast<Eigen::Index>(j);
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i)
          values[i] = result.gwr.beta(static_cast<Eigen::Index>(i), col);
        copts.title = "coefficient: " + design.names[j];
        emit("beta_" + sanitize_filename(design.names[j]) + ".svg",
             render_choropleth(data.regions, values, copts));
      }
      {
        std::vector<double> values(result.gwr.local_r2.data(),
                                   result.gwr.local_r2.data() +
                                       result.gwr.local_r2.size());
        copts.title = "local R2";
        emit("local_r2.svg", render_choropleth(data.regions, values, copts));
      }
      {
        std::vector<std::string> names;
        for (int c = 0; c < result.clusters.k; ++c)
          names.push_back("cluster " + std::to_string(c));
        copts.title = "clusters (k = " + std::to_string(result.clusters.k) + ")";
        emit("clusters.svg", render_categorical_map(
                                 data.regions, result.clusters.labels, names,
                                 copts));
      }
      return 0;
    });
  } catch (...) {
    std::error_code ec;
    for (const auto& path : written) std::filesystem::remove(path, ec);
    throw;
  }

  result.outputs = std::move(written);
  return result;
}

}  // namespace geoclust
