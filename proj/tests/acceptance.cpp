// Acceptance suite: one pass/fail line per criterion. Exits nonzero if any
// criterion fails. Criteria with a stated time budget also fail when the
// budget is exceeded.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "geoclust/clustering.hpp"
#include "geoclust/csv.hpp"
#include "geoclust/geojson.hpp"
#include "geoclust/moran.hpp"
#include "geoclust/pipeline.hpp"
#include "geoclust/random.hpp"
#include "geoclust/regression.hpp"
#include "geoclust/synthetic.hpp"
#include "oracles.hpp"

using namespace geoclust;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool condition, const std::string& what) {
    if (!condition && ok) {
      ok = false;
      detail = what;
    }
  }
};

DesignMatrix random_design(Rng& rng, std::size_t n, std::size_t p) {
  DesignMatrix d;
  d.X = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n),
                              static_cast<Eigen::Index>(p));
  d.y = Eigen::VectorXd(static_cast<Eigen::Index>(n));
  d.names.push_back("intercept");
  for (std::size_t j = 1; j < p; ++j) d.names.push_back("x" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 1; j < p; ++j)
      d.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          2.0 * uniform01(rng) - 1.0;
    d.y[static_cast<Eigen::Index>(i)] = 2.0 * uniform01(rng) - 1.0;
  }
  return d;
}

struct ParsedSynthetic {
  RegionSet regions;
  DesignMatrix design;
  Eigen::MatrixXd truth;
};

ParsedSynthetic parse_synthetic(const SyntheticSpec& spec) {
  const SyntheticData data = generate_synthetic(spec);
  ParsedSynthetic out;
  out.regions = load_regions(data.regions_geojson);
  const CsvTable cov = parse_csv(data.covariates_csv);
  const std::size_t n = cov.rows.size();
  std::vector<double> response(n);
  std::vector<CovariateColumn> columns(
      static_cast<std::size_t>(spec.n_covariates));
  for (int j = 1; j <= spec.n_covariates; ++j) {
    columns[static_cast<std::size_t>(j - 1)].name = "x" + std::to_string(j);
    columns[static_cast<std::size_t>(j - 1)].numeric.resize(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 1; j <= spec.n_covariates; ++j)
      columns[static_cast<std::size_t>(j - 1)].numeric[i] =
          std::stod(cov.rows[i][static_cast<std::size_t>(j)]);
    response[i] = std::stod(cov.rows[i].back());
  }
  out.design = build_design(response, columns);

  const CsvTable truth = parse_csv(data.truth_csv);
  out.truth = Eigen::MatrixXd(static_cast<Eigen::Index>(n),
                              spec.n_covariates + 1);
  for (std::size_t i = 0; i < n; ++i)
    for (int j = 0; j <= spec.n_covariates; ++j)
      out.truth(static_cast<Eigen::Index>(i), j) =
          std::stod(truth.rows[i][static_cast<std::size_t>(j + 1)]);
  return out;
}

AdjacencyGraph random_connected_graph(std::size_t n, Rng& rng) {
  AdjacencyGraph g;
  g.n = n;
  g.neighbors.resize(n);
  auto add = [&](std::size_t a, std::size_t b) {
    g.neighbors[a].push_back(b);
    g.neighbors[b].push_back(a);
  };
  for (std::size_t i = 1; i < n; ++i) add(i, bounded(rng, i));
  for (std::size_t extra = 0; extra < n; ++extra) {
    const std::size_t a = bounded(rng, n);
    const std::size_t b = bounded(rng, n);
    if (a != b) add(a, b);
  }
  for (auto& nb : g.neighbors) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

// ---------------------------------------------------------------------------

Check criterion_1_wls_oracle() {
  Check c;
  Rng rng = seeded_stream(1001, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + bounded(rng, 16);  // <= 20
    const std::size_t p = 1 + bounded(rng, 4);   // <= 4
    const DesignMatrix d = random_design(rng, n, p);
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = 0.05 + uniform01(rng);
    const Eigen::VectorXd got =
        gwr_fit_at(bounded(rng, n), d, w);
    const Eigen::VectorXd expected = oracles::brute_force_wls(d.X, w, d.y);
    worst = std::max(worst, (got - expected).norm() /
                                std::max(expected.norm(), 1e-30));
  }
  c.expect(worst <= 1e-10,
           "max relative error " + format_double(worst, 3) + " > 1e-10");
  return c;
}

Check criterion_2_ols_reduction() {
  Check c;
  Rng rng = seeded_stream(1002, 0);
  for (int trial = 0; trial < 50 && c.ok; ++trial) {
    const std::size_t n = 15 + bounded(rng, 26);  // 15..40
    const std::size_t p = 2 + bounded(rng, 3);    // 2..4
    const DesignMatrix d = random_design(rng, n, p);
    std::vector<Region> pts;
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back(oracles::point_region("p" + std::to_string(i),
                                          uniform01(rng) * 100.0,
                                          uniform01(rng) * 100.0));
    const DistanceMatrix dists = distance_matrix(RegionSet(std::move(pts)));
    const double bw = 1e9 * dists.maxCoeff();
    const OlsFit ols = ols_fit(d);
    const GwrFit gwr = gwr_fit(d, dists, KernelSpec::fixed_gaussian(bw));
    for (Eigen::Index i = 0; i < gwr.beta.rows(); ++i) {
      const double rel =
          (gwr.beta.row(i).transpose() - ols.coefficients).norm() /
          std::max(ols.coefficients.norm(), 1e-30);
      c.expect(rel <= 1e-6, "trial " + std::to_string(trial) + " row " +
                                std::to_string(i) + " off by " +
                                format_double(rel, 3));
      if (!c.ok) break;
    }
  }
  return c;
}

Check criterion_3_noise_free_recovery() {
  Check c;
  const int k = 12;  // windows stay inside one block of the gapped grid

  SyntheticSpec spec{20, 20, SurfaceKind::two_block, 0.0, 41, 2};
  const ParsedSynthetic noiseless = parse_synthetic(spec);
  const DistanceMatrix dists = distance_matrix(noiseless.regions);
  const GwrFit fit =
      gwr_fit(noiseless.design, dists, KernelSpec::adaptive_bisquare(k));
  const double max_err = (fit.beta - noiseless.truth).cwiseAbs().maxCoeff();
  c.expect(max_err <= 1e-8,
           "max |beta - truth| = " + format_double(max_err, 3) + " > 1e-8");

  // Halving the noise twice must shrink the coefficient RMSE each time.
  double previous = -1.0;
  for (const double sigma : {0.05, 0.025, 0.0125}) {
    spec.noise_sd = sigma;
    const ParsedSynthetic noisy = parse_synthetic(spec);
    const GwrFit nfit =
        gwr_fit(noisy.design, dists, KernelSpec::adaptive_bisquare(k));
    const double rmse = std::sqrt((nfit.beta - noisy.truth).squaredNorm() /
                                  static_cast<double>(nfit.beta.size()));
    if (previous >= 0.0)
      c.expect(rmse < previous, "RMSE did not decrease when halving sigma to " +
                                    format_double(sigma, 3));
    previous = rmse;
  }
  return c;
}

Check criterion_4_moran() {
  Check c;

  // Brute-force double-sum agreement on graphs up to n = 25.
  Rng rng = seeded_stream(1004, 0);
  for (std::size_t n = 3; n <= 25; ++n) {
    const AdjacencyGraph g = random_connected_graph(n, rng);
    std::vector<double> values(n);
    for (double& v : values) v = uniform01(rng) * 8.0 - 4.0;
    for (bool row_std : {true, false}) {
      const double got = morans_i(values, g, row_std);
      const double expected = oracles::brute_force_moran(values, g, row_std);
      c.expect(std::fabs(got - expected) < 1e-12,
               "oracle mismatch at n = " + std::to_string(n));
    }
  }

  // Alternating 4-cycle: exactly -1.
  AdjacencyGraph cycle;
  cycle.n = 4;
  cycle.neighbors = {{1, 3}, {0, 2}, {1, 3}, {0, 2}};
  c.expect(morans_i({1.0, -1.0, 1.0, -1.0}, cycle, true) == -1.0,
           "alternating 4-cycle is not exactly -1");

  // Independent fields: the mean observed statistic sits near -1/(n-1).
  const RegionSet grid = oracles::make_grid(10, 10);
  const AdjacencyGraph queen = queen_adjacency(grid);
  double sum_i = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng vrng = seeded_stream(seed, 77);
    std::vector<double> values(100);
    for (double& v : values) v = normal01(vrng);
    sum_i += morans_i(values, queen, true);
  }
  // Null spread from one permutation distribution on the same grid.
  Rng vrng = seeded_stream(1, 77);
  std::vector<double> base(100);
  for (double& v : base) v = normal01(vrng);
  double mean_rep = 0.0, m2 = 0.0;
  std::vector<double> reps;
  for (int rep = 0; rep < 999; ++rep) {
    Rng prng = seeded_stream(4242, static_cast<std::uint64_t>(rep));
    std::vector<std::size_t> order = index_vector(100);
    shuffle(order, prng);
    std::vector<double> permuted(100);
    for (std::size_t i = 0; i < 100; ++i) permuted[i] = base[order[i]];
    reps.push_back(morans_i(permuted, queen, true));
  }
  for (double r : reps) mean_rep += r;
  mean_rep /= static_cast<double>(reps.size());
  for (double r : reps) m2 += (r - mean_rep) * (r - mean_rep);
  const double perm_sd = std::sqrt(m2 / static_cast<double>(reps.size() - 1));
  const double mean_i = sum_i / 20.0;
  c.expect(std::fabs(mean_i - (-1.0 / 99.0)) <= 3.0 * perm_sd,
           "mean observed I " + format_double(mean_i, 4) +
               " beyond 3 permutation SDs of -1/99");

  // A smooth gradient attains the minimal p with 9999 permutations.
  std::vector<double> gradient(100);
  for (std::size_t i = 0; i < 100; ++i)
    gradient[i] = grid[i].centroid.x + grid[i].centroid.y;
  const MoranResult mr = moran_permutation_test(gradient, queen, 9999, 11);
  c.expect(std::fabs(mr.p_value - 1.0e-4) < 1e-15,
           "gradient p = " + format_double(mr.p_value, 6) + ", expected 1e-4");
  return c;
}

Check criterion_5_bandwidth_cv() {
  Check c;
  const ParsedSynthetic data =
      parse_synthetic({8, 8, SurfaceKind::constant, 0.0, 51, 2});
  const DistanceMatrix dists = distance_matrix(data.regions);
  const BandwidthSearchResult search = optimize_bandwidth_detailed(
      data.design, dists, KernelKind::fixed_gaussian);

  double lo_bw = 1e300, hi_bw = 0.0;
  double lo_score = 0.0, hi_score = 0.0;
  for (const BandwidthProbe& probe : search.probes) {
    if (probe.value < lo_bw) {
      lo_bw = probe.value;
      lo_score = probe.score;
    }
    if (probe.value > hi_bw) {
      hi_bw = probe.value;
      hi_score = probe.score;
    }
  }
  c.expect(hi_score <= lo_score,
           "largest-bandwidth score exceeds smallest-bandwidth score");

  double max_dist = 0.0;
  for (Eigen::Index i = 0; i < dists.rows(); ++i)
    for (Eigen::Index j = i + 1; j < dists.cols(); ++j)
      max_dist = std::max(max_dist, dists(i, j));
  const double top = 10.0 * max_dist;
  c.expect(search.best.bandwidth >= top / 10.0 * (1.0 - 1e-9),
           "chosen bandwidth " + format_double(search.best.bandwidth, 4) +
               " below the top decade [" + format_double(top / 10.0, 4) + ", " +
               format_double(top, 4) + "]");
  return c;
}

Check criterion_6_kmeans_optimality() {
  Check c;
  KmeansOptions options;
  options.n_restarts = 20;

  // Fixture set: the canonical quadruple plus random small instances.
  std::vector<Eigen::MatrixXd> fixtures;
  {
    Eigen::MatrixXd quad(4, 1);
    quad << 0.0, 1.0, 10.0, 11.0;
    fixtures.push_back(quad);
  }
  Rng rng = seeded_stream(1006, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = static_cast<Eigen::Index>(4 + bounded(rng, 5));  // <= 8
    const auto m = static_cast<Eigen::Index>(1 + bounded(rng, 2));  // <= 2
    Eigen::MatrixXd points(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j) points(i, j) = uniform01(rng) * 9.0;
    fixtures.push_back(points);
  }

  for (std::size_t f = 0; f < fixtures.size(); ++f) {
    FeatureTable t;
    t.values = fixtures[f];
    t.names.assign(static_cast<std::size_t>(fixtures[f].cols()), "f");
    const ClusterResult result =
        kmeans(t, 2, static_cast<std::uint64_t>(f), options);
    const double optimum = oracles::exhaustive_two_partition_wss(t.values);
    c.expect(result.wss <= optimum * (1.0 + 1e-9) + 1e-12,
             "fixture " + std::to_string(f) + ": wss " +
                 format_double(result.wss, 6) + " above optimum " +
                 format_double(optimum, 6));
    for (std::size_t s = 1; s < result.wss_history.size(); ++s)
      c.expect(result.wss_history[s] <=
                   result.wss_history[s - 1] * (1.0 + 1e-12) + 1e-12,
               "wss increased within a run on fixture " + std::to_string(f));
  }
  return c;
}

Check criterion_7_silhouette() {
  Check c;
  FeatureTable quad;
  quad.values = Eigen::MatrixXd(4, 1);
  quad.values << 0.0, 1.0, 10.0, 11.0;
  quad.names = {"v"};
  const auto [mean, per_point] = silhouette(quad, {0, 0, 1, 1});
  c.expect(std::fabs(mean - 0.8997) <= 1e-4,
           "quadruple silhouette " + format_double(mean, 6) +
               " not within 1e-4 of 0.8997");

  for (std::uint64_t seed = 1; seed <= 10 && c.ok; ++seed) {
    Rng rng = seeded_stream(seed, 3000);
    auto blob_table = [&](const std::vector<std::pair<double, double>>& centers) {
      FeatureTable t;
      t.values = Eigen::MatrixXd(static_cast<Eigen::Index>(centers.size() * 20), 2);
      t.names = {"u", "v"};
      Eigen::Index row = 0;
      for (const auto& [cx, cy] : centers) {
        for (int i = 0; i < 20; ++i) {
          t.values(row, 0) = cx + 0.1 * normal01(rng);
          t.values(row, 1) = cy + 0.1 * normal01(rng);
          ++row;
        }
      }
      return t;
    };
    const FeatureTable three = blob_table({{0, 0}, {1, 0}, {0.5, 1.0}});
    const int k3 = select_k(three, 2, 6, seed).k_best;
    c.expect(k3 == 3, "three blobs picked k = " + std::to_string(k3) +
                          " at seed " + std::to_string(seed));
    const FeatureTable two = blob_table({{0, 0}, {1, 1}});
    const int k2 = select_k(two, 2, 6, seed).k_best;
    c.expect(k2 == 2, "two blobs picked k = " + std::to_string(k2) +
                          " at seed " + std::to_string(seed));
  }
  return c;
}

Check criterion_8_agreement() {
  Check c;
  const std::vector<int> base = {0, 0, 0, 0, 1, 1, 1, 1};
  c.expect(agreement_accuracy(base, base) == 1.0, "identical labelings != 1");
  const std::vector<int> renamed = {1, 1, 1, 1, 0, 0, 0, 0};
  c.expect(agreement_accuracy(base, renamed) == 1.0,
           "relabeled clustering != 1");
  const std::vector<int> half = {0, 0, 1, 1, 0, 0, 1, 1};
  c.expect(agreement_accuracy(base, half) == 0.5, "half swap != 0.5");

  std::vector<int> a3 = {0, 0, 1, 1, 2, 2, 0, 1};
  std::vector<int> b3 = {2, 2, 0, 0, 1, 1, 2, 0};  // a3 under a 3-cycle
  c.expect(agreement_accuracy(a3, b3) == 1.0, "3-cycle relabeling != 1");
  return c;
}

PipelineConfig fixture_config(const fs::path& dir) {
  const SyntheticSpec spec{10, 10, SurfaceKind::two_block, 0.05, 7, 2};
  const SyntheticData data = generate_synthetic(spec);
  fs::create_directories(dir);
  write_text_file(dir / "regions.geojson", data.regions_geojson);
  write_text_file(dir / "covariates.csv", data.covariates_csv);

  PipelineConfig config;
  config.regions_path = dir / "regions.geojson";
  config.covariates_path = dir / "covariates.csv";
  config.response = "y";
  config.covariates.push_back({"x1", false, ""});
  config.covariates.push_back({"x2", false, ""});
  config.kernel.kind = KernelKind::adaptive_bisquare;
  config.kernel.auto_bandwidth = false;
  config.kernel.neighbors = 12;
  config.moran.permutations = 999;
  config.clustering.k_min = 2;
  config.clustering.k_max = 5;
  return config;
}

Check criterion_9_determinism() {
  Check c;
  const fs::path base = fs::temp_directory_path() / "geoclust_acceptance_9";
  fs::remove_all(base);
  PipelineConfig config = fixture_config(base);

  setenv("GEOCLUST_THREADS", "1", 1);
  config.output_dir = base / "out_t1";
  run_pipeline(config);
  setenv("GEOCLUST_THREADS", "8", 1);
  config.output_dir = base / "out_t8";
  run_pipeline(config);
  unsetenv("GEOCLUST_THREADS");

  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(base / "out_t1")) {
    const std::string name = entry.path().filename().string();
    const std::string a = read_text_file(entry.path());
    const std::string b = read_text_file(base / "out_t8" / name);
    ++compared;
    c.expect(a == b, "output " + name + " differs between thread counts");
  }
  c.expect(compared >= 6, "too few outputs compared");
  fs::remove_all(base);
  return c;
}

Check criterion_10_replication_harness() {
  Check c;
  const fs::path base = fs::temp_directory_path() / "geoclust_acceptance_10";
  fs::remove_all(base);
  PipelineConfig config = fixture_config(base);
  config.output_dir = base / "out";
  const PipelineResult result = run_pipeline(config);

  // Table-shaped summary: per-term mean, range, and global p-value.
  const auto model =
      nlohmann::json::parse(read_text_file(config.output_dir / "model.json"));
  c.expect(model.contains("terms"), "model.json lacks the term summary");
  if (model.contains("terms")) {
    c.expect(model["terms"].size() == 3, "expected 3 terms");
    for (const auto& term : model["terms"]) {
      c.expect(term.contains("name") && term.contains("mean_gwr_coefficient") &&
                   term.contains("min_gwr_coefficient") &&
                   term.contains("max_gwr_coefficient") &&
                   term.contains("ols_p_value"),
               "term summary incomplete");
      if (term.contains("min_gwr_coefficient"))
        c.expect(term["min_gwr_coefficient"].get<double>() <=
                     term["max_gwr_coefficient"].get<double>(),
                 "term range inverted");
    }
  }

  // Three-map output set: response, coefficient surfaces, clusters.
  c.expect(fs::exists(config.output_dir / "response.svg"), "missing response map");
  for (const char* name :
       {"beta_intercept.svg", "beta_x1.svg", "beta_x2.svg"})
    c.expect(fs::exists(config.output_dir / name),
             std::string("missing coefficient map ") + name);
  c.expect(fs::exists(config.output_dir / "clusters.svg"),
           "missing cluster map");
  c.expect(fs::exists(config.output_dir / "clusters.csv"),
           "missing cluster table");
  c.expect(result.clusters.k == 2,
           "two-regime fixture clustered into k = " +
               std::to_string(result.clusters.k));
  fs::remove_all(base);
  return c;
}

struct Criterion {
  int id;
  const char* description;
  double time_limit_s;  // 0: none
  std::function<Check()> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "local WLS matches brute-force normal equations (200 instances)",
       5.0, criterion_1_wls_oracle},
      {2, "huge-bandwidth Gaussian GWR reduces to OLS (50 datasets)", 10.0,
       criterion_2_ols_reduction},
      {3, "noise-free two-block recovery and noise-halving RMSE", 60.0,
       criterion_3_noise_free_recovery},
      {4, "Moran's I oracle, exact -1 cycle, null fields, gradient p-floor",
       0.0, criterion_4_moran},
      {5, "LOO CV bandwidth sanity on noiseless linear data", 30.0,
       criterion_5_bandwidth_cv},
      {6, "k-means reaches exhaustive optima; wss non-increasing", 0.0,
       criterion_6_kmeans_optimality},
      {7, "silhouette oracle value and blob k selection", 0.0,
       criterion_7_silhouette},
      {8, "agreement accuracy closed forms", 0.0, criterion_8_agreement},
      {9, "pipeline outputs byte-identical across thread counts", 0.0,
       criterion_9_determinism},
      {10, "replication harness emits summary table and map set", 0.0,
       criterion_10_replication_harness},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Check check;
    try {
      check = criterion.body();
    } catch (const std::exception& e) {
      check.ok = false;
      check.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (criterion.time_limit_s > 0.0 && elapsed > criterion.time_limit_s) {
      check.ok = false;
      check.detail = "runtime " + format_double(elapsed, 3) + "s over limit " +
                     format_double(criterion.time_limit_s, 3) + "s";
    }
    std::printf("[%s] criterion %2d (%6.2fs): %s%s%s\n",
                check.ok ? "PASS" : "FAIL", criterion.id, elapsed,
                criterion.description, check.ok ? "" : " -- ",
                check.ok ? "" : check.detail.c_str());
    if (!check.ok) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
