#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace geoclust {

// Rows of clustering features, one per region.
struct FeatureTable {
  Eigen::MatrixXd values;  // n x m
  std::vector<std::string> names;

  struct Standardization {
    std::vector<double> mean;
    std::vector<double> std_dev;
  };
  std::optional<Standardization> standardization;

  std::size_t n() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t m() const { return static_cast<std::size_t>(values.cols()); }
};

// Per-column z-scores (sample standard deviation); constant columns are
// centered only. Records the applied transform.
FeatureTable standardize_features(const FeatureTable& features);

struct ClusterResult {
  int k = 0;
  std::vector<int> labels;    // in [0, k)
  Eigen::MatrixXd centroids;  // k x m
  double wss = 0.0;
  int iterations = 0;
  bool converged = false;
  double silhouette_mean = 0.0;  // NaN when k == 1
  std::vector<double> silhouette_per_point;
  std::vector<double> wss_history;  // per assign/update cycle, winning restart
};

struct KmeansOptions {
  int n_restarts = 20;
  int max_iter = 100;
  bool kmeanspp = true;  // false: plain random choice of k starting points
};

// Lloyd's algorithm over Euclidean distance. Restarts alternate k-means++
// seeding with random-partition starts and finish with a single-point
// exchange polish; empty clusters are repaired by moving the point farthest
// from its centroid. Restarts use independent substreams of `seed` and may
// run in parallel; the restart with the smallest wss wins (smallest restart
// index on ties). Deterministic given (features, k, seed, options).
ClusterResult kmeans(const FeatureTable& features, int k, std::uint64_t seed,
                     const KmeansOptions& options = {});

// Mean silhouette and per-point values. Singleton clusters score 0; a 0/0
// contrast (all distances equal) also scores 0. Throws for k < 2.
std::pair<double, std::vector<double>> silhouette(
    const FeatureTable& features, const std::vector<int>& labels);

struct KSelection {
  int k_best = 0;
  std::vector<std::pair<int, double>> per_k_silhouette;
};

// Runs kmeans for each k in [k_min, k_max] and picks the k with the largest
// mean silhouette, preferring smaller k on ties.
KSelection select_k(const FeatureTable& features, int k_min, int k_max,
                    std::uint64_t seed, const KmeansOptions& options = {});

// Best label agreement between two clusterings: the maximal fraction of
// matching points over one-to-one relabelings, exhaustive over at most 8
// cluster labels per side.
double agreement_accuracy(const std::vector<int>& labels_a,
                          const std::vector<int>& labels_b);

}  // namespace geoclust
