#include "geoclust/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "geoclust/errors.hpp"
#include "geoclust/parallel.hpp"
#include "geoclust/random.hpp"

namespace geoclust {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sq_dist(const Eigen::MatrixXd& a, Eigen::Index i,
               const Eigen::MatrixXd& b, Eigen::Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

enum class InitScheme { kmeanspp, random_partition, random_points };

Eigen::MatrixXd init_centroids(const Eigen::MatrixXd& points, int k, Rng& rng,
                               InitScheme scheme) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centers(k, points.cols());

  if (scheme == InitScheme::random_points) {
    // Plain start: k distinct row indices chosen at random.
    std::vector<std::size_t> idx = index_vector(static_cast<std::size_t>(n));
    shuffle(idx, rng);
    for (int c = 0; c < k; ++c)
      centers.row(c) = points.row(static_cast<Eigen::Index>(idx[c]));
    return centers;
  }

  if (scheme == InitScheme::random_partition) {
    // Centers start as means of a uniformly random partition. These sit near
    // the grand mean and reach optima that point-seeded starts miss when the
    // best centers lie far from any data point.
    std::vector<int> assignment(static_cast<std::size_t>(n));
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (auto& a : assignment) {
      a = static_cast<int>(bounded(rng, static_cast<std::uint64_t>(k)));
      ++counts[static_cast<std::size_t>(a)];
    }
    for (int c = 0; c < k; ++c) {
      while (counts[static_cast<std::size_t>(c)] == 0) {
        const auto steal = static_cast<std::size_t>(bounded(rng, n));
        const int owner = assignment[steal];
        if (counts[static_cast<std::size_t>(owner)] <= 1) continue;
        --counts[static_cast<std::size_t>(owner)];
        assignment[steal] = c;
        ++counts[static_cast<std::size_t>(c)];
      }
    }
    centers.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
      centers.row(assignment[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c)
      centers.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    return centers;
  }

  // k-means++: next center drawn with probability proportional to the
  // squared distance to the nearest chosen center.
  std::vector<double> d2(static_cast<std::size_t>(n), kInf);
  const auto first = static_cast<Eigen::Index>(bounded(rng, n));
  centers.row(0) = points.row(first);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = sq_dist(points, i, centers, c - 1);
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], d);
      total += d2[static_cast<std::size_t>(i)];
    }
    Eigen::Index chosen;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double cum = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        cum += d2[static_cast<std::size_t>(i)];
        if (cum > target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<Eigen::Index>(bounded(rng, n));
    }
    centers.row(c) = points.row(chosen);
  }
  return centers;
}

struct LloydRun {
  std::vector<int> labels;
  Eigen::MatrixXd centroids;
  double wss = kInf;
  int iterations = 0;
  bool converged = false;
  std::vector<double> wss_history;
};

LloydRun lloyd(const Eigen::MatrixXd& points, int k, Rng rng,
               InitScheme scheme, const KmeansOptions& options) {
  const Eigen::Index n = points.rows();
  LloydRun run;
  run.centroids = init_centroids(points, k, rng, scheme);
  run.labels.assign(static_cast<std::size_t>(n), -1);

  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    // Assignment; ties go to the smallest centroid index.
    bool changed = false;
    std::fill(counts.begin(), counts.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(points, i, run.centroids, 0);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(points, i, run.centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (run.labels[static_cast<std::size_t>(i)] != best) {
        run.labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
      ++counts[static_cast<std::size_t>(best)];
    }

    // Repair empty clusters with the point farthest from its centroid,
    // taken from a cluster that can spare one.
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index farthest = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int owner = run.labels[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(owner)] <= 1) continue;
        const double d = sq_dist(points, i, run.centroids, owner);
        if (d > far_d) {
          far_d = d;
          farthest = i;
        }
      }
      if (farthest < 0) continue;  // cannot happen while k <= n
      --counts[static_cast<std::size_t>(
          run.labels[static_cast<std::size_t>(farthest)])];
      run.labels[static_cast<std::size_t>(farthest)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      changed = true;
    }

    if (!changed && iter > 1) {
      run.converged = true;
      break;
    }

    // Update step: centroids become cluster means.
    run.centroids.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
      run.centroids.row(run.labels[static_cast<std::size_t>(i)]) +=
          points.row(i);
    for (int c = 0; c < k; ++c)
      run.centroids.row(c) /=
          static_cast<double>(counts[static_cast<std::size_t>(c)]);

    double wss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      wss += sq_dist(points, i, run.centroids,
                     run.labels[static_cast<std::size_t>(i)]);
    if (!run.wss_history.empty()) {
      const double prev = run.wss_history.back();
      if (wss > prev * (1.0 + 1e-12) + 1e-12)
        throw NumericalError("k-means objective increased between iterations");
    }
    run.wss_history.push_back(wss);
    run.wss = wss;
    run.iterations = iter;
  }

  // First-variation polish: relocate single points while that strictly
  // lowers the objective. Uses the exact size-corrected deltas, so the
  // result is stable under Lloyd reassignment as well.
  std::fill(counts.begin(), counts.end(), 0);
  for (int l : run.labels) ++counts[static_cast<std::size_t>(l)];
  bool polished = false;
  for (Eigen::Index pass = 0; pass < 16 * n; ++pass) {
    double best_delta = -1e-12;
    Eigen::Index best_i = -1;
    int best_c = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int a = run.labels[static_cast<std::size_t>(i)];
      const int na = counts[static_cast<std::size_t>(a)];
      if (na <= 1) continue;
      const double removal = static_cast<double>(na) / (na - 1) *
                             sq_dist(points, i, run.centroids, a);
      for (int c = 0; c < k; ++c) {
        if (c == a) continue;
        const int nc = counts[static_cast<std::size_t>(c)];
        const double delta = static_cast<double>(nc) / (nc + 1) *
                                 sq_dist(points, i, run.centroids, c) -
                             removal;
        if (delta < best_delta) {
          best_delta = delta;
          best_i = i;
          best_c = c;
        }
      }
    }
    if (best_i < 0) break;
    const int a = run.labels[static_cast<std::size_t>(best_i)];
    const int na = counts[static_cast<std::size_t>(a)];
    const int nc = counts[static_cast<std::size_t>(best_c)];
    run.centroids.row(a) =
        (run.centroids.row(a) * na - points.row(best_i)) / (na - 1);
    run.centroids.row(best_c) =
        (run.centroids.row(best_c) * nc + points.row(best_i)) / (nc + 1);
    --counts[static_cast<std::size_t>(a)];
    ++counts[static_cast<std::size_t>(best_c)];
    run.labels[static_cast<std::size_t>(best_i)] = best_c;
    polished = true;
  }
  if (polished) {
    // Exact means and objective after the incremental updates.
    run.centroids.setZero();
    for (Eigen::Index i = 0; i < n; ++i)
      run.centroids.row(run.labels[static_cast<std::size_t>(i)]) +=
          points.row(i);
    for (int c = 0; c < k; ++c)
      run.centroids.row(c) /=
          static_cast<double>(counts[static_cast<std::size_t>(c)]);
    double wss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      wss += sq_dist(points, i, run.centroids,
                     run.labels[static_cast<std::size_t>(i)]);
    run.wss_history.push_back(wss);
    run.wss = wss;
  }
  return run;
}

}  // namespace

FeatureTable standardize_features(const FeatureTable& features) {
  FeatureTable out = features;
  const Eigen::Index n = features.values.rows();
  const Eigen::Index m = features.values.cols();
  if (n < 1) throw ValidationError("cannot standardize an empty table");
  FeatureTable::Standardization record;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double mean = features.values.col(j).mean();
    double sd = 0.0;
    if (n > 1) {
      sd = std::sqrt((features.values.col(j).array() - mean).square().sum() /
                     static_cast<double>(n - 1));
    }
    record.mean.push_back(mean);
    record.std_dev.push_back(sd);
    out.values.col(j).array() -= mean;
    if (sd > 0.0) out.values.col(j) /= sd;
  }
  out.standardization = std::move(record);
  return out;
}

ClusterResult kmeans(const FeatureTable& features, int k, std::uint64_t seed,
                     const KmeansOptions& options) {
  const auto n = static_cast<Eigen::Index>(features.n());
  if (k <= 0) throw ValidationError("invalid k: must be positive");
  if (static_cast<Eigen::Index>(k) > n)
    throw ValidationError("infeasible k: " + std::to_string(k) +
                          " clusters for " + std::to_string(n) + " points");
  if (features.m() < 1) throw ValidationError("feature table has no columns");
  if (options.n_restarts < 1 || options.max_iter < 1)
    throw ValidationError("restarts and max_iter must be >= 1");

  // Restarts alternate k-means++ with random-partition starts; the two
  // schemes fail on different instances.
  std::vector<LloydRun> runs(static_cast<std::size_t>(options.n_restarts));
  parallel_for(runs.size(), [&](std::size_t r) {
    InitScheme scheme = InitScheme::random_points;
    if (options.kmeanspp) {
      scheme = (r % 2 == 0) ? InitScheme::kmeanspp
                            : InitScheme::random_partition;
    }
    runs[r] = lloyd(features.values, k, seeded_stream(seed, r), scheme, options);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].wss < runs[best].wss) best = r;

  ClusterResult result;
  result.k = k;
  result.labels = std::move(runs[best].labels);
  result.centroids = std::move(runs[best].centroids);
  result.wss = runs[best].wss;
  result.iterations = runs[best].iterations;
  result.converged = runs[best].converged;
  result.wss_history = std::move(runs[best].wss_history);
  if (k >= 2) {
    auto [mean, per_point] = silhouette(features, result.labels);
    result.silhouette_mean = mean;
    result.silhouette_per_point = std::move(per_point);
  } else {
    result.silhouette_mean = std::numeric_limits<double>::quiet_NaN();
  }
  return result;
}

std::pair<double, std::vector<double>> silhouette(
    const FeatureTable& features, const std::vector<int>& labels) {
  const auto n = static_cast<Eigen::Index>(features.n());
  if (labels.size() != features.n())
    throw ValidationError("labels/features size mismatch");
  int k = 0;
  for (int l : labels) {
    if (l < 0) throw ValidationError("negative cluster label");
    k = std::max(k, l + 1);
  }
  if (k < 2)
    throw ValidationError("silhouette undefined for fewer than 2 clusters");
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int l : labels) ++sizes[static_cast<std::size_t>(l)];
  for (std::size_t c = 0; c < sizes.size(); ++c)
    if (sizes[c] == 0)
      throw ValidationError("silhouette: cluster " + std::to_string(c) +
                            " is empty");

  std::vector<double> s(static_cast<std::size_t>(n), 0.0);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    const int own = labels[i];
    if (sizes[static_cast<std::size_t>(own)] == 1) {
      s[i] = 0.0;  // singleton convention
      return;
    }
    std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == row) continue;
      sums[static_cast<std::size_t>(labels[static_cast<std::size_t>(j)])] +=
          std::sqrt(sq_dist(features.values, row, features.values, j));
    }
    const double a =
        sums[static_cast<std::size_t>(own)] /
        static_cast<double>(sizes[static_cast<std::size_t>(own)] - 1);
    double b = kInf;
    for (int c = 0; c < k; ++c) {
      if (c == own) continue;
      b = std::min(b, sums[static_cast<std::size_t>(c)] /
                          static_cast<double>(sizes[static_cast<std::size_t>(c)]));
    }
    const double denom = std::max(a, b);
    s[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  });

  const double mean =
      std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(n);
  return {mean, std::move(s)};
}

KSelection select_k(const FeatureTable& features, int k_min, int k_max,
                    std::uint64_t seed, const KmeansOptions& options) {
  const auto n = static_cast<int>(features.n());
  if (k_min < 2 || k_min > k_max || k_max > n - 1)
    throw ValidationError("select_k needs 2 <= k_min <= k_max <= n-1");
  KSelection selection;
  double best = -kInf;
  for (int k = k_min; k <= k_max; ++k) {
    const ClusterResult result = kmeans(features, k, seed, options);
    selection.per_k_silhouette.emplace_back(k, result.silhouette_mean);
    if (result.silhouette_mean > best) {  // strict: smaller k wins ties
      best = result.silhouette_mean;
      selection.k_best = k;
    }
  }
  return selection;
}

double agreement_accuracy(const std::vector<int>& labels_a,
                          const std::vector<int>& labels_b) {
  if (labels_a.size() != labels_b.size())
    throw ValidationError("labelings have different lengths");
  const std::size_t n = labels_a.size();
  if (n == 0) throw ValidationError("empty labelings");

  auto normalize = [](const std::vector<int>& labels) {
    std::vector<int> sorted(labels);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
      out[i] = static_cast<int>(
          std::lower_bound(sorted.begin(), sorted.end(), labels[i]) -
          sorted.begin());
    }
    return std::pair{out, static_cast<int>(sorted.size())};
  };
  const auto [a, ka] = normalize(labels_a);
  const auto [b, kb] = normalize(labels_b);
  if (ka > 8 || kb > 8)
    throw ValidationError("agreement accuracy limited to 8 clusters per side");

  // Pad to a common label count and search all one-to-one relabelings.
  const int k = std::max(ka, kb);
  std::vector<std::vector<std::size_t>> confusion(
      static_cast<std::size_t>(k),
      std::vector<std::size_t>(static_cast<std::size_t>(k), 0));
  for (std::size_t i = 0; i < n; ++i)
    ++confusion[static_cast<std::size_t>(a[i])][static_cast<std::size_t>(b[i])];

  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t matches = 0;
    for (int c = 0; c < k; ++c)
      matches += confusion[static_cast<std::size_t>(c)]
                          [static_cast<std::size_t>(perm[static_cast<std::size_t>(c)])];
    best = std::max(best, matches);
  } while (std::next_permutation(perm.begin(), perm.end()));

  return static_cast<double>(best) / static_cast<double>(n);
}

}  // namespace geoclust
