#include "geoclust/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "geoclust/errors.hpp"

namespace geoclust {

std::string to_string(KernelKind kind) {
  return kind == KernelKind::fixed_gaussian ? "fixed_gaussian"
                                            : "adaptive_bisquare";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "fixed_gaussian") return KernelKind::fixed_gaussian;
  if (name == "adaptive_bisquare") return KernelKind::adaptive_bisquare;
  throw ValidationError("unknown kernel '" + name +
                        "' (expected fixed_gaussian or adaptive_bisquare)");
}

KernelSpec KernelSpec::fixed_gaussian(double bandwidth) {
  return {KernelKind::fixed_gaussian, bandwidth, 0};
}

KernelSpec KernelSpec::adaptive_bisquare(int neighbors) {
  return {KernelKind::adaptive_bisquare, 0.0, neighbors};
}

void KernelSpec::validate(std::size_t n) const {
  if (kind == KernelKind::fixed_gaussian) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
      throw ValidationError("invalid bandwidth: must be a positive distance");
  } else {
    if (neighbors < 2 || static_cast<std::size_t>(neighbors) > n)
      throw ValidationError("invalid neighbor count " +
                            std::to_string(neighbors) + ": must be in [2, " +
                            std::to_string(n) + "]");
  }
}

double gaussian_weight(double d, double b) {
  if (!(b > 0.0))
    throw ValidationError("invalid bandwidth: must be a positive distance");
  const double r = d / b;
  return std::exp(-r * r);
}

double bisquare_weight(double d, double b) {
  if (!(b > 0.0))
    throw ValidationError("invalid bandwidth: must be a positive distance");
  if (d >= b) return 0.0;
  const double u = 1.0 - (d / b) * (d / b);
  return u * u;
}

Eigen::VectorXd weights_for_location(std::size_t i, const DistanceMatrix& dists,
                                     const KernelSpec& spec) {
  const auto n = static_cast<std::size_t>(dists.rows());
  if (i >= n) throw ValidationError("location index out of range");
  spec.validate(n);

  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  if (spec.kind == KernelKind::fixed_gaussian) {
    for (std::size_t j = 0; j < n; ++j)
      w[static_cast<Eigen::Index>(j)] =
          gaussian_weight(dists(static_cast<Eigen::Index>(i),
                                static_cast<Eigen::Index>(j)),
                          spec.bandwidth);
    return w;
  }

  // Adaptive: local bandwidth = k-th smallest distance from i, self at rank 1.
  std::vector<double> row(n);
  for (std::size_t j = 0; j < n; ++j)
    row[j] = dists(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  auto kth = row.begin() + (spec.neighbors - 1);
  std::nth_element(row.begin(), kth, row.end());
  const double local_bw = *kth;
  if (!(local_bw > 0.0)) {
    throw NumericalError("degenerate bandwidth at location " +
                         std::to_string(i) +
                         ": k-th distance is zero (duplicate centroids)");
  }
  for (std::size_t j = 0; j < n; ++j)
    w[static_cast<Eigen::Index>(j)] =
        bisquare_weight(dists(static_cast<Eigen::Index>(i),
                              static_cast<Eigen::Index>(j)),
                        local_bw);
  return w;
}

}  // namespace geoclust
