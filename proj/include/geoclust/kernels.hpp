#pragma once

#include <Eigen/Dense>
#include <string>

#include "geoclust/geometry.hpp"

namespace geoclust {

enum class KernelKind { fixed_gaussian, adaptive_bisquare };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

// Kernel configuration. Fixed Gaussian carries a distance bandwidth;
// adaptive bisquare carries a neighbor count k, where the regression point
// itself counts as rank 1 among the n ranked distances.
struct KernelSpec {
  KernelKind kind = KernelKind::fixed_gaussian;
  double bandwidth = 0.0;  // fixed_gaussian
  int neighbors = 0;       // adaptive_bisquare

  static KernelSpec fixed_gaussian(double bandwidth);
  static KernelSpec adaptive_bisquare(int neighbors);

  // Throws ValidationError unless (fixed) bandwidth > 0 or (adaptive)
  // neighbors is in [2, n].
  void validate(std::size_t n) const;
};

// exp(-d^2 / b^2)
double gaussian_weight(double d, double b);

// (1 - (d/b)^2)^2 for d < b, else 0
double bisquare_weight(double d, double b);

// Weight vector for regression location i against all regions. Adaptive
// bisquare sets the local bandwidth to the k-th smallest distance from i
// (self included); a zero k-th distance means duplicate centroids and raises
// a degenerate-bandwidth error.
Eigen::VectorXd weights_for_location(std::size_t i, const DistanceMatrix& dists,
                                     const KernelSpec& spec);

}  // namespace geoclust
