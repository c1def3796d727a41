#include "doctest.h"

#include <cmath>

#include "geoclust/errors.hpp"
#include "geoclust/kernels.hpp"
#include "geoclust/random.hpp"
#include "oracles.hpp"

using namespace geoclust;

namespace {

DistanceMatrix collinear_distances() {
  // Centroids at 0, 1, 3 on a line.
  std::vector<Region> regions;
  regions.push_back(oracles::point_region("p0", 0, 0));
  regions.push_back(oracles::point_region("p1", 1, 0));
  regions.push_back(oracles::point_region("p2", 3, 0));
  return distance_matrix(RegionSet(std::move(regions)));
}

}  // namespace

TEST_CASE("gaussian weight closed forms") {
  CHECK(gaussian_weight(0.0, 100.0) == doctest::Approx(1.0));
  CHECK(gaussian_weight(2.0, 2.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(gaussian_weight(4.0, 2.0) == doctest::Approx(std::exp(-4.0)));
  CHECK(gaussian_weight(2.0, 2.0) == doctest::Approx(0.3678794).epsilon(1e-6));
  CHECK(gaussian_weight(4.0, 2.0) == doctest::Approx(0.0183156).epsilon(1e-4));
  CHECK_THROWS_AS(gaussian_weight(1.0, 0.0), ValidationError);
  CHECK_THROWS_AS(gaussian_weight(1.0, -2.0), ValidationError);
}

TEST_CASE("bisquare weight closed forms") {
  CHECK(bisquare_weight(0.0, 3.0) == doctest::Approx(1.0));
  CHECK(bisquare_weight(3.0, 3.0) == 0.0);
  CHECK(bisquare_weight(4.0, 3.0) == 0.0);
  CHECK(bisquare_weight(1.5, 3.0) == doctest::Approx(0.5625));
  CHECK_THROWS_AS(bisquare_weight(1.0, 0.0), ValidationError);
}

TEST_CASE("fixed gaussian weights for a collinear layout") {
  const DistanceMatrix d = collinear_distances();
  const Eigen::VectorXd w =
      weights_for_location(0, d, KernelSpec::fixed_gaussian(1.0));
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == doctest::Approx(std::exp(-1.0)));
  CHECK(w[2] == doctest::Approx(std::exp(-9.0)));
}

TEST_CASE("adaptive bisquare ranks distances with self at rank 1") {
  // Distance list from location 0 is {0, 1, 3}; k = 2 picks bandwidth 1.
  const DistanceMatrix d = collinear_distances();
  const Eigen::VectorXd w =
      weights_for_location(0, d, KernelSpec::adaptive_bisquare(2));
  CHECK(w[0] == doctest::Approx(1.0));
  CHECK(w[1] == 0.0);  // exactly on the support boundary
  CHECK(w[2] == 0.0);
}

TEST_CASE("adaptive bisquare with k = n covers all but the farthest") {
  const DistanceMatrix d = collinear_distances();
  for (std::size_t i = 0; i < 3; ++i) {
    const Eigen::VectorXd w =
        weights_for_location(i, d, KernelSpec::adaptive_bisquare(3));
    double max_d = 0.0;
    for (Eigen::Index j = 0; j < 3; ++j)
      max_d = std::max(max_d, d(static_cast<Eigen::Index>(i), j));
    for (Eigen::Index j = 0; j < 3; ++j) {
      if (d(static_cast<Eigen::Index>(i), j) < max_d) {
        CHECK(w[j] > 0.0);
      } else {
        CHECK(w[j] == 0.0);
      }
    }
  }
}

TEST_CASE("duplicate centroids make the adaptive bandwidth degenerate") {
  std::vector<Region> regions;
  regions.push_back(oracles::point_region("a", 0, 0));
  regions.push_back(oracles::point_region("b", 0, 0));
  regions.push_back(oracles::point_region("c", 5, 0));
  const DistanceMatrix d = distance_matrix(RegionSet(std::move(regions)));
  CHECK_THROWS_AS(weights_for_location(0, d, KernelSpec::adaptive_bisquare(2)),
                  NumericalError);
}

TEST_CASE("kernel spec validation") {
  CHECK_THROWS_AS(KernelSpec::fixed_gaussian(0.0).validate(10),
                  ValidationError);
  CHECK_THROWS_AS(KernelSpec::adaptive_bisquare(1).validate(10),
                  ValidationError);
  CHECK_THROWS_AS(KernelSpec::adaptive_bisquare(11).validate(10),
                  ValidationError);
  CHECK_NOTHROW(KernelSpec::adaptive_bisquare(10).validate(10));
  CHECK_THROWS_AS(
      weights_for_location(5, collinear_distances(), KernelSpec::fixed_gaussian(1.0)),
      ValidationError);
}

TEST_CASE("weights decay monotonically in distance") {
  Rng rng = seeded_stream(7, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const double b = 0.1 + 10.0 * uniform01(rng);
    double d1 = 20.0 * uniform01(rng);
    double d2 = 20.0 * uniform01(rng);
    if (d1 > d2) std::swap(d1, d2);
    CHECK(gaussian_weight(d1, b) >= gaussian_weight(d2, b));
    CHECK(bisquare_weight(d1, b) >= bisquare_weight(d2, b));
  }
}

TEST_CASE("gaussian weights approach 1 as the bandwidth grows") {
  const DistanceMatrix d = distance_matrix(oracles::make_grid(5, 5));
  const double max_d = d.maxCoeff();
  const Eigen::VectorXd w =
      weights_for_location(7, d, KernelSpec::fixed_gaussian(1e9 * max_d));
  CHECK(w.minCoeff() >= 1.0 - 1e-6);
}

TEST_CASE("adaptive support size under distinct distances") {
  // With distinct distances, ranks 2..k-1 besides the point itself carry
  // positive weight and the k-th ranked point sits on the boundary at 0.
  std::vector<Region> regions;
  for (int i = 0; i < 7; ++i)
    regions.push_back(
        oracles::point_region("p" + std::to_string(i), std::pow(1.7, i), 0.0));
  const DistanceMatrix d = distance_matrix(RegionSet(std::move(regions)));
  const std::size_t n = 7;
  for (int k = 3; k <= static_cast<int>(n); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::VectorXd w =
          weights_for_location(i, d, KernelSpec::adaptive_bisquare(k));
      int positive_others = 0;
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j)
        if (j != static_cast<Eigen::Index>(i) && w[j] > 0.0) ++positive_others;
      CHECK(positive_others == k - 2);

      // The k-th ranked distance gets weight exactly 0.
      std::vector<double> row(n);
      for (std::size_t j = 0; j < n; ++j)
        row[j] = d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      std::sort(row.begin(), row.end());
      const double kth = row[static_cast<std::size_t>(k - 1)];
      for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(n); ++j)
        if (d(static_cast<Eigen::Index>(i), j) == kth) CHECK(w[j] == 0.0);
    }
  }
}
