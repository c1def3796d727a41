#include "doctest.h"

#include <cmath>

#include "json.hpp"

#include "geoclust/errors.hpp"
#include "geoclust/moran.hpp"
#include "geoclust/random.hpp"
#include "oracles.hpp"

using namespace geoclust;

namespace {

AdjacencyGraph cycle_graph(std::size_t n) {
  AdjacencyGraph g;
  g.n = n;
  g.neighbors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.neighbors[i].push_back((i + 1) % n);
    g.neighbors[i].push_back((i + n - 1) % n);
    std::sort(g.neighbors[i].begin(), g.neighbors[i].end());
    g.neighbors[i].erase(
        std::unique(g.neighbors[i].begin(), g.neighbors[i].end()),
        g.neighbors[i].end());
  }
  return g;
}

AdjacencyGraph complete_graph(std::size_t n) {
  AdjacencyGraph g;
  g.n = n;
  g.neighbors.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) g.neighbors[i].push_back(j);
  return g;
}

AdjacencyGraph random_connected_graph(std::size_t n, Rng& rng) {
  AdjacencyGraph g;
  g.n = n;
  g.neighbors.resize(n);
  auto add = [&](std::size_t a, std::size_t b) {
    g.neighbors[a].push_back(b);
    g.neighbors[b].push_back(a);
  };
  for (std::size_t i = 1; i < n; ++i) add(i, bounded(rng, i));  // random tree
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

}  // namespace

TEST_CASE("constant values have undefined Moran's I") {
  const AdjacencyGraph g = cycle_graph(5);
  const std::vector<double> values(5, 3.0);
  CHECK_THROWS_AS(morans_i(values, g), NumericalError);
}

TEST_CASE("an edgeless graph has undefined Moran's I") {
  AdjacencyGraph g;
  g.n = 4;
  g.neighbors.resize(4);
  const std::vector<double> values = {1, 2, 3, 4};
  CHECK_THROWS_AS(morans_i(values, g), NumericalError);
}

TEST_CASE("alternating values on a 4-cycle give exactly -1") {
  // Each node's neighbor average is the negated value, so the
  // row-standardized double sum collapses to -1 with no rounding.
  const AdjacencyGraph g = cycle_graph(4);
  const std::vector<double> values = {1.0, -1.0, 1.0, -1.0};
  CHECK(morans_i(values, g, true) == -1.0);
}

TEST_CASE("matches the brute-force double sum on a 5x5 rook grid") {
  AdjacencyGraph g;
  const int side = 5;
  g.n = side * side;
  g.neighbors.resize(g.n);
  auto at = [&](int r, int c) { return static_cast<std::size_t>(r * side + c); };
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      if (r + 1 < side) {
        g.neighbors[at(r, c)].push_back(at(r + 1, c));
        g.neighbors[at(r + 1, c)].push_back(at(r, c));
      }
      if (c + 1 < side) {
        g.neighbors[at(r, c)].push_back(at(r, c + 1));
        g.neighbors[at(r, c + 1)].push_back(at(r, c));
      }
    }
  }
  for (auto& nb : g.neighbors) std::sort(nb.begin(), nb.end());

  Rng rng = seeded_stream(99, 0);
  std::vector<double> values(g.n);
  for (double& v : values) v = uniform01(rng) * 4.0 - 2.0;
  for (bool row_std : {true, false}) {
    const double got = morans_i(values, g, row_std);
    const double expected = oracles::brute_force_moran(values, g, row_std);
    CHECK(std::fabs(got - expected) < 1e-12);
  }
}

TEST_CASE("matches the oracle on random graphs up to n = 25") {
  Rng rng = seeded_stream(100, 0);
  for (std::size_t n = 3; n <= 25; ++n) {
    const AdjacencyGraph g = random_connected_graph(n, rng);
    std::vector<double> values(n);
    for (double& v : values) v = uniform01(rng) * 10.0 - 5.0;
    for (bool row_std : {true, false}) {
      CHECK(std::fabs(morans_i(values, g, row_std) -
                      oracles::brute_force_moran(values, g, row_std)) < 1e-12);
    }
  }
}

TEST_CASE("isolated regions contribute zero weight rows") {
  // Path of 3 plus an isolated node; brute force handles the zero row the
  // same way.
  AdjacencyGraph g;
  g.n = 4;
  g.neighbors = {{1}, {0, 2}, {1}, {}};
  const std::vector<double> values = {1.0, 5.0, 2.0, 9.0};
  CHECK(std::fabs(morans_i(values, g, true) -
                  oracles::brute_force_moran(values, g, true)) < 1e-12);
}

TEST_CASE("affine transformation leaves the statistic unchanged") {
  Rng rng = seeded_stream(101, 0);
  const AdjacencyGraph g = random_connected_graph(15, rng);
  std::vector<double> values(15);
  for (double& v : values) v = uniform01(rng);
  const double base = morans_i(values, g);
  for (const auto& [a, c] : {std::pair{2.0, 5.0}, {-3.0, 0.0}, {0.25, -7.5}}) {
    std::vector<double> transformed(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      transformed[i] = a * values[i] + c;
    CHECK(std::fabs(morans_i(transformed, g) - base) < 1e-12);
  }
}

TEST_CASE("swapping two regions together with their graph rows preserves I") {
  Rng rng = seeded_stream(102, 0);
  const AdjacencyGraph g = random_connected_graph(12, rng);
  std::vector<double> values(12);
  for (double& v : values) v = uniform01(rng);
  const double base = morans_i(values, g);

  const std::size_t a = 2, b = 9;
  std::vector<double> swapped = values;
  std::swap(swapped[a], swapped[b]);
  AdjacencyGraph sg;
  sg.n = g.n;
  sg.neighbors.resize(g.n);
  auto relabel = [&](std::size_t i) { return i == a ? b : (i == b ? a : i); };
  for (std::size_t i = 0; i < g.n; ++i) {
    for (std::size_t j : g.neighbors[i])
      sg.neighbors[relabel(i)].push_back(relabel(j));
  }
  for (auto& nb : sg.neighbors) std::sort(nb.begin(), nb.end());
  CHECK(std::fabs(morans_i(swapped, sg) - base) < 1e-12);
}

TEST_CASE("row-standardized I stays within [-1, 1] empirically") {
  Rng rng = seeded_stream(103, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 5 + bounded(rng, 20);
    const AdjacencyGraph g = random_connected_graph(n, rng);
    std::vector<double> values(n);
    for (double& v : values) v = uniform01(rng) * 6.0 - 3.0;
    CHECK(std::fabs(morans_i(values, g, true)) <= 1.0 + 1e-9);
  }
}

TEST_CASE("permutation test is deterministic and thread-count independent") {
  const RegionSet grid = oracles::make_grid(6, 6);
  const AdjacencyGraph g = queen_adjacency(grid);
  std::vector<double> values(36);
  Rng rng = seeded_stream(104, 0);
  for (double& v : values) v = uniform01(rng);

  const MoranResult a = moran_permutation_test(values, g, 199, 42);
  const MoranResult b = moran_permutation_test(values, g, 199, 42);
  CHECK(a.observed_i == b.observed_i);
  CHECK(a.p_value == b.p_value);

  setenv("GEOCLUST_THREADS", "7", 1);
  const MoranResult c = moran_permutation_test(values, g, 199, 42);
  setenv("GEOCLUST_THREADS", "1", 1);
  const MoranResult d = moran_permutation_test(values, g, 199, 42);
  unsetenv("GEOCLUST_THREADS");
  CHECK(c.p_value == a.p_value);
  CHECK(d.p_value == a.p_value);

  const MoranResult other_seed = moran_permutation_test(values, g, 199, 43);
  CHECK(other_seed.observed_i == a.observed_i);  // observed part is seed-free
}

TEST_CASE("permutation-invariant configurations give p = 1") {
  // On a complete graph every relabeling produces the same statistic, and
  // the integer-valued inputs keep the arithmetic exact.
  const AdjacencyGraph g = complete_graph(4);
  const std::vector<double> values = {1.0, 2.0, 3.0, 4.0};
  const MoranResult result = moran_permutation_test(values, g, 99, 7);
  CHECK(result.p_value == doctest::Approx(1.0));
}

TEST_CASE("a smooth gradient on a 10x10 grid attains the minimal p") {
  const RegionSet grid = oracles::make_grid(10, 10);
  const AdjacencyGraph g = queen_adjacency(grid);
  std::vector<double> values(100);
  for (std::size_t i = 0; i < 100; ++i)
    values[i] = grid[i].centroid.x + grid[i].centroid.y;
  const MoranResult result = moran_permutation_test(values, g, 9999, 11);
  CHECK(result.p_value == doctest::Approx(1.0e-4));
  CHECK(result.observed_i > 0.5);
}

TEST_CASE("permutation count floor and p-value floor") {
  const AdjacencyGraph g = cycle_graph(6);
  const std::vector<double> values = {1, 2, 3, 4, 5, 6};
  CHECK_THROWS_AS(moran_permutation_test(values, g, 50, 1), ValidationError);
  const MoranResult result = moran_permutation_test(values, g, 99, 1);
  CHECK(result.p_value >= 1.0 / 100.0);
  CHECK(result.expected_i == doctest::Approx(-0.2));
}

TEST_CASE("iid fields look null: p above 0.05 and mean I near the expectation") {
  const RegionSet grid = oracles::make_grid(10, 10);
  const AdjacencyGraph g = queen_adjacency(grid);
  int above = 0;
  double sum_i = 0.0;
  double perm_sd = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng = seeded_stream(seed, 77);
    std::vector<double> values(100);
    for (double& v : values) v = normal01(rng);
    const MoranResult result = moran_permutation_test(values, g, 999, seed);
    if (result.p_value > 0.05) ++above;
    sum_i += result.observed_i;
    // Null spread estimated from one permutation distribution.
    if (seed == 1) {
      std::vector<double> order1;
      double mean = 0.0, m2 = 0.0;
      std::vector<double> reps;
      for (int rep = 0; rep < 999; ++rep) {
        Rng prng = seeded_stream(seed, static_cast<std::uint64_t>(rep));
        std::vector<std::size_t> order = index_vector(100);
        shuffle(order, prng);
        std::vector<double> permuted(100);
        for (std::size_t i = 0; i < 100; ++i) permuted[i] = values[order[i]];
        reps.push_back(morans_i(permuted, g));
      }
      for (double r : reps) mean += r;
      mean /= static_cast<double>(reps.size());
      for (double r : reps) m2 += (r - mean) * (r - mean);
      perm_sd = std::sqrt(m2 / static_cast<double>(reps.size() - 1));
    }
  }
  CHECK(above >= 17);  // null p-values rarely dip below 0.05
  const double mean_i = sum_i / 20.0;
  CHECK(std::fabs(mean_i - (-1.0 / 99.0)) <= 3.0 * perm_sd);
}

TEST_CASE("JSON serialization carries the documented fields") {
  MoranResult result;
  result.observed_i = 0.36;
  result.expected_i = -1.0 / 525.0;
  result.p_value = 1e-4;
  result.n_permutations = 9999;
  result.seed = 7;
  result.row_standardized = true;
  const auto doc = nlohmann::json::parse(moran_to_json(result));
  CHECK(doc["statistic"].get<double>() == doctest::Approx(0.36));
  CHECK(doc["expectation"].get<double>() == doctest::Approx(-1.0 / 525.0));
  CHECK(doc["p_value"].get<double>() == doctest::Approx(1e-4));
  CHECK(doc["n_permutations"].get<int>() == 9999);
  CHECK(doc["seed"].get<std::uint64_t>() == 7);
  CHECK(doc["row_standardized"].get<bool>());
}
