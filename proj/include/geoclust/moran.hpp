#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "geoclust/geometry.hpp"

namespace geoclust {

struct MoranResult {
  double observed_i = 0.0;
  double expected_i = 0.0;  // -1 / (n - 1)
  double p_value = 1.0;     // one-sided, upper tail
  int n_permutations = 0;
  std::uint64_t seed = 0;
  bool row_standardized = true;
};

// Global Moran's I with binary queen weights, row-standardized by default.
// Isolated regions contribute zero weight rows. Throws NumericalError on
// zero variance or an edgeless graph.
double morans_i(const std::vector<double>& values, const AdjacencyGraph& graph,
                bool row_standardize = true);

// Permutation significance: values are shuffled n_permutations times with a
// seeded generator, p = (1 + #{I_perm >= I_obs}) / (n_permutations + 1).
// Each replicate draws from its own substream, so the result is identical
// for any thread count.
MoranResult moran_permutation_test(const std::vector<double>& values,
                                   const AdjacencyGraph& graph,
                                   int n_permutations = 9999,
                                   std::uint64_t seed = 1,
                                   bool row_standardize = true);

std::string moran_to_json(const MoranResult& result);

}  // namespace geoclust
