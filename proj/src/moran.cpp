#include "geoclust/moran.hpp"

#include <cmath>

#include "json.hpp"

#include "geoclust/errors.hpp"
#include "geoclust/parallel.hpp"
#include "geoclust/random.hpp"

namespace geoclust {

namespace {

struct MoranContext {
  std::vector<double> deviations;
  double denom = 0.0;   // sum of squared deviations
  double scale = 0.0;   // n / S0
};

// Validates inputs and precomputes the pieces shared by the observed
// statistic and every permutation replicate.
MoranContext make_context(const std::vector<double>& values,
                          const AdjacencyGraph& graph, bool row_standardize) {
  const std::size_t n = values.size();
  if (graph.n != n)
    throw ValidationError("Moran's I: values/graph size mismatch");
  if (n < 3) throw ValidationError("Moran's I needs at least 3 regions");

  MoranContext ctx;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  ctx.deviations.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ctx.deviations[i] = values[i] - mean;
    ctx.denom += ctx.deviations[i] * ctx.deviations[i];
  }
  if (ctx.denom == 0.0)
    throw NumericalError("Moran's I undefined: values have zero variance");

  double s0 = 0.0;
  std::size_t edges = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t deg = graph.degree(i);
    edges += deg;
    if (deg > 0) s0 += row_standardize ? 1.0 : static_cast<double>(deg);
  }
  if (edges == 0)
    throw NumericalError("Moran's I undefined: the graph has no edges");
  ctx.scale = static_cast<double>(n) / s0;
  return ctx;
}

// I for the deviations indexed through `order` (identity = observed).
double statistic(const MoranContext& ctx, const AdjacencyGraph& graph,
                 bool row_standardize,
                 const std::vector<std::size_t>& order) {
  double num = 0.0;
  for (std::size_t i = 0; i < graph.n; ++i) {
    const auto& nb = graph.neighbors[i];
    if (nb.empty()) continue;
    double lag = 0.0;
    for (std::size_t j : nb) lag += ctx.deviations[order[j]];
    if (row_standardize) lag /= static_cast<double>(nb.size());
    num += ctx.deviations[order[i]] * lag;
  }
  return ctx.scale * num / ctx.denom;
}

}  // namespace

double morans_i(const std::vector<double>& values, const AdjacencyGraph& graph,
                bool row_standardize) {
  const MoranContext ctx = make_context(values, graph, row_standardize);
  return statistic(ctx, graph, row_standardize, index_vector(values.size()));
}

MoranResult moran_permutation_test(const std::vector<double>& values,
                                   const AdjacencyGraph& graph,
                                   int n_permutations, std::uint64_t seed,
                                   bool row_standardize) {
  if (n_permutations < 99)
    throw ValidationError("permutation test needs at least 99 permutations");
  const MoranContext ctx = make_context(values, graph, row_standardize);
  const std::size_t n = values.size();

  MoranResult result;
  result.observed_i =
      statistic(ctx, graph, row_standardize, index_vector(n));
  result.expected_i = -1.0 / static_cast<double>(n - 1);
  result.n_permutations = n_permutations;
  result.seed = seed;
  result.row_standardized = row_standardize;

  std::vector<double> replicates(static_cast<std::size_t>(n_permutations));
  parallel_for(static_cast<std::size_t>(n_permutations), [&](std::size_t rep) {
    Rng rng = seeded_stream(seed, rep);
    std::vector<std::size_t> order = index_vector(n);
    shuffle(order, rng);
    replicates[rep] = statistic(ctx, graph, row_standardize, order);
  });

  std::size_t at_least = 0;
  for (double r : replicates)
    if (r >= result.observed_i) ++at_least;
  result.p_value = static_cast<double>(1 + at_least) /
                   static_cast<double>(n_permutations + 1);
  return result;
}

std::string moran_to_json(const MoranResult& result) {
  nlohmann::ordered_json doc;
  doc["statistic"] = result.observed_i;
  doc["expectation"] = result.expected_i;
  doc["p_value"] = result.p_value;
  doc["n_permutations"] = result.n_permutations;
  doc["seed"] = result.seed;
  doc["row_standardized"] = result.row_standardized;
  return doc.dump(2);
}

}  // namespace geoclust
