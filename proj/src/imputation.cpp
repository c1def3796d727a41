#include "geoclust/imputation.hpp"

#include <map>

#include "geoclust/errors.hpp"

namespace geoclust {

namespace {

void check_sizes(std::size_t values, const AdjacencyGraph& graph) {
  if (graph.n != values) {
    throw ValidationError("imputation: " + std::to_string(values) +
                          " values but graph has " + std::to_string(graph.n) +
                          " regions");
  }
}

}  // namespace

std::pair<std::vector<std::optional<double>>, ImputationReport>
impute_continuous(const std::vector<std::optional<double>>& values,
                  const AdjacencyGraph& graph) {
  check_sizes(values.size(), graph);
  auto out = values;
  ImputationReport report;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].has_value()) continue;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t j : graph.neighbors[i]) {
      if (values[j].has_value()) {  // original values only
        sum += *values[j];
        ++count;
      }
    }
    if (count == 0) {
      report.unimputable.push_back(i);
    } else {
      out[i] = sum / static_cast<double>(count);
      report.imputed.push_back({i, *out[i], {}, count});
    }
  }
  return {std::move(out), std::move(report)};
}

std::pair<std::vector<std::optional<std::string>>, ImputationReport>
impute_categorical(const std::vector<std::optional<std::string>>& values,
                   const AdjacencyGraph& graph) {
  check_sizes(values.size(), graph);
  auto out = values;
  ImputationReport report;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].has_value()) continue;
    std::map<std::string, std::size_t> counts;
    std::size_t total = 0;
    for (std::size_t j : graph.neighbors[i]) {
      if (values[j].has_value()) {
        ++counts[*values[j]];
        ++total;
      }
    }
    if (total == 0) {
      report.unimputable.push_back(i);
      continue;
    }
    // counts is ordered by label, so the first maximum is the
    // lexicographically smallest mode.
    const std::string* best = nullptr;
    std::size_t best_count = 0;
    for (const auto& [label, count] : counts) {
      if (count > best_count) {
        best = &label;
        best_count = count;
      }
    }
    out[i] = *best;
    report.imputed.push_back({i, 0.0, *best, total});
  }
  return {std::move(out), std::move(report)};
}

}  // namespace geoclust
