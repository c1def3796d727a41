#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "geoclust/geometry.hpp"

namespace geoclust {

// Outcome of imputing one variable. Every originally-missing index lands in
// exactly one of the two lists.
struct ImputationReport {
  struct Entry {
    std::size_t region = 0;
    double value = 0.0;       // continuous fills
    std::string category;     // categorical fills
    std::size_t neighbor_count = 0;
  };
  std::vector<Entry> imputed;
  std::vector<std::size_t> unimputable;
};

// Replaces each missing value with the mean of the non-missing neighbor
// values. Single pass: fills use only original values, never other fills.
// Regions with no informative neighbor stay missing and are reported.
std::pair<std::vector<std::optional<double>>, ImputationReport>
impute_continuous(const std::vector<std::optional<double>>& values,
                  const AdjacencyGraph& graph);

// Modal neighbor category, ties broken toward the lexicographically
// smallest label.
std::pair<std::vector<std::optional<std::string>>, ImputationReport>
impute_categorical(const std::vector<std::optional<std::string>>& values,
                   const AdjacencyGraph& graph);

}  // namespace geoclust
