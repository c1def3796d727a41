#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace geoclust {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Closed ring: first vertex repeated at the end, at least 4 entries.
using Ring = std::vector<Point>;

// Attribute cell: numeric, categorical or missing.
struct AttributeValue {
  enum class Kind { missing, number, text };

  Kind kind = Kind::missing;
  double number = 0.0;
  std::string text;

  static AttributeValue make_missing() { return {}; }
  static AttributeValue make_number(double v) {
    return {Kind::number, v, {}};
  }
  static AttributeValue make_text(std::string s) {
    return {Kind::text, 0.0, std::move(s)};
  }
  bool is_missing() const { return kind == Kind::missing; }
};

// One areal unit. Rings follow the orientation convention: exterior rings
// have positive signed area, holes negative. A region parsed from a
// MultiPolygon keeps each part as its own exterior ring followed by its
// holes, in order.
struct Region {
  std::string id;
  std::string name;
  std::vector<Ring> rings;
  Point centroid;
  std::map<std::string, AttributeValue> attributes;
};

// Validated, indexable collection of regions. Construction checks id
// uniqueness and ring closure, and computes centroids for regions that carry
// geometry (regions without rings keep whatever centroid they were given).
class RegionSet {
 public:
  RegionSet() = default;
  explicit RegionSet(std::vector<Region> regions);

  std::size_t size() const { return regions_.size(); }
  const Region& operator[](std::size_t i) const { return regions_[i]; }
  const std::vector<Region>& regions() const { return regions_; }
  std::optional<std::size_t> index_of(const std::string& id) const;

  // New set holding regions_[keep[0]], regions_[keep[1]], ... in that order.
  RegionSet subset(const std::vector<std::size_t>& keep) const;

 private:
  std::vector<Region> regions_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Symmetric, irreflexive neighbor structure; neighbor lists are sorted.
struct AdjacencyGraph {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> neighbors;

  std::size_t degree(std::size_t i) const { return neighbors[i].size(); }
  std::size_t edge_count() const;
};

using DistanceMatrix = Eigen::MatrixXd;

// Shoelace signed area; positive for counterclockwise rings.
double ring_signed_area(const Ring& ring);

// Sum of signed ring areas (holes subtract).
double polygon_area(const Region& region);

// Area-weighted centroid over all rings. Throws NumericalError when the
// total signed area is below 1e-12.
Point polygon_centroid(const Region& region);

// Queen contiguity: two regions are neighbors iff any of their boundary
// vertices coincide after snapping coordinates to a grid of cell size
// snap_tol (exact comparison when snap_tol <= 0).
AdjacencyGraph queen_adjacency(const RegionSet& regions,
                               double snap_tol = 1e-9);

// Pairwise Euclidean distances between region centroids.
DistanceMatrix distance_matrix(const RegionSet& regions);

// Edge list "src_id,dst_id", one row per undirected edge.
std::string adjacency_to_csv(const RegionSet& regions,
                             const AdjacencyGraph& graph);

}  // namespace geoclust
