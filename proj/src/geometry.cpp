#include "geoclust/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <sstream>

#include "geoclust/csv.hpp"
#include "geoclust/errors.hpp"

namespace geoclust {

namespace {

void validate_ring(const Ring& ring, const std::string& region_id) {
  if (ring.size() < 4) {
    throw ValidationError("region '" + region_id +
                          "': ring has fewer than 4 vertices");
  }
  if (ring.front().x != ring.back().x || ring.front().y != ring.back().y) {
    throw ValidationError("region '" + region_id +
                          "': ring is not closed (first vertex != last)");
  }
  if (ring_signed_area(ring) == 0.0) {
    throw ValidationError("region '" + region_id +
                          "': ring has zero signed area");
  }
}

struct GridKey {
  std::int64_t x;
  std::int64_t y;
  bool operator==(const GridKey&) const = default;
};

struct GridKeyHash {
  std::size_t operator()(const GridKey& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9e3779b97f4a7c15ULL;
    h ^= static_cast<std::uint64_t>(k.y) + 0x9e3779b97f4a7c15ULL +
         (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

GridKey snap_key(const Point& p, double tol) {
  if (tol > 0.0) {
    return {static_cast<std::int64_t>(std::llround(p.x / tol)),
            static_cast<std::int64_t>(std::llround(p.y / tol))};
  }
  // Exact comparison; normalize -0.0 so it matches +0.0.
  const double x = p.x == 0.0 ? 0.0 : p.x;
  const double y = p.y == 0.0 ? 0.0 : p.y;
  return {std::bit_cast<std::int64_t>(x), std::bit_cast<std::int64_t>(y)};
}

}  // namespace

RegionSet::RegionSet(std::vector<Region> regions)
    : regions_(std::move(regions)) {
  std::vector<std::string> duplicates;
  for (std::size_t i = 0; i < regions_.size(); ++i) {
    Region& r = regions_[i];
    if (!index_.emplace(r.id, i).second) duplicates.push_back(r.id);
    for (const Ring& ring : r.rings) validate_ring(ring, r.id);
    if (!r.rings.empty()) r.centroid = polygon_centroid(r);
  }
  if (!duplicates.empty()) {
    std::sort(duplicates.begin(), duplicates.end());
    duplicates.erase(std::unique(duplicates.begin(), duplicates.end()),
                     duplicates.end());
    std::string msg = "duplicate region ids:";
    for (const auto& id : duplicates) msg += " '" + id + "'";
    throw ValidationError(msg);
  }
}

std::optional<std::size_t> RegionSet::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

RegionSet RegionSet::subset(const std::vector<std::size_t>& keep) const {
  std::vector<Region> out;
  out.reserve(keep.size());
  for (std::size_t i : keep) {
    if (i >= regions_.size())
      throw ValidationError("subset index out of range");
    out.push_back(regions_[i]);
  }
  return RegionSet(std::move(out));
}

std::size_t AdjacencyGraph::edge_count() const {
  std::size_t total = 0;
  for (const auto& nb : neighbors) total += nb.size();
  return total / 2;
}

double ring_signed_area(const Ring& ring) {
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    twice += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
  }
  return 0.5 * twice;
}

double polygon_area(const Region& region) {
  double area = 0.0;
  for (const Ring& ring : region.rings) area += ring_signed_area(ring);
  return area;
}

Point polygon_centroid(const Region& region) {
  if (region.rings.empty())
    throw NumericalError("region '" + region.id + "' has no rings");
  // Shoelace centroid accumulated over all rings; hole rings carry opposite
  // orientation and subtract from both the area and the moments.
  double area2 = 0.0;  // twice the signed area
  double cx = 0.0, cy = 0.0;
  for (const Ring& ring : region.rings) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      const double cross =
          ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
      area2 += cross;
      cx += (ring[i].x + ring[i + 1].x) * cross;
      cy += (ring[i].y + ring[i + 1].y) * cross;
    }
  }
  const double area = 0.5 * area2;
  if (std::fabs(area) < 1e-12) {
    throw NumericalError("region '" + region.id +
                         "': degenerate geometry, |area| < 1e-12");
  }
  return {cx / (6.0 * area), cy / (6.0 * area)};
}

AdjacencyGraph queen_adjacency(const RegionSet& regions, double snap_tol) {
  if (snap_tol < 0.0)
    throw ValidationError("snap tolerance must be >= 0");
  const std::size_t n = regions.size();

  std::unordered_map<GridKey, std::vector<std::size_t>, GridKeyHash> cells;
  for (std::size_t i = 0; i < n; ++i) {
    for (const Ring& ring : regions[i].rings) {
      for (std::size_t v = 0; v + 1 < ring.size(); ++v) {
        auto& cell = cells[snap_key(ring[v], snap_tol)];
        if (cell.empty() || cell.back() != i) cell.push_back(i);
      }
    }
  }

  std::vector<std::set<std::size_t>> nb(n);
  for (auto& [key, members] : cells) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (std::size_t a = 0; a < members.size(); ++a) {
      for (std::size_t b = a + 1; b < members.size(); ++b) {
        nb[members[a]].insert(members[b]);
        nb[members[b]].insert(members[a]);
      }
    }
  }

  AdjacencyGraph graph;
  graph.n = n;
  graph.neighbors.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    graph.neighbors[i].assign(nb[i].begin(), nb[i].end());
  return graph;
}

DistanceMatrix distance_matrix(const RegionSet& regions) {
  const auto n = static_cast<Eigen::Index>(regions.size());
  DistanceMatrix d = DistanceMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point a = regions[static_cast<std::size_t>(i)].centroid;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Point b = regions[static_cast<std::size_t>(j)].centroid;
      const double dist = std::hypot(a.x - b.x, a.y - b.y);
      d(i, j) = dist;
      d(j, i) = dist;
    }
  }
  return d;
}

std::string adjacency_to_csv(const RegionSet& regions,
                             const AdjacencyGraph& graph) {
  if (graph.n != regions.size())
    throw ValidationError("adjacency/region size mismatch");
  std::ostringstream out;
  out << "src_id,dst_id\n";
  for (std::size_t i = 0; i < graph.n; ++i) {
    for (std::size_t j : graph.neighbors[i]) {
      if (j <= i) continue;
      out << csv_escape(regions[i].id) << ',' << csv_escape(regions[j].id)
          << '\n';
    }
  }
  return out.str();
}

}  // namespace geoclust
