#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "geoclust/geometry.hpp"

namespace geoclust {

struct GeoJsonOptions {
  // Feature property holding the region id.
  std::string id_property = "id";
};

// Parses an RFC 7946 FeatureCollection of Polygon/MultiPolygon features.
// Ring orientation is normalized so exteriors are counterclockwise and holes
// clockwise. Properties other than the id become attributes; null values are
// recorded as missing.
RegionSet load_regions(std::string_view geojson_text,
                       const GeoJsonOptions& options = {});
RegionSet load_regions_file(const std::filesystem::path& path,
                            const GeoJsonOptions& options = {});

// FeatureCollection with each region's id, attributes and the given extra
// properties (one map per region, same order as the set).
std::string write_annotated_geojson(
    const RegionSet& regions,
    const std::vector<std::map<std::string, nlohmann::json>>& extras);

}  // namespace geoclust
