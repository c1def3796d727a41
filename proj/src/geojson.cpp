#include "geoclust/geojson.hpp"

#include <algorithm>
#include <cmath>

#include "geoclust/csv.hpp"
#include "geoclust/errors.hpp"

namespace geoclust {

using nlohmann::json;

namespace {

std::string id_to_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>(), 15);
  throw ValidationError("feature id must be a string or a number");
}

Ring parse_ring(const json& coords, const std::string& where) {
  if (!coords.is_array())
    throw ValidationError(where + ": ring is not an array");
  Ring ring;
  ring.reserve(coords.size());
  for (const json& pos : coords) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() ||
        !pos[1].is_number()) {
      throw ValidationError(where + ": ring position is not [x, y]");
    }
    ring.push_back({pos[0].get<double>(), pos[1].get<double>()});
  }
  return ring;
}

// Exterior rings (first of each polygon) forced counterclockwise, holes
// clockwise, so signed areas carry the hole information downstream.
void orient_ring(Ring& ring, bool exterior) {
  const double area = ring_signed_area(ring);
  if ((exterior && area < 0.0) || (!exterior && area > 0.0))
    std::reverse(ring.begin(), ring.end());
}

void append_polygon(const json& coords, std::vector<Ring>& rings,
                    const std::string& where) {
  if (!coords.is_array() || coords.empty())
    throw ValidationError(where + ": polygon has no rings");
  for (std::size_t r = 0; r < coords.size(); ++r) {
    Ring ring = parse_ring(coords[r], where);
    orient_ring(ring, r == 0);
    rings.push_back(std::move(ring));
  }
}

AttributeValue property_to_attribute(const json& v) {
  if (v.is_null()) return AttributeValue::make_missing();
  if (v.is_number()) return AttributeValue::make_number(v.get<double>());
  if (v.is_boolean())
    return AttributeValue::make_text(v.get<bool>() ? "true" : "false");
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s.empty()) return AttributeValue::make_missing();
    return AttributeValue::make_text(std::move(s));
  }
  return AttributeValue::make_missing();  // arrays/objects are not attributes
}

json ring_to_json(const Ring& ring) {
  json out = json::array();
  for (const Point& p : ring) out.push_back(json::array({p.x, p.y}));
  return out;
}

}  // namespace

RegionSet load_regions(std::string_view geojson_text,
                       const GeoJsonOptions& options) {
  json doc;
  try {
    doc = json::parse(geojson_text);
  } catch (const json::parse_error& e) {
    throw ValidationError("GeoJSON parse error at byte " +
                          std::to_string(e.byte) + ": " + e.what());
  }

  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw ValidationError("GeoJSON root must be a FeatureCollection");
  }

  std::vector<Region> regions;
  const json& features = doc["features"];
  for (std::size_t f = 0; f < features.size(); ++f) {
    const json& feature = features[f];
    const std::string where = "feature " + std::to_string(f);
    if (!feature.is_object() || feature.value("type", "") != "Feature")
      throw ValidationError(where + " is not a Feature");

    const json props = feature.value("properties", json::object());

    Region region;
    if (props.is_object() && props.contains(options.id_property)) {
      region.id = id_to_string(props[options.id_property]);
    } else if (feature.contains("id")) {
      region.id = id_to_string(feature["id"]);
    } else {
      throw ValidationError(where + ": missing id property '" +
                            options.id_property + "'");
    }

    if (!feature.contains("geometry") || feature["geometry"].is_null())
      throw ValidationError("feature '" + region.id + "': missing geometry");
    const json& geom = feature["geometry"];
    const std::string gtype = geom.value("type", "");
    if (!geom.contains("coordinates"))
      throw ValidationError("feature '" + region.id +
                            "': geometry has no coordinates");
    if (gtype == "Polygon") {
      append_polygon(geom["coordinates"], region.rings, where);
    } else if (gtype == "MultiPolygon") {
      for (const json& poly : geom["coordinates"])
        append_polygon(poly, region.rings, where);
    } else {
      throw ValidationError("unsupported geometry '" + gtype +
                            "' in feature '" + region.id + "'");
    }

    if (props.is_object()) {
      for (auto it = props.begin(); it != props.end(); ++it) {
        if (it.key() == options.id_property) continue;
        region.attributes[it.key()] = property_to_attribute(it.value());
        if (it.key() == "name" && it.value().is_string())
          region.name = it.value().get<std::string>();
      }
    }
    regions.push_back(std::move(region));
  }
  return RegionSet(std::move(regions));
}

RegionSet load_regions_file(const std::filesystem::path& path,
                            const GeoJsonOptions& options) {
  return load_regions(read_text_file(path), options);
}

std::string write_annotated_geojson(
    const RegionSet& regions,
    const std::vector<std::map<std::string, json>>& extras) {
  if (!extras.empty() && extras.size() != regions.size())
    throw ValidationError("extras/regions size mismatch");

  nlohmann::ordered_json doc;
  doc["type"] = "FeatureCollection";
  auto& features = doc["features"] = json::array();
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const Region& r = regions[i];
    nlohmann::ordered_json feature;
    feature["type"] = "Feature";

    // Positive-area rings open a polygon part; following holes attach to it.
    std::vector<json> parts;
    for (const Ring& ring : r.rings) {
      if (ring_signed_area(ring) > 0.0 || parts.empty())
        parts.push_back(json::array());
      parts.back().push_back(ring_to_json(ring));
    }
    nlohmann::ordered_json geometry;
    if (parts.size() == 1) {
      geometry["type"] = "Polygon";
      geometry["coordinates"] = parts.front();
    } else {
      geometry["type"] = "MultiPolygon";
      geometry["coordinates"] = parts;
    }
    feature["geometry"] = geometry;

    nlohmann::ordered_json props;
    props["id"] = r.id;
    for (const auto& [key, value] : r.attributes) {
      switch (value.kind) {
        case AttributeValue::Kind::missing: props[key] = nullptr; break;
        case AttributeValue::Kind::number: props[key] = value.number; break;
        case AttributeValue::Kind::text: props[key] = value.text; break;
      }
    }
    if (i < extras.size())
      for (const auto& [key, value] : extras[i]) props[key] = value;
    feature["properties"] = props;
    features.push_back(feature);
  }
  return doc.dump();
}

}  // namespace geoclust
