#pragma once

#include "pml/geo.hpp"

#include <json.hpp>

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pml::ingest {

struct MappingEntry {
    std::string key;    // e.g. "highway"
    std::string value;  // e.g. "primary"
    std::string type_tag;
    std::optional<double> line_width;

    std::string match() const { return key + "=" + value; }
};

/**
 * Tag -> type relation. A GeoJSON feature is classified by its `type`
 * property when that names a known type tag, otherwise by the first entry
 * whose key=value pair occurs in its properties (or nested `tags`).
 */
class FeatureTypeMapping {
public:
    FeatureTypeMapping() = default;
    explicit FeatureTypeMapping(std::vector<MappingEntry> entries);

    static FeatureTypeMapping from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    const std::vector<MappingEntry>& entries() const noexcept { return entries_; }
    std::vector<std::string> type_tags() const;
    double line_width(const std::string& type_tag) const;
    bool knows(const std::string& type_tag) const;

    // Type tag for a feature's properties, if any.
    std::optional<std::string> classify(const nlohmann::json& properties) const;

private:
    std::vector<MappingEntry> entries_;
};

struct Provenance {
    std::string source = "fixture";  // fixture | overpass
    std::string fetched_at;
};

struct MapBundle {
    geo::PolarLocation origin;
    std::vector<geo::TypedFeatureSet> feature_sets;
    Provenance provenance;

    const geo::TypedFeatureSet* find(const std::string& type_tag) const;
    std::size_t feature_count() const;
};

struct LoadReport {
    std::size_t input_features = 0;
    std::size_t classified = 0;
    std::size_t unmatched = 0;
    std::size_t unsupported_geometry = 0;
};

MapBundle load_geojson(const nlohmann::json& document, const FeatureTypeMapping& mapping, geo::PolarLocation origin,
                       LoadReport* report = nullptr);
MapBundle load_geojson_text(const std::string& text, const FeatureTypeMapping& mapping, geo::PolarLocation origin,
                            LoadReport* report = nullptr);

// Concatenates bundles sharing an origin, merging sets of equal type.
MapBundle merge(const std::vector<MapBundle>& bundles);

struct BoundingBox {
    double south = 0.0;
    double west = 0.0;
    double north = 0.0;
    double east = 0.0;
};

void validate(const BoundingBox& bbox);
BoundingBox parse_bbox(const std::string& text);  // "south,west,north,east"

std::string build_overpass_query(const BoundingBox& bbox, const FeatureTypeMapping& mapping, int timeout_s = 60);

// Converts an Overpass JSON response (nodes + ways) into a GeoJSON
// FeatureCollection; tagged nodes become Points, closed ways with area-like
// tags become Polygons, other ways LineStrings.
nlohmann::json overpass_to_geojson(const nlohmann::json& response);

struct HttpResponse {
    int status = 0;
    std::string body;
};

// POSTs the form-encoded query; injectable for tests.
using OverpassTransport = std::function<HttpResponse(const std::string& endpoint, const std::string& query)>;

OverpassTransport http_transport(std::chrono::seconds timeout = std::chrono::seconds(90));

class FetchError : public std::runtime_error {
public:
    FetchError(const std::string& message, std::string query)
        : std::runtime_error(message), query_(std::move(query)) {}
    const std::string& query() const noexcept { return query_; }

private:
    std::string query_;
};

struct FetchOptions {
    int attempts = 3;
    std::chrono::milliseconds initial_backoff{1000};
};

nlohmann::json fetch_overpass(const std::string& endpoint, const BoundingBox& bbox, const FeatureTypeMapping& mapping,
                              const OverpassTransport& transport, const FetchOptions& options = {});

}  // namespace pml::ingest
