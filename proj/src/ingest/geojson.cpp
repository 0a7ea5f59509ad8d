#include "pml/errors.hpp"
#include "pml/ingest.hpp"

#include <map>

namespace pml::ingest {

namespace {

[[noreturn]] void malformed(const std::string& what) {
    throw ParseError(0, 0, "malformed GeoJSON: " + what);
}

geo::CartesianLocation position(const nlohmann::json& coord, geo::PolarLocation origin) {
    if (!coord.is_array() || coord.size() < 2 || !coord[0].is_number() || !coord[1].is_number()) {
        malformed("position must be [lon, lat]");
    }
    return geo::project({coord[1].get<double>(), coord[0].get<double>()}, origin);
}

std::vector<geo::CartesianLocation> positions(const nlohmann::json& coords, geo::PolarLocation origin) {
    if (!coords.is_array()) {
        malformed("coordinates must be an array");
    }
    std::vector<geo::CartesianLocation> out;
    out.reserve(coords.size());
    for (const auto& c : coords) {
        out.push_back(position(c, origin));
    }
    return out;
}

// nullopt for geometry kinds outside Point/LineString/Polygon.
std::optional<geo::Geometry> geometry(const nlohmann::json& g, geo::PolarLocation origin) {
    if (!g.is_object() || !g.contains("type") || !g["type"].is_string()) {
        malformed("feature geometry needs a type");
    }
    const std::string type = g["type"].get<std::string>();
    if (type != "Point" && type != "LineString" && type != "Polygon") {
        return std::nullopt;
    }
    if (!g.contains("coordinates")) {
        malformed(type + " without coordinates");
    }
    const auto& coords = g["coordinates"];
    try {
        if (type == "Point") {
            return geo::Geometry::point(position(coords, origin));
        }
        if (type == "LineString") {
            return geo::Geometry::line(positions(coords, origin));
        }
        // Outer ring only; holes are not modeled.
        if (!coords.is_array() || coords.empty()) {
            malformed("Polygon needs at least one ring");
        }
        return geo::Geometry::polygon(positions(coords[0], origin));
    } catch (const DomainError& e) {
        malformed(type + ": " + e.what());
    }
}

}  // namespace

const geo::TypedFeatureSet* MapBundle::find(const std::string& type_tag) const {
    for (const auto& s : feature_sets) {
        if (s.type_tag == type_tag) {
            return &s;
        }
    }
    return nullptr;
}

std::size_t MapBundle::feature_count() const {
    std::size_t n = 0;
    for (const auto& s : feature_sets) {
        n += s.features.size();
    }
    return n;
}

MapBundle load_geojson(const nlohmann::json& document, const FeatureTypeMapping& mapping, geo::PolarLocation origin,
                       LoadReport* report) {
    if (!document.is_object() || document.value("type", "") != "FeatureCollection") {
        malformed("expected a FeatureCollection");
    }
    if (!document.contains("features") || !document["features"].is_array()) {
        malformed("FeatureCollection without a features array");
    }
    LoadReport local;
    std::map<std::string, std::vector<geo::Geometry>> sets;
    for (const auto& feature : document["features"]) {
        ++local.input_features;
        if (!feature.is_object() || feature.value("type", "") != "Feature") {
            malformed("collection member is not a Feature");
        }
        const nlohmann::json properties =
            feature.contains("properties") && feature["properties"].is_object() ? feature["properties"]
                                                                                : nlohmann::json::object();
        const auto type_tag = mapping.classify(properties);
        if (!feature.contains("geometry") || feature["geometry"].is_null()) {
            continue;
        }
        const auto g = geometry(feature["geometry"], origin);
        if (!g) {
            ++local.unsupported_geometry;
            continue;
        }
        if (!type_tag) {
            continue;
        }
        sets[*type_tag].push_back(*g);
        ++local.classified;
    }
    local.unmatched = local.input_features - local.classified;

    MapBundle bundle;
    bundle.origin = origin;
    for (auto& [tag, features] : sets) {
        bundle.feature_sets.push_back({tag, std::move(features), mapping.line_width(tag)});
    }
    if (report) {
        *report = local;
    }
    return bundle;
}

MapBundle load_geojson_text(const std::string& text, const FeatureTypeMapping& mapping, geo::PolarLocation origin,
                            LoadReport* report) {
    nlohmann::json document;
    try {
        document = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i < text.size() && i + 1 < e.byte; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError(line, column, "invalid JSON in GeoJSON document");
    }
    return load_geojson(document, mapping, origin, report);
}

MapBundle merge(const std::vector<MapBundle>& bundles) {
    MapBundle out;
    if (bundles.empty()) {
        return out;
    }
    out.origin = bundles.front().origin;
    out.provenance = bundles.front().provenance;
    std::map<std::string, geo::TypedFeatureSet> sets;
    for (const auto& b : bundles) {
        if (!(b.origin == out.origin)) {
            throw ConfigurationError("cannot merge map bundles with different origins");
        }
        for (const auto& s : b.feature_sets) {
            auto [it, inserted] = sets.try_emplace(s.type_tag, s);
            if (!inserted) {
                it->second.features.insert(it->second.features.end(), s.features.begin(), s.features.end());
            }
        }
    }
    for (auto& [tag, set] : sets) {
        out.feature_sets.push_back(std::move(set));
    }
    return out;
}

}  // namespace pml::ingest
