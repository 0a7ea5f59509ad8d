#include "pml/errors.hpp"
#include "pml/ingest.hpp"

#include <httplib.h>

#include <charconv>
#include <cmath>
#include <sstream>
#include <thread>
#include <unordered_map>

namespace pml::ingest {

namespace {

// Keys whose closed ways describe areas rather than outlines.
bool area_like(const nlohmann::json& tags) {
    if (!tags.is_object()) {
        return false;
    }
    if (tags.value("area", "") == "yes") {
        return true;
    }
    if (tags.value("area", "") == "no") {
        return false;
    }
    for (const char* key : {"building", "leisure", "landuse", "natural", "amenity", "water", "aeroway", "place"}) {
        if (tags.contains(key)) {
            return true;
        }
    }
    return false;
}

std::string format_coordinate(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (const char ch : s) {
        if (ch == '"' || ch == '\\') {
            out += '\\';
        }
        out += ch;
    }
    return out + "\"";
}

std::string form_encode(const std::string& s) {
    std::string out;
    for (const unsigned char ch : s) {
        if (std::isalnum(ch) || ch == '-' || ch == '_' || ch == '.' || ch == '~') {
            out += static_cast<char>(ch);
        } else {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", ch);
            out += buf;
        }
    }
    return out;
}

}  // namespace

void validate(const BoundingBox& b) {
    if (!(b.south < b.north) || !(b.west < b.east) || b.south < -90.0 || b.north > 90.0 || b.west < -180.0 ||
        b.east > 180.0) {
        throw DomainError("bounding box needs south < north and west < east within WGS84 ranges");
    }
}

BoundingBox parse_bbox(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw DomainError("bounding box component '" + item + "' is not a number");
        }
    }
    if (v.size() != 4) {
        throw DomainError("bounding box must be south,west,north,east");
    }
    BoundingBox b{v[0], v[1], v[2], v[3]};
    validate(b);
    return b;
}

std::string build_overpass_query(const BoundingBox& bbox, const FeatureTypeMapping& mapping, int timeout_s) {
    validate(bbox);
    if (mapping.entries().empty()) {
        throw ConfigurationError("mapping has no entries, the Overpass query would be empty");
    }
    const std::string box = "(" + format_coordinate(bbox.south) + "," + format_coordinate(bbox.west) + "," +
                            format_coordinate(bbox.north) + "," + format_coordinate(bbox.east) + ")";
    std::string q = "[out:json][timeout:" + std::to_string(timeout_s) + "];\n(\n";
    for (const auto& e : mapping.entries()) {
        q += "    way[" + quote(e.key) + "=" + quote(e.value) + "]" + box + ";\n";
    }
    q += ");\nout body; >; out skel qt;\n";
    return q;
}

nlohmann::json overpass_to_geojson(const nlohmann::json& response) {
    if (!response.is_object() || !response.contains("elements") || !response["elements"].is_array()) {
        throw ParseError(0, 0, "Overpass response has no elements array");
    }
    std::unordered_map<std::int64_t, nlohmann::json> nodes;
    for (const auto& el : response["elements"]) {
        if (el.value("type", "") == "node" && el.contains("lat") && el.contains("lon")) {
            nodes[el["id"].get<std::int64_t>()] = nlohmann::json::array({el["lon"], el["lat"]});
        }
    }
    nlohmann::json features = nlohmann::json::array();
    for (const auto& el : response["elements"]) {
        const std::string type = el.value("type", "");
        const nlohmann::json tags = el.contains("tags") ? el["tags"] : nlohmann::json::object();
        nlohmann::json properties = tags;
        properties["osm_id"] = el.value("id", std::int64_t{0});
        if (type == "node") {
            if (tags.empty() || !el.contains("lat")) {
                continue;
            }
            properties["osm_type"] = "node";
            features.push_back({{"type", "Feature"},
                                {"properties", properties},
                                {"geometry", {{"type", "Point"}, {"coordinates", {el["lon"], el["lat"]}}}}});
        } else if (type == "way") {
            if (!el.contains("nodes")) {
                continue;
            }
            nlohmann::json coords = nlohmann::json::array();
            for (const auto& id : el["nodes"]) {
                const auto it = nodes.find(id.get<std::int64_t>());
                if (it == nodes.end()) {
                    throw ParseError(0, 0, "way " + std::to_string(el.value("id", 0LL)) + " references missing node");
                }
                coords.push_back(it->second);
            }
            const auto& ids = el["nodes"];
            const bool closed = ids.size() >= 4 && ids.front() == ids.back();
            properties["osm_type"] = "way";
            nlohmann::json geometry;
            if (closed && area_like(tags)) {
                geometry = {{"type", "Polygon"}, {"coordinates", nlohmann::json::array({coords})}};
            } else if (coords.size() >= 2) {
                geometry = {{"type", "LineString"}, {"coordinates", coords}};
            } else {
                continue;
            }
            features.push_back({{"type", "Feature"}, {"properties", properties}, {"geometry", geometry}});
        }
    }
    return {{"type", "FeatureCollection"}, {"features", features}};
}

OverpassTransport http_transport(std::chrono::seconds timeout) {
    return [timeout](const std::string& endpoint, const std::string& query) -> HttpResponse {
        const auto scheme_end = endpoint.find("://");
        const auto path_start = endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
        const std::string host = endpoint.substr(0, path_start);
        const std::string path = path_start == std::string::npos ? "/" : endpoint.substr(path_start);
        httplib::Client client(host);
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_follow_location(true);
        const auto res = client.Post(path, "data=" + form_encode(query), "application/x-www-form-urlencoded");
        if (!res) {
            throw std::runtime_error("request to " + endpoint + " failed: " + httplib::to_string(res.error()));
        }
        return {res->status, res->body};
    };
}

nlohmann::json fetch_overpass(const std::string& endpoint, const BoundingBox& bbox, const FeatureTypeMapping& mapping,
                              const OverpassTransport& transport, const FetchOptions& options) {
    const std::string query = build_overpass_query(bbox, mapping);
    auto backoff = options.initial_backoff;
    std::string last_error;
    for (int attempt = 1; attempt <= options.attempts; ++attempt) {
        HttpResponse res;
        try {
            res = transport(endpoint, query);
        } catch (const std::exception& e) {
            throw FetchError(e.what(), query);
        }
        if (res.status == 200) {
            try {
                return overpass_to_geojson(nlohmann::json::parse(res.body));
            } catch (const std::exception& e) {
                throw FetchError(std::string("unusable Overpass response: ") + e.what(), query);
            }
        }
        last_error = "Overpass returned HTTP " + std::to_string(res.status);
        // 429 is the documented rate limit; 504 means the server is overloaded.
        if (res.status != 429 && res.status != 504) {
            throw FetchError(last_error, query);
        }
        if (attempt < options.attempts) {
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
    throw FetchError(last_error + " after " + std::to_string(options.attempts) + " attempts", query);
}

}  // namespace pml::ingest
