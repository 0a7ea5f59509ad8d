#include "pml/errors.hpp"
#include "pml/ingest.hpp"

#include <algorithm>
#include <set>

namespace pml::ingest {

namespace {

std::optional<std::string> string_at(const nlohmann::json& obj, const std::string& key) {
    if (!obj.is_object()) {
        return std::nullopt;
    }
    const auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        return std::nullopt;
    }
    return it->get<std::string>();
}

}  // namespace

FeatureTypeMapping::FeatureTypeMapping(std::vector<MappingEntry> entries) : entries_(std::move(entries)) {
    std::set<std::string> matches;
    for (const auto& e : entries_) {
        if (e.key.empty() || e.value.empty() || e.type_tag.empty()) {
            throw ConfigurationError("mapping entries need a key=value match and a type");
        }
        if (!matches.insert(e.match()).second) {
            throw ConfigurationError("mapping lists '" + e.match() + "' twice");
        }
        if (e.line_width && !(*e.line_width > 0.0)) {
            throw ConfigurationError("line width for '" + e.type_tag + "' must be positive");
        }
    }
    for (const auto& a : entries_) {
        for (const auto& b : entries_) {
            if (a.type_tag == b.type_tag && a.line_width && b.line_width && *a.line_width != *b.line_width) {
                throw ConfigurationError("conflicting line widths for type '" + a.type_tag + "'");
            }
        }
    }
}

FeatureTypeMapping FeatureTypeMapping::from_json(const nlohmann::json& j) {
    if (!j.is_array()) {
        throw ConfigurationError("mapping config must be a JSON array");
    }
    std::vector<MappingEntry> entries;
    for (const auto& item : j) {
        const auto match = string_at(item, "match");
        const auto type = string_at(item, "type");
        if (!match || !type) {
            throw ConfigurationError("mapping entry needs string fields 'match' and 'type'");
        }
        const auto eq = match->find('=');
        if (eq == std::string::npos) {
            throw ConfigurationError("mapping match '" + *match + "' is not of the form key=value");
        }
        MappingEntry e{match->substr(0, eq), match->substr(eq + 1), *type, std::nullopt};
        if (item.contains("line_width_m")) {
            if (!item["line_width_m"].is_number()) {
                throw ConfigurationError("line_width_m must be a number");
            }
            e.line_width = item["line_width_m"].get<double>();
        }
        entries.push_back(std::move(e));
    }
    return FeatureTypeMapping(std::move(entries));
}

nlohmann::json FeatureTypeMapping::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : entries_) {
        nlohmann::json item{{"match", e.match()}, {"type", e.type_tag}};
        if (e.line_width) {
            item["line_width_m"] = *e.line_width;
        }
        out.push_back(std::move(item));
    }
    return out;
}

std::vector<std::string> FeatureTypeMapping::type_tags() const {
    std::set<std::string> tags;
    for (const auto& e : entries_) {
        tags.insert(e.type_tag);
    }
    return {tags.begin(), tags.end()};
}

double FeatureTypeMapping::line_width(const std::string& type_tag) const {
    for (const auto& e : entries_) {
        if (e.type_tag == type_tag && e.line_width) {
            return *e.line_width;
        }
    }
    return geo::kDefaultLineWidth;
}

bool FeatureTypeMapping::knows(const std::string& type_tag) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [&](const MappingEntry& e) { return e.type_tag == type_tag; });
}

std::optional<std::string> FeatureTypeMapping::classify(const nlohmann::json& properties) const {
    if (const auto type = string_at(properties, "type"); type && knows(*type)) {
        return type;
    }
    const nlohmann::json* tags = nullptr;
    if (properties.is_object() && properties.contains("tags") && properties["tags"].is_object()) {
        tags = &properties["tags"];
    }
    for (const auto& e : entries_) {
        if (string_at(properties, e.key) == e.value || (tags && string_at(*tags, e.key) == e.value)) {
            return e.type_tag;
        }
    }
    return std::nullopt;
}

}  // namespace pml::ingest
