#include "pml/errors.hpp"
#include "pml/mission.hpp"

#include <fstream>
#include <sstream>

namespace pml::mission {

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

void require_file(const fs::path& p, const char* what) {
    if (!fs::is_regular_file(p)) {
        throw ConfigurationError(std::string(what) + " file '" + p.string() + "' does not exist");
    }
}

void read_params(const nlohmann::json& j, hplp::InferenceParams& inference, std::size_t& ensemble_size,
                 unsigned& tiling, std::size_t& workers) {
    ensemble_size = j.value("ensemble_size", ensemble_size);
    inference.sample_count = j.value("samples", inference.sample_count);
    inference.seed = j.value("seed", inference.seed);
    tiling = j.value("tiling", tiling);
    workers = j.value("workers", workers);
    const std::string mode = j.value("mode", "sampling");
    if (mode == "sampling") {
        inference.mode = hplp::InferenceMode::sampling;
    } else if (mode == "exact") {
        inference.mode = hplp::InferenceMode::exact_discrete;
    } else {
        throw ConfigurationError("unknown inference mode '" + mode + "'");
    }
}

void check_counts(std::size_t ensemble_size, const hplp::InferenceParams& inference) {
    if (ensemble_size < 1) {
        throw ConfigurationError("ensemble size must be at least 1");
    }
    if (inference.sample_count < 1) {
        throw ConfigurationError("inference sample count must be at least 1");
    }
}

}  // namespace

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigurationError("cannot read '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json read_json(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigurationError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ConfigurationError("cannot write '" + path.string() + "'");
        }
        out << text;
        if (!out.flush()) {
            throw ConfigurationError("failed writing '" + path.string() + "'");
        }
    }
    fs::rename(tmp, path);
}

void validate(const MissionConfig& config) {
    if (config.maps.empty() && !config.overpass_bbox) {
        throw ConfigurationError("no map source: give GeoJSON files or an Overpass bounding box");
    }
    for (const auto& m : config.maps) {
        require_file(m, "map");
    }
    require_file(config.mapping, "mapping");
    if (config.errors) {
        require_file(*config.errors, "error model");
    }
    require_file(config.rules, "rules");
    try {
        pcm::validate(config.grid);
    } catch (const DomainError& e) {
        throw ConfigurationError(e.what());
    }
    check_counts(config.ensemble_size, config.inference);
}

MissionConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
    MissionConfig c;
    try {
        for (const auto& m : j.value("maps", nlohmann::json::array())) {
            c.maps.push_back(resolve(base_dir, m.get<std::string>()));
        }
        if (j.contains("overpass")) {
            const auto& o = j.at("overpass");
            c.overpass_bbox = ingest::parse_bbox(o.at("bbox").get<std::string>());
            c.overpass_endpoint = o.value("endpoint", c.overpass_endpoint);
        }
        c.mapping = resolve(base_dir, j.at("mapping").get<std::string>());
        if (j.contains("errors")) {
            c.errors = resolve(base_dir, j.at("errors").get<std::string>());
        }
        c.rules = resolve(base_dir, j.at("rules").get<std::string>());
        c.grid = pcm::grid_from_json(j.at("grid"));
        read_params(j, c.inference, c.ensemble_size, c.tiling, c.workers);
        if (j.contains("out")) {
            c.out = resolve(base_dir, j.at("out").get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("invalid mission config: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigurationError(std::string("invalid mission config: ") + e.what());
    }
    return c;
}

MissionRequest load_request(const MissionConfig& config) {
    validate(config);
    MissionRequest r;
    for (const auto& m : config.maps) {
        r.maps.push_back(read_json(m));
    }
    r.mapping = ingest::FeatureTypeMapping::from_json(read_json(config.mapping));
    if (config.overpass_bbox) {
        r.maps.push_back(ingest::fetch_overpass(config.overpass_endpoint, *config.overpass_bbox, r.mapping,
                                                ingest::http_transport()));
    }
    if (config.errors) {
        r.error_model = uncertainty::AffineErrorModel::from_json(read_json(*config.errors));
    }
    r.rules = read_text(config.rules);
    r.grid = config.grid;
    r.ensemble_size = config.ensemble_size;
    r.inference = config.inference;
    r.tiling = config.tiling;
    r.workers = config.workers;
    return r;
}

MissionRequest request_from_json(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ConfigurationError("request body must be a JSON object");
    }
    MissionRequest r;
    try {
        const auto& g = j.at("geojson");
        if (g.is_array()) {
            for (const auto& doc : g) {
                r.maps.push_back(doc);
            }
        } else {
            r.maps.push_back(g);
        }
        r.mapping = ingest::FeatureTypeMapping::from_json(j.at("mapping"));
        if (j.contains("error_model")) {
            r.error_model = uncertainty::AffineErrorModel::from_json(j.at("error_model"));
        }
        r.rules = j.at("rules").get<std::string>();
        r.grid = pcm::grid_from_json(j.at("grid"));
        if (j.contains("params")) {
            read_params(j.at("params"), r.inference, r.ensemble_size, r.tiling, r.workers);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("invalid request: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigurationError(std::string("invalid request: ") + e.what());
    }
    check_counts(r.ensemble_size, r.inference);
    return r;
}

}  // namespace pml::mission
