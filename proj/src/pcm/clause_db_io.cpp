#include "pml/errors.hpp"
#include "pml/pcm.hpp"

#include <cmath>
#include <limits>

namespace pml::pcm {

void validate(const DistributionalClauseDB& db) {
    validate(db.grid);
    const std::size_t n = db.grid.cell_count();
    for (const auto& [tag, raster] : db.distance) {
        if (raster.cells.size() != n) {
            throw ConfigurationError("distance raster '" + tag + "' does not match the grid");
        }
        for (const auto& g : raster.cells) {
            if (!(g.variance >= 0.0) || std::isnan(g.mean)) {
                throw ConfigurationError("distance raster '" + tag + "' holds an invalid distribution");
            }
        }
    }
    for (const auto& [tag, raster] : db.over) {
        if (raster.size() != n) {
            throw ConfigurationError("over raster '" + tag + "' does not match the grid");
        }
        for (const double p : raster) {
            if (!(p >= 0.0 && p <= 1.0)) {
                throw ConfigurationError("over raster '" + tag + "' holds a value outside [0, 1]");
            }
        }
    }
}

// JSON has no infinity, so rasters of empty types are stored without cells.
nlohmann::json to_json(const DistributionalClauseDB& db) {
    nlohmann::json types = nlohmann::json::object();
    for (const auto& [tag, raster] : db.distance) {
        nlohmann::json entry;
        entry["empty"] = raster.empty;
        if (!raster.empty) {
            nlohmann::json mean = nlohmann::json::array();
            nlohmann::json variance = nlohmann::json::array();
            for (const auto& g : raster.cells) {
                mean.push_back(g.mean);
                variance.push_back(g.variance);
            }
            entry["distance_mean"] = std::move(mean);
            entry["distance_variance"] = std::move(variance);
        }
        const auto it = db.over.find(tag);
        if (it != db.over.end()) {
            entry["over"] = it->second;
        }
        types[tag] = std::move(entry);
    }
    for (const auto& [tag, raster] : db.over) {
        if (!types.contains(tag)) {
            types[tag] = {{"empty", false}, {"over", raster}};
        }
    }
    return {{"grid", to_json(db.grid)}, {"ensemble_size", db.ensemble_size}, {"types", std::move(types)}};
}

DistributionalClauseDB clause_db_from_json(const nlohmann::json& j) {
    DistributionalClauseDB db;
    try {
        db.grid = grid_from_json(j.at("grid"));
        db.ensemble_size = j.value("ensemble_size", std::size_t{0});
        const std::size_t n = db.grid.cell_count();
        for (const auto& [tag, entry] : j.at("types").items()) {
            const bool empty = entry.value("empty", false);
            if (empty) {
                DistanceRaster raster;
                raster.empty = true;
                raster.cells.assign(n, {std::numeric_limits<double>::infinity(), 0.0});
                db.distance[tag] = std::move(raster);
            } else if (entry.contains("distance_mean")) {
                const auto mean = entry.at("distance_mean").get<std::vector<double>>();
                const auto variance = entry.at("distance_variance").get<std::vector<double>>();
                if (mean.size() != variance.size()) {
                    throw ConfigurationError("distance raster '" + tag + "' has mismatched arrays");
                }
                DistanceRaster raster;
                for (std::size_t i = 0; i < mean.size(); ++i) {
                    raster.cells.push_back({mean[i], variance[i]});
                }
                db.distance[tag] = std::move(raster);
            }
            if (entry.contains("over")) {
                db.over[tag] = entry.at("over").get<std::vector<double>>();
            } else if (empty) {
                db.over[tag].assign(n, 0.0);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("invalid clause database: ") + e.what());
    }
    validate(db);
    return db;
}

}  // namespace pml::pcm
