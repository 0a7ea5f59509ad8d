#pragma once

#include "pml/hplp/inference.hpp"
#include "pml/ingest.hpp"
#include "pml/landscape.hpp"
#include "pml/pcm.hpp"
#include "pml/uncertainty.hpp"

#include <json.hpp>

#include <exception>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pml::mission {

namespace fs = std::filesystem;

// Failure of one pipeline stage; what() reads "<stage>: <message>".
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& message, std::exception_ptr cause = nullptr)
        : std::runtime_error(stage + ": " + message), stage_(std::move(stage)), cause_(std::move(cause)) {}
    const std::string& stage() const noexcept { return stage_; }
    const std::exception_ptr& cause() const noexcept { return cause_; }

private:
    std::string stage_;
    std::exception_ptr cause_;
};

/**
 * Everything needed to compute a landscape, held in memory. The CLI fills it
 * from files, the HTTP service from request bodies.
 */
struct MissionRequest {
    std::vector<nlohmann::json> maps;  // GeoJSON FeatureCollections
    ingest::FeatureTypeMapping mapping;
    uncertainty::AffineErrorModel error_model = uncertainty::AffineErrorModel::exact();
    std::string rules;
    pcm::GridSpec grid;
    std::size_t ensemble_size = 100;
    hplp::InferenceParams inference;
    unsigned tiling = 0;
    std::size_t workers = 0;
};

// File-based configuration; relative paths resolve against `base_dir`.
struct MissionConfig {
    std::vector<fs::path> maps;
    std::optional<ingest::BoundingBox> overpass_bbox;
    std::string overpass_endpoint = "https://overpass-api.de/api/interpreter";
    fs::path mapping;
    std::optional<fs::path> errors;
    fs::path rules;
    pcm::GridSpec grid;
    std::size_t ensemble_size = 100;
    hplp::InferenceParams inference;
    unsigned tiling = 0;
    std::size_t workers = 0;
    fs::path out;
    std::optional<fs::path> png;
    std::optional<fs::path> csv;
    std::optional<fs::path> cache_dir;
};

void validate(const MissionConfig& config);

// Reads a scenario-style JSON config; paths are resolved relative to `base_dir`.
MissionConfig config_from_json(const nlohmann::json& j, const fs::path& base_dir);

std::string read_text(const fs::path& path);
nlohmann::json read_json(const fs::path& path);

// Loads every file referenced by the config (and fetches Overpass data if a
// bbox is given).
MissionRequest load_request(const MissionConfig& config);

// Request parts from JSON payloads (the HTTP surface).
MissionRequest request_from_json(const nlohmann::json& j);

// Content-addressed store of clause databases.
class ClauseCache {
public:
    explicit ClauseCache(fs::path dir);

    std::optional<pcm::DistributionalClauseDB> load(const std::string& key) const;
    // Write to a temporary file, then rename over the target.
    void store(const std::string& key, const pcm::DistributionalClauseDB& db) const;
    fs::path path_for(const std::string& key) const;

private:
    fs::path dir_;
};

// Key over everything the clause database depends on (maps, mapping, error
// model, grid, ensemble size, seed and referenced types), but not the rules.
std::string clause_db_key(const MissionRequest& request, const std::vector<std::string>& types);

struct StageTimings {
    double clause_db_seconds = 0.0;
    double inference_seconds = 0.0;
    bool clause_db_cached = false;
};

// Parse, ingest, sample, build clauses and infer.
landscape::MissionLandscape compute_landscape(const MissionRequest& request, const ClauseCache* cache = nullptr,
                                              const landscape::ComputeOptions& options = {},
                                              StageTimings* timings = nullptr);

// The clause database stage on its own.
pcm::DistributionalClauseDB build_clause_db(const MissionRequest& request, const hplp::MissionProgram& program,
                                            const ClauseCache* cache = nullptr, bool* cache_hit = nullptr);

// Feature types referenced by `distance`/`over` atoms in the program.
std::vector<std::string> referenced_types(const hplp::MissionProgram& program);

// Full pipeline from a config; writes PML JSON and optional PNG/CSV. On any
// error, outputs written so far are removed and a StageError is thrown.
landscape::MissionLandscape run_mission(const MissionConfig& config);

// Atomic text write (temporary file + rename).
void write_text(const fs::path& path, const std::string& text);

}  // namespace pml::mission
