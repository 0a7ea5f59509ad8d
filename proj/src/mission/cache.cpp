#include "pml/errors.hpp"
#include "pml/hash.hpp"
#include "pml/mission.hpp"

namespace pml::mission {

ClauseCache::ClauseCache(fs::path dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
}

fs::path ClauseCache::path_for(const std::string& key) const {
    return dir_ / ("clauses-" + key + ".json");
}

std::optional<pcm::DistributionalClauseDB> ClauseCache::load(const std::string& key) const {
    const fs::path p = path_for(key);
    if (!fs::is_regular_file(p)) {
        return std::nullopt;
    }
    // A damaged entry is treated as a miss and rebuilt.
    try {
        return pcm::clause_db_from_json(read_json(p));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void ClauseCache::store(const std::string& key, const pcm::DistributionalClauseDB& db) const {
    write_text(path_for(key), pcm::to_json(db).dump());
}

std::string clause_db_key(const MissionRequest& request, const std::vector<std::string>& types) {
    const nlohmann::json key{
        {"maps", request.maps},
        {"mapping", request.mapping.to_json()},
        {"errors", request.error_model.to_json()},
        {"grid", pcm::to_json(request.grid)},
        {"ensemble_size", request.ensemble_size},
        {"seed", request.inference.seed},
        {"types", types},
    };
    return content_hash(key.dump());
}

}  // namespace pml::mission
