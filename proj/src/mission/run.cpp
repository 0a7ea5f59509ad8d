#include "pml/errors.hpp"
#include "pml/hplp/parser.hpp"
#include "pml/mission.hpp"

#include <chrono>
#include <set>

namespace pml::mission {

namespace {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(name, e.what(), std::current_exception());
    }
}

void collect_types(const hplp::Term& t, std::set<std::string>& out) {
    if (t.kind != hplp::Term::Kind::compound) {
        return;
    }
    if ((t.name == "distance" || t.name == "over") && t.args.size() == 3 &&
        t.args[2].kind == hplp::Term::Kind::atom) {
        out.insert(t.args[2].name);
    }
    for (const auto& a : t.args) {
        collect_types(a, out);
    }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<std::string> referenced_types(const hplp::MissionProgram& program) {
    std::set<std::string> types;
    for (const auto& s : program.statements) {
        if (const auto* rule = std::get_if<hplp::Rule>(&s)) {
            for (const auto& conj : rule->body) {
                for (const auto& lit : conj) {
                    collect_types(lit.left, types);
                    collect_types(lit.right, types);
                }
            }
        } else if (const auto* q = std::get_if<hplp::Query>(&s)) {
            collect_types(q->atom, types);
        }
    }
    return {types.begin(), types.end()};
}

pcm::DistributionalClauseDB build_clause_db(const MissionRequest& request, const hplp::MissionProgram& program,
                                            const ClauseCache* cache, bool* cache_hit) {
    const auto types = referenced_types(program);
    const std::string key = clause_db_key(request, types);
    if (cache) {
        if (auto db = cache->load(key)) {
            if (cache_hit) {
                *cache_hit = true;
            }
            return *db;
        }
    }
    if (cache_hit) {
        *cache_hit = false;
    }

    std::vector<ingest::MapBundle> bundles;
    for (const auto& doc : request.maps) {
        bundles.push_back(stage("ingest", [&] { return ingest::load_geojson(doc, request.mapping, request.grid.origin); }));
    }
    const ingest::MapBundle bundle = ingest::merge(bundles);

    return stage("clauses", [&] {
        pcm::ClauseDbRequest req;
        const std::set<std::string> wanted(types.begin(), types.end());
        for (const auto& set : bundle.feature_sets) {
            if (wanted.contains(set.type_tag)) {
                req.feature_sets.push_back(set);
            }
        }
        // Types the mapping knows but the map lacks get the empty-set sentinel;
        // unknown names are left out so specialization reports them.
        for (const auto& t : types) {
            if (request.mapping.knows(t)) {
                req.declared_types.push_back(t);
            }
        }
        req.error_model = request.error_model;
        req.ensemble_size = request.ensemble_size;
        req.seed = request.inference.seed;
        req.grid = request.grid;
        auto db = pcm::build_clause_db(req);
        if (cache) {
            cache->store(key, db);
        }
        return db;
    });
}

landscape::MissionLandscape compute_landscape(const MissionRequest& request, const ClauseCache* cache,
                                              const landscape::ComputeOptions& options, StageTimings* timings) {
    const auto program = stage("rules", [&] { return hplp::parse_program(request.rules); });
    stage("rules", [&] { return landscape::landscape_query(program); });

    auto start = std::chrono::steady_clock::now();
    bool hit = false;
    const auto db = build_clause_db(request, program, cache, &hit);
    if (timings) {
        timings->clause_db_seconds = seconds_since(start);
        timings->clause_db_cached = hit;
    }

    start = std::chrono::steady_clock::now();
    auto compute_options = options;
    if (compute_options.worker_count == 0) {
        compute_options.worker_count = request.workers;
    }
    auto result = stage("inference", [&] {
        return landscape::compute_pml(program, db, request.inference, landscape::split(request.grid, request.tiling),
                                      compute_options);
    });
    if (timings) {
        timings->inference_seconds = seconds_since(start);
    }
    return result;
}

landscape::MissionLandscape run_mission(const MissionConfig& config) {
    const MissionRequest request = stage("config", [&] { return load_request(config); });
    std::optional<ClauseCache> cache;
    if (config.cache_dir) {
        cache.emplace(*config.cache_dir);
    }
    auto result = compute_landscape(request, cache ? &*cache : nullptr);

    std::vector<fs::path> written;
    try {
        stage("output", [&] {
            if (!config.out.empty()) {
                write_text(config.out, landscape::to_json(result).dump() + "\n");
                written.push_back(config.out);
            }
            if (config.csv) {
                write_text(*config.csv, landscape::to_csv(result));
                written.push_back(*config.csv);
            }
            if (config.png) {
                if (config.png->has_parent_path()) {
                    fs::create_directories(config.png->parent_path());
                }
                written.push_back(*config.png);
                landscape::write_png(result, *config.png, 4);
            }
            return 0;
        });
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) {
            fs::remove(p, ec);
        }
        throw;
    }
    return result;
}

}  // namespace pml::mission
