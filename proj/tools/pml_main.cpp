#include "pml/errors.hpp"
#include "pml/experiments.hpp"
#include "pml/hplp/parser.hpp"
#include "pml/ingest.hpp"
#include "pml/landscape.hpp"
#include "pml/mission.hpp"
#include "pml/service.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace pml;

namespace {

struct MissionFlags {
    std::string config;
    std::vector<std::string> maps;
    std::string mapping;
    std::string errors;
    std::string rules;
    std::vector<double> origin;
    std::vector<double> extent;
    std::vector<std::size_t> resolution;
    std::optional<std::size_t> ensemble;
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> tiling;
    std::optional<std::size_t> workers;
    std::string cache_dir;

    void add_to(CLI::App* app) {
        app->add_option("--config", config, "Scenario-style JSON config; flags override its fields");
        app->add_option("--map", maps, "GeoJSON FeatureCollection (repeatable)");
        app->add_option("--mapping", mapping, "Tag to type mapping JSON");
        app->add_option("--errors", errors, "Affine error model JSON");
        app->add_option("--rules", rules, "Mission rules file");
        app->add_option("--origin", origin, "lat,lon of the grid center")->delimiter(',')->expected(2);
        app->add_option("--extent", extent, "W,H in meters")->delimiter(',')->expected(2);
        app->add_option("--resolution", resolution, "R,C cells")->delimiter(',')->expected(2);
        app->add_option("--ensemble", ensemble, "Map samples per feature type");
        app->add_option("--samples", samples, "Sampled worlds per cell");
        app->add_option("--seed", seed, "Seed for every random stream");
        app->add_option("--tiling", tiling, "Tiling factor s (4^s tiles)");
        app->add_option("--workers", workers, "Worker threads (0 = all cores)");
        app->add_option("--cache-dir", cache_dir, "Directory for cached clause databases");
    }

    mission::MissionConfig build() const {
        mission::MissionConfig c;
        if (!config.empty()) {
            c = mission::config_from_json(mission::read_json(config), fs::path(config).parent_path());
        }
        if (!maps.empty()) {
            c.maps.assign(maps.begin(), maps.end());
        }
        if (!mapping.empty()) {
            c.mapping = mapping;
        }
        if (!errors.empty()) {
            c.errors = fs::path(errors);
        }
        if (!rules.empty()) {
            c.rules = rules;
        }
        if (!origin.empty()) {
            c.grid.origin = {origin[0], origin[1]};
        }
        if (!extent.empty()) {
            c.grid.width = extent[0];
            c.grid.height = extent[1];
        }
        if (!resolution.empty()) {
            c.grid.rows = resolution[0];
            c.grid.cols = resolution[1];
        }
        if (ensemble) {
            c.ensemble_size = *ensemble;
        }
        if (samples) {
            c.inference.sample_count = *samples;
        }
        if (seed) {
            c.inference.seed = *seed;
        }
        if (tiling) {
            c.tiling = *tiling;
        }
        if (workers) {
            c.workers = *workers;
        }
        if (!cache_dir.empty()) {
            c.cache_dir = fs::path(cache_dir);
        }
        return c;
    }
};

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        mission::write_text(path, text);
    }
}

std::vector<unsigned> to_unsigned(const std::vector<std::size_t>& v) {
    return {v.begin(), v.end()};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Probabilistic mission landscapes from maps and mission rules"};
    app.require_subcommand(1);

    // compute
    MissionFlags compute_flags;
    std::string out_path;
    std::string png_path;
    std::string csv_path;
    auto* compute = app.add_subcommand("compute", "Run the full pipeline and write a landscape");
    compute_flags.add_to(compute);
    compute->add_option("--out", out_path, "PML JSON output")->required();
    compute->add_option("--png", png_path, "Heatmap PNG output");
    compute->add_option("--csv", csv_path, "CSV output r,c,lat,lon,probability");

    // clauses
    MissionFlags clause_flags;
    std::vector<std::size_t> cell;
    auto* clauses = app.add_subcommand("clauses", "Print the distributional clauses emitted for one cell");
    clause_flags.add_to(clauses);
    clauses->add_option("--cell", cell, "r,c")->delimiter(',')->expected(2)->required();

    // parse
    std::string parse_rules;
    auto* parse = app.add_subcommand("parse", "Check a rules file and print diagnostics as JSON");
    parse->add_option("--rules", parse_rules, "Mission rules file")->required();

    // bench-tiling
    MissionFlags bench_flags;
    std::vector<std::size_t> s_values{0, 1, 2, 3};
    std::size_t bench_workers = 0;
    std::string bench_out;
    auto* bench = app.add_subcommand("bench-tiling", "Time compute_pml for several tiling factors");
    bench->add_option("--config", bench_flags.config, "Scenario-style JSON config")->required();
    bench->add_option("--resolution", bench_flags.resolution, "R,C cells")->delimiter(',')->expected(2);
    bench->add_option("--samples", bench_flags.samples, "Sampled worlds per cell");
    bench->add_option("--s", s_values, "Tiling factors")->delimiter(',');
    bench->add_option("--workers", bench_workers, "Worker threads (0 = all cores)");
    bench->add_option("--out", bench_out, "CSV output (default stdout)");

    // interp-error
    std::string interp_scenario;
    std::vector<std::size_t> resolutions{25, 50, 100, 150};
    std::size_t reference = 200;
    std::optional<std::size_t> interp_samples;
    std::optional<std::size_t> interp_workers;
    std::string interp_out;
    auto* interp = app.add_subcommand("interp-error", "MSE of upsampled coarse landscapes against a reference");
    interp->add_option("--scenario", interp_scenario, "Scenario directory")->required();
    interp->add_option("--resolutions", resolutions, "Square resolutions")->delimiter(',');
    interp->add_option("--reference", reference, "Reference resolution");
    interp->add_option("--samples", interp_samples, "Sampled worlds per cell");
    interp->add_option("--workers", interp_workers, "Worker threads");
    interp->add_option("--out", interp_out, "CSV output (default stdout)");

    // scenario
    std::string scenario_dir;
    std::string scenario_out;
    auto* scenario = app.add_subcommand("scenario", "Run a fixture scenario and check its manifest");
    scenario->add_option("--scenario", scenario_dir, "Scenario directory")->required();
    scenario->add_option("--out", scenario_out, "PML JSON output");

    // fetch
    std::string bbox_text;
    std::string fetch_mapping;
    std::string endpoint = "https://overpass-api.de/api/interpreter";
    std::string fetch_out;
    bool print_query = false;
    auto* fetch = app.add_subcommand("fetch", "Download typed features from Overpass as GeoJSON");
    fetch->add_option("--bbox", bbox_text, "south,west,north,east")->required();
    fetch->add_option("--mapping", fetch_mapping, "Tag to type mapping JSON")->required();
    fetch->add_option("--endpoint", endpoint, "Overpass interpreter URL");
    fetch->add_option("--out", fetch_out, "GeoJSON output (default stdout)");
    fetch->add_flag("--print-query", print_query, "Print the Overpass QL query and exit");

    // serve
    service::ServiceOptions serve_options;
    std::string fixtures;
    std::string serve_cache;
    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--host", serve_options.host, "Bind address");
    serve->add_option("--port", serve_options.port, "Port");
    serve->add_option("--fixtures", fixtures, "Directory of scenarios addressable by map_ref");
    serve->add_option("--cache-dir", serve_cache, "Directory for cached clause databases");
    serve->add_option("--workers", serve_options.workers, "Worker threads per job (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (compute->parsed()) {
            auto config = compute_flags.build();
            config.out = out_path;
            if (!png_path.empty()) {
                config.png = fs::path(png_path);
            }
            if (!csv_path.empty()) {
                config.csv = fs::path(csv_path);
            }
            const auto l = mission::run_mission(config);
            std::fprintf(stderr, "wrote %zux%zu landscape to %s\n", l.grid.rows, l.grid.cols, out_path.c_str());
        } else if (clauses->parsed()) {
            const auto request = mission::load_request(clause_flags.build());
            const auto program = hplp::parse_program(request.rules);
            const auto db = mission::build_clause_db(request, program);
            std::cout << pcm::emit_clauses_text(db, cell[0], cell[1]);
        } else if (parse->parsed()) {
            const auto report = service::parse_report(mission::read_text(parse_rules));
            std::cout << report.dump(2) << "\n";
            return report["ok"].get<bool>() ? 0 : 1;
        } else if (bench->parsed()) {
            bench_flags.workers = bench_workers;
            const auto request = mission::load_request(bench_flags.build());
            const auto program = hplp::parse_program(request.rules);
            const auto db = mission::build_clause_db(request, program);
            const auto report =
                landscape::benchmark_tiling(program, db, request.inference, to_unsigned(s_values), bench_workers);
            emit(bench_out, report.to_csv());
            std::fprintf(stderr, "workers: %zu, hardware threads: %u\n", report.worker_count,
                         std::thread::hardware_concurrency());
        } else if (interp->parsed()) {
            const auto fixture = experiments::load_scenario(interp_scenario);
            experiments::ScenarioOverrides o;
            o.samples = interp_samples;
            o.workers = interp_workers;
            const auto study = experiments::run_interp_study(fixture, resolutions, reference, o);
            emit(interp_out, study.to_csv());
        } else if (scenario->parsed()) {
            const auto fixture = experiments::load_scenario(scenario_dir);
            const auto report = experiments::run_scenario(fixture);
            std::cout << report.to_text();
            if (!scenario_out.empty()) {
                mission::write_text(scenario_out, landscape::to_json(report.landscape).dump() + "\n");
            }
            return report.passed() ? 0 : 1;
        } else if (fetch->parsed()) {
            const auto bbox = ingest::parse_bbox(bbox_text);
            const auto mapping = ingest::FeatureTypeMapping::from_json(mission::read_json(fetch_mapping));
            if (print_query) {
                std::cout << ingest::build_overpass_query(bbox, mapping);
                return 0;
            }
            const auto doc = ingest::fetch_overpass(endpoint, bbox, mapping, ingest::http_transport());
            emit(fetch_out, doc.dump(2) + "\n");
        } else if (serve->parsed()) {
            if (!fixtures.empty()) {
                serve_options.fixture_root = fs::path(fixtures);
            }
            if (!serve_cache.empty()) {
                serve_options.cache_dir = fs::path(serve_cache);
            }
            service::Service svc(serve_options);
            std::fprintf(stderr, "listening on %s:%d\n", serve_options.host.c_str(), serve_options.port);
            if (!svc.listen()) {
                std::fprintf(stderr, "error: cannot listen on %s:%d\n", serve_options.host.c_str(),
                             serve_options.port);
                return 2;
            }
        }
    } catch (const ParseError& e) {
        std::fprintf(stderr, "rules: %s\n", e.what());
        return 1;
    } catch (const ingest::FetchError& e) {
        std::fprintf(stderr, "fetch: %s\nquery:\n%s", e.what(), e.query().c_str());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
