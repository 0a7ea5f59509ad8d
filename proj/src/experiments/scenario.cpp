#include "pml/errors.hpp"
#include "pml/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

namespace pml::experiments {

std::vector<RegionAssertion> manifest_from_json(const nlohmann::json& j) {
    if (!j.is_array()) {
        throw ConfigurationError("manifest must be a JSON array");
    }
    std::vector<RegionAssertion> out;
    try {
        for (const auto& item : j) {
            RegionAssertion a;
            const auto& region = item.at("region");
            a.r0 = region.at("r0").get<std::size_t>();
            a.c0 = region.at("c0").get<std::size_t>();
            a.r1 = region.at("r1").get<std::size_t>();
            a.c1 = region.at("c1").get<std::size_t>();
            const std::string stat = item.at("stat").get<std::string>();
            if (stat == "mean") {
                a.stat = RegionStat::mean;
            } else if (stat == "min") {
                a.stat = RegionStat::min;
            } else if (stat == "max") {
                a.stat = RegionStat::max;
            } else {
                throw ConfigurationError("unknown manifest stat '" + stat + "'");
            }
            const std::string op = item.at("op").get<std::string>();
            if (op != ">" && op != "<") {
                throw ConfigurationError("manifest op must be \">\" or \"<\"");
            }
            a.op = op[0];
            a.value = item.at("value").get<double>();
            a.label = item.value("label", "");
            out.push_back(std::move(a));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("invalid manifest: ") + e.what());
    }
    return out;
}

void validate(const std::vector<RegionAssertion>& manifest, const pcm::GridSpec& grid) {
    for (const auto& a : manifest) {
        if (a.r0 >= a.r1 || a.c0 >= a.c1 || a.r1 > grid.rows || a.c1 > grid.cols) {
            throw ConfigurationError("manifest region '" + a.label + "' is empty or outside the grid");
        }
    }
}

ScenarioFixture load_scenario(const std::filesystem::path& dir) {
    const auto scenario_path = dir / "scenario.json";
    const auto manifest_path = dir / "manifest.json";
    if (!std::filesystem::is_regular_file(scenario_path)) {
        throw ConfigurationError("scenario file '" + scenario_path.string() + "' is missing");
    }
    if (!std::filesystem::is_regular_file(manifest_path)) {
        throw ConfigurationError("manifest file '" + manifest_path.string() + "' is missing");
    }
    ScenarioFixture f;
    f.dir = dir;
    const auto j = mission::read_json(scenario_path);
    f.name = j.value("name", dir.filename().string());
    f.config = mission::config_from_json(j, dir);
    mission::validate(f.config);
    f.manifest = manifest_from_json(mission::read_json(manifest_path));
    validate(f.manifest, f.config.grid);
    return f;
}

mission::MissionRequest scenario_request(const ScenarioFixture& fixture, const ScenarioOverrides& o) {
    auto request = mission::load_request(fixture.config);
    if (o.rules) {
        request.rules = *o.rules;
    }
    if (o.samples) {
        request.inference.sample_count = *o.samples;
    }
    if (o.seed) {
        request.inference.seed = *o.seed;
    }
    if (o.workers) {
        request.workers = *o.workers;
    }
    if (o.ensemble_size) {
        request.ensemble_size = *o.ensemble_size;
    }
    if (o.tiling) {
        request.tiling = *o.tiling;
    }
    if (o.resolution) {
        request.grid = request.grid.with_resolution(*o.resolution, *o.resolution);
    }
    return request;
}

double region_stat(const landscape::MissionLandscape& l, const RegionAssertion& a) {
    if (a.r0 >= a.r1 || a.c0 >= a.c1 || a.r1 > l.grid.rows || a.c1 > l.grid.cols) {
        throw DomainError("region outside the landscape");
    }
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t r = a.r0; r < a.r1; ++r) {
        for (std::size_t c = a.c0; c < a.c1; ++c) {
            const double v = l.at(r, c);
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    switch (a.stat) {
        case RegionStat::mean: return sum / static_cast<double>((a.r1 - a.r0) * (a.c1 - a.c0));
        case RegionStat::min: return lo;
        case RegionStat::max: return hi;
    }
    return sum;
}

std::vector<AssertionResult> evaluate_manifest(const landscape::MissionLandscape& l,
                                               const std::vector<RegionAssertion>& manifest) {
    std::vector<AssertionResult> out;
    for (const auto& a : manifest) {
        const double v = region_stat(l, a);
        out.push_back({a, v, a.op == '>' ? v > a.value : v < a.value});
    }
    return out;
}

bool ScenarioReport::passed() const {
    return std::all_of(results.begin(), results.end(), [](const AssertionResult& r) { return r.passed; });
}

std::string ScenarioReport::to_text() const {
    static const char* stats[] = {"mean", "min", "max"};
    std::string out;
    char buf[256];
    for (const auto& r : results) {
        const auto& a = r.assertion;
        std::snprintf(buf, sizeof buf, "%s %s [%zu,%zu)x[%zu,%zu) %s %c %.4f: observed %.4f\n",
                      r.passed ? "PASS" : "FAIL", a.label.c_str(), a.r0, a.r1, a.c0, a.c1,
                      stats[static_cast<int>(a.stat)], a.op, a.value, r.observed);
        out += buf;
    }
    return out;
}

ScenarioReport run_scenario(const ScenarioFixture& fixture, const ScenarioOverrides& overrides) {
    if (overrides.resolution && !fixture.manifest.empty() &&
        (*overrides.resolution != fixture.config.grid.rows || *overrides.resolution != fixture.config.grid.cols)) {
        throw ConfigurationError("manifest regions are defined at the scenario resolution");
    }
    const auto request = scenario_request(fixture, overrides);
    ScenarioReport report;
    report.landscape = mission::compute_landscape(request);
    report.results = evaluate_manifest(report.landscape, fixture.manifest);
    return report;
}

}  // namespace pml::experiments
