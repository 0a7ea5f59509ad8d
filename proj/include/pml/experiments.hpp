#pragma once

#include "pml/landscape.hpp"
#include "pml/mission.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pml::experiments {

enum class RegionStat { mean, min, max };

// Half-open cell region [r0, r1) x [c0, c1) at the scenario resolution.
struct RegionAssertion {
    std::size_t r0 = 0;
    std::size_t c0 = 0;
    std::size_t r1 = 0;
    std::size_t c1 = 0;
    RegionStat stat = RegionStat::mean;
    char op = '>';  // '>' or '<'
    double value = 0.0;
    std::string label;
};

std::vector<RegionAssertion> manifest_from_json(const nlohmann::json& j);
void validate(const std::vector<RegionAssertion>& manifest, const pcm::GridSpec& grid);

struct ScenarioFixture {
    std::string name;
    std::filesystem::path dir;
    mission::MissionConfig config;
    std::vector<RegionAssertion> manifest;
};

// Reads <dir>/scenario.json and <dir>/manifest.json.
ScenarioFixture load_scenario(const std::filesystem::path& dir);

struct ScenarioOverrides {
    std::optional<std::string> rules;
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::size_t> ensemble_size;
    std::optional<unsigned> tiling;
    std::optional<std::size_t> resolution;  // square grid
};

mission::MissionRequest scenario_request(const ScenarioFixture& fixture, const ScenarioOverrides& overrides = {});

double region_stat(const landscape::MissionLandscape& l, const RegionAssertion& region);

struct AssertionResult {
    RegionAssertion assertion;
    double observed = 0.0;
    bool passed = false;
};

struct ScenarioReport {
    landscape::MissionLandscape landscape;
    std::vector<AssertionResult> results;

    bool passed() const;
    std::string to_text() const;
};

std::vector<AssertionResult> evaluate_manifest(const landscape::MissionLandscape& l,
                                               const std::vector<RegionAssertion>& manifest);

ScenarioReport run_scenario(const ScenarioFixture& fixture, const ScenarioOverrides& overrides = {});

struct InterpRow {
    std::size_t resolution = 0;
    double mse = 0.0;
};

struct InterpStudy {
    std::vector<InterpRow> rows;
    landscape::MissionLandscape reference;
    std::string to_csv() const;
};

InterpStudy run_interp_study(const ScenarioFixture& fixture, const std::vector<std::size_t>& resolutions,
                             std::size_t reference_resolution, const ScenarioOverrides& overrides = {});

// True when the sequence never rises by more than `tolerance` (relative)
// and rises at most once.
bool non_increasing_with_tolerance(const std::vector<double>& values, double tolerance);

}  // namespace pml::experiments
