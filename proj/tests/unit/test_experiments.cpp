#include "pml/errors.hpp"
#include "pml/experiments.hpp"
#include "pml/hplp/parser.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace pml;
using namespace pml::experiments;

namespace {

ScenarioFixture fixture(const std::string& name) {
    return load_scenario(test_support::kFixtures / name);
}

std::string crossing_rules(const std::string& green) {
    auto rules = mission::read_text(test_support::kFixtures / "crossing/rules.pl");
    const std::string from = "0.5::green_signal.";
    const auto pos = rules.find(from);
    REQUIRE(pos != std::string::npos);
    return rules.replace(pos, from.size(), green + "::green_signal.");
}

landscape::MissionLandscape from_values(std::size_t rows, std::size_t cols, std::vector<double> v) {
    landscape::MissionLandscape l;
    l.grid = {{0, 0}, 10.0, 10.0, rows, cols};
    l.values = std::move(v);
    return l;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("every shipped scenario satisfies its manifest") {
    for (const auto* name : {"park", "bay", "crossing", "rails"}) {
        CAPTURE(name);
        const auto f = fixture(name);
        CHECK(f.name == name);
        CHECK(f.manifest.size() >= 3);
        const auto report = run_scenario(f);
        INFO(report.to_text());
        CHECK(report.passed());
    }
}

TEST_CASE("crossing landscape is monotone in the signal probability") {
    const auto f = fixture("crossing");
    ScenarioOverrides red;
    red.rules = crossing_rules("0.0");
    ScenarioOverrides green;
    green.rules = crossing_rules("1.0");
    const auto never = mission::compute_landscape(scenario_request(f, red));
    const auto always = mission::compute_landscape(scenario_request(f, green));
    // Identical random streams; the signal only enables extra derivations.
    for (std::size_t i = 0; i < never.values.size(); ++i) {
        CHECK(always.values[i] >= never.values[i]);
    }
    const RegionAssertion crossing{23, 23, 27, 27, RegionStat::mean, '>', 0.0, "crossing"};
    CHECK(region_stat(always, crossing) > region_stat(never, crossing) + 0.5);
}

TEST_CASE("constant program interpolates without error") {
    ScenarioOverrides o;
    o.rules = "registered.\nlandscape(R, C) :- registered.\nquery(landscape(R, C)).\n";
    o.samples = 10;
    const auto study = run_interp_study(fixture("park"), {4, 8, 12}, 16, o);
    REQUIRE(study.rows.size() == 3);
    for (const auto& row : study.rows) {
        CHECK(row.mse == 0.0);
    }
    CHECK(study.reference.grid.rows == 16);
    CHECK(study.to_csv() == "resolution,mse\n4,0\n8,0\n12,0\n");
    CHECK_THROWS_AS(run_interp_study(fixture("park"), {20}, 16, o), DomainError);
    CHECK_THROWS_AS(run_interp_study(fixture("park"), {}, 16, o), DomainError);
}

TEST_CASE("interpolation error shrinks with resolution on a smooth program") {
    // Deterministic operator distance: the landscape is an indicator of a disk
    // and coarse grids blur its boundary.
    ScenarioOverrides o;
    o.rules = "landscape(R, C) :- distance(R, C, operator) < 120.\nquery(landscape(R, C)).\n";
    o.samples = 4;
    o.ensemble_size = 2;
    const auto study = run_interp_study(fixture("park"), {8, 16, 32}, 64, o);
    std::vector<double> errors;
    for (const auto& row : study.rows) errors.push_back(row.mse);
    CHECK(errors[2] < errors[0]);
    CHECK(non_increasing_with_tolerance(errors, 0.1));
}

TEST_CASE("scenario cells agree with high-sample single-cell inference") {
    const auto f = fixture("park");
    const auto request = scenario_request(f);
    const auto program = hplp::parse_program(request.rules);
    const auto db = mission::build_clause_db(request, program);
    auto precise = request.inference;
    precise.sample_count = 100000;
    precise.seed = 12345;
    const auto l = mission::compute_landscape(request);
    for (auto [r, c] : {std::pair{25, 25}, {6, 25}, {5, 30}, {18, 6}, {40, 40}, {10, 12}}) {
        CAPTURE(r);
        CAPTURE(c);
        const double p = landscape::infer_cell(program, db, precise, r, c);
        const double sigma = std::sqrt(std::max(p * (1.0 - p), 1e-4) / 2500.0);
        CHECK(std::abs(l.at(r, c) - p) <= 4.5 * sigma);
    }
}

TEST_CASE("region statistics") {
    const auto l = from_values(2, 3, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
    CHECK(region_stat(l, {0, 0, 2, 3, RegionStat::mean, '>', 0, ""}) == doctest::Approx(0.35));
    CHECK(region_stat(l, {0, 1, 2, 3, RegionStat::min, '>', 0, ""}) == 0.2);
    CHECK(region_stat(l, {1, 0, 2, 2, RegionStat::max, '>', 0, ""}) == 0.5);
    CHECK_THROWS_AS(region_stat(l, {0, 0, 3, 1, RegionStat::mean, '>', 0, ""}), DomainError);

    const auto results = evaluate_manifest(
        l, {{0, 0, 1, 1, RegionStat::mean, '>', 0.05, "a"}, {0, 0, 1, 1, RegionStat::mean, '<', 0.05, "b"}});
    CHECK(results[0].passed);
    CHECK_FALSE(results[1].passed);
}

TEST_CASE("manifest parsing and validation") {
    const auto m = manifest_from_json(nlohmann::json::parse(
        R"([{"label": "x", "region": {"r0": 1, "c0": 2, "r1": 3, "c1": 4}, "stat": "max", "op": "<", "value": 0.5}])"));
    REQUIRE(m.size() == 1);
    CHECK(m[0].stat == RegionStat::max);
    CHECK(m[0].op == '<');
    CHECK(m[0].c1 == 4);
    const pcm::GridSpec g{{0, 0}, 10, 10, 3, 3};
    CHECK_THROWS_AS(validate(m, g), ConfigurationError);
    CHECK_NOTHROW(validate(m, g.with_resolution(3, 4)));
    CHECK_THROWS_AS(manifest_from_json(nlohmann::json::parse(
                        R"([{"label": "x", "region": {"r0": 0, "c0": 0, "r1": 1, "c1": 1}, "stat": "median", "op": ">", "value": 0}])")),
                    ConfigurationError);
    CHECK_THROWS_AS(manifest_from_json(nlohmann::json::parse(
                        R"([{"label": "x", "region": {"r0": 0, "c0": 0, "r1": 1, "c1": 1}, "stat": "mean", "op": "=", "value": 0}])")),
                    ConfigurationError);
    CHECK_THROWS_AS(manifest_from_json(nlohmann::json::object()), ConfigurationError);
    CHECK_THROWS_AS(load_scenario(test_support::kFixtures / "listings"), ConfigurationError);

    ScenarioOverrides o;
    o.resolution = 20;
    CHECK_THROWS_AS(run_scenario(fixture("rails"), o), ConfigurationError);
}

TEST_CASE("non-increasing with tolerance") {
    CHECK(non_increasing_with_tolerance({4, 3, 2, 1}, 0.1));
    CHECK(non_increasing_with_tolerance({4, 3, 3.2, 1}, 0.1));
    CHECK_FALSE(non_increasing_with_tolerance({4, 3, 3.5, 1}, 0.1));
    CHECK_FALSE(non_increasing_with_tolerance({4, 3, 3.1, 3, 3.1}, 0.1));
    CHECK(non_increasing_with_tolerance({}, 0.0));
}

}
