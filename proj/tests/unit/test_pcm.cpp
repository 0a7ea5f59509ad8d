#include "pml/errors.hpp"
#include "pml/hplp/inference.hpp"
#include "pml/hplp/parser.hpp"
#include "pml/pcm.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace pml;
using namespace pml::pcm;
using uncertainty::AffineErrorModel;
using uncertainty::GaussianParams;

namespace {

const GridSpec kGrid{{49.0069, 8.4037}, 100.0, 60.0, 6, 10};

geo::TypedFeatureSet point_set(const std::string& tag, geo::CartesianLocation p) {
    return {tag, {geo::Geometry::point(p)}, 4.0};
}

// Survival function of N(mean, variance) via the error function.
double survival(double mean, double variance, double t) {
    return 1.0 - 0.5 * (1.0 + std::erf((t - mean) / std::sqrt(2.0 * variance)));
}

}  // namespace

TEST_SUITE("pcm") {

TEST_CASE("cell centers: row 0 is north, extent centered on the origin") {
    // 10 m cells.
    const auto nw = cell_center(kGrid, 0, 0);
    CHECK(nw.east == doctest::Approx(-45.0));
    CHECK(nw.north == doctest::Approx(25.0));
    const auto se = cell_center(kGrid, 5, 9);
    CHECK(se.east == doctest::Approx(45.0));
    CHECK(se.north == doctest::Approx(-25.0));
    CHECK(kGrid.index(2, 3) == 23);
    CHECK(kGrid.cell_count() == 60);
    CHECK_THROWS_AS(cell_center(kGrid, 6, 0), DomainError);
}

TEST_CASE("grid validation, resolution change and JSON") {
    CHECK_THROWS_AS(validate(GridSpec{{0, 0}, 0.0, 10.0, 1, 1}), DomainError);
    CHECK_THROWS_AS(validate(GridSpec{{0, 0}, 10.0, 10.0, 0, 1}), DomainError);
    const auto fine = kGrid.with_resolution(12, 20);
    CHECK(fine.same_extent(kGrid));
    CHECK(fine.rows == 12);
    CHECK_FALSE(fine == kGrid);
    CHECK(grid_from_json(to_json(kGrid)) == kGrid);
    CHECK(to_json(kGrid).contains("origin_lat"));
    CHECK_THROWS_AS(grid_from_json(nlohmann::json{{"rows", 3}}), ConfigurationError);
}

TEST_CASE("Gaussian exceedance") {
    CHECK(gaussian_exceedance({20.0, 0.5}, 19.0) == doctest::Approx(0.92135).epsilon(1e-4));
    CHECK(gaussian_exceedance({20.0, 0.5}, 30.0) < 1e-6);
    for (double t : {-3.0, 0.0, 1.5, 7.0}) {
        CHECK(gaussian_exceedance({1.0, 4.0}, t) == doctest::Approx(survival(1.0, 4.0, t)).epsilon(1e-12));
    }
    CHECK(gaussian_exceedance({5.0, 0.0}, 4.9) == 1.0);
    CHECK(gaussian_exceedance({5.0, 0.0}, 5.0) == 0.0);
    CHECK(gaussian_exceedance({INFINITY, 0.0}, 1e300) == 1.0);
    CHECK_THROWS_AS(gaussian_exceedance({0.0, -1.0}, 0.0), DomainError);
}

TEST_CASE("distance raster equals moment matching of per-sample distances") {
    const auto set = point_set("tree", {12.0, -7.0});
    const auto e = uncertainty::generate_ensemble(set, AffineErrorModel::gaussian_translation(10.0), 200, 5);
    const auto raster = compute_distance_clauses(e, kGrid);
    CHECK_FALSE(raster.empty);
    for (std::size_t r = 0; r < kGrid.rows; ++r) {
        for (std::size_t c = 0; c < kGrid.cols; ++c) {
            const auto p = cell_center(kGrid, r, c);
            double sum = 0.0, sq = 0.0;
            std::vector<double> d;
            for (const auto& s : e.samples) {
                const auto q = s.features[0].vertices()[0];
                d.push_back(std::hypot(p.east - q.east, p.north - q.north));
                sum += d.back();
            }
            const double mean = sum / static_cast<double>(d.size());
            for (double x : d) sq += (x - mean) * (x - mean);
            const auto& g = raster.cells[kGrid.index(r, c)];
            CHECK(g.mean == doctest::Approx(mean).epsilon(1e-12));
            CHECK(g.variance == doctest::Approx(sq / static_cast<double>(d.size() - 1)).epsilon(1e-9));
        }
    }
}

TEST_CASE("nearest feature per sample") {
    // Two points: distance is to the nearer one.
    geo::TypedFeatureSet set{"pole", {geo::Geometry::point({-40, 0}), geo::Geometry::point({40, 0})}, 2.0};
    const auto e = uncertainty::generate_ensemble(set, AffineErrorModel::exact(), 3, 1);
    const auto d = distance_samples(e, {30.0, 0.0});
    CHECK(d == std::vector<double>{10.0, 10.0, 10.0});
}

TEST_CASE("over raster: polygon interior and buffered lines") {
    geo::TypedFeatureSet park{"park", {geo::Geometry::polygon({{-20, -10}, {20, -10}, {20, 10}, {-20, 10}})}, 5.0};
    const auto over = compute_over_clauses(uncertainty::generate_ensemble(park, AffineErrorModel::exact(), 4, 1), kGrid);
    for (std::size_t r = 0; r < kGrid.rows; ++r) {
        for (std::size_t c = 0; c < kGrid.cols; ++c) {
            const auto p = cell_center(kGrid, r, c);
            const bool inside = std::abs(p.east) <= 20 && std::abs(p.north) <= 10;
            CHECK(over[kGrid.index(r, c)] == (inside ? 1.0 : 0.0));
        }
    }
    // Line along y = 0 with width 12: cells with |north| <= 6 are covered.
    geo::TypedFeatureSet road{"road", {geo::Geometry::line({{-100, 0}, {100, 0}})}, 12.0};
    const auto line_over =
        compute_over_clauses(uncertainty::generate_ensemble(road, AffineErrorModel::exact(), 2, 1), kGrid);
    for (std::size_t r = 0; r < kGrid.rows; ++r) {
        const double north = cell_center(kGrid, r, 0).north;
        CHECK(line_over[kGrid.index(r, 0)] == (std::abs(north) <= 6.0 ? 1.0 : 0.0));
    }
}

TEST_CASE("over raster is a hit fraction under uncertainty") {
    // Translation N(0, 100) of a 10 m wide half-plane-like strip centered at x = 0.
    geo::TypedFeatureSet strip{"strip", {geo::Geometry::polygon({{-5, -1000}, {5, -1000}, {5, 1000}, {-5, 1000}})}, 5.0};
    const GridSpec g{{0, 0}, 10.0, 10.0, 1, 1};
    const auto e = uncertainty::generate_ensemble(strip, AffineErrorModel::gaussian_translation(100.0), 4000, 2);
    // Cell center (0, 0) is covered iff |t_x| <= 5: P = 2 Phi(0.5) - 1.
    const double oracle = 1.0 - 2.0 * survival(0.0, 100.0, 5.0);
    CHECK(compute_over_clauses(e, g)[0] == doctest::Approx(oracle).epsilon(0.05));
}

TEST_CASE("clause database with an empty declared type") {
    ClauseDbRequest req;
    req.feature_sets = {point_set("operator", {0, 0})};
    req.declared_types = {"lake", "operator"};
    req.error_model = AffineErrorModel::exact();
    req.ensemble_size = 5;
    req.grid = kGrid;
    const auto db = build_clause_db(req);
    REQUIRE(db.distance.count("lake") == 1);
    CHECK(db.distance.at("lake").empty);
    for (const auto& g : db.distance.at("lake").cells) {
        CHECK(std::isinf(g.mean));
        CHECK(g.variance == 0.0);
    }
    CHECK(db.over.at("lake") == std::vector<double>(kGrid.cell_count(), 0.0));

    const auto text = emit_clauses_text(db, 0, 0);
    CHECK(text ==
          "distance(r0,c0,lake) ~ normal(inf, 0).\n"
          "distance(r0,c0,operator) ~ normal(" +
              hplp::format_number(std::hypot(45.0, 25.0)) +
              ", 0).\n"
              "0::over(r0,c0,lake).\n"
              "0::over(r0,c0,operator).\n");
    // The emitted text is itself a valid program.
    CHECK(hplp::parse_program(text).statements == emit_clauses(db, 0, 0));

    req.feature_sets.push_back(point_set("operator", {1, 1}));
    CHECK_THROWS_AS(build_clause_db(req), ConfigurationError);
    CHECK_THROWS_AS(emit_clauses(db, 6, 0), DomainError);
}

TEST_CASE("empty types make distance comparisons deterministic") {
    ClauseDbRequest req;
    req.declared_types = {"lake"};
    req.error_model = AffineErrorModel::exact();
    req.ensemble_size = 3;
    req.grid = kGrid;
    const auto db = build_clause_db(req);
    const auto program = hplp::parse_program(
        "far(R, C) :- distance(R, C, lake) > 1000000. near(R, C) :- distance(R, C, lake) < 5.\n"
        "over_lake(R, C) :- over(R, C, lake).\n"
        "query(far(R, C)).");
    const auto facts = emit_clauses(db, 2, 2);
    const auto spec = hplp::specialize(program, facts, {{"R", row_atom(2)}, {"C", col_atom(2)}});
    const auto g = hplp::ground(spec, {false});
    hplp::InferenceParams params{500, 1, hplp::InferenceMode::sampling};
    CHECK(hplp::infer(g, hplp::parse_program("query(far(r2, c2)).").queries()[0], params) == 1.0);
    CHECK(hplp::infer(g, hplp::parse_program("query(near(r2, c2)).").queries()[0], params) == 0.0);
    CHECK(hplp::infer(g, hplp::parse_program("query(over_lake(r2, c2)).").queries()[0], params) == 0.0);
}

TEST_CASE("unknown types raise UnknownAtomError on specialization") {
    ClauseDbRequest req;
    req.feature_sets = {point_set("operator", {0, 0})};
    req.error_model = AffineErrorModel::exact();
    req.ensemble_size = 2;
    req.grid = kGrid;
    const auto db = build_clause_db(req);
    const auto program = hplp::parse_program("q(R, C) :- distance(R, C, river) < 10. query(q(R, C)).");
    CHECK_THROWS_AS(hplp::specialize(program, emit_clauses(db, 0, 0), {{"R", row_atom(0)}, {"C", col_atom(0)}}),
                    UnknownAtomError);
}

TEST_CASE("clause database JSON round trip is exact") {
    ClauseDbRequest req;
    req.feature_sets = {point_set("operator", {3, 4}),
                        {"road", {geo::Geometry::line({{-50, 10}, {50, -20}})}, 8.0}};
    req.declared_types = {"lake"};
    req.error_model = AffineErrorModel::gaussian_translation(10.0);
    req.ensemble_size = 30;
    req.seed = 99;
    req.grid = kGrid;
    const auto db = build_clause_db(req);
    validate(db);
    const auto back = clause_db_from_json(nlohmann::json::parse(to_json(db).dump()));
    CHECK(back.grid == db.grid);
    CHECK(back.ensemble_size == db.ensemble_size);
    REQUIRE(back.distance.size() == db.distance.size());
    for (const auto& [tag, raster] : db.distance) {
        CHECK(back.distance.at(tag).empty == raster.empty);
        CHECK(back.distance.at(tag).cells == raster.cells);
    }
    CHECK(back.over == db.over);

    auto broken = to_json(db);
    broken["types"]["road"]["over"] = nlohmann::json::array({0.5});
    CHECK_THROWS_AS(clause_db_from_json(broken), ConfigurationError);
}

TEST_CASE("clause database is deterministic in the seed") {
    ClauseDbRequest req;
    req.feature_sets = {{"road", {geo::Geometry::line({{-50, 10}, {50, -20}})}, 8.0}};
    req.error_model = AffineErrorModel::gaussian_translation(10.0);
    req.ensemble_size = 20;
    req.grid = kGrid;
    req.seed = 1;
    const auto a = build_clause_db(req);
    const auto b = build_clause_db(req);
    CHECK(a.distance.at("road").cells == b.distance.at("road").cells);
    req.seed = 2;
    CHECK_FALSE(build_clause_db(req).distance.at("road").cells == a.distance.at("road").cells);
}

}
