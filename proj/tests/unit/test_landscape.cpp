#include "pml/errors.hpp"
#include "pml/hplp/parser.hpp"
#include "pml/landscape.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace pml;
using namespace pml::landscape;

namespace {

const pcm::GridSpec kGrid{{48.1, 11.5}, 260.0, 180.0, 9, 13};

pcm::DistributionalClauseDB small_db() {
    pcm::ClauseDbRequest req;
    req.feature_sets = {
        {"operator", {geo::Geometry::point({-30, 10})}, 5.0},
        {"road", {geo::Geometry::line({{-130, -40}, {130, 30}})}, 10.0},
        {"park", {geo::Geometry::polygon({{0, 0}, {80, 0}, {80, 60}, {0, 60}})}, 5.0},
    };
    req.error_model = uncertainty::AffineErrorModel::gaussian_translation(10.0);
    req.error_model.set("operator", {});
    req.ensemble_size = 40;
    req.seed = 3;
    req.grid = kGrid;
    return pcm::build_clause_db(req);
}

const char* kRules =
    "0.8::clear.\n"
    "w ~ normal(2, 0.1).\n"
    "near(R, C) :- distance(R, C, operator) < 120; clear, distance(R, C, operator) < 150.\n"
    "ok(R, C) :- over(R, C, park); distance(R, C, road) < 25.\n"
    "landscape(R, C) :- near(R, C), ok(R, C), w < 3.\n"
    "query(landscape(R, C)).\n";

hplp::InferenceParams params(std::size_t n = 300) {
    return {n, 17, hplp::InferenceMode::sampling};
}

ComputeOptions with_workers(std::size_t n) {
    ComputeOptions o;
    o.worker_count = n;
    return o;
}

pcm::GridSpec grid_of(std::size_t rows, std::size_t cols) {
    return {{0, 0}, 100.0, 100.0, rows, cols};
}

MissionLandscape from_values(std::size_t rows, std::size_t cols, std::vector<double> v) {
    MissionLandscape l;
    l.grid = grid_of(rows, cols);
    l.values = std::move(v);
    return l;
}

// Independent bilinear oracle on cell centers with edge clamping.
double oracle_bilinear(const MissionLandscape& src, std::size_t rows, std::size_t cols, std::size_t r, std::size_t c) {
    auto coord = [](std::size_t i, std::size_t tn, std::size_t sn) {
        const double cell = 1.0 / static_cast<double>(tn);
        const double center = (static_cast<double>(i) + 0.5) * cell;          // in [0, 1]
        const double s = center * static_cast<double>(sn) - 0.5;              // source index space
        return std::min(std::max(s, 0.0), static_cast<double>(sn - 1));
    };
    const double y = coord(r, rows, src.grid.rows);
    const double x = coord(c, cols, src.grid.cols);
    double acc = 0.0;
    for (std::size_t i = 0; i < src.grid.rows; ++i) {
        for (std::size_t j = 0; j < src.grid.cols; ++j) {
            const double wy = std::max(0.0, 1.0 - std::abs(y - static_cast<double>(i)));
            const double wx = std::max(0.0, 1.0 - std::abs(x - static_cast<double>(j)));
            acc += wy * wx * src.at(i, j);
        }
    }
    return acc;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("landscape") {

TEST_CASE("split examples") {
    auto p = split(100, 100, 1);
    REQUIRE(p.tiles.size() == 4);
    for (const auto& t : p.tiles) {
        CHECK(t.cell_count() == 2500);
    }
    CHECK(p.tiles[0] == TileRange{0, 50, 0, 50});
    p = split(100, 100, 2);
    REQUIRE(p.tiles.size() == 16);
    for (const auto& t : p.tiles) {
        CHECK(t.r1 - t.r0 == 25);
        CHECK(t.c1 - t.c0 == 25);
    }
    CHECK(split(10, 10, 0).tiles == std::vector<TileRange>{{0, 10, 0, 10}});
    CHECK_THROWS_AS(split(10, 10, 16), DomainError);
}

TEST_CASE("split property: tiles partition the grid") {
    for (std::size_t rows : {1, 2, 3, 7, 16, 33}) {
        for (std::size_t cols : {1, 5, 8, 21}) {
            for (unsigned s = 0; s <= 4; ++s) {
                const auto p = split(rows, cols, s);
                CHECK(p.tiles.size() == (std::size_t{1} << (2 * s)));
                std::vector<int> hits(rows * cols, 0);
                for (const auto& t : p.tiles) {
                    if (t.empty()) continue;
                    // floor/ceil halving keeps tile sides within one cell of each other
                    CHECK(t.r1 - t.r0 <= (rows + (1u << s) - 1) / (1u << s));
                    for (std::size_t r = t.r0; r < t.r1; ++r)
                        for (std::size_t c = t.c0; c < t.c1; ++c) ++hits[r * cols + c];
                }
                CHECK(std::count(hits.begin(), hits.end(), 1) == static_cast<long>(rows * cols));
            }
        }
    }
}

TEST_CASE("tiling and worker count do not change any cell") {
    const auto db = small_db();
    const auto program = hplp::parse_program(kRules);
    const auto reference = compute_pml(program, db, params(), split(kGrid, 0), with_workers(1));
    validate(reference);
    for (unsigned s = 0; s <= 3; ++s) {
        for (std::size_t workers : {1, 3}) {
            CAPTURE(s);
            CAPTURE(workers);
            const auto l = compute_pml(program, db, params(), split(kGrid, s), with_workers(workers));
            CHECK(std::memcmp(l.values.data(), reference.values.data(), l.values.size() * sizeof(double)) == 0);
        }
    }
    // Each cell equals an isolated single-cell computation.
    for (std::size_t r = 0; r < kGrid.rows; r += 4) {
        for (std::size_t c = 0; c < kGrid.cols; c += 3) {
            CHECK(infer_cell(program, db, params(), r, c) == reference.at(r, c));
        }
    }
    // Not a constant raster.
    CHECK(std::set<double>(reference.values.begin(), reference.values.end()).size() > 3);
    CHECK(reference.metadata.seed == 17);
    CHECK(reference.metadata.ensemble_size == 40);
    CHECK(reference.metadata.inference_samples == 300);
    CHECK(reference.metadata.program_hash.size() > 0);
}

TEST_CASE("benchmark report") {
    const auto db = small_db();
    const auto program = hplp::parse_program(kRules);
    const auto report = benchmark_tiling(program, db, params(50), {0, 1, 2}, 2);
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[2].tiles == 16);
    CHECK(report.worker_count == 2);
    CHECK(report.to_csv().rfind("s,tiles,seconds\n0,1,", 0) == 0);
}

TEST_CASE("grid query detection") {
    CHECK(to_string(landscape_query(hplp::parse_program("a. query(a). query(m(X, Y)).")) ) == "m(X,Y)");
    CHECK_THROWS_AS(landscape_query(hplp::parse_program("query(m(X, X)).")), ConfigurationError);
    CHECK_THROWS_AS(landscape_query(hplp::parse_program("query(m(a, Y)).")), ConfigurationError);
}

TEST_CASE("interpolation: 2x2 to 4x4 example") {
    const auto src = from_values(2, 2, {0, 1, 0, 1});
    const auto up = interpolate_bilinear(src, grid_of(4, 4));
    const std::vector<double> row{0.0, 0.25, 0.75, 1.0};
    for (std::size_t r = 0; r < 4; ++r) {
        for (std::size_t c = 0; c < 4; ++c) {
            CHECK(up.at(r, c) == doctest::Approx(row[c]));
        }
    }
}

TEST_CASE("interpolation matches the tent-weight oracle") {
    std::vector<double> v;
    for (int i = 0; i < 15; ++i) v.push_back(std::fmod(i * 0.37, 1.0));
    const auto src = from_values(3, 5, v);
    for (auto [rows, cols] : {std::pair{6, 10}, {7, 11}, {3, 5}, {2, 2}, {12, 3}}) {
        const auto out = interpolate_bilinear(src, grid_of(rows, cols));
        for (std::size_t r = 0; r < static_cast<std::size_t>(rows); ++r)
            for (std::size_t c = 0; c < static_cast<std::size_t>(cols); ++c)
                CHECK(out.at(r, c) == doctest::Approx(oracle_bilinear(src, rows, cols, r, c)).epsilon(1e-12));
    }
    const auto constant = MissionLandscape::filled(grid_of(4, 4), 0.3);
    CHECK(mse(interpolate_bilinear(constant, grid_of(9, 9)), MissionLandscape::filled(grid_of(9, 9), 0.3)) < 1e-30);
    pcm::GridSpec other = grid_of(8, 8);
    other.width = 50.0;
    CHECK_THROWS_AS(interpolate_bilinear(constant, other), DomainError);
}

TEST_CASE("mse examples") {
    CHECK(mse(from_values(1, 2, {0, 0.5}), from_values(1, 2, {0, 0})) == 0.125);
    CHECK(mse(from_values(1, 2, {0.2, 0.5}), from_values(1, 2, {0.2, 0.5})) == 0.0);
    CHECK_THROWS_AS(mse(from_values(1, 2, {0, 0}), from_values(2, 1, {0, 0})), DomainError);
}

TEST_CASE("validity mask is monotone in the threshold") {
    const auto l = from_values(2, 3, {0.0, 0.1, 0.5, 0.5, 0.9, 1.0});
    std::size_t last = l.values.size() + 1;
    for (double t = 0.0; t <= 1.0; t += 0.05) {
        const auto m = threshold_mask(l, t);
        CHECK(m.count() <= last);
        last = m.count();
        for (std::size_t i = 0; i < l.values.size(); ++i) {
            CHECK(m.mask[i] == (l.values[i] >= t));
        }
    }
    CHECK(threshold_mask(l, 0.5).count() == 4);
    CHECK_THROWS_AS(threshold_mask(l, 1.5), DomainError);
}

TEST_CASE("JSON round trip is bit-exact") {
    const auto db = small_db();
    const auto l = compute_pml(hplp::parse_program(kRules), db, params(64), split(kGrid, 1));
    const auto back = landscape_from_json(nlohmann::json::parse(to_json(l).dump()));
    CHECK(back.grid == l.grid);
    CHECK(back.metadata == l.metadata);
    CHECK(std::memcmp(back.values.data(), l.values.data(), l.values.size() * sizeof(double)) == 0);

    auto odd = from_values(1, 1, {1.0 / 3.0});
    CHECK(landscape_from_json(nlohmann::json::parse(to_json(odd).dump())).values[0] == 1.0 / 3.0);
    auto bad = to_json(odd);
    bad["values"] = {1.5};
    CHECK_THROWS_AS(landscape_from_json(bad), DomainError);
    CHECK_THROWS_AS(landscape_from_json(nlohmann::json::object()), ConfigurationError);
}

TEST_CASE("CSV rows") {
    auto l = from_values(2, 2, {0.0, 0.25, 0.5, 1.0});
    l.grid.origin = {49.0, 8.0};
    const auto csv = to_csv(l);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "r,c,lat,lon,probability");
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    REQUIRE(lines.size() == 4);
    CHECK(lines[1].rfind("0,1,", 0) == 0);
    CHECK(lines[1].substr(lines[1].rfind(',') + 1) == "0.25");
    // Cell (0, 1) is 25 m north and 25 m east of the origin.
    const auto p = geo::unproject({25.0, 25.0}, l.grid.origin);
    std::istringstream fields(lines[1]);
    std::string f;
    std::getline(fields, f, ',');
    std::getline(fields, f, ',');
    std::getline(fields, f, ',');
    CHECK(std::stod(f) == doctest::Approx(p.latitude).epsilon(1e-12));
    std::getline(fields, f, ',');
    CHECK(std::stod(f) == doctest::Approx(p.longitude).epsilon(1e-12));
}

TEST_CASE("colormap and PNG output") {
    CHECK(colormap(0.05).a == 0);
    CHECK(colormap(1.0) == Rgba{0, 139, 139, 200});
    CHECK(colormap(0.1).r > 200);
    CHECK(colormap(0.0, 0.0) == Rgba{255, 0, 0, 200});

    const auto path = std::filesystem::temp_directory_path() / "pml_landscape_test.png";
    write_png(from_values(2, 3, {0.0, 0.5, 1.0, 0.2, 0.4, 0.6}), path, 4);
    const auto bytes = read_file(path);
    REQUIRE(bytes.size() > 24);
    CHECK(bytes.substr(1, 3) == "PNG");
    auto be32 = [&](std::size_t off) {
        return (static_cast<unsigned>(static_cast<unsigned char>(bytes[off])) << 24) |
               (static_cast<unsigned>(static_cast<unsigned char>(bytes[off + 1])) << 16) |
               (static_cast<unsigned>(static_cast<unsigned char>(bytes[off + 2])) << 8) |
               static_cast<unsigned>(static_cast<unsigned char>(bytes[off + 3]));
    };
    CHECK(be32(16) == 12);  // width = 3 cells * 4 px
    CHECK(be32(20) == 8);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(write_png(from_values(1, 1, {0.0}), path, 0), DomainError);
}

TEST_CASE("cancellation and progress") {
    const auto db = small_db();
    const auto program = hplp::parse_program(kRules);
    std::atomic<bool> cancel{true};
    ComputeOptions o;
    o.worker_count = 2;
    o.cancel = &cancel;
    CHECK_THROWS_AS(compute_pml(program, db, params(20), split(kGrid, 2), o), CancelledError);

    std::atomic<std::size_t> last{0};
    std::atomic<int> calls{0};
    ComputeOptions p;
    p.worker_count = 2;
    p.progress = [&](std::size_t done, std::size_t total) {
        CHECK(total == kGrid.cell_count());
        std::size_t prev = last.load();
        while (done > prev && !last.compare_exchange_weak(prev, done)) {}
        ++calls;
    };
    compute_pml(program, db, params(20), split(kGrid, 2), p);
    CHECK(last == kGrid.cell_count());
    CHECK(calls == 16);
}

TEST_CASE("cell failures are reported with their coordinates") {
    const auto db = small_db();
    try {
        compute_pml(hplp::parse_program("q(R, C) :- distance(R, C, lake) < 3. query(q(R, C))."), db, params(10),
                    split(kGrid, 0), with_workers(1));
        FAIL("expected CellError");
    } catch (const CellError& e) {
        CHECK(e.row() == 0);
        CHECK(e.col() == 0);
        CHECK_THROWS_AS(std::rethrow_exception(e.cause()), UnknownAtomError);
    }
    hplp::InferenceParams exact{10, 0, hplp::InferenceMode::exact_discrete};
    CHECK_THROWS_AS(compute_pml(hplp::parse_program(kRules), db, exact, split(kGrid, 1), with_workers(2)), CellError);
    TilingPlan partial{0, {{0, 2, 0, 2}}};
    CHECK_THROWS_AS(compute_pml(hplp::parse_program(kRules), db, params(), partial), DomainError);
}

}
