#include "pml/mission.hpp"
#include "pml/service.hpp"

#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <chrono>
#include <cstring>
#include <thread>

using namespace pml;
using namespace std::chrono_literals;
using test_support::TempDir;

namespace {

const std::filesystem::path kPark = test_support::kFixtures / "park";

// Service on an ephemeral loopback port for the lifetime of the object.
class Running {
public:
    explicit Running(service::ServiceOptions options) : svc_(std::move(options)) {
        port_ = svc_.bind_any_port();
        REQUIRE(port_ > 0);
        thread_ = std::thread([this] { svc_.listen_after_bind(); });
        svc_.wait_until_ready();
    }
    ~Running() {
        svc_.stop();
        thread_.join();
    }
    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port_);
        c.set_read_timeout(120, 0);
        return c;
    }

private:
    service::Service svc_;
    int port_ = 0;
    std::thread thread_;
};

service::ServiceOptions fixture_options() {
    service::ServiceOptions o;
    o.host = "127.0.0.1";
    o.fixture_root = test_support::kFixtures;
    o.workers = 2;
    return o;
}

nlohmann::json post(httplib::Client& c, const std::string& path, const std::string& body, int expected) {
    const auto res = c.Post(path, body, "application/json");
    REQUIRE(res);
    CHECK(res->status == expected);
    return nlohmann::json::parse(res->body);
}

nlohmann::json get(httplib::Client& c, const std::string& path) {
    const auto res = c.Get(path);
    REQUIRE(res);
    REQUIRE(res->status == 200);
    return nlohmann::json::parse(res->body);
}

nlohmann::json wait_for_job(httplib::Client& c, const std::string& id, const std::string& final_state) {
    nlohmann::json body;
    for (int i = 0; i < 1200; ++i) {
        body = get(c, "/api/pml/" + id);
        const std::string status = body["status"];
        if (status != "queued" && status != "running") {
            break;
        }
        std::this_thread::sleep_for(50ms);
    }
    CHECK(body["status"] == final_state);
    return body;
}

nlohmann::json small_park_payload() {
    return {{"map_ref", "park"}, {"params", {{"samples", 150}, {"ensemble_size", 15}}}};
}

nlohmann::json with_resolution(nlohmann::json payload, std::size_t n) {
    auto grid = mission::read_json(kPark / "scenario.json")["grid"];
    grid["rows"] = n;
    grid["cols"] = n;
    payload["grid"] = grid;
    return payload;
}

}  // namespace

TEST_SUITE("service") {

TEST_CASE("health and parse endpoints") {
    Running server(fixture_options());
    auto c = server.client();
    CHECK(get(c, "/api/health") == nlohmann::json{{"status", "ok"}});

    const nlohmann::json ok_body{{"rules", mission::read_text(test_support::kFixtures / "listings/listing4.pl")}};
    const auto ok = post(c, "/api/parse", ok_body.dump(), 200);
    CHECK(ok["ok"] == true);
    CHECK(ok["queries"] == nlohmann::json::array({"landscape(R,C)"}));

    const auto bad = post(c, "/api/parse", nlohmann::json{{"rules", "a.\nb :- c"}}.dump(), 422);
    CHECK(bad["ok"] == false);
    REQUIRE(bad["diagnostics"].size() == 1);
    CHECK(bad["diagnostics"][0]["line"] == 2);
    CHECK(bad["diagnostics"][0]["column"] == 7);

    post(c, "/api/parse", "{not json", 400);
    post(c, "/api/parse", R"({"text": "a."})", 400);
}

TEST_CASE("synchronous landscape matches the CLI") {
    TempDir dir;
    REQUIRE(test_support::run_cli("compute --config \"" + (kPark / "scenario.json").string() +
                                  "\" --resolution 10,10 --samples 150 --ensemble 15 --out \"" +
                                  (dir / "cli.json").string() + "\"") == 0);
    const auto cli = landscape::landscape_from_json(mission::read_json(dir / "cli.json"));

    Running server(fixture_options());
    auto c = server.client();
    const auto body = post(c, "/api/pml", with_resolution(small_park_payload(), 10).dump(), 200);
    const auto api = landscape::landscape_from_json(body);
    CHECK(api.grid == cli.grid);
    REQUIRE(api.values.size() == cli.values.size());
    CHECK(std::memcmp(api.values.data(), cli.values.data(), api.values.size() * sizeof(double)) == 0);
    CHECK(api.metadata.program_hash == cli.metadata.program_hash);
    CHECK(api.metadata.clause_db_hash == cli.metadata.clause_db_hash);
}

TEST_CASE("inline requests and error statuses") {
    Running server(fixture_options());
    auto c = server.client();
    const nlohmann::json inline_body{
        {"geojson", mission::read_json(kPark / "operator.geojson")},
        {"mapping", mission::read_json(kPark / "mapping.json")},
        {"rules", "near(R, C) :- distance(R, C, operator) < 100. query(near(R, C))."},
        {"grid", {{"origin_lat", 49.0069}, {"origin_lon", 8.4037}, {"width_m", 400}, {"height_m", 400}, {"rows", 4}, {"cols", 4}}},
        {"params", {{"samples", 50}, {"ensemble_size", 3}}},
    };
    const auto l = landscape::landscape_from_json(post(c, "/api/pml", inline_body.dump(), 200));
    // Zero-error operator: cells are exactly inside or outside the 100 m disk.
    CHECK(l.at(1, 1) == 1.0);
    CHECK(l.at(0, 0) == 0.0);

    post(c, "/api/pml", "[1, 2", 400);
    post(c, "/api/pml", R"({"map_ref": "nowhere"})", 400);
    post(c, "/api/pml", R"({"map_ref": "../park"})", 400);
    post(c, "/api/pml", R"({"rules": "a."})", 400);

    auto bad_rules = small_park_payload();
    bad_rules["rules"] = "landscape(R, C) :- ";
    const auto diag = post(c, "/api/pml", with_resolution(bad_rules, 4).dump(), 422);
    CHECK(diag["diagnostics"].size() == 1);

    auto unknown = small_park_payload();
    unknown["rules"] = "landscape(R, C) :- distance(R, C, volcano) < 3. query(landscape(R, C)).";
    const auto err = post(c, "/api/pml", with_resolution(unknown, 4).dump(), 422);
    CHECK(err["error"].get<std::string>().find("volcano") != std::string::npos);

    const auto res = c.Get("/api/pml/job-999");
    REQUIRE(res);
    CHECK(res->status == 404);
}

TEST_CASE("large grids run as background jobs") {
    auto options = fixture_options();
    options.sync_cell_limit = 50;
    Running server(options);
    auto c = server.client();
    const auto payload = with_resolution(small_park_payload(), 8);
    const auto accepted = post(c, "/api/pml", payload.dump(), 202);
    CHECK(accepted["status"] == "queued");
    const std::string id = accepted["job"];
    const auto done = wait_for_job(c, id, "done");
    CHECK(done["cells_done"] == 64);
    CHECK(done["cells_total"] == 64);
    const auto l = landscape::landscape_from_json(done["result"]);
    const auto direct = mission::compute_landscape(service::resolve_request(payload, options));
    CHECK(std::memcmp(l.values.data(), direct.values.data(), l.values.size() * sizeof(double)) == 0);
}

TEST_CASE("background jobs can be cancelled") {
    auto options = fixture_options();
    options.sync_cell_limit = 50;
    options.workers = 1;
    Running server(options);
    auto c = server.client();
    auto payload = with_resolution(nlohmann::json{{"map_ref", "park"}}, 60);
    const auto accepted = post(c, "/api/pml", payload.dump(), 202);
    const std::string id = accepted["job"];
    std::this_thread::sleep_for(200ms);
    const auto res = c.Delete("/api/pml/" + id);
    REQUIRE(res);
    CHECK(res->status == 202);
    const auto final_state = wait_for_job(c, id, "cancelled");
    CHECK(final_state["cells_done"].get<std::size_t>() < 3600);
    CHECK_FALSE(final_state.contains("result"));
}

TEST_CASE("map_ref overrides") {
    auto payload = small_park_payload();
    payload["params"]["seed"] = 99;
    payload["params"]["mode"] = "sampling";
    const auto r = service::resolve_request(payload, fixture_options());
    CHECK(r.inference.seed == 99);
    CHECK(r.inference.sample_count == 150);
    CHECK(r.ensemble_size == 15);
    CHECK(r.grid.rows == 50);
    CHECK(r.maps.size() == 2);
    service::ServiceOptions no_root;
    CHECK_THROWS(service::resolve_request(payload, no_root));
}

}
