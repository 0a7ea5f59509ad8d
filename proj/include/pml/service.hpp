#pragma once

#include "pml/mission.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace pml::service {

struct ServiceOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    // Scenario directories addressable by `map_ref` (each holds scenario.json).
    std::optional<std::filesystem::path> fixture_root;
    std::optional<std::filesystem::path> cache_dir;
    // Larger grids are computed as background jobs.
    std::size_t sync_cell_limit = 200 * 200;
    std::size_t workers = 0;
};

// {"ok": true, "queries": [...]} or {"ok": false, "diagnostics": [...]}.
nlohmann::json parse_report(const std::string& rules);

// Builds a mission request from an API payload, resolving `map_ref` against
// the fixture root; payload fields override the scenario's.
mission::MissionRequest resolve_request(const nlohmann::json& payload, const ServiceOptions& options);

class Service {
public:
    explicit Service(ServiceOptions options);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    // Blocks until stop().
    bool listen();
    // Binds an ephemeral port on the configured host and returns it (tests).
    int bind_any_port();
    bool listen_after_bind();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace pml::service
