#include "pml/errors.hpp"
#include "pml/hplp/parser.hpp"
#include "pml/service.hpp"

#include <httplib.h>

#include <atomic>
#include <map>
#include <mutex>
#include <thread>

namespace pml::service {

namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

nlohmann::json error_body(const std::string& message) {
    return {{"ok", false}, {"error", message}};
}

nlohmann::json diagnostics_json(const std::vector<hplp::Diagnostic>& diagnostics) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& d : diagnostics) {
        out.push_back({{"line", d.line}, {"column", d.column}, {"message", d.message}});
    }
    return out;
}

enum class JobState { queued, running, done, failed, cancelled };

const char* to_string(JobState s) {
    switch (s) {
        case JobState::queued: return "queued";
        case JobState::running: return "running";
        case JobState::done: return "done";
        case JobState::failed: return "failed";
        case JobState::cancelled: return "cancelled";
    }
    return "unknown";
}

struct Job {
    std::atomic<bool> cancel{false};
    std::atomic<std::size_t> cells_done{0};
    std::size_t cells_total = 0;
    std::mutex mutex;
    JobState state = JobState::queued;
    std::optional<nlohmann::json> result;
    std::string error;
    std::jthread thread;
};

}  // namespace

nlohmann::json parse_report(const std::string& rules) {
    const auto parsed = hplp::parse_with_diagnostics(rules);
    if (!parsed.ok()) {
        return {{"ok", false}, {"diagnostics", diagnostics_json(parsed.diagnostics)}};
    }
    nlohmann::json queries = nlohmann::json::array();
    for (const auto& q : parsed.program.queries()) {
        queries.push_back(hplp::to_string(q));
    }
    return {{"ok", true}, {"queries", queries}};
}

mission::MissionRequest resolve_request(const nlohmann::json& payload, const ServiceOptions& options) {
    if (!payload.is_object()) {
        throw ConfigurationError("request body must be a JSON object");
    }
    if (!payload.contains("map_ref")) {
        return mission::request_from_json(payload);
    }
    if (!options.fixture_root) {
        throw ConfigurationError("map_ref is not available: the service has no fixture root");
    }
    const std::string ref = payload.at("map_ref").get<std::string>();
    if (ref.empty() || ref.find_first_of("/\\.") != std::string::npos) {
        throw ConfigurationError("invalid map_ref '" + ref + "'");
    }
    const auto dir = *options.fixture_root / ref;
    const auto config = mission::config_from_json(mission::read_json(dir / "scenario.json"), dir);
    auto request = mission::load_request(config);

    // Inline fields override the scenario.
    nlohmann::json merged = {
        {"geojson", request.maps},
        {"mapping", request.mapping.to_json()},
        {"error_model", request.error_model.to_json()},
        {"rules", request.rules},
        {"grid", pcm::to_json(request.grid)},
    };
    nlohmann::json params = {
        {"samples", request.inference.sample_count},
        {"seed", request.inference.seed},
        {"ensemble_size", request.ensemble_size},
        {"tiling", request.tiling},
        {"workers", request.workers},
        {"mode", request.inference.mode == hplp::InferenceMode::sampling ? "sampling" : "exact"},
    };
    for (const auto& [key, value] : payload.items()) {
        if (key == "params") {
            for (const auto& [pk, pv] : value.items()) {
                params[pk] = pv;
            }
        } else if (key != "map_ref") {
            merged[key] = value;
        }
    }
    merged["params"] = params;
    return mission::request_from_json(merged);
}

struct Service::Impl {
    ServiceOptions options;
    httplib::Server server;
    std::optional<mission::ClauseCache> cache;
    std::mutex jobs_mutex;
    std::map<std::string, std::shared_ptr<Job>> jobs;
    std::atomic<std::uint64_t> next_job{1};

    explicit Impl(ServiceOptions o) : options(std::move(o)) {
        if (options.cache_dir) {
            cache.emplace(*options.cache_dir);
        }
        routes();
    }

    ~Impl() {
        std::lock_guard lock(jobs_mutex);
        for (auto& [id, job] : jobs) {
            job->cancel = true;
        }
        for (auto& [id, job] : jobs) {
            if (job->thread.joinable()) {
                job->thread.join();
            }
        }
    }

    const mission::ClauseCache* cache_ptr() const { return cache ? &*cache : nullptr; }

    void routes() {
        server.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
            send_json(res, 200, {{"status", "ok"}});
        });

        server.Post("/api/parse", [](const httplib::Request& req, httplib::Response& res) {
            nlohmann::json body;
            try {
                body = nlohmann::json::parse(req.body);
            } catch (const nlohmann::json::parse_error& e) {
                send_json(res, 400, error_body(std::string("malformed JSON: ") + e.what()));
                return;
            }
            if (!body.is_object() || !body.contains("rules") || !body["rules"].is_string()) {
                send_json(res, 400, error_body("expected {\"rules\": <text>}"));
                return;
            }
            const auto report = parse_report(body["rules"].get<std::string>());
            send_json(res, report["ok"].get<bool>() ? 200 : 422, report);
        });

        server.Post("/api/pml", [this](const httplib::Request& req, httplib::Response& res) { post_pml(req, res); });

        server.Get(R"(/api/pml/([A-Za-z0-9-]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const auto job = find_job(req.matches[1]);
            if (!job) {
                send_json(res, 404, error_body("unknown job"));
                return;
            }
            std::lock_guard lock(job->mutex);
            nlohmann::json body{{"job", req.matches[1].str()},
                                {"status", to_string(job->state)},
                                {"cells_done", job->cells_done.load()},
                                {"cells_total", job->cells_total}};
            if (job->result) {
                body["result"] = *job->result;
            }
            if (!job->error.empty()) {
                body["error"] = job->error;
            }
            send_json(res, 200, body);
        });

        server.Delete(R"(/api/pml/([A-Za-z0-9-]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const auto job = find_job(req.matches[1]);
            if (!job) {
                send_json(res, 404, error_body("unknown job"));
                return;
            }
            job->cancel = true;
            send_json(res, 202, {{"job", req.matches[1].str()}, {"status", "cancelling"}});
        });
    }

    std::shared_ptr<Job> find_job(const std::string& id) {
        std::lock_guard lock(jobs_mutex);
        const auto it = jobs.find(id);
        return it == jobs.end() ? nullptr : it->second;
    }

    void post_pml(const httplib::Request& req, httplib::Response& res) {
        nlohmann::json body;
        try {
            body = nlohmann::json::parse(req.body);
        } catch (const nlohmann::json::parse_error& e) {
            send_json(res, 400, error_body(std::string("malformed JSON: ") + e.what()));
            return;
        }
        mission::MissionRequest request;
        try {
            request = resolve_request(body, options);
        } catch (const std::exception& e) {
            send_json(res, 400, error_body(e.what()));
            return;
        }
        const auto parsed = hplp::parse_with_diagnostics(request.rules);
        if (!parsed.ok()) {
            send_json(res, 422, {{"ok", false}, {"diagnostics", diagnostics_json(parsed.diagnostics)}});
            return;
        }
        if (request.workers == 0) {
            request.workers = options.workers;
        }

        if (request.grid.cell_count() <= options.sync_cell_limit) {
            try {
                const auto l = mission::compute_landscape(request, cache_ptr());
                send_json(res, 200, landscape::to_json(l));
            } catch (const mission::StageError& e) {
                send_json(res, e.stage() == "inference" || e.stage() == "clauses" ? 422 : 400, error_body(e.what()));
            } catch (const std::exception& e) {
                send_json(res, 500, error_body(e.what()));
            }
            return;
        }

        auto job = std::make_shared<Job>();
        job->cells_total = request.grid.cell_count();
        const std::string id = "job-" + std::to_string(next_job.fetch_add(1));
        {
            std::lock_guard lock(jobs_mutex);
            jobs[id] = job;
        }
        job->thread = std::jthread([this, job, request = std::move(request)] {
            {
                std::lock_guard lock(job->mutex);
                job->state = JobState::running;
            }
            landscape::ComputeOptions compute;
            compute.cancel = &job->cancel;
            compute.progress = [job](std::size_t done, std::size_t) { job->cells_done = done; };
            try {
                auto l = mission::compute_landscape(request, cache_ptr(), compute);
                std::lock_guard lock(job->mutex);
                job->result = landscape::to_json(l);
                job->state = JobState::done;
            } catch (const std::exception& e) {
                std::lock_guard lock(job->mutex);
                job->state = job->cancel ? JobState::cancelled : JobState::failed;
                job->error = e.what();
            }
        });
        send_json(res, 202, {{"job", id}, {"status", "queued"}});
    }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() {
    stop();
}

bool Service::listen() {
    return impl_->server.listen(impl_->options.host, impl_->options.port);
}

int Service::bind_any_port() {
    impl_->options.port = impl_->server.bind_to_any_port(impl_->options.host);
    return impl_->options.port;
}

bool Service::listen_after_bind() {
    return impl_->server.listen_after_bind();
}

void Service::stop() {
    if (impl_->server.is_running()) {
        impl_->server.stop();
    }
}

void Service::wait_until_ready() const {
    impl_->server.wait_until_ready();
}

}  // namespace pml::service
