#include "pml/errors.hpp"
#include "pml/landscape.hpp"

#include <chrono>
#include <cstring>

namespace pml::landscape {

std::string TimingReport::to_csv() const {
    std::string out = "s,tiles,seconds\n";
    char buf[64];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%u,%zu,%.6f\n", row.s, row.tiles, row.seconds);
        out += buf;
    }
    return out;
}

TimingReport benchmark_tiling(const hplp::MissionProgram& program, const pcm::DistributionalClauseDB& db,
                              const hplp::InferenceParams& params, const std::vector<unsigned>& s_values,
                              std::size_t worker_count) {
    if (s_values.empty()) {
        throw DomainError("benchmark needs at least one tiling factor");
    }
    TimingReport report;
    report.worker_count = resolve_worker_count(worker_count);
    ComputeOptions options;
    options.worker_count = report.worker_count;

    std::vector<double> reference;
    for (const unsigned s : s_values) {
        const TilingPlan plan = split(db.grid, s);
        const auto start = std::chrono::steady_clock::now();
        const MissionLandscape l = compute_pml(program, db, params, plan, options);
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        report.rows.push_back({s, plan.tiles.size(), elapsed.count()});
        if (reference.empty()) {
            reference = l.values;
        } else if (l.values.size() != reference.size() ||
                   std::memcmp(l.values.data(), reference.data(), reference.size() * sizeof(double)) != 0) {
            throw std::logic_error("landscape for s=" + std::to_string(s) + " differs from s=" +
                                   std::to_string(s_values.front()));
        }
    }
    return report;
}

}  // namespace pml::landscape
