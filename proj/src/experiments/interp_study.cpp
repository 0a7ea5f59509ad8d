#include "pml/errors.hpp"
#include "pml/experiments.hpp"

#include <algorithm>
#include <cstdio>

namespace pml::experiments {

std::string InterpStudy::to_csv() const {
    std::string out = "resolution,mse\n";
    char buf[64];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.9g\n", row.resolution, row.mse);
        out += buf;
    }
    return out;
}

InterpStudy run_interp_study(const ScenarioFixture& fixture, const std::vector<std::size_t>& resolutions,
                             std::size_t reference_resolution, const ScenarioOverrides& overrides) {
    if (resolutions.empty()) {
        throw DomainError("interpolation study needs at least one resolution");
    }
    if (reference_resolution < *std::max_element(resolutions.begin(), resolutions.end())) {
        throw DomainError("reference resolution must not be below the study resolutions");
    }
    auto at_resolution = [&](std::size_t n) {
        ScenarioOverrides o = overrides;
        o.resolution = n;
        return mission::compute_landscape(scenario_request(fixture, o));
    };
    InterpStudy study;
    study.reference = at_resolution(reference_resolution);
    for (const std::size_t n : resolutions) {
        const auto coarse = at_resolution(n);
        const auto up = landscape::interpolate_bilinear(coarse, study.reference.grid);
        study.rows.push_back({n, landscape::mse(up, study.reference)});
    }
    return study;
}

bool non_increasing_with_tolerance(const std::vector<double>& values, double tolerance) {
    int inversions = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[i - 1]) {
            ++inversions;
            if (values[i] > values[i - 1] * (1.0 + tolerance)) {
                return false;
            }
        }
    }
    return inversions <= 1;
}

}  // namespace pml::experiments
