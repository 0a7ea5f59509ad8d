#include "pml/errors.hpp"
#include "pml/pcm.hpp"

#include <cmath>

namespace pml::pcm {

GridSpec GridSpec::with_resolution(std::size_t new_rows, std::size_t new_cols) const {
    GridSpec g = *this;
    g.rows = new_rows;
    g.cols = new_cols;
    validate(g);
    return g;
}

bool GridSpec::same_extent(const GridSpec& other) const noexcept {
    return origin == other.origin && width == other.width && height == other.height;
}

void validate(const GridSpec& grid) {
    if (!(grid.width > 0.0) || !(grid.height > 0.0) || !std::isfinite(grid.width) || !std::isfinite(grid.height)) {
        throw DomainError("grid extent must be positive");
    }
    if (grid.rows < 1 || grid.cols < 1) {
        throw DomainError("grid resolution must be at least 1x1");
    }
}

geo::CartesianLocation cell_center(const GridSpec& grid, std::size_t r, std::size_t c) {
    if (r >= grid.rows || c >= grid.cols) {
        throw DomainError("cell (" + std::to_string(r) + ", " + std::to_string(c) + ") is outside the " +
                          std::to_string(grid.rows) + "x" + std::to_string(grid.cols) + " grid");
    }
    const double cell_w = grid.width / static_cast<double>(grid.cols);
    const double cell_h = grid.height / static_cast<double>(grid.rows);
    return {
        -0.5 * grid.width + (static_cast<double>(c) + 0.5) * cell_w,
        0.5 * grid.height - (static_cast<double>(r) + 0.5) * cell_h,
    };
}

nlohmann::json to_json(const GridSpec& grid) {
    return {
        {"origin_lat", grid.origin.latitude},
        {"origin_lon", grid.origin.longitude},
        {"width_m", grid.width},
        {"height_m", grid.height},
        {"rows", grid.rows},
        {"cols", grid.cols},
    };
}

GridSpec grid_from_json(const nlohmann::json& j) {
    GridSpec g;
    try {
        g.origin = {j.at("origin_lat").get<double>(), j.at("origin_lon").get<double>()};
        g.width = j.at("width_m").get<double>();
        g.height = j.at("height_m").get<double>();
        g.rows = j.at("rows").get<std::size_t>();
        g.cols = j.at("cols").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigurationError(std::string("invalid grid specification: ") + e.what());
    }
    validate(g);
    return g;
}

}  // namespace pml::pcm
