#include "pml/errors.hpp"
#include "pml/landscape.hpp"

namespace pml::landscape {

TilingPlan split(std::size_t rows, std::size_t cols, unsigned s) {
    if (s > 15) {
        throw DomainError("tiling factor " + std::to_string(s) + " is too large");
    }
    TilingPlan plan;
    plan.s = s;
    plan.tiles.push_back({0, rows, 0, cols});
    for (unsigned level = 0; level < s; ++level) {
        std::vector<TileRange> next;
        next.reserve(plan.tiles.size() * 4);
        for (const auto& t : plan.tiles) {
            const std::size_t rm = t.r0 + (t.r1 - t.r0) / 2;
            const std::size_t cm = t.c0 + (t.c1 - t.c0) / 2;
            next.push_back({t.r0, rm, t.c0, cm});
            next.push_back({t.r0, rm, cm, t.c1});
            next.push_back({rm, t.r1, t.c0, cm});
            next.push_back({rm, t.r1, cm, t.c1});
        }
        plan.tiles = std::move(next);
    }
    return plan;
}

TilingPlan split(const pcm::GridSpec& grid, unsigned s) {
    pcm::validate(grid);
    return split(grid.rows, grid.cols, s);
}

}  // namespace pml::landscape
