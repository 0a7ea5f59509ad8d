#include "pml/errors.hpp"
#include "pml/landscape.hpp"

#include <algorithm>
#include <cmath>

namespace pml::landscape {

namespace {

// Position of target cell center i in source index space, clamped to the
// outermost source centers.
double source_coordinate(std::size_t i, std::size_t target_n, std::size_t source_n) {
    const double x = (static_cast<double>(i) + 0.5) * static_cast<double>(source_n) / static_cast<double>(target_n) - 0.5;
    return std::clamp(x, 0.0, static_cast<double>(source_n - 1));
}

}  // namespace

MissionLandscape interpolate_bilinear(const MissionLandscape& src, const pcm::GridSpec& target) {
    validate(src);
    pcm::validate(target);
    if (!src.grid.same_extent(target)) {
        throw DomainError("interpolation target must share the source extent and origin");
    }
    MissionLandscape out;
    out.grid = target;
    out.metadata = src.metadata;
    out.values.resize(target.cell_count());
    if (target.rows == src.grid.rows && target.cols == src.grid.cols) {
        out.values = src.values;
        return out;
    }
    for (std::size_t r = 0; r < target.rows; ++r) {
        const double y = source_coordinate(r, target.rows, src.grid.rows);
        const auto y0 = static_cast<std::size_t>(std::floor(y));
        const std::size_t y1 = std::min(y0 + 1, src.grid.rows - 1);
        const double fy = y - static_cast<double>(y0);
        for (std::size_t c = 0; c < target.cols; ++c) {
            const double x = source_coordinate(c, target.cols, src.grid.cols);
            const auto x0 = static_cast<std::size_t>(std::floor(x));
            const std::size_t x1 = std::min(x0 + 1, src.grid.cols - 1);
            const double fx = x - static_cast<double>(x0);
            const double top = (1.0 - fx) * src.at(y0, x0) + fx * src.at(y0, x1);
            const double bottom = (1.0 - fx) * src.at(y1, x0) + fx * src.at(y1, x1);
            out.values[target.index(r, c)] = std::clamp((1.0 - fy) * top + fy * bottom, 0.0, 1.0);
        }
    }
    return out;
}

double mse(const MissionLandscape& a, const MissionLandscape& b) {
    if (a.grid.rows != b.grid.rows || a.grid.cols != b.grid.cols || a.values.size() != b.values.size() ||
        a.values.size() != a.grid.cell_count()) {
        throw DomainError("mse needs landscapes of identical shape");
    }
    if (a.values.empty()) {
        throw DomainError("mse of empty landscapes");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        sum += d * d;
    }
    return sum / static_cast<double>(a.values.size());
}

std::size_t ValidityMask::count() const {
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
}

ValidityMask threshold_mask(const MissionLandscape& l, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw DomainError("threshold must lie in [0, 1]");
    }
    ValidityMask m;
    m.grid = l.grid;
    m.threshold = threshold;
    m.mask.resize(l.values.size());
    for (std::size_t i = 0; i < l.values.size(); ++i) {
        m.mask[i] = l.values[i] >= threshold;
    }
    return m;
}

}  // namespace pml::landscape
