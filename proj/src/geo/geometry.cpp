#include "pml/geo.hpp"

#include "pml/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pml::geo {

namespace {

void require_finite(const std::vector<CartesianLocation>& vertices) {
    for (const auto& v : vertices) {
        if (!std::isfinite(v.east) || !std::isfinite(v.north)) {
            throw DomainError("geometry vertex is not finite");
        }
    }
}

double squared_segment_distance(CartesianLocation p, CartesianLocation a, CartesianLocation b) {
    const double dx = b.east - a.east;
    const double dy = b.north - a.north;
    const double len_sq = dx * dx + dy * dy;
    double t = 0.0;
    if (len_sq > 0.0) {
        t = ((p.east - a.east) * dx + (p.north - a.north) * dy) / len_sq;
        t = std::clamp(t, 0.0, 1.0);
    }
    const double ex = a.east + t * dx - p.east;
    const double ey = a.north + t * dy - p.north;
    return ex * ex + ey * ey;
}

double polyline_distance(CartesianLocation p, const std::vector<CartesianLocation>& v, bool closed) {
    if (v.size() == 1) {
        return std::hypot(p.east - v[0].east, p.north - v[0].north);
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        best = std::min(best, squared_segment_distance(p, v[i], v[i + 1]));
    }
    if (closed) {
        best = std::min(best, squared_segment_distance(p, v.back(), v.front()));
    }
    return std::sqrt(best);
}

bool on_segment(CartesianLocation p, CartesianLocation a, CartesianLocation b) {
    const double cross = (b.east - a.east) * (p.north - a.north) - (b.north - a.north) * (p.east - a.east);
    const double scale = std::max({std::abs(b.east - a.east), std::abs(b.north - a.north), 1.0});
    if (std::abs(cross) > 1e-12 * scale * scale) {
        return false;
    }
    return p.east >= std::min(a.east, b.east) && p.east <= std::max(a.east, b.east) &&
           p.north >= std::min(a.north, b.north) && p.north <= std::max(a.north, b.north);
}

}  // namespace

const char* to_string(GeometryKind kind) {
    switch (kind) {
        case GeometryKind::point: return "point";
        case GeometryKind::line: return "line";
        case GeometryKind::polygon: return "polygon";
    }
    return "unknown";
}

Geometry::Geometry(GeometryKind kind, std::vector<CartesianLocation> vertices)
    : kind_(kind), vertices_(std::move(vertices)) {}

Geometry Geometry::point(CartesianLocation p) {
    std::vector<CartesianLocation> v{p};
    require_finite(v);
    return Geometry(GeometryKind::point, std::move(v));
}

Geometry Geometry::line(std::vector<CartesianLocation> vertices) {
    if (vertices.size() < 2) {
        throw DomainError("line geometry needs at least 2 vertices");
    }
    require_finite(vertices);
    return Geometry(GeometryKind::line, std::move(vertices));
}

Geometry Geometry::polygon(std::vector<CartesianLocation> vertices) {
    if (vertices.size() > 1 && vertices.front() == vertices.back()) {
        vertices.pop_back();
    }
    if (vertices.size() < 3) {
        throw DomainError("polygon geometry needs at least 3 distinct ring vertices");
    }
    require_finite(vertices);
    return Geometry(GeometryKind::polygon, std::move(vertices));
}

Geometry Geometry::with_vertices(std::vector<CartesianLocation> vertices) const {
    if (vertices.size() != vertices_.size()) {
        throw DomainError("vertex count must be preserved");
    }
    return Geometry(kind_, std::move(vertices));
}

CartesianLocation Geometry::centroid() const {
    CartesianLocation c;
    for (const auto& v : vertices_) {
        c.east += v.east;
        c.north += v.north;
    }
    const auto n = static_cast<double>(vertices_.size());
    c.east /= n;
    c.north /= n;
    return c;
}

void validate(const TypedFeatureSet& set) {
    if (set.type_tag.empty()) {
        throw DomainError("feature set type tag must not be empty");
    }
    if (!(set.line_width > 0.0)) {
        throw DomainError("line width of '" + set.type_tag + "' must be positive");
    }
}

bool point_in_polygon(CartesianLocation p, const std::vector<CartesianLocation>& ring) {
    bool inside = false;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
        const auto& a = ring[i];
        const auto& b = ring[j];
        if (on_segment(p, a, b)) {
            return true;
        }
        if ((a.north > p.north) != (b.north > p.north) &&
            p.east < (b.east - a.east) * (p.north - a.north) / (b.north - a.north) + a.east) {
            inside = !inside;
        }
    }
    return inside;
}

double distance_to_geometry(CartesianLocation p, const Geometry& g) {
    const auto& v = g.vertices();
    switch (g.kind()) {
        case GeometryKind::point:
            return std::hypot(p.east - v[0].east, p.north - v[0].north);
        case GeometryKind::line:
            return polyline_distance(p, v, false);
        case GeometryKind::polygon:
            if (point_in_polygon(p, v)) {
                return 0.0;
            }
            return polyline_distance(p, v, true);
    }
    return std::numeric_limits<double>::infinity();
}

bool covers(CartesianLocation p, const Geometry& g, double line_width) {
    if (!(line_width > 0.0)) {
        throw DomainError("line width must be positive");
    }
    if (g.kind() == GeometryKind::polygon) {
        return point_in_polygon(p, g.vertices());
    }
    return distance_to_geometry(p, g) <= 0.5 * line_width;
}

}  // namespace pml::geo
