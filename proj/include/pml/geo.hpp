#pragma once

#include <string>
#include <vector>

namespace pml::geo {

// Mean earth radius used by the local tangent-plane projection [m].
inline constexpr double kEarthRadius = 6'371'000.0;

struct PolarLocation {
    double latitude = 0.0;   // degrees WGS84
    double longitude = 0.0;  // degrees WGS84

    bool operator==(const PolarLocation&) const = default;
};

struct CartesianLocation {
    double east = 0.0;   // meters from origin
    double north = 0.0;  // meters from origin

    bool operator==(const CartesianLocation&) const = default;
};

enum class GeometryKind { point, line, polygon };

const char* to_string(GeometryKind kind);

/**
 * Point, polyline or simple polygon in a local Cartesian frame.
 *
 * Polygons are stored open: a trailing vertex equal to the first one is
 * dropped on construction, closure is implicit.
 */
class Geometry {
public:
    static Geometry point(CartesianLocation p);
    static Geometry line(std::vector<CartesianLocation> vertices);
    static Geometry polygon(std::vector<CartesianLocation> vertices);

    GeometryKind kind() const noexcept { return kind_; }
    const std::vector<CartesianLocation>& vertices() const noexcept { return vertices_; }

    // Same kind, vertices replaced. Vertex count must not change.
    Geometry with_vertices(std::vector<CartesianLocation> vertices) const;

    // Arithmetic mean of the stored vertices.
    CartesianLocation centroid() const;

    bool operator==(const Geometry&) const = default;

private:
    Geometry(GeometryKind kind, std::vector<CartesianLocation> vertices);

    GeometryKind kind_;
    std::vector<CartesianLocation> vertices_;
};

inline constexpr double kDefaultLineWidth = 5.0;

struct TypedFeatureSet {
    std::string type_tag;
    std::vector<Geometry> features;
    double line_width = kDefaultLineWidth;  // buffer for `over` on lines and points [m]

    bool operator==(const TypedFeatureSet&) const = default;
};

// Throws DomainError if type_tag is empty or line_width is not positive.
void validate(const TypedFeatureSet& set);

CartesianLocation project(PolarLocation p, PolarLocation origin);
PolarLocation unproject(CartesianLocation c, PolarLocation origin);

double distance_to_geometry(CartesianLocation p, const Geometry& g);
bool covers(CartesianLocation p, const Geometry& g, double line_width);

// Even-odd containment; points on the boundary count as inside.
bool point_in_polygon(CartesianLocation p, const std::vector<CartesianLocation>& ring);

}  // namespace pml::geo
