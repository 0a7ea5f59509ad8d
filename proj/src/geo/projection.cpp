#include "pml/geo.hpp"

#include "pml/errors.hpp"

#include <cmath>
#include <numbers>

namespace pml::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kMaxProjectedLatitude = 89.0;

void require_valid(PolarLocation p, const char* what) {
    if (!std::isfinite(p.latitude) || !std::isfinite(p.longitude) ||
        p.latitude < -90.0 || p.latitude > 90.0 || p.longitude < -180.0 || p.longitude > 180.0) {
        throw DomainError(std::string(what) + " is outside the WGS84 coordinate range");
    }
    if (std::abs(p.latitude) >= kMaxProjectedLatitude) {
        throw DomainError(std::string(what) + " is too close to a pole for the tangent-plane projection");
    }
}

}  // namespace

CartesianLocation project(PolarLocation p, PolarLocation origin) {
    require_valid(p, "location");
    require_valid(origin, "origin");
    const double cos_origin = std::cos(origin.latitude * kDegToRad);
    return {
        (p.longitude - origin.longitude) * kDegToRad * kEarthRadius * cos_origin,
        (p.latitude - origin.latitude) * kDegToRad * kEarthRadius,
    };
}

PolarLocation unproject(CartesianLocation c, PolarLocation origin) {
    require_valid(origin, "origin");
    if (!std::isfinite(c.east) || !std::isfinite(c.north)) {
        throw DomainError("cartesian location is not finite");
    }
    const double cos_origin = std::cos(origin.latitude * kDegToRad);
    return {
        origin.latitude + c.north / (kDegToRad * kEarthRadius),
        origin.longitude + c.east / (kDegToRad * kEarthRadius * cos_origin),
    };
}

}  // namespace pml::geo
