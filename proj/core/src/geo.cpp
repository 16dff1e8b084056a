#include "freeflow/geo.hpp"

#include <cmath>
#include <numbers>

#include "freeflow/errors.hpp"

namespace freeflow {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
    const double lat1 = a.lat_deg * kDegToRad;
    const double lat2 = b.lat_deg * kDegToRad;
    const double dlat = (b.lat_deg - a.lat_deg) * kDegToRad;
    const double dlon = (b.lon_deg - a.lon_deg) * kDegToRad;

    const double sin_dlat = std::sin(dlat / 2.0);
    const double sin_dlon = std::sin(dlon / 2.0);
    const double h = sin_dlat * sin_dlat + std::cos(lat1) * std::cos(lat2) * sin_dlon * sin_dlon;

    // Clamp guards rounding for near-antipodal pairs where h can exceed 1 by an ulp.
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(std::min(h, 1.0)));
}

double bearing_deg(const GeoPoint& a, const GeoPoint& b) {
    if (a == b) {
        throw CoincidentPoints("bearing_deg: points coincide");
    }
    const double lat1 = a.lat_deg * kDegToRad;
    const double lat2 = b.lat_deg * kDegToRad;
    const double dlon = (b.lon_deg - a.lon_deg) * kDegToRad;

    const double y = std::sin(dlon) * std::cos(lat2);
    const double x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);

    double deg = std::atan2(y, x) * kRadToDeg;
    deg = std::fmod(deg + 360.0, 360.0);
    if (deg >= 360.0) {
        deg -= 360.0;
    }
    return deg;
}

double normalize_deg(double angle_deg) {
    double d = std::fmod(angle_deg, 360.0);
    if (d <= -180.0) {
        d += 360.0;
    } else if (d > 180.0) {
        d -= 360.0;
    }
    return d;
}

}  // namespace freeflow
