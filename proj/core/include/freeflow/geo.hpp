#pragma once

namespace freeflow {

/// Mean Earth radius in meters; all geodesy in this library is spherical.
inline constexpr double kEarthRadiusM = 6'371'000.0;

/// Geographic coordinate in decimal degrees.
/// lat_deg in [-90, 90], lon_deg in [-180, 180).
struct GeoPoint {
    double lat_deg = 0.0;
    double lon_deg = 0.0;

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Great-circle distance in meters between a and b (haversine formula).
double haversine_m(const GeoPoint& a, const GeoPoint& b);

/// Initial compass bearing from a to b in degrees, in [0, 360):
/// 0 = north, 90 = east, increasing clockwise.
/// Throws CoincidentPoints when a == b.
double bearing_deg(const GeoPoint& a, const GeoPoint& b);

/// Normalize an angle in degrees into (-180, 180].
double normalize_deg(double angle_deg);

}  // namespace freeflow
