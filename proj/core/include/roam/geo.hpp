#pragma once

#include <utility>

namespace roam::geo {

// Mean Earth radius. All distances in this project are spherical; at the
// 1e-5 degree coordinate resolution we quantize to, the difference from an
// ellipsoidal model is far below one bin.
inline constexpr double kEarthRadiusM = 6371000.0;

// Meters per degree of latitude (and of longitude at the equator).
inline constexpr double kMetersPerDegLat = kEarthRadiusM * 3.14159265358979323846 / 180.0;

struct GeoPoint {
    double lat = 0.0; // degrees WGS84, [-90, 90]
    double lon = 0.0; // degrees WGS84, [-180, 180)

    bool operator==(const GeoPoint&) const = default;
};

struct BBox {
    GeoPoint min;
    GeoPoint max;

    bool contains(const GeoPoint& p) const {
        return p.lat >= min.lat && p.lat <= max.lat &&
               p.lon >= min.lon && p.lon <= max.lon;
    }
    double height_deg() const { return max.lat - min.lat; }
    double width_deg() const { return max.lon - min.lon; }
};

// Throws DataError if lat/lon are non-finite or outside their ranges.
void validate(const GeoPoint& p);
void validate(const BBox& b);

// Great-circle distance in meters. Symmetric, non-negative, zero iff a == b
// up to floating tolerance.
double haversine_m(const GeoPoint& a, const GeoPoint& b);

// Forward azimuth from a to b in degrees, [0, 360), 0 = true north,
// clockwise positive. Throws DataError when a == b.
double initial_bearing_deg(const GeoPoint& a, const GeoPoint& b);

// Minimum distance from p to the segment [a, b] under a local equirectangular
// planar approximation centered at p. Exact for p on the segment. Throws
// DataError on a degenerate segment (a == b).
double point_to_segment_m(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b);

// Spherical destination point: travel `distance_m` from `p` along the initial
// bearing `bearing_deg`. Inverse of (haversine_m, initial_bearing_deg) to well
// below coordinate quantization at the 0..50 m scales used here.
GeoPoint destination_point(const GeoPoint& p, double bearing_deg, double distance_m);

// Planar offsets of q relative to origin, in meters (x east, y north),
// under the local equirectangular approximation centered at origin.
std::pair<double, double> local_offset_m(const GeoPoint& origin, const GeoPoint& q);

} // namespace roam::geo
