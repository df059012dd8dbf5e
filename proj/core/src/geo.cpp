#include "roam/geo.hpp"

#include "roam/errors.hpp"

#include <algorithm>
#include <cmath>

namespace roam::geo {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }

} // namespace

void validate(const GeoPoint& p) {
    if (!std::isfinite(p.lat) || !std::isfinite(p.lon))
        throw DataError("GeoPoint with non-finite coordinate");
    if (p.lat < -90.0 || p.lat > 90.0)
        throw DataError("latitude out of range: " + std::to_string(p.lat));
    if (p.lon < -180.0 || p.lon >= 180.0)
        throw DataError("longitude out of range: " + std::to_string(p.lon));
}

void validate(const BBox& b) {
    validate(b.min);
    validate(b.max);
    if (b.min.lat > b.max.lat || b.min.lon > b.max.lon)
        throw DataError("BBox min exceeds max");
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
    const double lat1 = deg2rad(a.lat);
    const double lat2 = deg2rad(b.lat);
    const double dlat = deg2rad(b.lat - a.lat);
    const double dlon = deg2rad(b.lon - a.lon);

    const double sl = std::sin(dlat / 2.0);
    const double so = std::sin(dlon / 2.0);
    double h = sl * sl + std::cos(lat1) * std::cos(lat2) * so * so;
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

double initial_bearing_deg(const GeoPoint& a, const GeoPoint& b) {
    if (a.lat == b.lat && a.lon == b.lon)
        throw DataError("initial_bearing_deg: degenerate pair (a == b)");

    const double lat1 = deg2rad(a.lat);
    const double lat2 = deg2rad(b.lat);
    const double dlon = deg2rad(b.lon - a.lon);

    const double y = std::sin(dlon) * std::cos(lat2);
    const double x = std::cos(lat1) * std::sin(lat2) -
                     std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
    double deg = rad2deg(std::atan2(y, x));
    deg = std::fmod(deg + 360.0, 360.0);
    if (deg >= 360.0) deg = 0.0;
    return deg;
}

std::pair<double, double> local_offset_m(const GeoPoint& origin, const GeoPoint& q) {
    const double x = deg2rad(q.lon - origin.lon) * kEarthRadiusM * std::cos(deg2rad(origin.lat));
    const double y = deg2rad(q.lat - origin.lat) * kEarthRadiusM;
    return {x, y};
}

double point_to_segment_m(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
    if (a.lat == b.lat && a.lon == b.lon)
        throw DataError("point_to_segment_m: degenerate segment");

    const auto [ax, ay] = local_offset_m(p, a);
    const auto [bx, by] = local_offset_m(p, b);

    const double dx = bx - ax;
    const double dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    // Projection parameter of p (the local origin) onto the segment, clamped.
    double t = len2 > 0.0 ? -(ax * dx + ay * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double cx = ax + t * dx;
    const double cy = ay + t * dy;
    return std::hypot(cx, cy);
}

GeoPoint destination_point(const GeoPoint& p, double bearing_deg, double distance_m) {
    if (distance_m == 0.0) return p;

    const double lat1 = deg2rad(p.lat);
    const double lon1 = deg2rad(p.lon);
    const double theta = deg2rad(bearing_deg);
    const double delta = distance_m / kEarthRadiusM;

    const double lat2 = std::asin(std::sin(lat1) * std::cos(delta) +
                                  std::cos(lat1) * std::sin(delta) * std::cos(theta));
    const double lon2 = lon1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(lat1),
                                          std::cos(delta) - std::sin(lat1) * std::sin(lat2));

    double lon_deg = std::fmod(rad2deg(lon2) + 540.0, 360.0) - 180.0;
    return {rad2deg(lat2), lon_deg};
}

} // namespace roam::geo
