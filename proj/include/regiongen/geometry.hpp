#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace regiongen {

// Equirectangular scale. Cities span well under a degree, so a local
// tangent-plane approximation keeps every distance/area error below 0.5%.
inline constexpr double kKmPerDegree = 111.32;
inline constexpr double kMetersPerDegree = 111320.0;

struct InvalidRing : std::runtime_error {
    explicit InvalidRing(const std::string& what) : std::runtime_error(what) {}
};

/// WGS84 position in decimal degrees.
struct Point {
    double lon = 0.0;
    double lat = 0.0;
};

inline bool valid_point(const Point& p) {
    return p.lon >= -180.0 && p.lon <= 180.0 && p.lat >= -90.0 && p.lat <= 90.0;
}

/// Simple polygon with optional holes. Rings are closed (first == last
/// vertex) and carry at least 4 vertices. Ring orientation is not
/// significant; areas are taken as absolute values.
struct Polygon {
    std::vector<Point> exterior;
    std::vector<std::vector<Point>> holes;
};

/// Structural ring checks: closure and minimum vertex count.
/// With `check_self_intersection` every ring is additionally tested for
/// properly crossing edges (touching at shared endpoints is allowed, which
/// raster-traced rings rely on). The crossing test is O(n^2) per ring and is
/// meant for small, externally supplied rings.
void validate_polygon(const Polygon& p, bool check_self_intersection = false);

Polygon make_polygon(std::vector<Point> exterior,
                     std::vector<std::vector<Point>> holes = {},
                     bool check_self_intersection = false);

/// Even-odd containment test; points on a ring edge count as inside.
bool point_in_polygon(const Point& pt, const Polygon& poly);

/// Polygon area in km^2, holes subtracted, computed on a local
/// equirectangular projection anchored at the mean of the exterior vertices.
double polygon_area_km2(const Polygon& p);

/// Largest vertex-to-vertex distance of the exterior ring, in meters.
double polygon_diameter_m(const Polygon& p);

/// Shortest boundary-to-boundary distance in meters; 0 when the polygons
/// touch, overlap or one contains the other.
double min_distance_m(const Polygon& a, const Polygon& b);

/// Closest boundary-point pair realizing min_distance_m (first found in
/// deterministic scan order).
std::pair<Point, Point> closest_boundary_points(const Polygon& a, const Polygon& b);

/// True iff the straight segment joining the closest boundary points of a
/// and b intersects any obstacle's interior or boundary.
bool segment_crosses(const Polygon& a, const Polygon& b,
                     const std::vector<Polygon>& obstacles);

/// True iff segment p-q intersects the obstacle (boundary touch counts).
bool segment_intersects_polygon(const Point& p, const Point& q, const Polygon& poly);

struct BoundingBox {
    double lon_min = 0.0, lat_min = 0.0, lon_max = 0.0, lat_max = 0.0;

    bool contains(const Point& p) const {
        return p.lon >= lon_min && p.lon <= lon_max && p.lat >= lat_min && p.lat <= lat_max;
    }
    void expand(const Point& p) {
        if (p.lon < lon_min) lon_min = p.lon;
        if (p.lon > lon_max) lon_max = p.lon;
        if (p.lat < lat_min) lat_min = p.lat;
        if (p.lat > lat_max) lat_max = p.lat;
    }
};

BoundingBox polygon_bbox(const Polygon& p);

/// Shortest equirectangular distance between two lon/lat boxes, meters.
/// Used as a cheap lower bound before exact boundary distances.
double bbox_distance_m(const BoundingBox& a, const BoundingBox& b);

}  // namespace regiongen
