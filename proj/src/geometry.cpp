#include "regiongen/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace regiongen {

namespace {

struct XY {
    double x = 0.0;
    double y = 0.0;
};

// Local projection anchored at (lon0, lat0); x east, y north, in km.
XY project_km(const Point& p, double lon0, double lat0) {
    const double lat_rad = lat0 * M_PI / 180.0;
    return {(p.lon - lon0) * kKmPerDegree * std::cos(lat_rad), (p.lat - lat0) * kKmPerDegree};
}

XY project_m(const Point& p, double lon0, double lat0) {
    XY km = project_km(p, lon0, lat0);
    return {km.x * 1000.0, km.y * 1000.0};
}

double cross(const XY& o, const XY& a, const XY& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(const XY& p, const XY& a, const XY& b) {
    return p.x >= std::min(a.x, b.x) && p.x <= std::max(a.x, b.x) &&
           p.y >= std::min(a.y, b.y) && p.y <= std::max(a.y, b.y);
}

// Segment intersection including endpoint touches.
bool segments_intersect(const XY& a, const XY& b, const XY& c, const XY& d) {
    const double d1 = cross(c, d, a);
    const double d2 = cross(c, d, b);
    const double d3 = cross(a, b, c);
    const double d4 = cross(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(a, c, d)) return true;
    if (d2 == 0 && on_segment(b, c, d)) return true;
    if (d3 == 0 && on_segment(c, a, b)) return true;
    if (d4 == 0 && on_segment(d, a, b)) return true;
    return false;
}

// Proper crossing only: shared endpoints and collinear touches do not count.
bool segments_cross_properly(const XY& a, const XY& b, const XY& c, const XY& d) {
    const double d1 = cross(c, d, a);
    const double d2 = cross(c, d, b);
    const double d3 = cross(a, b, c);
    const double d4 = cross(a, b, d);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
           ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

double point_segment_distance(const XY& p, const XY& a, const XY& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    const double cx = a.x + t * dx;
    const double cy = a.y + t * dy;
    return std::hypot(p.x - cx, p.y - cy);
}

XY point_segment_closest(const XY& p, const XY& a, const XY& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
    return {a.x + t * dx, a.y + t * dy};
}

void validate_ring(const std::vector<Point>& ring, bool check_self) {
    if (ring.size() < 4) throw InvalidRing("ring has fewer than 4 vertices");
    if (ring.front().lon != ring.back().lon || ring.front().lat != ring.back().lat)
        throw InvalidRing("ring is not closed");
    for (const Point& p : ring)
        if (!valid_point(p)) throw InvalidRing("ring vertex outside lon/lat range");
    if (!check_self) return;
    // Rings in this pipeline are small; a pairwise proper-crossing scan is
    // enough. Edges may share endpoints (raster-traced rings revisit
    // corners) without counting as an intersection.
    const std::size_t n = ring.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        const XY a{ring[i].lon, ring[i].lat};
        const XY b{ring[i + 1].lon, ring[i + 1].lat};
        for (std::size_t j = i + 1; j < n; ++j) {
            const XY c{ring[j].lon, ring[j].lat};
            const XY d{ring[j + 1].lon, ring[j + 1].lat};
            if (segments_cross_properly(a, b, c, d))
                throw InvalidRing("ring edges cross");
        }
    }
}

struct Anchor {
    double lon0 = 0.0;
    double lat0 = 0.0;
};

Anchor ring_anchor(const std::vector<Point>& ring) {
    // Mean of the distinct vertices (last == first, skip it).
    double lon = 0.0, lat = 0.0;
    const std::size_t n = ring.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        lon += ring[i].lon;
        lat += ring[i].lat;
    }
    return {lon / static_cast<double>(n), lat / static_cast<double>(n)};
}

double ring_area_km2(const std::vector<Point>& ring, const Anchor& anchor) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const XY a = project_km(ring[i], anchor.lon0, anchor.lat0);
        const XY b = project_km(ring[i + 1], anchor.lon0, anchor.lat0);
        acc += a.x * b.y - b.x * a.y;
    }
    return std::abs(acc) * 0.5;
}

bool point_in_ring(const Point& pt, const std::vector<Point>& ring) {
    // Even-odd ray cast; boundary points count as inside.
    bool inside = false;
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const Point& a = ring[i];
        const Point& b = ring[i + 1];
        // Boundary check in lon/lat space.
        const double cr = (b.lon - a.lon) * (pt.lat - a.lat) - (b.lat - a.lat) * (pt.lon - a.lon);
        if (cr == 0.0 && pt.lon >= std::min(a.lon, b.lon) && pt.lon <= std::max(a.lon, b.lon) &&
            pt.lat >= std::min(a.lat, b.lat) && pt.lat <= std::max(a.lat, b.lat))
            return true;
        if ((a.lat > pt.lat) != (b.lat > pt.lat)) {
            const double x = a.lon + (pt.lat - a.lat) / (b.lat - a.lat) * (b.lon - a.lon);
            if (x > pt.lon) inside = !inside;
        }
    }
    return inside;
}

}  // namespace

void validate_polygon(const Polygon& p, bool check_self_intersection) {
    validate_ring(p.exterior, check_self_intersection);
    for (const auto& h : p.holes) validate_ring(h, check_self_intersection);
}

Polygon make_polygon(std::vector<Point> exterior, std::vector<std::vector<Point>> holes,
                     bool check_self_intersection) {
    Polygon p{std::move(exterior), std::move(holes)};
    validate_polygon(p, check_self_intersection);
    return p;
}

bool point_in_polygon(const Point& pt, const Polygon& poly) {
    if (!point_in_ring(pt, poly.exterior)) return false;
    for (const auto& h : poly.holes) {
        // Strictly interior to a hole means outside; hole boundary still
        // belongs to the polygon.
        bool on_edge = false;
        for (std::size_t i = 0; i + 1 < h.size(); ++i) {
            const Point& a = h[i];
            const Point& b = h[i + 1];
            const double cr =
                (b.lon - a.lon) * (pt.lat - a.lat) - (b.lat - a.lat) * (pt.lon - a.lon);
            if (cr == 0.0 && pt.lon >= std::min(a.lon, b.lon) && pt.lon <= std::max(a.lon, b.lon) &&
                pt.lat >= std::min(a.lat, b.lat) && pt.lat <= std::max(a.lat, b.lat)) {
                on_edge = true;
                break;
            }
        }
        if (on_edge) continue;
        if (point_in_ring(pt, h)) return false;
    }
    return true;
}

double polygon_area_km2(const Polygon& p) {
    validate_polygon(p);
    const Anchor anchor = ring_anchor(p.exterior);
    double area = ring_area_km2(p.exterior, anchor);
    for (const auto& h : p.holes) area -= ring_area_km2(h, anchor);
    return std::max(area, 0.0);
}

double polygon_diameter_m(const Polygon& p) {
    const Anchor anchor = ring_anchor(p.exterior);
    double best = 0.0;
    const std::size_t n = p.exterior.size() - 1;
    for (std::size_t i = 0; i < n; ++i) {
        const XY a = project_m(p.exterior[i], anchor.lon0, anchor.lat0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const XY b = project_m(p.exterior[j], anchor.lon0, anchor.lat0);
            best = std::max(best, std::hypot(a.x - b.x, a.y - b.y));
        }
    }
    return best;
}

namespace {

struct ClosestPair {
    double dist_m = std::numeric_limits<double>::infinity();
    Point on_a;
    Point on_b;
};

void scan_rings(const std::vector<Point>& ra, const std::vector<Point>& rb,
                const Anchor& anchor, ClosestPair& acc) {
    for (std::size_t i = 0; i + 1 < ra.size(); ++i) {
        const XY a0 = project_m(ra[i], anchor.lon0, anchor.lat0);
        const XY a1 = project_m(ra[i + 1], anchor.lon0, anchor.lat0);
        for (std::size_t j = 0; j + 1 < rb.size(); ++j) {
            const XY b0 = project_m(rb[j], anchor.lon0, anchor.lat0);
            const XY b1 = project_m(rb[j + 1], anchor.lon0, anchor.lat0);
            if (segments_intersect(a0, a1, b0, b1)) {
                acc.dist_m = 0.0;
                acc.on_a = ra[i];
                acc.on_b = rb[j];
                return;
            }
            // Endpoint of one segment against the other, both directions.
            for (int side = 0; side < 2; ++side) {
                const XY& p = side == 0 ? a0 : a1;
                const Point& p_geo = side == 0 ? ra[i] : ra[i + 1];
                const double d = point_segment_distance(p, b0, b1);
                if (d < acc.dist_m) {
                    const XY q = point_segment_closest(p, b0, b1);
                    acc.dist_m = d;
                    acc.on_a = p_geo;
                    acc.on_b = {anchor.lon0 + q.x / (kMetersPerDegree * std::cos(anchor.lat0 * M_PI / 180.0)),
                                anchor.lat0 + q.y / kMetersPerDegree};
                }
            }
            for (int side = 0; side < 2; ++side) {
                const XY& p = side == 0 ? b0 : b1;
                const Point& p_geo = side == 0 ? rb[j] : rb[j + 1];
                const double d = point_segment_distance(p, a0, a1);
                if (d < acc.dist_m) {
                    const XY q = point_segment_closest(p, a0, a1);
                    acc.dist_m = d;
                    acc.on_a = {anchor.lon0 + q.x / (kMetersPerDegree * std::cos(anchor.lat0 * M_PI / 180.0)),
                                anchor.lat0 + q.y / kMetersPerDegree};
                    acc.on_b = p_geo;
                }
            }
        }
    }
}

ClosestPair closest_pair(const Polygon& a, const Polygon& b) {
    validate_polygon(a);
    validate_polygon(b);
    const Anchor aa = ring_anchor(a.exterior);
    const Anchor ab = ring_anchor(b.exterior);
    const Anchor anchor{(aa.lon0 + ab.lon0) / 2.0, (aa.lat0 + ab.lat0) / 2.0};

    ClosestPair acc;
    // Containment: one boundary entirely inside the other.
    if (point_in_polygon(a.exterior.front(), b) || point_in_polygon(b.exterior.front(), a)) {
        acc.dist_m = 0.0;
        acc.on_a = a.exterior.front();
        acc.on_b = b.exterior.front();
        return acc;
    }
    scan_rings(a.exterior, b.exterior, anchor, acc);
    return acc;
}

}  // namespace

double min_distance_m(const Polygon& a, const Polygon& b) {
    return closest_pair(a, b).dist_m;
}

std::pair<Point, Point> closest_boundary_points(const Polygon& a, const Polygon& b) {
    const ClosestPair cp = closest_pair(a, b);
    return {cp.on_a, cp.on_b};
}

bool segment_intersects_polygon(const Point& p, const Point& q, const Polygon& poly) {
    validate_polygon(poly);
    const Anchor anchor = ring_anchor(poly.exterior);
    const XY a = project_m(p, anchor.lon0, anchor.lat0);
    const XY b = project_m(q, anchor.lon0, anchor.lat0);
    for (std::size_t i = 0; i + 1 < poly.exterior.size(); ++i) {
        const XY c = project_m(poly.exterior[i], anchor.lon0, anchor.lat0);
        const XY d = project_m(poly.exterior[i + 1], anchor.lon0, anchor.lat0);
        if (segments_intersect(a, b, c, d)) return true;
    }
    // Fully inside: no boundary hit but endpoints interior.
    return point_in_polygon(p, poly) || point_in_polygon(q, poly);
}

bool segment_crosses(const Polygon& a, const Polygon& b,
                     const std::vector<Polygon>& obstacles) {
    if (obstacles.empty()) return false;
    const auto [pa, pb] = closest_boundary_points(a, b);
    for (const Polygon& obs : obstacles)
        if (segment_intersects_polygon(pa, pb, obs)) return true;
    return false;
}

BoundingBox polygon_bbox(const Polygon& p) {
    BoundingBox box{p.exterior.front().lon, p.exterior.front().lat, p.exterior.front().lon,
                    p.exterior.front().lat};
    for (const Point& pt : p.exterior) box.expand(pt);
    return box;
}

double bbox_distance_m(const BoundingBox& a, const BoundingBox& b) {
    const double dlon = std::max({a.lon_min - b.lon_max, b.lon_min - a.lon_max, 0.0});
    const double dlat = std::max({a.lat_min - b.lat_max, b.lat_min - a.lat_max, 0.0});
    const double mid_lat = (a.lat_min + a.lat_max + b.lat_min + b.lat_max) / 4.0;
    const double dx = dlon * kMetersPerDegree * std::cos(mid_lat * M_PI / 180.0);
    const double dy = dlat * kMetersPerDegree;
    return std::hypot(dx, dy);
}

}  // namespace regiongen
