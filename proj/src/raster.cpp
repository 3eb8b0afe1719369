#include "regiongen/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <unordered_map>

namespace regiongen {

RasterGrid make_raster(int width, int height, const GeoTransform& geo) {
    RasterGrid r;
    r.width = width;
    r.height = height;
    r.pixels.assign(static_cast<std::size_t>(width) * height, 0);
    r.geo = geo;
    return r;
}

namespace {

struct PixelCoord {
    int col = 0;
    int row = 0;
};

PixelCoord to_pixel(const Point& p, const GeoTransform& geo, int width, int height) {
    int col = static_cast<int>(std::floor((p.lon - geo.lon0) / geo.lon_step));
    int row = static_cast<int>(std::floor((p.lat - geo.lat0) / geo.lat_step));
    col = std::clamp(col, 0, width - 1);
    row = std::clamp(row, 0, height - 1);
    return {col, row};
}

void bresenham(RasterGrid& r, PixelCoord a, PixelCoord b) {
    int x0 = a.col, y0 = a.row;
    const int x1 = b.col, y1 = b.row;
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        r.set(x0, y0, 1);
        if (x0 == x1 && y0 == y1) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

void fill_polygon(RasterGrid& r, const Polygon& poly) {
    // Pixel-center parity fill, then Bresenham along every ring edge so
    // sub-pixel-wide parts still come out contiguous.
    const BoundingBox box = polygon_bbox(poly);
    const PixelCoord lo = to_pixel({box.lon_min, box.lat_min}, r.geo, r.width, r.height);
    const PixelCoord hi = to_pixel({box.lon_max, box.lat_max}, r.geo, r.width, r.height);
    for (int row = lo.row; row <= hi.row; ++row) {
        const double lat = r.geo.lat0 + (row + 0.5) * r.geo.lat_step;
        for (int col = lo.col; col <= hi.col; ++col) {
            const double lon = r.geo.lon0 + (col + 0.5) * r.geo.lon_step;
            if (point_in_polygon({lon, lat}, poly)) r.set(col, row, 1);
        }
    }
    auto trace_ring = [&](const std::vector<Point>& ring) {
        for (std::size_t i = 0; i + 1 < ring.size(); ++i)
            bresenham(r, to_pixel(ring[i], r.geo, r.width, r.height),
                      to_pixel(ring[i + 1], r.geo, r.width, r.height));
    };
    trace_ring(poly.exterior);
    for (const auto& h : poly.holes) trace_ring(h);
}

}  // namespace

std::pair<RasterGrid, RasterGrid> rasterize(const std::vector<Polyline>& roads,
                                            const std::vector<Polygon>& obstacles,
                                            int width, int height,
                                            const BoundingBox& bbox) {
    if (roads.empty()) throw EmptyGeometry();
    if (width < 16 || height < 16) throw ResolutionTooLow();

    GeoTransform geo;
    geo.lon0 = bbox.lon_min;
    geo.lat0 = bbox.lat_min;
    geo.lon_step = (bbox.lon_max - bbox.lon_min) / width;
    geo.lat_step = (bbox.lat_max - bbox.lat_min) / height;
    if (geo.lon_step <= 0.0 || geo.lat_step <= 0.0)
        throw std::invalid_argument("degenerate bounding box");

    RasterGrid road_raster = make_raster(width, height, geo);
    RasterGrid obstacle_raster = make_raster(width, height, geo);

    for (const Polyline& line : roads) {
        if (line.size() == 1) {
            const PixelCoord p = to_pixel(line[0], geo, width, height);
            road_raster.set(p.col, p.row, 1);
        }
        for (std::size_t i = 0; i + 1 < line.size(); ++i)
            bresenham(road_raster, to_pixel(line[i], geo, width, height),
                      to_pixel(line[i + 1], geo, width, height));
    }
    for (const Polygon& obs : obstacles) fill_polygon(obstacle_raster, obs);
    return {std::move(road_raster), std::move(obstacle_raster)};
}

RasterGrid dilate(const RasterGrid& r, int kernel) {
    if (kernel < 1 || kernel % 2 == 0) throw EvenKernel();
    const int radius = kernel / 2;
    if (radius == 0) return r;

    // Square kernel separates into a horizontal and a vertical 1-D pass.
    RasterGrid tmp = make_raster(r.width, r.height, r.geo);
    for (int row = 0; row < r.height; ++row) {
        for (int col = 0; col < r.width; ++col) {
            std::uint8_t v = 0;
            const int lo = std::max(0, col - radius);
            const int hi = std::min(r.width - 1, col + radius);
            for (int c = lo; c <= hi && !v; ++c) v = r.at(c, row);
            tmp.set(col, row, v);
        }
    }
    RasterGrid out = make_raster(r.width, r.height, r.geo);
    for (int row = 0; row < r.height; ++row) {
        for (int col = 0; col < r.width; ++col) {
            std::uint8_t v = 0;
            const int lo = std::max(0, row - radius);
            const int hi = std::min(r.height - 1, row + radius);
            for (int rr = lo; rr <= hi && !v; ++rr) v = tmp.at(col, rr);
            out.set(col, row, v);
        }
    }
    return out;
}

namespace {

// Neighbors in the p2..p9 order: N, NE, E, SE, S, SW, W, NW.
// Grid rows grow northward, so N is row + 1.
constexpr std::array<std::array<int, 2>, 8> kRing = {
    {{0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}}};

struct ThinScratch {
    std::array<std::uint8_t, 8> nb{};

    int load(const RasterGrid& g, int col, int row) {
        int count = 0;
        for (int k = 0; k < 8; ++k) {
            const int c = col + kRing[k][0];
            const int r = row + kRing[k][1];
            nb[k] = g.in_bounds(c, r) ? g.at(c, r) : 0;
            count += nb[k];
        }
        return count;
    }
    int transitions() const {
        int t = 0;
        for (int k = 0; k < 8; ++k)
            if (nb[k] == 0 && nb[(k + 1) % 8] == 1) ++t;
        return t;
    }
};

bool deletable(const RasterGrid& g, int col, int row, int phase, ThinScratch& s) {
    if (!g.at(col, row)) return false;
    const int b = s.load(g, col, row);
    if (b < 2 || b > 6) return false;
    if (s.transitions() != 1) return false;
    const std::uint8_t n = s.nb[0], e = s.nb[2], so = s.nb[4], w = s.nb[6];
    if (phase == 0) return (n & e & so) == 0 && (e & so & w) == 0;
    return (n & e & w) == 0 && (n & so & w) == 0;
}

}  // namespace

RasterGrid thin(const RasterGrid& r) {
    RasterGrid g = r;
    ThinScratch s;
    std::vector<std::pair<int, int>> candidates;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int phase = 0; phase < 2; ++phase) {
            candidates.clear();
            for (int row = 0; row < g.height; ++row)
                for (int col = 0; col < g.width; ++col)
                    if (deletable(g, col, row, phase, s)) candidates.emplace_back(col, row);
            // Sequential commit with re-check: a pixel whose neighborhood was
            // altered by an earlier deletion may no longer be safe to remove.
            for (const auto& [col, row] : candidates) {
                if (deletable(g, col, row, phase, s)) {
                    g.set(col, row, 0);
                    changed = true;
                }
            }
        }
    }
    return g;
}

LabeledRaster fuse_and_label(const RasterGrid& skeleton, const RasterGrid& obstacle_raster) {
    if (skeleton.width != obstacle_raster.width || skeleton.height != obstacle_raster.height)
        throw DimensionMismatch();

    LabeledRaster out;
    out.width = skeleton.width;
    out.height = skeleton.height;
    out.geo = skeleton.geo;
    out.labels.assign(static_cast<std::size_t>(out.width) * out.height, 0);

    const auto boundary = [&](int col, int row) {
        return skeleton.at(col, row) || obstacle_raster.at(col, row);
    };

    std::vector<std::int32_t>& labels = out.labels;
    std::deque<std::pair<int, int>> queue;
    int next_label = 0;
    for (int row = 0; row < out.height; ++row) {
        for (int col = 0; col < out.width; ++col) {
            const std::size_t idx = static_cast<std::size_t>(row) * out.width + col;
            if (labels[idx] != 0 || boundary(col, row)) continue;
            ++next_label;
            labels[idx] = next_label;
            queue.push_back({col, row});
            while (!queue.empty()) {
                const auto [c, r] = queue.front();
                queue.pop_front();
                static constexpr int d4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
                for (const auto& d : d4) {
                    const int nc = c + d[0], nr = r + d[1];
                    if (nc < 0 || nc >= out.width || nr < 0 || nr >= out.height) continue;
                    const std::size_t nidx = static_cast<std::size_t>(nr) * out.width + nc;
                    if (labels[nidx] != 0 || boundary(nc, nr)) continue;
                    labels[nidx] = next_label;
                    queue.push_back({nc, nr});
                }
            }
        }
    }
    out.component_count = next_label;
    return out;
}

namespace {

// Directed boundary edge between pixel corners; the component pixel lies on
// the left of the travel direction. dir: 0=E, 1=N, 2=W, 3=S.
struct TraceEdge {
    int c = 0;
    int r = 0;
    int dir = 0;
    bool used = false;
};

constexpr int kDirDc[4] = {1, 0, -1, 0};
constexpr int kDirDr[4] = {0, 1, 0, -1};

std::uint64_t corner_key(int c, int r, int width) {
    return static_cast<std::uint64_t>(r) * (width + 2) + c;
}

}  // namespace

std::vector<std::pair<int, Polygon>> vectorize(const LabeledRaster& l) {
    // Gather boundary edges per component.
    std::vector<std::vector<TraceEdge>> edges(static_cast<std::size_t>(l.component_count) + 1);
    const auto label_at = [&](int col, int row) -> std::int32_t {
        if (col < 0 || col >= l.width || row < 0 || row >= l.height) return 0;
        return l.at(col, row);
    };
    for (int row = 0; row < l.height; ++row) {
        for (int col = 0; col < l.width; ++col) {
            const std::int32_t k = l.at(col, row);
            if (k == 0) continue;
            auto& bucket = edges[static_cast<std::size_t>(k)];
            if (label_at(col, row - 1) != k) bucket.push_back({col, row, 0});          // south side, eastbound
            if (label_at(col, row + 1) != k) bucket.push_back({col + 1, row + 1, 2});  // north side, westbound
            if (label_at(col - 1, row) != k) bucket.push_back({col, row + 1, 3});      // west side, southbound
            if (label_at(col + 1, row) != k) bucket.push_back({col + 1, row, 1});      // east side, northbound
        }
    }

    std::vector<std::pair<int, Polygon>> result;
    result.reserve(static_cast<std::size_t>(l.component_count));

    for (int k = 1; k <= l.component_count; ++k) {
        auto& bucket = edges[static_cast<std::size_t>(k)];
        std::unordered_map<std::uint64_t, std::array<int, 2>> outgoing;
        outgoing.reserve(bucket.size());
        for (std::size_t i = 0; i < bucket.size(); ++i) {
            const std::uint64_t key = corner_key(bucket[i].c, bucket[i].r, l.width);
            auto [it, inserted] = outgoing.try_emplace(key, std::array<int, 2>{-1, -1});
            auto& slots = it->second;
            (slots[0] < 0 ? slots[0] : slots[1]) = static_cast<int>(i);
        }

        auto next_edge = [&](int from_dir, int c, int r) -> int {
            const auto it = outgoing.find(corner_key(c, r, l.width));
            if (it == outgoing.end()) return -1;
            // Prefer the sharpest right turn so an exterior that touches
            // itself diagonally stays a single loop while pinched holes
            // split into simple rings.
            int best = -1, best_rank = 4;
            for (int slot = 0; slot < 2; ++slot) {
                const int ei = it->second[slot];
                if (ei < 0 || bucket[static_cast<std::size_t>(ei)].used) continue;
                const int d = bucket[static_cast<std::size_t>(ei)].dir;
                const int diff = (from_dir - d + 4) % 4;
                const int rank = diff == 1 ? 0 : (diff == 0 ? 1 : 2);  // right < straight < left
                if (rank < best_rank) {
                    best_rank = rank;
                    best = ei;
                }
            }
            return best;
        };

        std::vector<std::vector<Point>> rings_ccw;
        std::vector<std::vector<Point>> rings_cw;
        for (std::size_t start = 0; start < bucket.size(); ++start) {
            if (bucket[start].used) continue;
            std::vector<std::pair<int, int>> corners;
            std::vector<int> dirs;
            int cur = static_cast<int>(start);
            bucket[static_cast<std::size_t>(cur)].used = true;
            while (cur >= 0) {
                const TraceEdge& e = bucket[static_cast<std::size_t>(cur)];
                if (dirs.empty() || dirs.back() != e.dir) {
                    corners.emplace_back(e.c, e.r);
                    dirs.push_back(e.dir);
                }
                const int hc = e.c + kDirDc[e.dir];
                const int hr = e.r + kDirDr[e.dir];
                cur = next_edge(e.dir, hc, hr);
                if (cur >= 0) bucket[static_cast<std::size_t>(cur)].used = true;
            }
            // Close, dropping a redundant final collinear vertex if the loop
            // start continues the last direction.
            if (dirs.size() > 1 && dirs.front() == dirs.back()) corners.erase(corners.begin());
            double signed_area = 0.0;
            for (std::size_t i = 0; i < corners.size(); ++i) {
                const auto& [x0, y0] = corners[i];
                const auto& [x1, y1] = corners[(i + 1) % corners.size()];
                signed_area += static_cast<double>(x0) * y1 - static_cast<double>(x1) * y0;
            }
            std::vector<Point> ring;
            ring.reserve(corners.size() + 1);
            for (const auto& [c, r] : corners) ring.push_back(l.geo.pixel_corner(c, r));
            ring.push_back(ring.front());
            (signed_area > 0 ? rings_ccw : rings_cw).push_back(std::move(ring));
        }

        Polygon poly;
        if (rings_ccw.size() == 1) {
            poly.exterior = std::move(rings_ccw.front());
        } else {
            // Multiple positive loops should not occur for a 4-connected
            // component; fall back to the largest one.
            std::size_t best = 0;
            double best_area = -1.0;
            for (std::size_t i = 0; i < rings_ccw.size(); ++i) {
                Polygon tmp{rings_ccw[i], {}};
                const double a = polygon_area_km2(tmp);
                if (a > best_area) {
                    best_area = a;
                    best = i;
                }
            }
            poly.exterior = std::move(rings_ccw[best]);
        }
        poly.holes = std::move(rings_cw);
        result.emplace_back(k, std::move(poly));
    }
    return result;
}

void write_pgm(const RasterGrid& r, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path);
    std::fprintf(f, "P5\n%d %d\n255\n", r.width, r.height);
    // Top row first so images view north-up.
    std::vector<std::uint8_t> line(static_cast<std::size_t>(r.width));
    for (int row = r.height - 1; row >= 0; --row) {
        for (int col = 0; col < r.width; ++col)
            line[static_cast<std::size_t>(col)] = r.at(col, row) ? 255 : 0;
        std::fwrite(line.data(), 1, line.size(), f);
    }
    std::fclose(f);
}

}  // namespace regiongen
