#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "regiongen/geometry.hpp"
#include "regiongen/raster.hpp"
#include "regiongen/timeseries.hpp"

namespace regiongen {

struct FileUnreadable : std::runtime_error {
    explicit FileUnreadable(const std::string& path)
        : std::runtime_error("cannot read " + path) {}
};
struct AllRowsMalformed : std::runtime_error {
    AllRowsMalformed() : std::runtime_error("no parseable record row") {}
};
struct InvalidJson : std::runtime_error {
    explicit InvalidJson(const std::string& what) : std::runtime_error(what) {}
};
struct NoRoads : std::runtime_error {
    NoRoads() : std::runtime_error("geometry contains no road feature") {}
};
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct ServiceRecord {
    std::int64_t timestamp = 0;  // UTC epoch seconds
    Point location;
};

struct RecordParseStats {
    std::int64_t parsed = 0;
    std::int64_t malformed = 0;
    std::int64_t out_of_bbox = 0;
};

/// RFC 3339 timestamp ("2021-03-04T05:06:07Z" or with a numeric offset) to
/// UTC epoch seconds. Returns nullopt on malformed input.
std::optional<std::int64_t> parse_rfc3339(const std::string& text);

std::string format_rfc3339(std::int64_t epoch_seconds);

/// CSV with header "timestamp,lat,lon". Malformed rows and rows outside the
/// bounding box are counted and skipped.
std::vector<ServiceRecord> parse_records(const std::string& path,
                                         const std::optional<BoundingBox>& bbox,
                                         RecordParseStats* stats = nullptr);

struct GeometrySet {
    std::vector<Polyline> roads;
    std::vector<Polygon> obstacles;
    int skipped_features = 0;
};

/// GeoJSON FeatureCollection: LineString/MultiLineString features with
/// property kind == "road", Polygon/MultiPolygon with kind == "obstacle".
/// Anything else is skipped and counted.
GeometrySet parse_geometry(const std::string& path);

struct BinStats {
    std::int64_t assigned = 0;
    std::int64_t unassigned_location = 0;
    std::int64_t out_of_time = 0;
};

/// D[t][i] = records in interval t falling inside element polygon i.
/// Boundary ties go to the lowest element index. Lookup runs through a
/// uniform grid over element bounding boxes.
DemandMatrix bin_records(const std::vector<ServiceRecord>& records,
                         const std::vector<Polygon>& element_polygons,
                         std::int64_t interval_seconds, std::int64_t t0, std::int64_t t_end,
                         BinStats* stats = nullptr);

struct PipelineConfig {
    std::int64_t interval_seconds = 3600;
    double alpha = 0.0;               // element filter, mean daily demand
    double tau_m = 50.0;              // adjacency threshold
    double max_area_km2 = 5.0;        // L
    int dilation_kernel = 5;
    int raster_width = 1024;
    int raster_height = 1024;
    double predictability_weight = 0.7;  // w
    double lambda = 0.7;                 // greedy growth trade-off
    long long max_epochs = 200000;
    int acf_lag = 0;  // 0 derives the one-day lag from the interval
    std::uint64_t seed = 1;
    double min_daily_demand = 1.0;  // evaluation retention threshold
    double standalone_acf_threshold = 0.5;
    bool optimizer_restarts = true;  // perturbation restarts after closure
    std::optional<BoundingBox> bbox;

    int lag() const;
    void validate() const;
};

/// Flat key = value file; '#' starts a comment. Unknown keys are an error.
PipelineConfig load_config(const std::string& path);

/// Point-in-polygon membership over a list of polygons with a uniform-grid
/// bucket index; ties resolve to the lowest index. Returns -1 when no
/// polygon contains the point.
class SpatialIndex {
public:
    explicit SpatialIndex(const std::vector<Polygon>& polygons);
    int locate(const Point& p) const;

private:
    const std::vector<Polygon>* polygons_;
    BoundingBox extent_;
    int grid_w_ = 1, grid_h_ = 1;
    std::vector<std::vector<int>> buckets_;
};

}  // namespace regiongen
