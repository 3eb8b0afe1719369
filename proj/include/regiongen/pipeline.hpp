#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "regiongen/co_optimize.hpp"
#include "regiongen/elements.hpp"
#include "regiongen/ingest.hpp"
#include "regiongen/partition.hpp"
#include "regiongen/synth.hpp"

namespace regiongen {

/// Rasterize -> dilate -> thin -> fuse -> vectorize. Elements come back
/// with polygons and areas only; demand is attached separately.
std::vector<AtomicElement> segment_city(const GeometrySet& geometry, const PipelineConfig& cfg);

/// Uniform gx x gy cells as atomic elements (baseline partitions and the
/// scalability sweep).
std::vector<AtomicElement> grid_elements(const BoundingBox& bbox, int gx, int gy);

struct TimeWindow {
    std::int64_t t0 = 0;
    std::int64_t t_end = 0;        // exclusive
    std::int64_t train_end = 0;    // region generation sees [t0, train_end)
    int total_intervals = 0;
    int train_intervals = 0;
};

/// Interval-aligned record span with the last 20% held out (10% validation
/// + 10% test).
TimeWindow derive_time_window(const std::vector<ServiceRecord>& records,
                              const PipelineConfig& cfg);

/// Bin train-window records into per-element series, cache each element's
/// daily ACF, and count serviced/total geohash cells (cells claimed once,
/// lowest element id first).
void attach_demand(std::vector<AtomicElement>& elements,
                   const std::vector<ServiceRecord>& records, const PipelineConfig& cfg,
                   const TimeWindow& window);

struct OptimizeOutput {
    std::vector<AtomicElement> elements;  // retained after filtering
    std::vector<char> standalone;
    AggregatableGraph graph;
    ProblemInstance instance;          // dense over non-standalone elements
    std::vector<int> node_to_element;  // dense node -> index into elements
    ScaleEstimate scale;
    ParetoSet pareto;
    std::vector<EpochTrace> trace;
    double filter_recall = 1.0;
    int dropped_elements = 0;
};

/// Filter -> standalone -> edges -> scale estimate -> {d_balance, greedy,
/// fluid} seeds -> co-optimization.
OptimizeOutput run_optimize(std::vector<AtomicElement> elements,
                            const std::vector<Polygon>& obstacles, const PipelineConfig& cfg);

struct Region {
    int region_id = 0;                  // 1-based; standalone singletons follow the clusters
    std::vector<int> element_ids;
    std::vector<Polygon> parts;         // member polygons, exported as a MultiPolygon
    std::optional<double> acf_daily;    // unset when the region series is flat
    double specificity = 0.0;
    double area_km2 = 0.0;
    double mean_daily_demand = 0.0;
};

/// Clusters of `solution` plus one singleton region per standalone element.
std::vector<Region> assemble_regions(const OptimizeOutput& out, const ClusterSolution& solution,
                                     const PipelineConfig& cfg);

struct RegionMetricsRow {
    std::string method;
    int region_id = 0;
    std::optional<double> acf_daily;
    double specificity = 0.0;
    double area_km2 = 0.0;
    double mean_daily_demand = 0.0;
};

struct EvalSummary {
    std::string method;
    int regions = 0;
    double mean_acf = 0.0;  // over regions with a defined ACF
    double mean_specificity = 0.0;
    double mape = 0.0;
    double recall = 0.0;
    int horizon = 0;
};

struct EvalResult {
    std::vector<RegionMetricsRow> rows;
    EvalSummary summary;
};

/// Recompute every metric from the records: region series over the full
/// span, daily ACF, geohash specificity, and seasonal-naive MAPE over the
/// last 10% of intervals.
EvalResult evaluate_regions(const std::vector<Region>& regions,
                            const std::vector<ServiceRecord>& records,
                            const PipelineConfig& cfg, const std::string& method_name);

/// Equal-count uniform grid: the g x g grid whose count of record-occupied
/// cells lands closest to target_count.
std::vector<Region> grid_baseline_regions(const BoundingBox& bbox, int target_count,
                                          const std::vector<ServiceRecord>& records,
                                          const PipelineConfig& cfg);

struct ScaleRow {
    int n_elements = 0;
    int m_star = 0;
    double wall_seconds = 0.0;
    long long evaluations = 0;  // converge epochs (gain evaluations)
    long long outer_iterations = 0;
};

std::vector<ScaleRow> run_scalability(const SyntheticCitySpec& spec,
                                      const std::vector<int>& sizes, PipelineConfig cfg);

// --- file formats ----------------------------------------------------------

void write_elements_geojson(const std::string& path, const std::vector<AtomicElement>& elements);
std::vector<AtomicElement> read_elements_geojson(const std::string& path);

void write_regions_geojson(const std::string& path, const std::vector<Region>& regions);
std::vector<Region> read_regions_geojson(const std::string& path);

void write_pareto_json(const std::string& path, const OptimizeOutput& out,
                       const PipelineConfig& cfg);

void write_trace_csv(const std::string& path, const std::vector<EpochTrace>& trace);

void write_metrics_csv(const std::string& path, const std::vector<EvalResult>& results);

void write_graph_text(const std::string& path, const AggregatableGraph& graph,
                      const std::vector<AtomicElement>& elements);

void write_scalability_csv(const std::string& path, const std::vector<ScaleRow>& rows);

}  // namespace regiongen
