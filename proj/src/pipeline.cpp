#include "regiongen/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <unordered_set>

#include <json.hpp>

#include "regiongen/raster.hpp"

namespace regiongen {

namespace {

using nlohmann::ordered_json;

BoundingBox geometry_bbox(const GeometrySet& geometry) {
    bool init = false;
    BoundingBox box;
    auto grow = [&](const Point& p) {
        if (!init) {
            box = {p.lon, p.lat, p.lon, p.lat};
            init = true;
        } else {
            box.expand(p);
        }
    };
    for (const Polyline& line : geometry.roads)
        for (const Point& p : line) grow(p);
    for (const Polygon& poly : geometry.obstacles)
        for (const Point& p : poly.exterior) grow(p);
    if (!init) throw EmptyGeometry();
    return box;
}

}  // namespace

std::vector<AtomicElement> segment_city(const GeometrySet& geometry, const PipelineConfig& cfg) {
    const BoundingBox box = cfg.bbox ? *cfg.bbox : geometry_bbox(geometry);
    auto [road_raster, obstacle_raster] =
        rasterize(geometry.roads, geometry.obstacles, cfg.raster_width, cfg.raster_height, box);
    const RasterGrid dilated = dilate(road_raster, cfg.dilation_kernel);
    const RasterGrid skeleton = thin(dilated);
    const LabeledRaster labeled = fuse_and_label(skeleton, obstacle_raster);

    std::vector<AtomicElement> elements;
    elements.reserve(static_cast<std::size_t>(labeled.component_count));
    for (auto& [component, polygon] : vectorize(labeled)) {
        AtomicElement e;
        e.id = component;
        e.area_km2 = polygon_area_km2(polygon);
        e.polygon = std::move(polygon);
        elements.push_back(std::move(e));
    }
    return elements;
}

std::vector<AtomicElement> grid_elements(const BoundingBox& bbox, int gx, int gy) {
    if (gx < 1 || gy < 1) throw std::invalid_argument("grid dimensions must be positive");
    std::vector<AtomicElement> elements;
    elements.reserve(static_cast<std::size_t>(gx) * gy);
    const double dlon = (bbox.lon_max - bbox.lon_min) / gx;
    const double dlat = (bbox.lat_max - bbox.lat_min) / gy;
    int id = 1;
    for (int r = 0; r < gy; ++r) {
        for (int c = 0; c < gx; ++c) {
            const double lon0 = bbox.lon_min + c * dlon;
            const double lat0 = bbox.lat_min + r * dlat;
            AtomicElement e;
            e.id = id++;
            e.polygon = make_polygon({{lon0, lat0},
                                      {lon0 + dlon, lat0},
                                      {lon0 + dlon, lat0 + dlat},
                                      {lon0, lat0 + dlat},
                                      {lon0, lat0}});
            e.area_km2 = polygon_area_km2(e.polygon);
            elements.push_back(std::move(e));
        }
    }
    return elements;
}

TimeWindow derive_time_window(const std::vector<ServiceRecord>& records,
                              const PipelineConfig& cfg) {
    if (records.empty()) throw EmptyTimeRange();
    std::int64_t lo = records.front().timestamp, hi = records.front().timestamp;
    for (const ServiceRecord& r : records) {
        lo = std::min(lo, r.timestamp);
        hi = std::max(hi, r.timestamp);
    }
    TimeWindow w;
    const std::int64_t step = cfg.interval_seconds;
    w.t0 = (lo / step) * step;
    if (lo < 0 && lo % step != 0) w.t0 -= step;
    w.t_end = ((hi - w.t0) / step + 1) * step + w.t0;
    w.total_intervals = static_cast<int>((w.t_end - w.t0) / step);
    const int holdout = 2 * (w.total_intervals / 10);  // validation + test
    w.train_intervals = std::max(1, w.total_intervals - holdout);
    w.train_end = w.t0 + static_cast<std::int64_t>(w.train_intervals) * step;
    return w;
}

void attach_demand(std::vector<AtomicElement>& elements,
                   const std::vector<ServiceRecord>& records, const PipelineConfig& cfg,
                   const TimeWindow& window) {
    std::vector<Polygon> polygons;
    polygons.reserve(elements.size());
    for (const AtomicElement& e : elements) polygons.push_back(e.polygon);

    const DemandMatrix d = bin_records(records, polygons, cfg.interval_seconds, window.t0,
                                       window.train_end, nullptr);
    const int lag = cfg.lag();
    for (std::size_t i = 0; i < elements.size(); ++i) {
        AtomicElement& e = elements[i];
        e.series.assign(static_cast<std::size_t>(d.num_intervals), 0.0);
        for (int t = 0; t < d.num_intervals; ++t)
            e.series[static_cast<std::size_t>(t)] = d.at(t, static_cast<int>(i));
        try {
            e.acf_daily = acf(e.series, lag);
        } catch (const std::exception&) {
            e.acf_daily.reset();
        }
    }

    // Geohash cells: centers claimed once, lowest element index first.
    std::vector<std::uint64_t> occupied;
    occupied.reserve(records.size());
    for (const ServiceRecord& r : records) {
        if (r.timestamp < window.t0 || r.timestamp >= window.train_end) continue;
        occupied.push_back(geohash_index(r.location).key());
    }
    std::sort(occupied.begin(), occupied.end());
    occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());

    std::unordered_set<std::uint64_t> claimed;
    for (AtomicElement& e : elements) {
        const BoundingBox box = polygon_bbox(e.polygon);
        const GeohashIndex lo = geohash_index({box.lon_min, box.lat_min});
        const GeohashIndex hi = geohash_index({box.lon_max, box.lat_max});
        double ts = 0.0, vs = 0.0;
        for (std::uint32_t col = lo.col; col <= hi.col; ++col) {
            for (std::uint32_t row = lo.row; row <= hi.row; ++row) {
                const GeohashIndex idx{col, row};
                if (claimed.count(idx.key())) continue;
                if (!point_in_polygon(geohash_cell_center(idx), e.polygon)) continue;
                claimed.insert(idx.key());
                ts += 1.0;
                if (std::binary_search(occupied.begin(), occupied.end(), idx.key())) vs += 1.0;
            }
        }
        e.total_cells = ts;
        e.serviced_cells = vs;
    }
}

namespace {

ProblemInstance build_instance(const std::vector<AtomicElement>& elements,
                               const AggregatableGraph& graph,
                               const std::vector<int>& node_to_element,
                               const PipelineConfig& cfg) {
    ProblemInstance inst;
    const int n = static_cast<int>(node_to_element.size());
    inst.adjacency.assign(static_cast<std::size_t>(n), {});
    std::vector<int> element_to_node(elements.size(), -1);
    for (int i = 0; i < n; ++i)
        element_to_node[static_cast<std::size_t>(node_to_element[static_cast<std::size_t>(i)])] = i;
    for (const auto& [u, v] : graph.edges) {
        const int du = element_to_node[static_cast<std::size_t>(u)];
        const int dv = element_to_node[static_cast<std::size_t>(v)];
        if (du < 0 || dv < 0) continue;
        inst.adjacency[static_cast<std::size_t>(du)].push_back(dv);
        inst.adjacency[static_cast<std::size_t>(dv)].push_back(du);
    }
    for (auto& nbrs : inst.adjacency) std::sort(nbrs.begin(), nbrs.end());

    const int t_total =
        n > 0 ? static_cast<int>(elements[static_cast<std::size_t>(node_to_element[0])].series.size())
              : 0;
    inst.demand.num_intervals = t_total;
    inst.demand.num_elements = n;
    inst.demand.interval_seconds = cfg.interval_seconds;
    inst.demand.values.assign(static_cast<std::size_t>(t_total) * n, 0.0);
    inst.service.total.assign(static_cast<std::size_t>(n), 0.0);
    inst.service.serviced.assign(static_cast<std::size_t>(n), 0.0);
    inst.areas_km2.assign(static_cast<std::size_t>(n), 0.0);
    inst.weights.assign(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        const AtomicElement& e = elements[static_cast<std::size_t>(node_to_element[static_cast<std::size_t>(i)])];
        double total = 0.0;
        for (int t = 0; t < t_total; ++t) {
            inst.demand.at(t, i) = e.series[static_cast<std::size_t>(t)];
            total += e.series[static_cast<std::size_t>(t)];
        }
        inst.service.total[static_cast<std::size_t>(i)] = e.total_cells;
        inst.service.serviced[static_cast<std::size_t>(i)] = e.serviced_cells;
        inst.areas_km2[static_cast<std::size_t>(i)] = e.area_km2;
        inst.weights[static_cast<std::size_t>(i)] = total;
    }
    inst.max_area_km2 = cfg.max_area_km2;
    inst.acf_lag = cfg.lag();
    return inst;
}

}  // namespace

OptimizeOutput run_optimize(std::vector<AtomicElement> elements,
                            const std::vector<Polygon>& obstacles, const PipelineConfig& cfg) {
    OptimizeOutput out;
    FilterResult filtered = filter_elements(elements, cfg.alpha, cfg.interval_seconds);
    out.elements = std::move(filtered.retained);
    out.filter_recall = filtered.recall;
    out.dropped_elements = filtered.dropped;

    out.standalone =
        mark_standalone(out.elements, cfg.max_area_km2, cfg.standalone_acf_threshold);
    out.graph = build_edges(out.elements, out.standalone, cfg.tau_m, obstacles);

    for (std::size_t i = 0; i < out.elements.size(); ++i)
        if (!out.standalone[i]) out.node_to_element.push_back(static_cast<int>(i));
    out.instance = build_instance(out.elements, out.graph, out.node_to_element, cfg);

    const int n = out.instance.n();
    if (n == 0) {
        out.scale = {0, false};
        return out;
    }
    if (n == 1) {
        out.scale = {1, true};
        ClusterSolution sol;
        sol.assignment = {0};
        sol.num_clusters = 1;
        evaluate_solution(out.instance, sol);
        out.pareto.solutions.push_back(std::move(sol));
        return out;
    }

    out.scale = estimate_cluster_scale(out.instance, [&](int m) {
        return d_balance(out.instance, m, 0.05, cfg.seed);
    });
    const int m_star = out.scale.m_star;

    std::vector<ClusterSolution> initials;
    initials.push_back(d_balance(out.instance, m_star, 0.05, cfg.seed));
    initials.push_back(greedy_grow(out.instance, m_star, cfg.lambda, cfg.seed + 1));
    initials.push_back(fluid_grow(out.instance, m_star, cfg.seed + 2));

    OptimizerConfig ocfg;
    ocfg.predictability_weight = cfg.predictability_weight;
    ocfg.max_epochs = cfg.max_epochs;
    ocfg.seed = cfg.seed;
    ocfg.restart_when_closed = cfg.optimizer_restarts;
    out.pareto = co_optimize(out.instance, initials, ocfg, &out.trace);
    return out;
}

std::vector<Region> assemble_regions(const OptimizeOutput& out, const ClusterSolution& solution,
                                     const PipelineConfig& cfg) {
    std::vector<Region> regions;
    const int m = solution.num_clusters;
    regions.resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) regions[static_cast<std::size_t>(j)].region_id = j + 1;

    const int t_total = out.instance.demand.num_intervals;
    std::vector<std::vector<double>> series(static_cast<std::size_t>(m),
                                            std::vector<double>(static_cast<std::size_t>(t_total), 0.0));
    std::vector<double> vs(static_cast<std::size_t>(m), 0.0), ts(static_cast<std::size_t>(m), 0.0);

    for (int node = 0; node < out.instance.n(); ++node) {
        const int j = solution.assignment[static_cast<std::size_t>(node)];
        const AtomicElement& e =
            out.elements[static_cast<std::size_t>(out.node_to_element[static_cast<std::size_t>(node)])];
        Region& region = regions[static_cast<std::size_t>(j)];
        region.element_ids.push_back(e.id);
        region.parts.push_back(e.polygon);
        region.area_km2 += e.area_km2;
        vs[static_cast<std::size_t>(j)] += e.serviced_cells;
        ts[static_cast<std::size_t>(j)] += e.total_cells;
        for (int t = 0; t < t_total; ++t)
            series[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)] +=
                e.series[static_cast<std::size_t>(t)];
    }
    const int lag = cfg.lag();
    for (int j = 0; j < m; ++j) {
        Region& region = regions[static_cast<std::size_t>(j)];
        region.specificity = ts[static_cast<std::size_t>(j)] > 0.0
                                 ? vs[static_cast<std::size_t>(j)] / ts[static_cast<std::size_t>(j)]
                                 : 0.0;
        region.mean_daily_demand =
            mean_daily_demand(series[static_cast<std::size_t>(j)], cfg.interval_seconds);
        try {
            region.acf_daily = acf(series[static_cast<std::size_t>(j)], lag);
        } catch (const std::exception&) {
            region.acf_daily.reset();
        }
    }

    // Standalone elements become singleton regions after the clusters.
    int next_id = m + 1;
    for (std::size_t i = 0; i < out.elements.size(); ++i) {
        if (!out.standalone[i]) continue;
        const AtomicElement& e = out.elements[i];
        Region region;
        region.region_id = next_id++;
        region.element_ids.push_back(e.id);
        region.parts.push_back(e.polygon);
        region.area_km2 = e.area_km2;
        region.specificity = e.total_cells > 0.0 ? e.serviced_cells / e.total_cells : 0.0;
        region.mean_daily_demand = mean_daily_demand(e.series, cfg.interval_seconds);
        region.acf_daily = e.acf_daily;
        regions.push_back(std::move(region));
    }
    return regions;
}

EvalResult evaluate_regions(const std::vector<Region>& regions,
                            const std::vector<ServiceRecord>& records,
                            const PipelineConfig& cfg, const std::string& method_name) {
    if (regions.empty()) throw std::invalid_argument("no regions to evaluate");
    const TimeWindow window = derive_time_window(records, cfg);

    // Flatten parts for point-in-region lookup; lowest region id wins ties.
    std::vector<Polygon> parts;
    std::vector<int> part_region;
    for (std::size_t r = 0; r < regions.size(); ++r) {
        for (const Polygon& p : regions[r].parts) {
            parts.push_back(p);
            part_region.push_back(static_cast<int>(r));
        }
    }
    const int m = static_cast<int>(regions.size());
    BinStats stats;
    const DemandMatrix by_part = bin_records(records, parts, cfg.interval_seconds, window.t0,
                                             window.t_end, &stats);
    ClusterSeries series;
    series.num_intervals = by_part.num_intervals;
    series.num_clusters = m;
    series.interval_seconds = cfg.interval_seconds;
    series.values.assign(static_cast<std::size_t>(by_part.num_intervals) * m, 0.0);
    for (int t = 0; t < by_part.num_intervals; ++t)
        for (int p = 0; p < by_part.num_elements; ++p)
            series.at(t, part_region[static_cast<std::size_t>(p)]) += by_part.at(t, p);

    // Specificity from scratch: cells claimed in region order.
    std::vector<std::uint64_t> occupied;
    occupied.reserve(records.size());
    for (const ServiceRecord& r : records) occupied.push_back(geohash_index(r.location).key());
    std::sort(occupied.begin(), occupied.end());
    occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());

    EvalResult result;
    const int lag = cfg.lag();
    std::unordered_set<std::uint64_t> claimed;
    double acf_sum = 0.0;
    int acf_count = 0;
    double spec_sum = 0.0;
    for (int r = 0; r < m; ++r) {
        RegionMetricsRow row;
        row.method = method_name;
        row.region_id = regions[static_cast<std::size_t>(r)].region_id;
        double ts = 0.0, vs = 0.0;
        for (const Polygon& poly : regions[static_cast<std::size_t>(r)].parts) {
            row.area_km2 += polygon_area_km2(poly);
            const BoundingBox box = polygon_bbox(poly);
            const GeohashIndex lo = geohash_index({box.lon_min, box.lat_min});
            const GeohashIndex hi = geohash_index({box.lon_max, box.lat_max});
            for (std::uint32_t col = lo.col; col <= hi.col; ++col) {
                for (std::uint32_t rowi = lo.row; rowi <= hi.row; ++rowi) {
                    const GeohashIndex idx{col, rowi};
                    if (claimed.count(idx.key())) continue;
                    if (!point_in_polygon(geohash_cell_center(idx), poly)) continue;
                    claimed.insert(idx.key());
                    ts += 1.0;
                    if (std::binary_search(occupied.begin(), occupied.end(), idx.key())) vs += 1.0;
                }
            }
        }
        row.specificity = ts > 0.0 ? vs / ts : 0.0;
        const std::vector<double> col = series.column(r);
        row.mean_daily_demand = mean_daily_demand(col, cfg.interval_seconds);
        try {
            row.acf_daily = acf(col, lag);
            acf_sum += *row.acf_daily;
            ++acf_count;
        } catch (const std::exception&) {
        }
        spec_sum += row.specificity;
        result.rows.push_back(std::move(row));
    }

    result.summary.method = method_name;
    result.summary.regions = m;
    result.summary.mean_acf = acf_count > 0 ? acf_sum / acf_count : 0.0;
    result.summary.mean_specificity = spec_sum / m;

    const int horizon = std::max(1, series.num_intervals / 10);
    if (series.num_intervals - horizon >= lag) {
        const ClusterSeries predicted = seasonal_naive_predict(series, horizon);
        const ClusterSeries actual = tail(series, horizon);
        const MapeResult mr = mape_at_recall(actual, predicted, cfg.min_daily_demand);
        result.summary.mape = mr.mape;
        // Recall counts demand the regions never covered, not just the
        // clusters dropped by the threshold.
        double tail_total = 0.0;
        for (double v : actual.values) tail_total += v;
        const std::int64_t tail_start =
            window.t_end - static_cast<std::int64_t>(horizon) * cfg.interval_seconds;
        const SpatialIndex part_index(parts);
        double uncovered_tail = 0.0;
        for (const ServiceRecord& r : records) {
            if (r.timestamp < tail_start || r.timestamp >= window.t_end) continue;
            if (part_index.locate(r.location) < 0) uncovered_tail += 1.0;
        }
        const double denom = tail_total + uncovered_tail;
        result.summary.recall = denom > 0.0 ? mr.recall * tail_total / denom : 0.0;
        result.summary.horizon = horizon;
    }
    return result;
}

std::vector<Region> grid_baseline_regions(const BoundingBox& bbox, int target_count,
                                          const std::vector<ServiceRecord>& records,
                                          const PipelineConfig&) {
    if (target_count < 1) throw std::invalid_argument("target_count must be positive");
    auto occupied_count = [&](int g) {
        std::vector<char> occ(static_cast<std::size_t>(g) * g, 0);
        const double dlon = (bbox.lon_max - bbox.lon_min) / g;
        const double dlat = (bbox.lat_max - bbox.lat_min) / g;
        for (const ServiceRecord& r : records) {
            if (!bbox.contains(r.location)) continue;
            const int c = std::min(g - 1, static_cast<int>((r.location.lon - bbox.lon_min) / dlon));
            const int rr = std::min(g - 1, static_cast<int>((r.location.lat - bbox.lat_min) / dlat));
            occ[static_cast<std::size_t>(rr) * g + c] = 1;
        }
        return static_cast<int>(std::count(occ.begin(), occ.end(), 1));
    };

    int best_g = 1;
    int best_diff = std::numeric_limits<int>::max();
    const int g_cap = std::max(4, 2 * static_cast<int>(std::ceil(std::sqrt(target_count))) + 8);
    for (int g = 1; g <= g_cap; ++g) {
        const int diff = std::abs(occupied_count(g) - target_count);
        if (diff < best_diff) {
            best_diff = diff;
            best_g = g;
        }
    }

    const int g = best_g;
    const double dlon = (bbox.lon_max - bbox.lon_min) / g;
    const double dlat = (bbox.lat_max - bbox.lat_min) / g;
    std::vector<char> occ(static_cast<std::size_t>(g) * g, 0);
    for (const ServiceRecord& r : records) {
        if (!bbox.contains(r.location)) continue;
        const int c = std::min(g - 1, static_cast<int>((r.location.lon - bbox.lon_min) / dlon));
        const int rr = std::min(g - 1, static_cast<int>((r.location.lat - bbox.lat_min) / dlat));
        occ[static_cast<std::size_t>(rr) * g + c] = 1;
    }
    std::vector<Region> regions;
    int id = 1;
    for (int rr = 0; rr < g; ++rr) {
        for (int c = 0; c < g; ++c) {
            if (!occ[static_cast<std::size_t>(rr) * g + c]) continue;
            const double lon0 = bbox.lon_min + c * dlon;
            const double lat0 = bbox.lat_min + rr * dlat;
            Region region;
            region.region_id = id++;
            region.parts.push_back(make_polygon({{lon0, lat0},
                                                 {lon0 + dlon, lat0},
                                                 {lon0 + dlon, lat0 + dlat},
                                                 {lon0, lat0 + dlat},
                                                 {lon0, lat0}}));
            region.area_km2 = polygon_area_km2(region.parts.back());
            regions.push_back(std::move(region));
        }
    }
    return regions;
}

std::vector<ScaleRow> run_scalability(const SyntheticCitySpec& spec,
                                      const std::vector<int>& sizes, PipelineConfig cfg) {
    const SyntheticCity city = generate_city(spec);
    cfg.bbox = city.bbox;

    std::vector<ScaleRow> rows;
    for (int n : sizes) {
        const int g = std::max(1, static_cast<int>(std::round(std::sqrt(static_cast<double>(n)))));
        std::vector<AtomicElement> elements = grid_elements(city.bbox, g, g);
        const TimeWindow window = derive_time_window(city.records, cfg);
        attach_demand(elements, city.records, cfg, window);

        const auto start = std::chrono::steady_clock::now();
        const OptimizeOutput out = run_optimize(std::move(elements), city.geometry.obstacles, cfg);
        const auto stop = std::chrono::steady_clock::now();

        ScaleRow row;
        row.n_elements = g * g;
        row.m_star = out.scale.m_star;
        row.wall_seconds = std::chrono::duration<double>(stop - start).count();
        row.outer_iterations = static_cast<long long>(out.trace.size());
        row.evaluations = out.trace.empty() ? 0 : out.trace.back().evaluations;
        rows.push_back(row);
    }
    return rows;
}

// --- file formats ----------------------------------------------------------

namespace {

ordered_json polygon_rings_json(const Polygon& poly) {
    ordered_json rings = ordered_json::array();
    ordered_json outer = ordered_json::array();
    for (const Point& p : poly.exterior) outer.push_back({p.lon, p.lat});
    rings.push_back(outer);
    for (const auto& hole : poly.holes) {
        ordered_json h = ordered_json::array();
        for (const Point& p : hole) h.push_back({p.lon, p.lat});
        rings.push_back(h);
    }
    return rings;
}

Polygon polygon_from_rings_json(const ordered_json& rings) {
    auto ring_points = [](const ordered_json& ring) {
        std::vector<Point> pts;
        for (const auto& coord : ring) pts.push_back({coord[0].get<double>(), coord[1].get<double>()});
        return pts;
    };
    std::vector<std::vector<Point>> holes;
    for (std::size_t i = 1; i < rings.size(); ++i) holes.push_back(ring_points(rings[i]));
    return make_polygon(ring_points(rings[0]), std::move(holes));
}

void dump_json(const std::string& path, const ordered_json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileUnreadable(path);
    out << doc.dump(1, '\t') << '\n';
}

ordered_json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileUnreadable(path);
    ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidJson(e.what());
    }
    return doc;
}

}  // namespace

void write_elements_geojson(const std::string& path, const std::vector<AtomicElement>& elements) {
    ordered_json features = ordered_json::array();
    for (const AtomicElement& e : elements) {
        features.push_back(
            {{"type", "Feature"},
             {"properties", {{"element_id", e.id}, {"area_km2", e.area_km2}}},
             {"geometry", {{"type", "Polygon"}, {"coordinates", polygon_rings_json(e.polygon)}}}});
    }
    dump_json(path, {{"type", "FeatureCollection"}, {"features", features}});
}

std::vector<AtomicElement> read_elements_geojson(const std::string& path) {
    const ordered_json doc = load_json(path);
    if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features"))
        throw InvalidJson("expected a FeatureCollection");
    std::vector<AtomicElement> elements;
    for (const auto& feature : doc["features"]) {
        AtomicElement e;
        e.id = feature["properties"].value("element_id", 0);
        e.polygon = polygon_from_rings_json(feature["geometry"]["coordinates"]);
        e.area_km2 = feature["properties"].value("area_km2", polygon_area_km2(e.polygon));
        elements.push_back(std::move(e));
    }
    return elements;
}

void write_regions_geojson(const std::string& path, const std::vector<Region>& regions) {
    ordered_json features = ordered_json::array();
    for (const Region& region : regions) {
        ordered_json polys = ordered_json::array();
        for (const Polygon& part : region.parts) polys.push_back(polygon_rings_json(part));
        ordered_json props = {{"region_id", region.region_id},
                              {"element_ids", region.element_ids},
                              {"specificity", region.specificity},
                              {"area_km2", region.area_km2},
                              {"mean_daily_demand", region.mean_daily_demand}};
        props["acf_daily"] = region.acf_daily ? ordered_json(*region.acf_daily) : ordered_json();
        features.push_back(
            {{"type", "Feature"},
             {"properties", props},
             {"geometry", {{"type", "MultiPolygon"}, {"coordinates", polys}}}});
    }
    dump_json(path, {{"type", "FeatureCollection"}, {"features", features}});
}

std::vector<Region> read_regions_geojson(const std::string& path) {
    const ordered_json doc = load_json(path);
    if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features"))
        throw InvalidJson("expected a FeatureCollection");
    std::vector<Region> regions;
    for (const auto& feature : doc["features"]) {
        Region region;
        const auto& props = feature["properties"];
        region.region_id = props.value("region_id", static_cast<int>(regions.size()) + 1);
        if (props.contains("element_ids"))
            region.element_ids = props["element_ids"].get<std::vector<int>>();
        if (props.contains("specificity")) region.specificity = props["specificity"].get<double>();
        if (props.contains("area_km2")) region.area_km2 = props["area_km2"].get<double>();
        if (props.contains("mean_daily_demand"))
            region.mean_daily_demand = props["mean_daily_demand"].get<double>();
        if (props.contains("acf_daily") && !props["acf_daily"].is_null())
            region.acf_daily = props["acf_daily"].get<double>();
        const auto& geom = feature["geometry"];
        if (geom.value("type", "") == "MultiPolygon") {
            for (const auto& part : geom["coordinates"])
                region.parts.push_back(polygon_from_rings_json(part));
        } else if (geom.value("type", "") == "Polygon") {
            region.parts.push_back(polygon_from_rings_json(geom["coordinates"]));
        } else {
            throw InvalidJson("region feature must be Polygon or MultiPolygon");
        }
        regions.push_back(std::move(region));
    }
    return regions;
}

void write_pareto_json(const std::string& path, const OptimizeOutput& out,
                       const PipelineConfig& cfg) {
    ordered_json solutions = ordered_json::array();
    for (const ClusterSolution& sol : out.pareto.solutions) {
        // Assignment over retained elements in order: cluster ids 1..M for
        // optimized nodes, then one singleton region per standalone element.
        std::vector<int> per_element(out.elements.size(), 0);
        for (int node = 0; node < out.instance.n(); ++node)
            per_element[static_cast<std::size_t>(
                out.node_to_element[static_cast<std::size_t>(node)])] =
                sol.assignment[static_cast<std::size_t>(node)] + 1;
        int next_id = sol.num_clusters + 1;
        for (std::size_t i = 0; i < out.elements.size(); ++i)
            if (out.standalone[i]) per_element[i] = next_id++;
        solutions.push_back({{"M", sol.num_clusters},
                             {"assignment", per_element},
                             {"f1", sol.mean_acf},
                             {"f2", sol.mean_specificity},
                             {"feasible", sol.feasible},
                             {"violations", sol.violations}});
    }
    std::vector<int> element_ids;
    element_ids.reserve(out.elements.size());
    for (const AtomicElement& e : out.elements) element_ids.push_back(e.id);
    const ordered_json doc = {{"M", out.scale.m_star},
                              {"scale_fallback_singletons", out.scale.fallback_singletons},
                              {"w", cfg.predictability_weight},
                              {"seed", cfg.seed},
                              {"filter_recall", out.filter_recall},
                              {"element_ids", element_ids},
                              {"solutions", solutions}};
    dump_json(path, doc);
}

void write_trace_csv(const std::string& path, const std::vector<EpochTrace>& trace) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw FileUnreadable(path);
    std::fputs("epoch,selected_objective,pareto_size,best_acf,best_specificity,evaluations\n", f);
    for (const EpochTrace& row : trace)
        std::fprintf(f, "%lld,%s,%zu,%.9g,%.9g,%lld\n", row.epoch,
                     row.selected == 'a' ? "acf" : "specificity", row.pareto_size, row.best_acf,
                     row.best_specificity, row.evaluations);
    std::fclose(f);
}

void write_metrics_csv(const std::string& path, const std::vector<EvalResult>& results) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw FileUnreadable(path);
    std::fputs(
        "method,cluster_id,acf_daily,specificity,area_km2,mean_daily_demand,mape,recall\n", f);
    for (const EvalResult& res : results) {
        for (const RegionMetricsRow& row : res.rows) {
            if (row.acf_daily)
                std::fprintf(f, "%s,%d,%.9g,%.9g,%.9g,%.9g,,\n", row.method.c_str(),
                             row.region_id, *row.acf_daily, row.specificity, row.area_km2,
                             row.mean_daily_demand);
            else
                std::fprintf(f, "%s,%d,,%.9g,%.9g,%.9g,,\n", row.method.c_str(), row.region_id,
                             row.specificity, row.area_km2, row.mean_daily_demand);
        }
        const EvalSummary& s = res.summary;
        std::fprintf(f, "%s,ALL,%.9g,%.9g,,,%.9g,%.9g\n", s.method.c_str(), s.mean_acf,
                     s.mean_specificity, s.mape, s.recall);
    }
    std::fclose(f);
}

void write_graph_text(const std::string& path, const AggregatableGraph& graph,
                      const std::vector<AtomicElement>& elements) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw FileUnreadable(path);
    std::fputs("standalone:", f);
    for (int i = 0; i < graph.num_elements; ++i)
        if (graph.standalone[static_cast<std::size_t>(i)])
            std::fprintf(f, " %d", elements[static_cast<std::size_t>(i)].id);
    std::fputs("\n", f);
    for (const auto& [u, v] : graph.edges)
        std::fprintf(f, "%d %d\n", elements[static_cast<std::size_t>(u)].id,
                     elements[static_cast<std::size_t>(v)].id);
    std::fclose(f);
}

void write_scalability_csv(const std::string& path, const std::vector<ScaleRow>& rows) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw FileUnreadable(path);
    std::fputs("n_elements,m_star,wall_seconds,evaluations,outer_iterations\n", f);
    for (const ScaleRow& row : rows)
        std::fprintf(f, "%d,%d,%.3f,%lld,%lld\n", row.n_elements, row.m_star, row.wall_seconds,
                     row.evaluations, row.outer_iterations);
    std::fclose(f);
}

}  // namespace regiongen
