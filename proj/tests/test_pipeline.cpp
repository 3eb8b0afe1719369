#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "regiongen/pipeline.hpp"

using namespace regiongen;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

SyntheticCitySpec small_city_spec() {
    SyntheticCitySpec spec;
    spec.extent_km = 4.0;
    spec.road_spacing_m = 500.0;
    spec.days = 12;
    spec.seed = 5;
    spec.noise_per_km2_per_hour = 0.05;
    spec.hotspots = default_hotspots(spec.extent_km, 6, 7);
    return spec;
}

PipelineConfig small_config() {
    PipelineConfig cfg;
    cfg.raster_width = 256;
    cfg.raster_height = 256;
    cfg.alpha = 0.0;
    cfg.max_epochs = 4000;
    cfg.seed = 3;
    return cfg;
}

}  // namespace

TEST_CASE("segment_city on a grid city yields the expected cell count") {
    const SyntheticCitySpec spec = small_city_spec();
    const SyntheticCity city = generate_city(spec);
    PipelineConfig cfg = small_config();
    cfg.bbox = city.bbox;

    // 4 km at 500 m spacing: an 8 x 8 lattice of blocks, plus possibly the
    // thin frame outside the outermost skeleton lines.
    const std::vector<AtomicElement> elements = segment_city(city.geometry, cfg);
    CHECK(elements.size() >= 64);
    CHECK(elements.size() <= 66);
    double total_area = 0.0;
    for (const AtomicElement& e : elements) total_area += e.area_km2;
    // Blocks lose the dilated road strip, so the sum stays below 16 km^2.
    CHECK(total_area < 16.0);
    CHECK(total_area > 8.0);

    // Adding a full-width river strictly increases the component count.
    SyntheticCitySpec with_river = spec;
    with_river.river = true;
    const SyntheticCity river_city = generate_city(with_river);
    const std::vector<AtomicElement> split = segment_city(river_city.geometry, cfg);
    CHECK(split.size() > elements.size());
}

TEST_CASE("segment_city output is byte-identical across runs") {
    const SyntheticCity city = generate_city(small_city_spec());
    PipelineConfig cfg = small_config();
    cfg.bbox = city.bbox;
    const std::string p1 = temp_path("rg_elems_1.geojson");
    const std::string p2 = temp_path("rg_elems_2.geojson");
    write_elements_geojson(p1, segment_city(city.geometry, cfg));
    write_elements_geojson(p2, segment_city(city.geometry, cfg));
    CHECK(slurp(p1) == slurp(p2));
    CHECK(!slurp(p1).empty());
}

TEST_CASE("elements geojson round trip") {
    const SyntheticCity city = generate_city(small_city_spec());
    PipelineConfig cfg = small_config();
    cfg.bbox = city.bbox;
    const std::vector<AtomicElement> elements = segment_city(city.geometry, cfg);
    const std::string path = temp_path("rg_elems_rt.geojson");
    write_elements_geojson(path, elements);
    const std::vector<AtomicElement> back = read_elements_geojson(path);
    REQUIRE(back.size() == elements.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].id == elements[i].id);
        CHECK(back[i].area_km2 == doctest::Approx(elements[i].area_km2).epsilon(1e-12));
        CHECK(back[i].polygon.exterior.size() == elements[i].polygon.exterior.size());
    }
}

TEST_CASE("full optimize pipeline on a synthetic city") {
    const SyntheticCity city = generate_city(small_city_spec());
    PipelineConfig cfg = small_config();
    cfg.bbox = city.bbox;

    std::vector<AtomicElement> elements = segment_city(city.geometry, cfg);
    const TimeWindow window = derive_time_window(city.records, cfg);
    CHECK(window.train_intervals == window.total_intervals - 2 * (window.total_intervals / 10));
    attach_demand(elements, city.records, cfg, window);

    double total_demand = 0.0;
    for (const AtomicElement& e : elements)
        for (double v : e.series) total_demand += v;
    CHECK(total_demand > 0.0);

    const OptimizeOutput out = run_optimize(std::move(elements), city.geometry.obstacles, cfg);
    REQUIRE(!out.pareto.solutions.empty());

    // Region count equals M* plus the standalone count.
    int standalone_count = 0;
    for (char s : out.standalone) standalone_count += s;
    const std::vector<Region> regions = assemble_regions(out, out.pareto.best_acf(), cfg);
    CHECK(static_cast<int>(regions.size()) == out.scale.m_star + standalone_count);

    // Every exported region respects the area cap (standalone oversize
    // elements excepted by construction; none exist in this city).
    for (const Region& r : regions) CHECK(r.area_km2 <= cfg.max_area_km2 + 1e-9);

    // Exported properties match recomputation through the metrics path.
    for (const Region& r : regions) {
        std::vector<double> series;
        double vs = 0.0, ts = 0.0, area = 0.0;
        for (int eid : r.element_ids) {
            for (const AtomicElement& e : out.elements) {
                if (e.id != eid) continue;
                if (series.empty()) series.assign(e.series.size(), 0.0);
                for (std::size_t t = 0; t < e.series.size(); ++t) series[t] += e.series[t];
                vs += e.serviced_cells;
                ts += e.total_cells;
                area += e.area_km2;
            }
        }
        CHECK(r.area_km2 == doctest::Approx(area).epsilon(1e-9));
        if (ts > 0.0) CHECK(r.specificity == doctest::Approx(vs / ts).epsilon(1e-9));
        CHECK(r.mean_daily_demand ==
              doctest::Approx(mean_daily_demand(series, cfg.interval_seconds)).epsilon(1e-9));
        if (r.acf_daily) {
            CHECK(*r.acf_daily == doctest::Approx(acf(series, cfg.lag())).epsilon(1e-9));
        }
    }
}

TEST_CASE("pipeline determinism end to end") {
    const SyntheticCity city = generate_city(small_city_spec());
    PipelineConfig cfg = small_config();
    cfg.bbox = city.bbox;

    auto run_once = [&](const std::string& tag) {
        std::vector<AtomicElement> elements = segment_city(city.geometry, cfg);
        const TimeWindow window = derive_time_window(city.records, cfg);
        attach_demand(elements, city.records, cfg, window);
        const OptimizeOutput out = run_optimize(std::move(elements), city.geometry.obstacles, cfg);
        const std::string regions_path = temp_path("rg_regions_" + tag + ".geojson");
        const std::string pareto_path = temp_path("rg_pareto_" + tag + ".json");
        write_regions_geojson(regions_path, assemble_regions(out, out.pareto.best_acf(), cfg));
        write_pareto_json(pareto_path, out, cfg);
        return std::make_pair(slurp(regions_path), slurp(pareto_path));
    };
    const auto [regions_a, pareto_a] = run_once("a");
    const auto [regions_b, pareto_b] = run_once("b");
    CHECK(regions_a == regions_b);
    CHECK(pareto_a == pareto_b);
    CHECK(!regions_a.empty());
    CHECK(!pareto_a.empty());
}

TEST_CASE("evaluate_regions compares against the grid baseline") {
    const SyntheticCity city = generate_city(small_city_spec());
    PipelineConfig cfg = small_config();
    cfg.bbox = city.bbox;

    std::vector<AtomicElement> elements = segment_city(city.geometry, cfg);
    const TimeWindow window = derive_time_window(city.records, cfg);
    attach_demand(elements, city.records, cfg, window);
    const OptimizeOutput out = run_optimize(std::move(elements), city.geometry.obstacles, cfg);
    REQUIRE(!out.pareto.solutions.empty());
    const std::vector<Region> regions = assemble_regions(out, out.pareto.best_acf(), cfg);

    const EvalResult ours = evaluate_regions(regions, city.records, cfg, "regiongen");
    CHECK(ours.rows.size() == regions.size());
    CHECK(ours.summary.recall > 0.0);
    CHECK(ours.summary.recall <= 1.0);

    const std::vector<Region> grid = grid_baseline_regions(
        city.bbox, static_cast<int>(regions.size()), city.records, cfg);
    // Approximate count match: within 25% of the target.
    CHECK(std::abs(static_cast<double>(grid.size()) - static_cast<double>(regions.size())) <=
          0.25 * static_cast<double>(regions.size()) + 2.0);
    const EvalResult baseline = evaluate_regions(grid, city.records, cfg, "grid");

    // Self-comparison sanity: evaluating the same regions twice gives
    // identical rows.
    const EvalResult again = evaluate_regions(regions, city.records, cfg, "regiongen");
    REQUIRE(again.rows.size() == ours.rows.size());
    for (std::size_t i = 0; i < ours.rows.size(); ++i) {
        CHECK(again.rows[i].specificity == ours.rows[i].specificity);
        CHECK(again.rows[i].mean_daily_demand == ours.rows[i].mean_daily_demand);
    }

    const std::string path = temp_path("rg_metrics.csv");
    write_metrics_csv(path, {ours, baseline});
    const std::string csv = slurp(path);
    CHECK(csv.find("regiongen,ALL") != std::string::npos);
    CHECK(csv.find("grid,ALL") != std::string::npos);
}

TEST_CASE("grid elements cover the bbox with matching areas") {
    const BoundingBox box{116.0, 30.0, 116.05, 30.05};
    const std::vector<AtomicElement> cells = grid_elements(box, 5, 5);
    CHECK(cells.size() == 25);
    double total = 0.0;
    for (const AtomicElement& e : cells) total += e.area_km2;
    const Polygon whole = make_polygon({{116.0, 30.0},
                                        {116.05, 30.0},
                                        {116.05, 30.05},
                                        {116.0, 30.05},
                                        {116.0, 30.0}});
    CHECK(total == doctest::Approx(polygon_area_km2(whole)).epsilon(1e-6));
}
