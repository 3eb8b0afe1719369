// Command-line front end: synth, segment, optimize, evaluate, scalability,
// export. Every stage reads and writes plain files so runs can be resumed
// or inspected midway.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "regiongen/pipeline.hpp"

namespace {

using namespace regiongen;

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

PipelineConfig load_config_or_default(const std::string& path) {
    if (path.empty()) return PipelineConfig{};
    return load_config(path);
}

void apply_overrides(PipelineConfig& cfg, const CLI::App& cmd) {
    if (const auto* opt = cmd.get_option_no_throw("--seed"); opt && opt->count())
        cfg.seed = static_cast<std::uint64_t>(std::stoull(opt->as<std::string>()));
    if (const auto* opt = cmd.get_option_no_throw("--w"); opt && opt->count())
        cfg.predictability_weight = opt->as<double>();
    if (const auto* opt = cmd.get_option_no_throw("--eps"); opt && opt->count())
        cfg.max_epochs = opt->as<long long>();
    cfg.validate();
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

int cmd_synth(const std::string& out_dir, const SyntheticCitySpec& spec) {
    std::filesystem::create_directories(out_dir);
    const SyntheticCity city = generate_city(spec);
    write_geometry_geojson(join(out_dir, "geometry.geojson"), city.geometry);
    write_records_csv(join(out_dir, "records.csv"), city.records);
    std::printf("synth: %zu roads, %zu obstacles, %zu records -> %s\n",
                city.geometry.roads.size(), city.geometry.obstacles.size(), city.records.size(),
                out_dir.c_str());
    return 0;
}

int cmd_segment(const PipelineConfig& cfg, const std::string& geometry_path,
                const std::string& out_dir, const std::string& debug_pgm) {
    std::filesystem::create_directories(out_dir);
    const GeometrySet geometry = parse_geometry(geometry_path);
    if (!debug_pgm.empty()) {
        const BoundingBox box = cfg.bbox ? *cfg.bbox : BoundingBox{};
        (void)box;
    }
    const std::vector<AtomicElement> elements = segment_city(geometry, cfg);
    write_elements_geojson(join(out_dir, "elements.geojson"), elements);
    std::printf("segment: %zu atomic elements -> %s\n", elements.size(), out_dir.c_str());
    return 0;
}

int cmd_optimize(const PipelineConfig& cfg, const std::string& elements_path,
                 const std::string& records_path, const std::string& geometry_path,
                 const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<AtomicElement> elements = read_elements_geojson(elements_path);
    const std::vector<ServiceRecord> records = parse_records(records_path, cfg.bbox);
    std::vector<Polygon> obstacles;
    if (!geometry_path.empty()) obstacles = parse_geometry(geometry_path).obstacles;

    const TimeWindow window = derive_time_window(records, cfg);
    attach_demand(elements, records, cfg, window);
    const OptimizeOutput out = run_optimize(std::move(elements), obstacles, cfg);
    if (out.pareto.solutions.empty()) {
        std::fprintf(stderr, "optimize: no feasible solution\n");
        return kExitInfeasible;
    }

    write_pareto_json(join(out_dir, "pareto.json"), out, cfg);
    write_trace_csv(join(out_dir, "trace.csv"), out.trace);
    write_graph_text(join(out_dir, "aggregatable_graph.txt"), out.graph, out.elements);

    const std::vector<Region> best_acf = assemble_regions(out, out.pareto.best_acf(), cfg);
    const std::vector<Region> best_spec =
        assemble_regions(out, out.pareto.best_specificity(), cfg);
    write_regions_geojson(join(out_dir, "regions.geojson"), best_acf);
    write_regions_geojson(join(out_dir, "regions_best_specificity.geojson"), best_spec);

    std::printf("optimize: M*=%d%s, pareto=%zu, regions=%zu (clusters %d + standalone %zu)\n",
                out.scale.m_star, out.scale.fallback_singletons ? " (singleton fallback)" : "",
                out.pareto.solutions.size(), best_acf.size(), out.scale.m_star,
                best_acf.size() - static_cast<std::size_t>(out.scale.m_star));
    return 0;
}

int cmd_evaluate(const PipelineConfig& cfg, const std::string& regions_path,
                 const std::string& records_path, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::vector<Region> regions = read_regions_geojson(regions_path);
    const std::vector<ServiceRecord> records = parse_records(records_path, cfg.bbox);

    BoundingBox bbox;
    if (cfg.bbox) {
        bbox = *cfg.bbox;
    } else {
        bbox = {records.front().location.lon, records.front().location.lat,
                records.front().location.lon, records.front().location.lat};
        for (const ServiceRecord& r : records) bbox.expand(r.location);
    }

    const EvalResult ours = evaluate_regions(regions, records, cfg, "regiongen");
    const std::vector<Region> grid = grid_baseline_regions(
        bbox, static_cast<int>(regions.size()), records, cfg);
    const EvalResult baseline = evaluate_regions(grid, records, cfg, "grid");
    write_metrics_csv(join(out_dir, "metrics.csv"), {ours, baseline});

    std::printf("evaluate: regiongen acf=%.4f spec=%.4f mape@%.1f%%=%.4f | grid acf=%.4f "
                "spec=%.4f mape@%.1f%%=%.4f\n",
                ours.summary.mean_acf, ours.summary.mean_specificity,
                100.0 * ours.summary.recall, ours.summary.mape, baseline.summary.mean_acf,
                baseline.summary.mean_specificity, 100.0 * baseline.summary.recall,
                baseline.summary.mape);
    return 0;
}

int cmd_scalability(const PipelineConfig& cfg, const SyntheticCitySpec& spec,
                    const std::vector<int>& sizes, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::vector<ScaleRow> rows = run_scalability(spec, sizes, cfg);
    write_scalability_csv(join(out_dir, "scalability.csv"), rows);
    for (const ScaleRow& row : rows)
        std::printf("N=%d M*=%d time=%.2fs evaluations=%lld\n", row.n_elements, row.m_star,
                    row.wall_seconds, row.evaluations);
    return 0;
}

int cmd_export(const PipelineConfig& cfg, const std::string& elements_path,
               const std::string& records_path, const std::string& pareto_path,
               int solution_index, const std::string& out_path) {
    // Rebuild regions for one Pareto member from the stored element
    // assignment, without re-running the optimizer.
    std::vector<AtomicElement> elements = read_elements_geojson(elements_path);
    const std::vector<ServiceRecord> records = parse_records(records_path, cfg.bbox);
    const TimeWindow window = derive_time_window(records, cfg);
    attach_demand(elements, records, cfg, window);

    std::ifstream in(pareto_path);
    if (!in) throw FileUnreadable(pareto_path);
    nlohmann::json doc;
    in >> doc;
    const auto& solutions = doc.at("solutions");
    if (solution_index < 0 || solution_index >= static_cast<int>(solutions.size())) {
        std::fprintf(stderr, "export: solution index out of range (have %zu)\n", solutions.size());
        return kExitConfig;
    }
    const std::vector<int> element_ids = doc.at("element_ids").get<std::vector<int>>();
    const std::vector<int> assignment =
        solutions[static_cast<std::size_t>(solution_index)].at("assignment").get<std::vector<int>>();

    std::vector<int> id_of(elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i) id_of[i] = elements[i].id;
    int max_region = 0;
    for (int a : assignment) max_region = std::max(max_region, a);

    std::vector<Region> regions(static_cast<std::size_t>(max_region));
    for (int j = 0; j < max_region; ++j) regions[static_cast<std::size_t>(j)].region_id = j + 1;
    for (std::size_t k = 0; k < element_ids.size() && k < assignment.size(); ++k) {
        const int region = assignment[k];
        if (region < 1) continue;
        // Match stored element ids against the elements file.
        for (std::size_t i = 0; i < elements.size(); ++i) {
            if (id_of[i] != element_ids[k]) continue;
            Region& reg = regions[static_cast<std::size_t>(region - 1)];
            reg.element_ids.push_back(elements[i].id);
            reg.parts.push_back(elements[i].polygon);
            reg.area_km2 += elements[i].area_km2;
            break;
        }
    }
    regions.erase(std::remove_if(regions.begin(), regions.end(),
                                 [](const Region& r) { return r.parts.empty(); }),
                  regions.end());

    // Fill the demand-dependent properties.
    const int lag = cfg.lag();
    for (Region& region : regions) {
        std::vector<double> series;
        double vs = 0.0, ts = 0.0;
        for (int eid : region.element_ids) {
            for (const AtomicElement& e : elements) {
                if (e.id != eid) continue;
                if (series.empty()) series.assign(e.series.size(), 0.0);
                for (std::size_t t = 0; t < e.series.size(); ++t) series[t] += e.series[t];
                vs += e.serviced_cells;
                ts += e.total_cells;
                break;
            }
        }
        region.specificity = ts > 0.0 ? vs / ts : 0.0;
        region.mean_daily_demand = mean_daily_demand(series, cfg.interval_seconds);
        try {
            region.acf_daily = acf(series, lag);
        } catch (const std::exception&) {
            region.acf_daily.reset();
        }
    }
    write_regions_geojson(out_path, regions);
    std::printf("export: %zu regions -> %s\n", regions.size(), out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Road-bounded region generation by predictability-specificity co-optimization"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::string geometry_path, elements_path, records_path, regions_path, pareto_path;
    std::string debug_pgm, export_out = "regions_export.geojson";
    std::string seed_override;
    double w_override = 0.7;
    long long eps_override = 0;
    int solution_index = 0;

    SyntheticCitySpec spec;
    int hotspot_count = 9;
    std::vector<int> sizes{100, 400, 1600, 6400};

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key = value config file");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed_override, "override config seed");
        cmd->add_option("--w", w_override, "override predictability weight");
        cmd->add_option("--eps", eps_override, "override move-evaluation budget");
    };

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic city");
    add_common(synth);
    synth->add_option("--extent-km", spec.extent_km);
    synth->add_option("--road-spacing-m", spec.road_spacing_m);
    synth->add_flag("--river", spec.river);
    synth->add_option("--river-width-m", spec.river_width_m);
    synth->add_option("--days", spec.days);
    synth->add_option("--hotspots", hotspot_count, "number of generated hotspots");
    synth->add_option("--synth-seed", spec.seed);

    CLI::App* segment = app.add_subcommand("segment", "segment roads/obstacles into elements");
    add_common(segment);
    segment->add_option("--geometry", geometry_path)->required();
    segment->add_option("--debug-pgm", debug_pgm, "dump intermediate rasters as PGM");

    CLI::App* optimize = app.add_subcommand("optimize", "cluster elements into regions");
    add_common(optimize);
    optimize->add_option("--elements", elements_path)->required();
    optimize->add_option("--records", records_path)->required();
    optimize->add_option("--geometry", geometry_path, "geometry file for obstacle constraints");

    CLI::App* evaluate = app.add_subcommand("evaluate", "metrics vs an equal-count grid");
    add_common(evaluate);
    evaluate->add_option("--regions", regions_path)->required();
    evaluate->add_option("--records", records_path)->required();

    CLI::App* scalability = app.add_subcommand("scalability", "runtime sweep over element counts");
    add_common(scalability);
    scalability->add_option("--sizes", sizes, "element counts to sweep");
    scalability->add_option("--days", spec.days);
    scalability->add_option("--extent-km", spec.extent_km);
    scalability->add_option("--hotspots", hotspot_count);
    scalability->add_option("--synth-seed", spec.seed);

    CLI::App* exporter = app.add_subcommand("export", "emit one Pareto solution as GeoJSON");
    add_common(exporter);
    exporter->add_option("--elements", elements_path)->required();
    exporter->add_option("--records", records_path)->required();
    exporter->add_option("--pareto", pareto_path)->required();
    exporter->add_option("--solution", solution_index, "index into the Pareto array");
    exporter->add_option("--output", export_out);

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig cfg = load_config_or_default(config_path);
        CLI::App* active = app.get_subcommands().front();
        apply_overrides(cfg, *active);
        if (eps_override > 0) cfg.max_epochs = eps_override;

        if (active == synth) {
            if (spec.hotspots.empty())
                spec.hotspots = default_hotspots(spec.extent_km, hotspot_count, spec.seed);
            return cmd_synth(out_dir, spec);
        }
        if (active == segment) return cmd_segment(cfg, geometry_path, out_dir, debug_pgm);
        if (active == optimize)
            return cmd_optimize(cfg, elements_path, records_path, geometry_path, out_dir);
        if (active == evaluate) return cmd_evaluate(cfg, regions_path, records_path, out_dir);
        if (active == scalability) {
            spec.extent_km = std::max(spec.extent_km, 8.0);
            if (spec.hotspots.empty())
                spec.hotspots = default_hotspots(spec.extent_km, hotspot_count, spec.seed);
            return cmd_scalability(cfg, spec, sizes, out_dir);
        }
        if (active == exporter)
            return cmd_export(cfg, elements_path, records_path, pareto_path, solution_index,
                              export_out);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const InfeasibleM& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return kExitInfeasible;
    } catch (const EmptyInitialSet& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return kExitInfeasible;
    } catch (const FileUnreadable& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const InvalidJson& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
