// Acceptance suite: every shipped requirement checked end to end, one
// PASS/FAIL line per criterion. Exit code is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "regiongen/pipeline.hpp"

using namespace regiongen;

namespace {

struct Criterion {
    int id;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- 1: ACF oracle equivalence ---------------------------------------------

Criterion criterion_acf() {
    Criterion c{1, "ACF oracle equivalence"};
    const double t0 = now_seconds();
    Rng rng(101);
    int mismatches = 0;
    for (int it = 0; it < 1000; ++it) {
        const int t_total = 50 + rng.below_int(951);
        const int lag = 1 + rng.below_int(std::min(48, t_total - 1));
        std::vector<double> series(static_cast<std::size_t>(t_total));
        for (double& v : series) v = rng.uniform(0.0, 200.0);
        const double mine = acf(series, lag);
        const double ref = oracles::brute_acf(series, lag);
        if (std::abs(mine - ref) > 1e-12 * std::max(1.0, std::abs(ref))) ++mismatches;
    }
    int inexact_periodic = 0;
    for (int it = 0; it < 200; ++it) {
        // Integer periodic series with an integer mean: every sum is exact.
        const int k = 2 + rng.below_int(47);
        const int repeats = 2 + rng.below_int(8);
        std::vector<double> period(static_cast<std::size_t>(k));
        int sum = 0;
        for (int i = 0; i + 1 < k; ++i) {
            period[static_cast<std::size_t>(i)] = static_cast<double>(rng.below_int(40));
            sum += static_cast<int>(period[static_cast<std::size_t>(i)]);
        }
        period[static_cast<std::size_t>(k - 1)] =
            static_cast<double>((k - sum % k) % k + 4 * k);  // integer mean, nonconstant
        std::vector<double> series;
        for (int r = 0; r < repeats; ++r) series.insert(series.end(), period.begin(), period.end());
        double value;
        try {
            value = acf(series, k);
        } catch (const ZeroVariance&) {
            continue;
        }
        if (value != 1.0) ++inexact_periodic;
    }
    c.seconds = now_seconds() - t0;
    c.pass = mismatches == 0 && inexact_periodic == 0 && c.seconds < 10.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "1000 random series, %d mismatches; %d inexact periodic",
                  mismatches, inexact_periodic);
    c.detail = buf;
    return c;
}

// --- 2: morphology oracles --------------------------------------------------

Criterion criterion_morphology() {
    Criterion c{2, "Morphology oracles"};
    const double t0 = now_seconds();
    Rng rng(202);
    int dilate_bad = 0, thin_bad = 0, count_bad = 0, ccl_bad = 0;
    for (int it = 0; it < 200; ++it) {
        const RasterGrid grid = oracles::random_raster(32, 32, rng.uniform(0.05, 0.6), rng);
        for (int kernel : {3, 5})
            if (!oracles::grids_equal(dilate(grid, kernel), oracles::naive_dilate(grid, kernel)))
                ++dilate_bad;
        const RasterGrid thinned = thin(grid);
        if (!oracles::grids_equal(thinned, oracles::reference_thin(grid))) ++thin_bad;
        if (oracles::flood_count(thinned, true) != oracles::flood_count(grid, true)) ++count_bad;

        const RasterGrid obstacles = oracles::random_raster(32, 32, rng.uniform(0.0, 0.2), rng);
        const LabeledRaster labeled = fuse_and_label(thinned, obstacles);
        int oracle_components = 0;
        const auto labels = oracles::flood_label_background(thinned, obstacles, oracle_components);
        if (labeled.component_count != oracle_components || labeled.labels != labels) ++ccl_bad;
    }
    c.seconds = now_seconds() - t0;
    c.pass = dilate_bad == 0 && thin_bad == 0 && count_bad == 0 && ccl_bad == 0 &&
             c.seconds < 30.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "200 grids: dilate %d bad, thin %d bad, 8-component drift %d, CCL %d bad",
                  dilate_bad, thin_bad, count_bad, ccl_bad);
    c.detail = buf;
    return c;
}

// --- 3: constraint suite ----------------------------------------------------

Criterion criterion_constraints() {
    Criterion c{3, "Constraint suite"};
    const double t0 = now_seconds();
    int violations = 0, instances = 0, solutions_checked = 0;
    for (int it = 0; it < 500; ++it) {
        Rng rng(3000 + static_cast<std::uint64_t>(it));
        const int n = 6 + rng.below_int(it % 10 == 0 ? 195 : 40);
        ProblemInstance inst = oracles::random_instance(n, 48, rng, 1e9, 24);
        double total_area = std::accumulate(inst.areas_km2.begin(), inst.areas_km2.end(), 0.0);
        const int m = 2 + rng.below_int(std::max(1, n / 3));
        inst.max_area_km2 = rng.uniform(1.1, 2.5) * total_area / m;
        ++instances;

        auto audit = [&](const ClusterSolution& sol) {
            ++solutions_checked;
            // Total assignment in range, always.
            if (static_cast<int>(sol.assignment.size()) != n) ++violations;
            for (int a : sol.assignment)
                if (a < 0 || a >= sol.num_clusters) ++violations;
            const FeasibilityReport rep = check_feasible(
                sol.assignment, sol.num_clusters, inst.adjacency, inst.areas_km2,
                inst.max_area_km2);
            if (sol.feasible && !rep.ok) ++violations;
        };

        std::vector<ClusterSolution> seeds;
        try {
            seeds.push_back(d_balance(inst, m, 0.05, 1 + it));
        } catch (const InfeasibleM&) {
        }
        try {
            seeds.push_back(greedy_grow(inst, m, 0.7, 2 + it));
        } catch (const InfeasibleM&) {
        }
        try {
            seeds.push_back(fluid_grow(inst, m, 3 + it));
        } catch (const InfeasibleM&) {
        }
        for (const ClusterSolution& sol : seeds) audit(sol);

        bool any_feasible = false;
        for (const ClusterSolution& sol : seeds) any_feasible = any_feasible || sol.feasible;
        if (!any_feasible) continue;
        OptimizerConfig cfg;
        cfg.max_epochs = 400;
        cfg.seed = 99 + it;
        const ParetoSet out = co_optimize(inst, seeds, cfg);
        for (const ClusterSolution& sol : out.solutions) {
            audit(sol);
            if (!sol.feasible) ++violations;  // Pareto members must be feasible
        }
    }
    c.seconds = now_seconds() - t0;
    c.pass = violations == 0 && instances >= 500;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%d instances, %d solutions audited, %d violations",
                  instances, solutions_checked, violations);
    c.detail = buf;
    return c;
}

// --- 4: Pareto-front exactness ----------------------------------------------

Criterion criterion_front() {
    Criterion c{4, "Pareto-front exactness on small instances"};
    const double t0 = now_seconds();
    int total = 0, recovered = 0, antichain_breaks = 0, strict_subset = 0;
    for (int it = 0; total < 50 && it < 80; ++it) {
        Rng rng(4000 + static_cast<std::uint64_t>(it));
        const int n = 5 + rng.below_int(4);
        const int m = 2 + rng.below_int(2);
        ProblemInstance inst = oracles::random_instance(n, 96, rng, 1e9, 24);
        const double total_area =
            std::accumulate(inst.areas_km2.begin(), inst.areas_km2.end(), 0.0);
        // Cap at the scale-estimation operating point: moderately binding.
        inst.max_area_km2 = 1.5 * total_area / m;
        const auto front = oracles::exhaustive_front(inst, m);
        if (front.empty()) continue;

        std::vector<ClusterSolution> seeds;
        for (std::uint64_t s = 1; s <= 3; ++s) {
            try {
                seeds.push_back(d_balance(inst, m, 0.05, s));
            } catch (const InfeasibleM&) {
            }
            try {
                seeds.push_back(greedy_grow(inst, m, 0.7, s));
            } catch (const InfeasibleM&) {
            }
            try {
                seeds.push_back(fluid_grow(inst, m, s));
            } catch (const InfeasibleM&) {
            }
        }
        bool any_feasible = false;
        for (const ClusterSolution& s : seeds) any_feasible = any_feasible || s.feasible;
        if (!any_feasible) continue;
        ++total;

        OptimizerConfig cfg;
        cfg.max_epochs = 10000;
        cfg.seed = 77 + it;
        const ParetoSet out = co_optimize(inst, seeds, cfg);

        for (const ClusterSolution& a : out.solutions)
            for (const ClusterSolution& b : out.solutions)
                if (&a != &b && dominates(a, b)) ++antichain_breaks;

        bool exact = out.solutions.size() == front.size();
        bool subset = true;
        for (const ClusterSolution& sol : out.solutions) {
            bool found = false;
            for (const oracles::FrontPoint& p : front)
                if (std::abs(p.f1 - sol.mean_acf) <= 1e-9 &&
                    std::abs(p.f2 - sol.mean_specificity) <= 1e-9)
                    found = true;
            exact = exact && found;
            subset = subset && found;
        }
        if (exact) ++recovered;
        if (subset) ++strict_subset;
    }
    c.seconds = now_seconds() - t0;
    c.pass = total == 50 && recovered >= 45 && antichain_breaks == 0 && c.seconds < 300.0;
    char buf[220];
    std::snprintf(buf, sizeof(buf),
                  "%d/%d exact fronts (>=45 needed); dominated-in-output %d; "
                  "outputs on true front in %d/%d",
                  recovered, total, antichain_breaks, strict_subset, total);
    c.detail = buf;
    return c;
}

// --- 5: D-Balance quality ----------------------------------------------------

Criterion criterion_dbalance() {
    Criterion c{5, "D-Balance balance quality"};
    const double t0 = now_seconds();
    int eligible = 0, achieved = 0;
    for (int it = 0; it < 100; ++it) {
        Rng rng(5000 + static_cast<std::uint64_t>(it));
        const int n = 6 + rng.below_int(7);  // 6..12
        const int m = 2 + rng.below_int(2);
        const auto adjacency = oracles::random_connected_graph(n, 0.3, rng);
        std::vector<double> weights(static_cast<std::size_t>(n));
        for (double& w : weights) w = 1.0 + rng.below_int(5);
        const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

        double best_max = std::numeric_limits<double>::infinity();
        for (const auto& part : oracles::enumerate_connected_partitions(adjacency, m)) {
            std::vector<double> pw(static_cast<std::size_t>(m), 0.0);
            for (int u = 0; u < n; ++u)
                pw[static_cast<std::size_t>(part[static_cast<std::size_t>(u)])] +=
                    weights[static_cast<std::size_t>(u)];
            best_max = std::min(best_max, *std::max_element(pw.begin(), pw.end()));
        }
        if (best_max > 1.05 * total / m) continue;  // no 5% split exists
        ++eligible;

        Rng rng2(it);
        ProblemInstance inst = oracles::random_instance(n, 48, rng2, 1e9, 24);
        inst.adjacency = adjacency;
        inst.weights = weights;
        const ClusterSolution sol = d_balance(inst, m, 0.05, 11 + it);
        std::vector<double> pw(static_cast<std::size_t>(m), 0.0);
        for (int u = 0; u < n; ++u)
            pw[static_cast<std::size_t>(sol.assignment[static_cast<std::size_t>(u)])] +=
                weights[static_cast<std::size_t>(u)];
        if (*std::max_element(pw.begin(), pw.end()) <= 1.05 * total / m) ++achieved;
    }
    c.seconds = now_seconds() - t0;
    c.pass = eligible >= 20 && achieved >= (eligible * 95 + 99) / 100;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%d/%d balanced within 5%% (>=95%% needed)", achieved,
                  eligible);
    c.detail = buf;
    return c;
}

// --- 6: directional synthetic reproduction -----------------------------------

SyntheticCitySpec benchmark_city(std::uint64_t seed) {
    SyntheticCitySpec spec;
    spec.extent_km = 10.0;
    spec.road_spacing_m = 450.0;  // (10000/450)^2 ~ 494 atomic elements
    spec.days = 30;
    spec.seed = seed;
    spec.river = true;
    // Base service load everywhere plus mixed-amplitude hotspots.
    spec.noise_per_km2_per_hour = 0.5;
    spec.hotspots = default_hotspots(spec.extent_km, 14, seed * 13 + 7);
    return spec;
}

PipelineConfig benchmark_config(std::uint64_t seed) {
    PipelineConfig cfg;
    cfg.raster_width = 1024;  // ~10 m pixels keep skeleton strips narrow
    cfg.raster_height = 1024;
    cfg.alpha = 0.5;
    cfg.max_epochs = 4000;
    cfg.seed = seed;
    return cfg;
}

Criterion criterion_directional() {
    Criterion c{6, "Directional synthetic reproduction vs grid"};
    const double t0 = now_seconds();
    int wins = 0, acf_wins = 0, mape_wins = 0, seeds_run = 0;
    double gain_sum = 0.0;
    double worst_seed_seconds = 0.0;
    std::string trail;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const double seed_t0 = now_seconds();
        const SyntheticCity city = generate_city(benchmark_city(seed));
        PipelineConfig cfg = benchmark_config(seed);
        cfg.bbox = city.bbox;

        std::vector<AtomicElement> elements = segment_city(city.geometry, cfg);
        const std::size_t element_count = elements.size();
        const TimeWindow window = derive_time_window(city.records, cfg);
        attach_demand(elements, city.records, cfg, window);
        const OptimizeOutput out =
            run_optimize(std::move(elements), city.geometry.obstacles, cfg);
        if (out.pareto.solutions.empty()) {
            trail += " s" + std::to_string(seed) + ":infeasible";
            ++seeds_run;
            continue;
        }
        const std::vector<Region> regions = assemble_regions(out, out.pareto.best_acf(), cfg);
        const EvalResult ours = evaluate_regions(regions, city.records, cfg, "regiongen");
        const std::vector<Region> grid = grid_baseline_regions(
            city.bbox, static_cast<int>(regions.size()), city.records, cfg);
        const EvalResult base = evaluate_regions(grid, city.records, cfg, "grid");

        const bool acf_win = ours.summary.mean_acf > base.summary.mean_acf;
        const bool recall_ok = ours.summary.recall >= 0.95 && base.summary.recall >= 0.95;
        const double rel_gain =
            base.summary.mape > 0.0
                ? (base.summary.mape - ours.summary.mape) / base.summary.mape
                : 0.0;
        const bool mape_win = rel_gain >= 0.03;
        if (element_count >= 400 && acf_win && recall_ok && mape_win) ++wins;
        if (acf_win) ++acf_wins;
        if (mape_win && recall_ok) ++mape_wins;
        gain_sum += rel_gain;
        ++seeds_run;
        worst_seed_seconds = std::max(worst_seed_seconds, now_seconds() - seed_t0);
        char buf[120];
        std::snprintf(buf, sizeof(buf), " s%llu:%s acf %.3f/%.3f mape %.3f/%.3f",
                      static_cast<unsigned long long>(seed),
                      (acf_win && mape_win && recall_ok) ? "win" : "loss",
                      ours.summary.mean_acf, base.summary.mean_acf, ours.summary.mape,
                      base.summary.mape);
        trail += buf;
    }
    c.seconds = now_seconds() - t0;
    c.pass = wins >= 9 && seeds_run == 10 && worst_seed_seconds < 900.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "%d/10 joint wins (>=9 needed): ACF greater %d/10, MAPE gain>=3%% %d/10, "
                  "mean rel gain %+.1f%%, slowest seed %.1fs;",
                  wins, acf_wins, mape_wins, 100.0 * gain_sum / std::max(1, seeds_run),
                  worst_seed_seconds);
    c.detail = buf + trail;
    return c;
}

// --- 7: w-sweep monotone tendency --------------------------------------------

Criterion criterion_w_sweep() {
    Criterion c{7, "w-sweep monotone tendency"};
    const double t0 = now_seconds();

    SyntheticCitySpec spec;
    spec.extent_km = 6.0;
    spec.road_spacing_m = 500.0;
    spec.days = 20;
    spec.seed = 17;
    spec.noise_per_km2_per_hour = 0.05;
    spec.hotspots = default_hotspots(spec.extent_km, 10, 23);
    const SyntheticCity city = generate_city(spec);

    PipelineConfig base_cfg;
    base_cfg.raster_width = 384;
    base_cfg.raster_height = 384;
    base_cfg.alpha = 0.5;
    base_cfg.max_epochs = 6000;  // binding budget so the preference matters
    base_cfg.bbox = city.bbox;

    std::vector<AtomicElement> master = segment_city(city.geometry, base_cfg);
    const TimeWindow window = derive_time_window(city.records, base_cfg);
    attach_demand(master, city.records, base_cfg, window);

    const std::vector<double> w_values{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> mean_best_acf, mean_best_spec;
    for (double w : w_values) {
        double acf_acc = 0.0, spec_acc = 0.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            PipelineConfig cfg = base_cfg;
            cfg.predictability_weight = w;
            cfg.seed = seed;
            const OptimizeOutput out = run_optimize(master, city.geometry.obstacles, cfg);
            acf_acc += out.pareto.best_acf().mean_acf;
            spec_acc += out.pareto.best_specificity().mean_specificity;
        }
        mean_best_acf.push_back(acf_acc / 5.0);
        mean_best_spec.push_back(spec_acc / 5.0);
    }
    const double rho_acf = oracles::spearman(w_values, mean_best_acf);
    const double rho_spec = oracles::spearman(w_values, mean_best_spec);
    c.seconds = now_seconds() - t0;
    c.pass = rho_acf > 0.0 && rho_spec < 0.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "spearman(w, bestACF)=%.2f (>0), spearman(w, bestSpec)=%.2f (<0); "
                  "bestACF %.4f..%.4f bestSpec %.4f..%.4f",
                  rho_acf, rho_spec, mean_best_acf.front(), mean_best_acf.back(),
                  mean_best_spec.front(), mean_best_spec.back());
    c.detail = buf;
    return c;
}

// --- 8: scalability trend -----------------------------------------------------

Criterion criterion_scalability() {
    Criterion c{8, "Scalability trend"};
    const double t0 = now_seconds();

    SyntheticCitySpec spec;
    spec.extent_km = 8.0;  // 6400 cells of ~0.01 km^2 at the top size
    spec.road_spacing_m = 500.0;
    spec.days = 28;
    spec.seed = 29;
    spec.noise_per_km2_per_hour = 0.3;
    spec.hotspots = default_hotspots(spec.extent_km, 16, 31);

    PipelineConfig cfg;
    cfg.alpha = 0.0;
    cfg.max_epochs = 200000;
    cfg.optimizer_restarts = false;  // natural convergence, epochs instance-driven
    cfg.seed = 7;

    const std::vector<int> sizes{100, 400, 1600, 6400};
    const std::vector<ScaleRow> rows = run_scalability(spec, sizes, cfg);

    bool time_monotone = true, epochs_monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].wall_seconds < rows[i - 1].wall_seconds) time_monotone = false;
        if (rows[i].evaluations < rows[i - 1].evaluations) epochs_monotone = false;
    }
    const double top_seconds = rows.back().wall_seconds;
    c.seconds = now_seconds() - t0;
    c.pass = time_monotone && epochs_monotone && top_seconds < 7200.0 && rows.size() == 4;
    std::string detail;
    for (const ScaleRow& row : rows) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), " N=%d: %.1fs %lld evals;", row.n_elements,
                      row.wall_seconds, row.evaluations);
        detail += buf;
    }
    c.detail = (time_monotone ? std::string("runtime nondecreasing,")
                              : std::string("runtime NOT monotone,")) +
               (epochs_monotone ? " epochs nondecreasing;" : " epochs NOT monotone;") + detail;
    return c;
}

// --- 9: determinism ------------------------------------------------------------

Criterion criterion_determinism() {
    Criterion c{9, "Byte-identical reruns"};
    const double t0 = now_seconds();

    SyntheticCitySpec spec;
    spec.extent_km = 5.0;
    spec.road_spacing_m = 500.0;
    spec.days = 10;
    spec.seed = 41;
    spec.river = true;
    spec.hotspots = default_hotspots(spec.extent_km, 8, 43);
    const SyntheticCity city = generate_city(spec);

    PipelineConfig cfg;
    cfg.raster_width = 320;
    cfg.raster_height = 320;
    cfg.alpha = 0.25;
    cfg.max_epochs = 8000;
    cfg.seed = 11;
    cfg.bbox = city.bbox;

    namespace fs = std::filesystem;
    auto run_once = [&](const std::string& tag) {
        std::vector<AtomicElement> elements = segment_city(city.geometry, cfg);
        const TimeWindow window = derive_time_window(city.records, cfg);
        attach_demand(elements, city.records, cfg, window);
        const OptimizeOutput out =
            run_optimize(std::move(elements), city.geometry.obstacles, cfg);
        const std::string regions =
            (fs::temp_directory_path() / ("rg_acc_regions_" + tag + ".geojson")).string();
        const std::string pareto =
            (fs::temp_directory_path() / ("rg_acc_pareto_" + tag + ".json")).string();
        write_regions_geojson(regions, assemble_regions(out, out.pareto.best_acf(), cfg));
        write_pareto_json(pareto, out, cfg);
        return std::make_pair(slurp(regions), slurp(pareto));
    };
    const auto [regions_a, pareto_a] = run_once("a");
    const auto [regions_b, pareto_b] = run_once("b");
    c.seconds = now_seconds() - t0;
    c.pass = !regions_a.empty() && regions_a == regions_b && pareto_a == pareto_b;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "regions.geojson %s, pareto.json %s",
                  regions_a == regions_b ? "identical" : "DIFFER",
                  pareto_a == pareto_b ? "identical" : "DIFFER");
    c.detail = buf;
    return c;
}

// --- 10: geohash conformance ----------------------------------------------------

Criterion criterion_geohash() {
    Criterion c{10, "Geohash conformance"};
    const double t0 = now_seconds();
    int bad = 0;
    if (geohash_encode({0.0, 0.0}).code != "s0000000") ++bad;
    if (geohash_encode({180.0, 90.0}).code != "zzzzzzzz") ++bad;
    if (geohash_encode({-180.0, -90.0}).code != "00000000") ++bad;
    if (geohash_encode({10.40744, 57.64911}).code != "u4pruydq") ++bad;

    Rng rng(707);
    int prefix_bad = 0;
    for (int it = 0; it < 10000; ++it) {
        const Point p{rng.uniform(-180.0, 180.0), rng.uniform(-90.0, 90.0)};
        const GeohashCell cell = geohash_encode(p);
        const BoundingBox box = geohash_decode_bbox(cell.code);
        if (!box.contains(p)) {
            ++prefix_bad;
            continue;
        }
        const Point q{box.lon_min + (box.lon_max - box.lon_min) * rng.uniform(0.001, 0.999),
                      box.lat_min + (box.lat_max - box.lat_min) * rng.uniform(0.001, 0.999)};
        if (geohash_encode(q).code != cell.code) ++prefix_bad;
    }
    c.seconds = now_seconds() - t0;
    c.pass = bad == 0 && prefix_bad == 0;
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%d vector mismatches, %d prefix-containment failures", bad,
                  prefix_bad);
    c.detail = buf;
    return c;
}

}  // namespace

int main() {
    std::vector<Criterion> results;
    results.push_back(criterion_acf());
    results.push_back(criterion_morphology());
    results.push_back(criterion_constraints());
    results.push_back(criterion_front());
    results.push_back(criterion_dbalance());
    results.push_back(criterion_directional());
    results.push_back(criterion_w_sweep());
    results.push_back(criterion_scalability());
    results.push_back(criterion_determinism());
    results.push_back(criterion_geohash());

    int failures = 0;
    for (const Criterion& c : results) {
        std::printf("CRITERION %2d %-45s %s  (%.1fs)  %s\n", c.id, c.name.c_str(),
                    c.pass ? "PASS" : "FAIL", c.seconds, c.detail.c_str());
        if (!c.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
                results.size());
    return failures;
}
