#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "regiongen/synth.hpp"
#include "regiongen/timeseries.hpp"

using namespace regiongen;

TEST_CASE("generate_city validates its spec") {
    SyntheticCitySpec spec;
    spec.extent_km = -1.0;
    CHECK_THROWS_AS(generate_city(spec), InvalidSpec);
    spec = {};
    spec.hotspots.push_back({1.0, 1.0, 10.0, 1.5, 0.0, 300.0});
    CHECK_THROWS_AS(generate_city(spec), InvalidSpec);
}

TEST_CASE("record volume matches the Poisson mean within 3 sigma") {
    SyntheticCitySpec spec;
    spec.extent_km = 4.0;
    spec.days = 10;
    spec.seed = 5;
    spec.noise_per_km2_per_hour = 0.0;
    spec.hotspots = {{1.0, 1.0, 20.0, 0.0, 0.0, 300.0}, {3.0, 3.0, 10.0, 0.0, 0.0, 300.0}};
    const SyntheticCity city = generate_city(spec);
    const double expected = (20.0 + 10.0) * 24.0 * 10.0;
    const double sigma = std::sqrt(expected);
    CHECK(std::abs(static_cast<double>(city.records.size()) - expected) < 3.0 * sigma);
    // Records sorted by time and inside the bbox.
    for (std::size_t i = 1; i < city.records.size(); ++i)
        CHECK(city.records[i - 1].timestamp <= city.records[i].timestamp);
    for (const ServiceRecord& r : city.records) CHECK(city.bbox.contains(r.location));
}

TEST_CASE("amplitude zero gives near-zero daily ACF; high amplitude exceeds 0.5") {
    SyntheticCitySpec spec;
    spec.extent_km = 2.0;
    spec.days = 30;
    spec.seed = 11;
    spec.noise_per_km2_per_hour = 0.0;
    spec.hotspots = {{1.0, 1.0, 50.0, 0.0, 0.0, 200.0}};
    const SyntheticCity flat = generate_city(spec);

    // Hourly counts over the whole city.
    auto hourly_series = [](const SyntheticCity& c) {
        const int hours = static_cast<int>((c.t_end - c.t0) / 3600);
        std::vector<double> series(static_cast<std::size_t>(hours), 0.0);
        for (const ServiceRecord& r : c.records)
            series[static_cast<std::size_t>((r.timestamp - c.t0) / 3600)] += 1.0;
        return series;
    };
    CHECK(std::abs(acf_daily(hourly_series(flat), 3600)) < 0.1);

    spec.hotspots = {{1.0, 1.0, 50.0, 0.9, 0.0, 200.0}};
    const SyntheticCity periodic = generate_city(spec);
    CHECK(acf_daily(hourly_series(periodic), 3600) > 0.5);
}

TEST_CASE("synthetic city is deterministic and road grid spans the extent") {
    SyntheticCitySpec spec;
    spec.extent_km = 4.0;
    spec.road_spacing_m = 500.0;
    spec.days = 2;
    spec.seed = 21;
    spec.river = true;
    spec.hotspots = default_hotspots(spec.extent_km, 4, 3);
    const SyntheticCity a = generate_city(spec);
    const SyntheticCity b = generate_city(spec);
    CHECK(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].timestamp == b.records[i].timestamp);
        CHECK(a.records[i].location.lon == b.records[i].location.lon);
    }
    // 4 km at 500 m spacing: 9 lines per axis plus the river obstacle.
    CHECK(a.geometry.roads.size() == 18);
    CHECK(a.geometry.obstacles.size() == 1);

    // File outputs are byte-identical under the same seed.
    namespace fs = std::filesystem;
    const std::string r1 = (fs::temp_directory_path() / "rg_rec_a.csv").string();
    const std::string r2 = (fs::temp_directory_path() / "rg_rec_b.csv").string();
    write_records_csv(r1, a.records);
    write_records_csv(r2, b.records);
    std::ifstream f1(r1, std::ios::binary), f2(r2, std::ios::binary);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    CHECK(!s1.str().empty());
}

TEST_CASE("geometry file round-trips through the parser") {
    SyntheticCitySpec spec;
    spec.extent_km = 2.0;
    spec.days = 1;
    spec.river = true;
    spec.hotspots = {{1.0, 1.0, 5.0, 0.5, 0.0, 300.0}};
    const SyntheticCity city = generate_city(spec);
    namespace fs = std::filesystem;
    const std::string path = (fs::temp_directory_path() / "rg_geom_rt.geojson").string();
    write_geometry_geojson(path, city.geometry);
    const GeometrySet parsed = parse_geometry(path);
    CHECK(parsed.roads.size() == city.geometry.roads.size());
    CHECK(parsed.obstacles.size() == city.geometry.obstacles.size());
}
