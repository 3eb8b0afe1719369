#include "regiongen/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "regiongen/rng.hpp"

namespace regiongen {

namespace {

// 2026-01-01T00:00:00Z; a fixed midnight keeps interval bins day-aligned.
constexpr std::int64_t kEpochStart = 1767225600;

}  // namespace

std::vector<Hotspot> default_hotspots(double extent_km, int count, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Hotspot> spots;
    spots.reserve(static_cast<std::size_t>(count));
    const int per_side = std::max(1, static_cast<int>(std::ceil(std::sqrt(count))));
    for (int i = 0; i < count; ++i) {
        Hotspot h;
        const int gx = i % per_side;
        const int gy = i / per_side;
        h.cx_km = (gx + 0.5) / per_side * extent_km + rng.uniform(-0.4, 0.4);
        h.cy_km = (gy + 0.5) / per_side * extent_km + rng.uniform(-0.4, 0.4);
        h.cx_km = std::clamp(h.cx_km, 0.3, extent_km - 0.3);
        h.cy_km = std::clamp(h.cy_km, 0.3, extent_km - 0.3);
        h.rate_per_hour = rng.uniform(8.0, 40.0);
        h.amplitude = rng.uniform(0.3, 0.95);
        h.phase = rng.uniform(0.0, 2.0 * M_PI);
        h.sigma_m = rng.uniform(200.0, 500.0);
        h.day_volatility = rng.uniform(0.0, 0.35);
        spots.push_back(h);
    }
    return spots;
}

SyntheticCity generate_city(const SyntheticCitySpec& spec) {
    if (spec.extent_km <= 0.0 || spec.road_spacing_m <= 0.0 || spec.days < 1)
        throw InvalidSpec("extent, road spacing and days must be positive");
    for (const Hotspot& h : spec.hotspots) {
        if (h.rate_per_hour < 0.0) throw InvalidSpec("hotspot rate must be nonnegative");
        if (h.amplitude < 0.0 || h.amplitude > 1.0)
            throw InvalidSpec("hotspot amplitude outside [0, 1]");
    }
    if (spec.river && (spec.river_position <= 0.0 || spec.river_position >= 1.0))
        throw InvalidSpec("river_position must be inside (0, 1)");
    if (spec.noise_amplitude < 0.0 || spec.noise_amplitude > 1.0)
        throw InvalidSpec("noise_amplitude outside [0, 1]");

    SyntheticCity city;
    const double lat0 = spec.origin_lat;
    const double lon0 = spec.origin_lon;
    const double deg_per_km_lat = 1.0 / kKmPerDegree;
    const double deg_per_km_lon = 1.0 / (kKmPerDegree * std::cos(lat0 * M_PI / 180.0));
    const double extent_lon = spec.extent_km * deg_per_km_lon;
    const double extent_lat = spec.extent_km * deg_per_km_lat;
    city.bbox = {lon0, lat0, lon0 + extent_lon, lat0 + extent_lat};

    auto to_point = [&](double x_km, double y_km) -> Point {
        return {lon0 + x_km * deg_per_km_lon, lat0 + y_km * deg_per_km_lat};
    };

    // Grid roads, both axes, spanning the full extent including borders.
    const double spacing_km = spec.road_spacing_m / 1000.0;
    const int lines = static_cast<int>(std::round(spec.extent_km / spacing_km));
    for (int i = 0; i <= lines; ++i) {
        const double offset = std::min(i * spacing_km, spec.extent_km);
        city.geometry.roads.push_back({to_point(0.0, offset), to_point(spec.extent_km, offset)});
        city.geometry.roads.push_back({to_point(offset, 0.0), to_point(offset, spec.extent_km)});
    }

    if (spec.river) {
        const double mid = spec.river_position * spec.extent_km;
        const double half = spec.river_width_m / 2000.0;
        const double y0 = std::max(0.0, mid - half);
        const double y1 = std::min(spec.extent_km, mid + half);
        city.geometry.obstacles.push_back(make_polygon(
            {to_point(0.0, y0), to_point(spec.extent_km, y0), to_point(spec.extent_km, y1),
             to_point(0.0, y1), to_point(0.0, y0)}));
    }

    city.t0 = kEpochStart;
    city.t_end = kEpochStart + static_cast<std::int64_t>(spec.days) * 86400;

    Rng rng(spec.seed);
    const double noise_rate = spec.noise_per_km2_per_hour * spec.extent_km * spec.extent_km;
    const int hours = spec.days * 24;

    // Mean-1 log-normal day multipliers, one stream per hotspot.
    std::vector<std::vector<double>> day_mult(spec.hotspots.size());
    for (std::size_t hi = 0; hi < spec.hotspots.size(); ++hi) {
        const double vol = spec.hotspots[hi].day_volatility;
        day_mult[hi].assign(static_cast<std::size_t>(spec.days), 1.0);
        for (int d = 0; d < spec.days; ++d) {
            const double draw = rng.normal(0.0, 1.0);
            if (vol > 0.0)
                day_mult[hi][static_cast<std::size_t>(d)] =
                    std::exp(vol * draw - 0.5 * vol * vol);
        }
    }

    for (int hour = 0; hour < hours; ++hour) {
        const std::int64_t hour_start = city.t0 + static_cast<std::int64_t>(hour) * 3600;
        const double hod = static_cast<double>(hour % 24);
        const int day = hour / 24;
        for (std::size_t hi = 0; hi < spec.hotspots.size(); ++hi) {
            const Hotspot& h = spec.hotspots[hi];
            const double rate =
                h.rate_per_hour * day_mult[hi][static_cast<std::size_t>(day)] *
                std::max(0.0, 1.0 + h.amplitude * std::sin(2.0 * M_PI * hod / 24.0 + h.phase));
            const int count = rng.poisson(rate);
            for (int i = 0; i < count; ++i) {
                const double x =
                    std::clamp(h.cx_km + rng.normal(0.0, h.sigma_m / 1000.0), 0.0, spec.extent_km);
                const double y =
                    std::clamp(h.cy_km + rng.normal(0.0, h.sigma_m / 1000.0), 0.0, spec.extent_km);
                const std::int64_t ts = hour_start + static_cast<std::int64_t>(rng.below(3600));
                city.records.push_back({ts, to_point(x, y)});
            }
        }
        const double noise_hour_rate =
            noise_rate *
            std::max(0.0, 1.0 + spec.noise_amplitude * std::sin(2.0 * M_PI * hod / 24.0 + 1.0));
        const int noise_count = rng.poisson(noise_hour_rate);
        for (int i = 0; i < noise_count; ++i) {
            const double x = rng.uniform(0.0, spec.extent_km);
            const double y = rng.uniform(0.0, spec.extent_km);
            const std::int64_t ts = hour_start + static_cast<std::int64_t>(rng.below(3600));
            city.records.push_back({ts, to_point(x, y)});
        }
    }
    std::stable_sort(city.records.begin(), city.records.end(),
                     [](const ServiceRecord& a, const ServiceRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    return city;
}

void write_records_csv(const std::string& path, const std::vector<ServiceRecord>& records) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw FileUnreadable(path);
    std::fputs("timestamp,lat,lon\n", f);
    for (const ServiceRecord& r : records)
        std::fprintf(f, "%s,%.9f,%.9f\n", format_rfc3339(r.timestamp).c_str(), r.location.lat,
                     r.location.lon);
    std::fclose(f);
}

void write_geometry_geojson(const std::string& path, const GeometrySet& geometry) {
    using nlohmann::ordered_json;
    ordered_json features = ordered_json::array();
    for (const Polyline& road : geometry.roads) {
        ordered_json coords = ordered_json::array();
        for (const Point& p : road) coords.push_back({p.lon, p.lat});
        features.push_back({{"type", "Feature"},
                            {"properties", {{"kind", "road"}}},
                            {"geometry", {{"type", "LineString"}, {"coordinates", coords}}}});
    }
    for (const Polygon& obs : geometry.obstacles) {
        ordered_json rings = ordered_json::array();
        ordered_json ring = ordered_json::array();
        for (const Point& p : obs.exterior) ring.push_back({p.lon, p.lat});
        rings.push_back(ring);
        for (const auto& hole : obs.holes) {
            ordered_json h = ordered_json::array();
            for (const Point& p : hole) h.push_back({p.lon, p.lat});
            rings.push_back(h);
        }
        features.push_back({{"type", "Feature"},
                            {"properties", {{"kind", "obstacle"}}},
                            {"geometry", {{"type", "Polygon"}, {"coordinates", rings}}}});
    }
    const ordered_json doc = {{"type", "FeatureCollection"}, {"features", features}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileUnreadable(path);
    out << doc.dump(1, '\t') << '\n';
}

}  // namespace regiongen
