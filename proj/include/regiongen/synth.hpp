#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "regiongen/ingest.hpp"

namespace regiongen {

struct InvalidSpec : std::runtime_error {
    explicit InvalidSpec(const std::string& what) : std::runtime_error(what) {}
};

struct Hotspot {
    double cx_km = 0.0;  // offset from the city's southwest corner
    double cy_km = 0.0;
    double rate_per_hour = 10.0;
    double amplitude = 0.8;  // daily sinusoid share of the rate, in [0, 1]
    double phase = 0.0;
    double sigma_m = 300.0;  // Gaussian scatter around the center
    /// Day-to-day demand burstiness: sigma of a mean-1 log-normal multiplier
    /// drawn per day. 0 keeps the rate profile identical every day.
    double day_volatility = 0.0;
};

/// Grid-road city with an optional river and Poisson demand whose hourly
/// rate follows rate * (1 + amplitude * sin(2*pi*hour/24 + phase)).
struct SyntheticCitySpec {
    double extent_km = 6.0;
    double road_spacing_m = 500.0;
    bool river = false;
    double river_position = 0.5;  // fraction of the extent, horizontal strip
    double river_width_m = 80.0;
    std::vector<Hotspot> hotspots;
    double noise_per_km2_per_hour = 0.02;
    double noise_amplitude = 0.0;  // daily sinusoid share of the background rate
    int days = 30;
    std::uint64_t seed = 1;
    double origin_lon = 116.0;
    double origin_lat = 30.0;
};

struct SyntheticCity {
    GeometrySet geometry;
    std::vector<ServiceRecord> records;
    BoundingBox bbox;
    std::int64_t t0 = 0;
    std::int64_t t_end = 0;
};

SyntheticCity generate_city(const SyntheticCitySpec& spec);

/// Evenly spread hotspots with mixed amplitudes, for quick demos and the
/// synthetic experiments.
std::vector<Hotspot> default_hotspots(double extent_km, int count, std::uint64_t seed);

void write_records_csv(const std::string& path, const std::vector<ServiceRecord>& records);
void write_geometry_geojson(const std::string& path, const GeometrySet& geometry);

}  // namespace regiongen
