#include "regiongen/geohash.hpp"

#include <cmath>
#include <stdexcept>

namespace regiongen {

namespace {

constexpr char kBase32[] = "0123456789bcdefghjkmnpqrstuvwxyz";

int base32_value(char c) {
    for (int i = 0; i < 32; ++i)
        if (kBase32[i] == c) return i;
    throw std::invalid_argument("invalid geohash character");
}

}  // namespace

GeohashCell geohash_encode(const Point& p, int precision) {
    if (!valid_point(p)) throw std::invalid_argument("point outside lon/lat range");
    if (precision < 1 || precision > 12) throw std::invalid_argument("precision out of range");

    double lon_lo = -180.0, lon_hi = 180.0;
    double lat_lo = -90.0, lat_hi = 90.0;
    std::string code;
    code.reserve(static_cast<std::size_t>(precision));

    bool lon_bit = true;
    int bits = 0;
    int value = 0;
    while (static_cast<int>(code.size()) < precision) {
        if (lon_bit) {
            const double mid = (lon_lo + lon_hi) / 2.0;
            if (p.lon >= mid) {
                value = (value << 1) | 1;
                lon_lo = mid;
            } else {
                value <<= 1;
                lon_hi = mid;
            }
        } else {
            const double mid = (lat_lo + lat_hi) / 2.0;
            if (p.lat >= mid) {
                value = (value << 1) | 1;
                lat_lo = mid;
            } else {
                value <<= 1;
                lat_hi = mid;
            }
        }
        lon_bit = !lon_bit;
        if (++bits == 5) {
            code.push_back(kBase32[value]);
            bits = 0;
            value = 0;
        }
    }
    return {code};
}

BoundingBox geohash_decode_bbox(const std::string& code) {
    if (code.empty()) throw std::invalid_argument("empty geohash code");
    double lon_lo = -180.0, lon_hi = 180.0;
    double lat_lo = -90.0, lat_hi = 90.0;
    bool lon_bit = true;
    for (char c : code) {
        const int v = base32_value(c);
        for (int bit = 4; bit >= 0; --bit) {
            const int set = (v >> bit) & 1;
            if (lon_bit) {
                const double mid = (lon_lo + lon_hi) / 2.0;
                (set ? lon_lo : lon_hi) = mid;
            } else {
                const double mid = (lat_lo + lat_hi) / 2.0;
                (set ? lat_lo : lat_hi) = mid;
            }
            lon_bit = !lon_bit;
        }
    }
    return {lon_lo, lat_lo, lon_hi, lat_hi};
}

GeohashIndex geohashindex_impl(double lon, double lat) {
    const double cells = static_cast<double>(1u << kGeohashAxisBits);
    auto clamp_idx = [&](double frac) -> std::uint32_t {
        double idx = std::floor(frac * cells);
        if (idx < 0.0) idx = 0.0;
        if (idx > cells - 1.0) idx = cells - 1.0;
        return static_cast<std::uint32_t>(idx);
    };
    return {clamp_idx((lon + 180.0) / 360.0), clamp_idx((lat + 90.0) / 180.0)};
}

GeohashIndex geohash_index(const Point& p) {
    if (!valid_point(p)) throw std::invalid_argument("point outside lon/lat range");
    return geohashindex_impl(p.lon, p.lat);
}

Point geohash_cell_center(const GeohashIndex& idx) {
    return {-180.0 + (static_cast<double>(idx.col) + 0.5) * geohash_cell_width_deg(),
            -90.0 + (static_cast<double>(idx.row) + 0.5) * geohash_cell_height_deg()};
}

}  // namespace regiongen
