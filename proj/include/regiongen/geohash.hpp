#pragma once

#include <cstdint>
#include <string>

#include "regiongen/geometry.hpp"

namespace regiongen {

/// Base-32 geohash cell. Precision 8 is the service-area calculation unit:
/// 40 interleaved bits, 20 per axis, cells of roughly 38 m x 19 m.
struct GeohashCell {
    std::string code;
};

inline constexpr int kGeohashPrecision = 8;
inline constexpr int kGeohashAxisBits = 20;  // per-axis bits at precision 8

/// Standard geohash bit interleaving (longitude bit first), base-32 alphabet
/// "0123456789bcdefghjkmnpqrstuvwxyz".
GeohashCell geohash_encode(const Point& p, int precision = kGeohashPrecision);

/// Bounding box of a geohash code.
BoundingBox geohash_decode_bbox(const std::string& code);

/// Integer cell index at precision 8: col in [0, 2^20) over longitude,
/// row in [0, 2^20) over latitude. Same partition as geohash_encode.
struct GeohashIndex {
    std::uint32_t col = 0;
    std::uint32_t row = 0;

    bool operator==(const GeohashIndex&) const = default;
    std::uint64_t key() const { return (static_cast<std::uint64_t>(col) << 20) | row; }
};

GeohashIndex geohash_index(const Point& p);
Point geohash_cell_center(const GeohashIndex& idx);

inline double geohash_cell_width_deg() { return 360.0 / (1u << kGeohashAxisBits); }
inline double geohash_cell_height_deg() { return 180.0 / (1u << kGeohashAxisBits); }

}  // namespace regiongen
