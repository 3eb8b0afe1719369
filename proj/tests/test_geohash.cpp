#include <doctest.h>

#include "regiongen/geohash.hpp"
#include "regiongen/rng.hpp"

using namespace regiongen;

TEST_CASE("geohash_encode hand-derived vectors") {
    CHECK(geohash_encode({0.0, 0.0}).code == "s0000000");
    CHECK(geohash_encode({180.0, 90.0}).code == "zzzzzzzz");
    CHECK(geohash_encode({-180.0, -90.0}).code == "00000000");
    // Classic reference point (Jutland).
    CHECK(geohash_encode({10.40744, 57.64911}).code == "u4pruydq");
    CHECK(geohash_encode({10.40744, 57.64911}, 11).code == "u4pruydqqvj");
}

TEST_CASE("geohash precision is coarser than 1e-9 degrees") {
    const GeohashCell a = geohash_encode({116.3974312, 39.9087211});
    const GeohashCell b = geohash_encode({116.3974312 + 1e-9, 39.9087211 + 1e-9});
    CHECK(a.code == b.code);
}

TEST_CASE("geohash decode box contains the encoded point") {
    Rng rng(3);
    for (int it = 0; it < 200; ++it) {
        const Point p{rng.uniform(-180.0, 180.0), rng.uniform(-90.0, 90.0)};
        const GeohashCell cell = geohash_encode(p);
        const BoundingBox box = geohash_decode_bbox(cell.code);
        CHECK(box.contains(p));
    }
}

TEST_CASE("geohash is prefix-monotone: interior points share the cell code") {
    Rng rng(5);
    for (int it = 0; it < 500; ++it) {
        const Point p{rng.uniform(-180.0, 180.0), rng.uniform(-90.0, 90.0)};
        const GeohashCell cell = geohash_encode(p);
        const BoundingBox box = geohash_decode_bbox(cell.code);
        const Point q{box.lon_min + (box.lon_max - box.lon_min) * rng.uniform(0.01, 0.99),
                      box.lat_min + (box.lat_max - box.lat_min) * rng.uniform(0.01, 0.99)};
        CHECK(geohash_encode(q).code == cell.code);
    }
}

TEST_CASE("geohash_index agrees with encode on cell centers") {
    Rng rng(9);
    for (int it = 0; it < 200; ++it) {
        const Point p{rng.uniform(-179.0, 179.0), rng.uniform(-89.0, 89.0)};
        const GeohashIndex idx = geohash_index(p);
        const Point center = geohash_cell_center(idx);
        CHECK(geohash_encode(center).code == geohash_encode(p).code);
        CHECK(geohash_index(center) == idx);
    }
}
