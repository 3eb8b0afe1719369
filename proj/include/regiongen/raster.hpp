#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "regiongen/geometry.hpp"

namespace regiongen {

struct EmptyGeometry : std::runtime_error {
    EmptyGeometry() : std::runtime_error("no road geometry to rasterize") {}
};
struct ResolutionTooLow : std::runtime_error {
    ResolutionTooLow() : std::runtime_error("raster resolution below 16 pixels per axis") {}
};
struct EvenKernel : std::runtime_error {
    EvenKernel() : std::runtime_error("dilation kernel must be odd") {}
};
struct DimensionMismatch : std::runtime_error {
    DimensionMismatch() : std::runtime_error("raster dimensions differ") {}
};

/// Maps pixel (col, row) to geographic coordinates. Row 0 is the southern
/// edge; both steps are positive degrees per pixel.
struct GeoTransform {
    double lon0 = 0.0;
    double lat0 = 0.0;
    double lon_step = 0.0;
    double lat_step = 0.0;

    Point pixel_corner(double col, double row) const {
        return {lon0 + col * lon_step, lat0 + row * lat_step};
    }
};

/// Binary pixel grid: 1 = road/obstacle, 0 = background.
struct RasterGrid {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major, row * width + col
    GeoTransform geo;

    std::uint8_t at(int col, int row) const { return pixels[static_cast<std::size_t>(row) * width + col]; }
    void set(int col, int row, std::uint8_t v) { pixels[static_cast<std::size_t>(row) * width + col] = v; }
    bool in_bounds(int col, int row) const { return col >= 0 && col < width && row >= 0 && row < height; }
};

RasterGrid make_raster(int width, int height, const GeoTransform& geo);

/// 0 = boundary skeleton/obstacle, k >= 1 = background component id.
struct LabeledRaster {
    int width = 0;
    int height = 0;
    std::vector<std::int32_t> labels;
    int component_count = 0;
    GeoTransform geo;

    std::int32_t at(int col, int row) const { return labels[static_cast<std::size_t>(row) * width + col]; }
};

using Polyline = std::vector<Point>;

/// Rasterize roads (Bresenham over each polyline segment) and obstacles
/// (scanline fill by pixel center plus Bresenham along ring edges so thin
/// obstacles stay gap-free) onto a shared grid over `bbox`.
std::pair<RasterGrid, RasterGrid> rasterize(const std::vector<Polyline>& roads,
                                            const std::vector<Polygon>& obstacles,
                                            int width, int height,
                                            const BoundingBox& bbox);

/// Binary dilation with a k x k square structuring element, k odd.
RasterGrid dilate(const RasterGrid& r, int kernel);

/// Iterative thinning to a one-pixel-wide skeleton. Candidate pixels come
/// from the classic two-subiteration neighborhood conditions; deletions are
/// committed one at a time with the conditions re-checked against the
/// current grid, so every removed pixel is 8-simple at removal time and the
/// foreground 8-component count never changes.
RasterGrid thin(const RasterGrid& r);

/// OR the obstacle pixels into the skeleton, then label the 4-connected
/// background components 1..K in row-major first-encounter order.
LabeledRaster fuse_and_label(const RasterGrid& skeleton, const RasterGrid& obstacle_raster);

/// Trace each component's boundary along pixel-cell edges. The exterior
/// comes out as one closed loop (it may revisit a corner where the
/// component touches itself diagonally); enclosed islands become holes, so
/// the polygon area equals pixel count x cell area.
std::vector<std::pair<int, Polygon>> vectorize(const LabeledRaster& l);

/// Debug dump as binary PGM (P5), foreground white.
void write_pgm(const RasterGrid& r, const std::string& path);

}  // namespace regiongen
