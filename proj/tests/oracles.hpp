// Independent reference implementations used as test oracles. Everything
// here is written against the documented definitions, not the library
// internals, so a bug has to appear twice to slip through.
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "regiongen/partition.hpp"
#include "regiongen/raster.hpp"
#include "regiongen/rng.hpp"

namespace oracles {

/// Literal transcription of the lagged-autocorrelation formula with the
/// T/(T-k) factor, separate loops for mean, numerator and denominator.
double brute_acf(const std::vector<double>& series, int lag);

/// Dilation by definition: output 1 iff any input pixel within the k x k
/// window is 1.
regiongen::RasterGrid naive_dilate(const regiongen::RasterGrid& r, int kernel);

/// Component count by flood fill. eight = true uses 8-connectivity.
int flood_count(const regiongen::RasterGrid& r, bool eight);

/// 4-connected labels of zero pixels of (skeleton OR obstacles), flood fill.
std::vector<std::int32_t> flood_label_background(const regiongen::RasterGrid& skeleton,
                                                 const regiongen::RasterGrid& obstacles,
                                                 int& component_count);

/// Independent rewrite of the thinning definition: per sub-iteration,
/// collect candidates matching the classic neighborhood conditions, then
/// delete them one at a time in scan order, re-testing before each delete.
regiongen::RasterGrid reference_thin(const regiongen::RasterGrid& r);

/// All partitions of nodes 0..n-1 into exactly m labeled, nonempty,
/// connected clusters. Labelings that differ only by cluster renaming are
/// all produced (callers compare objective values, not labels).
std::vector<std::vector<int>> enumerate_connected_partitions(
    const std::vector<std::vector<int>>& adjacency, int m);

struct FrontPoint {
    double f1;
    double f2;
};

/// Exact Pareto front over every feasible clustering of the instance with
/// exactly m clusters (area cap enforced).
std::vector<FrontPoint> exhaustive_front(const regiongen::ProblemInstance& inst, int m);

double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Random connected graph on n nodes: a random spanning tree plus extra
/// random edges.
std::vector<std::vector<int>> random_connected_graph(int n, double extra_edge_prob,
                                                     regiongen::Rng& rng);

/// Random clustering instance over a random connected graph, with integer
/// demand series long enough for the daily lag.
regiongen::ProblemInstance random_instance(int n, int t_total, regiongen::Rng& rng,
                                           double max_area_km2 = 1e9, int lag = 24);

regiongen::RasterGrid random_raster(int width, int height, double fill, regiongen::Rng& rng);

bool grids_equal(const regiongen::RasterGrid& a, const regiongen::RasterGrid& b);

}  // namespace oracles
