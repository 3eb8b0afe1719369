#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "regiongen/geometry.hpp"

namespace regiongen {

struct AllFiltered : std::runtime_error {
    AllFiltered() : std::runtime_error("no element meets the demand threshold") {}
};

/// One road/obstacle-bounded polygon together with its demand series and
/// geohash-cell service counts.
struct AtomicElement {
    int id = 0;
    Polygon polygon;
    double area_km2 = 0.0;
    double total_cells = 0.0;     // geohash cells inside the polygon
    double serviced_cells = 0.0;  // cells holding at least one record
    std::vector<double> series;   // per-interval demand counts
    std::optional<double> acf_daily;  // unset when the series is flat
};

/// Nodes are element indices into the owning vector; edges mark pairs that
/// may merge. Standalone elements never carry edges.
struct AggregatableGraph {
    int num_elements = 0;
    std::vector<std::pair<int, int>> edges;  // u < v
    std::vector<char> standalone;
    std::vector<std::vector<int>> adjacency;

    void rebuild_adjacency();
};

struct FilterResult {
    std::vector<AtomicElement> retained;
    int dropped = 0;
    double recall = 0.0;  // retained demand / total demand
};

/// Keep elements whose mean daily demand is at least alpha.
FilterResult filter_elements(const std::vector<AtomicElement>& elements, double alpha,
                             std::int64_t interval_seconds);

/// Standalone when oversize (area > max_area_km2) or already predictable
/// (acf_daily > acf_threshold). Elements without a defined ACF can only be
/// standalone by area.
std::vector<char> mark_standalone(const std::vector<AtomicElement>& elements,
                                  double max_area_km2 = 5.0, double acf_threshold = 0.5);

/// Edge (u, v) iff both non-standalone, boundary distance < tau_m, and the
/// closest-point segment does not cross any obstacle. A bounding-box
/// distance prune keeps the pair scan near-linear in practice.
AggregatableGraph build_edges(const std::vector<AtomicElement>& elements,
                              const std::vector<char>& standalone, double tau_m,
                              const std::vector<Polygon>& obstacles);

/// Edge-list dump: "standalone:" header line, then one "u v" pair per line.
std::string graph_to_text(const AggregatableGraph& g);

}  // namespace regiongen
