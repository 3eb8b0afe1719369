#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "regiongen/geohash.hpp"
#include "regiongen/geometry.hpp"

namespace regiongen {

struct ZeroVariance : std::runtime_error {
    explicit ZeroVariance(int cluster = -1)
        : std::runtime_error(cluster < 0 ? "series has zero variance"
                                         : "cluster " + std::to_string(cluster) +
                                               " series has zero variance"),
          cluster_id(cluster) {}
    int cluster_id;
};
struct LagTooLarge : std::runtime_error {
    LagTooLarge() : std::runtime_error("lag must satisfy 1 <= k < T") {}
};
struct UnassignedElement : std::runtime_error {
    explicit UnassignedElement(int element)
        : std::runtime_error("element " + std::to_string(element) + " has no cluster") {}
};
struct ZeroArea : std::runtime_error {
    explicit ZeroArea(int cluster)
        : std::runtime_error("cluster " + std::to_string(cluster) + " has zero total area") {}
};
struct NothingRetained : std::runtime_error {
    NothingRetained() : std::runtime_error("every cluster fell below the demand threshold") {}
};
struct HistoryTooShort : std::runtime_error {
    HistoryTooShort() : std::runtime_error("need more than one day of history") {}
};
struct EmptyTimeRange : std::runtime_error {
    EmptyTimeRange() : std::runtime_error("time range is empty") {}
};

/// T x N per-interval counts, column i = one atomic element.
struct DemandMatrix {
    int num_intervals = 0;           // T
    int num_elements = 0;            // N
    std::vector<double> values;      // row-major, t * N + i
    std::int64_t interval_seconds = 3600;
    std::int64_t t0_epoch = 0;

    double at(int t, int i) const { return values[static_cast<std::size_t>(t) * num_elements + i]; }
    double& at(int t, int i) { return values[static_cast<std::size_t>(t) * num_elements + i]; }
};

/// T x M aggregated counts, one column per cluster.
struct ClusterSeries {
    int num_intervals = 0;
    int num_clusters = 0;
    std::vector<double> values;  // t * M + j
    std::int64_t interval_seconds = 3600;

    double at(int t, int j) const { return values[static_cast<std::size_t>(t) * num_clusters + j]; }
    double& at(int t, int j) { return values[static_cast<std::size_t>(t) * num_clusters + j]; }
    std::vector<double> column(int j) const;
};

/// Per-element serviced/total sizes used by the specificity objective.
/// Built from precision-8 geohash cells, so the entries are cell counts.
struct ServiceArea {
    std::vector<double> total;     // ts
    std::vector<double> serviced;  // vs
};

/// Autocorrelation at lag k with the T/(T-k) normalization:
///   rho = T * sum_{t=k+1..T} (s_t - mean)(s_{t-k} - mean)
///       / ((T-k) * sum_{t=1..T} (s_t - mean)^2)
/// The ratio can leave [-1, 1] slightly for short windows; it is not clipped.
double acf(std::span<const double> series, int lag);

/// acf at the one-day lag: k = 24h / interval.
double acf_daily(std::span<const double> series, std::int64_t interval_seconds);

int daily_lag(std::int64_t interval_seconds);

/// S = D x X. `assignment[i]` is the 0-based cluster of element i.
ClusterSeries aggregate(const DemandMatrix& d, const std::vector<int>& assignment,
                        int num_clusters);

/// Mean daily ACF over clusters. Throws ZeroVariance naming the first flat
/// cluster; the optimizer uses the coerced variant below instead.
double mean_acf_objective(const ClusterSeries& s);

/// Same mean, but a flat cluster contributes 0 instead of throwing. A flat
/// series carries no demand signal, so scoring it 0 keeps the objective
/// from rewarding empty clusters.
double mean_acf_objective_coerced(const ClusterSeries& s, int lag);

/// Mean over clusters of sum(vs)/sum(ts) per Eq-style cluster ratios.
double specificity_objective(const ServiceArea& sa, const std::vector<int>& assignment,
                             int num_clusters);

double specificity_objective_coerced(const ServiceArea& sa, const std::vector<int>& assignment,
                                     int num_clusters);

/// Count precision-8 geohash cells whose center lies inside the element
/// (ts) and how many of those contain at least one record (vs).
std::pair<double, double> serviced_area_from_geohash(const std::vector<Point>& records,
                                                     const Polygon& element);

struct MapeResult {
    double mape = 0.0;
    double recall = 0.0;
    int clusters_retained = 0;
};

/// Drop clusters whose mean daily demand is below the threshold, then MAPE
/// over the remaining (t, j) pairs with actual > 0. Recall is the retained
/// share of total demand.
MapeResult mape_at_recall(const ClusterSeries& actual, const ClusterSeries& predicted,
                          double min_daily_demand = 1.0);

/// Seasonal naive baseline: prediction for interval t repeats the
/// observation at t - 24h. Returns the last `horizon` intervals.
ClusterSeries seasonal_naive_predict(const ClusterSeries& s, int horizon);

ClusterSeries tail(const ClusterSeries& s, int horizon);

double mean_daily_demand(std::span<const double> series, std::int64_t interval_seconds);

}  // namespace regiongen
