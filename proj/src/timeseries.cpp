#include "regiongen/timeseries.hpp"

#include <algorithm>
#include <cmath>

namespace regiongen {

std::vector<double> ClusterSeries::column(int j) const {
    std::vector<double> out(static_cast<std::size_t>(num_intervals));
    for (int t = 0; t < num_intervals; ++t) out[static_cast<std::size_t>(t)] = at(t, j);
    return out;
}

double acf(std::span<const double> series, int lag) {
    const int t_total = static_cast<int>(series.size());
    if (lag < 1 || lag >= t_total) throw LagTooLarge();

    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(t_total);

    double denom = 0.0;
    for (double v : series) denom += (v - mean) * (v - mean);
    if (denom == 0.0) throw ZeroVariance();

    double numer = 0.0;
    for (int t = lag; t < t_total; ++t)
        numer += (series[static_cast<std::size_t>(t)] - mean) *
                 (series[static_cast<std::size_t>(t - lag)] - mean);

    return (static_cast<double>(t_total) * numer) /
           (static_cast<double>(t_total - lag) * denom);
}

int daily_lag(std::int64_t interval_seconds) {
    constexpr std::int64_t kDay = 24 * 3600;
    if (interval_seconds <= 0 || kDay % interval_seconds != 0)
        throw std::invalid_argument("interval must divide 24 hours");
    return static_cast<int>(kDay / interval_seconds);
}

double acf_daily(std::span<const double> series, std::int64_t interval_seconds) {
    return acf(series, daily_lag(interval_seconds));
}

ClusterSeries aggregate(const DemandMatrix& d, const std::vector<int>& assignment,
                        int num_clusters) {
    if (static_cast<int>(assignment.size()) != d.num_elements)
        throw UnassignedElement(static_cast<int>(assignment.size()));
    for (int i = 0; i < d.num_elements; ++i)
        if (assignment[static_cast<std::size_t>(i)] < 0 ||
            assignment[static_cast<std::size_t>(i)] >= num_clusters)
            throw UnassignedElement(i);

    ClusterSeries s;
    s.num_intervals = d.num_intervals;
    s.num_clusters = num_clusters;
    s.interval_seconds = d.interval_seconds;
    s.values.assign(static_cast<std::size_t>(d.num_intervals) * num_clusters, 0.0);
    for (int t = 0; t < d.num_intervals; ++t) {
        const double* row = d.values.data() + static_cast<std::size_t>(t) * d.num_elements;
        double* out = s.values.data() + static_cast<std::size_t>(t) * num_clusters;
        for (int i = 0; i < d.num_elements; ++i) out[assignment[static_cast<std::size_t>(i)]] += row[i];
    }
    return s;
}

double mean_acf_objective(const ClusterSeries& s) {
    const int lag = daily_lag(s.interval_seconds);
    double acc = 0.0;
    for (int j = 0; j < s.num_clusters; ++j) {
        const std::vector<double> col = s.column(j);
        try {
            acc += acf(col, lag);
        } catch (const ZeroVariance&) {
            throw ZeroVariance(j);
        }
    }
    return acc / static_cast<double>(s.num_clusters);
}

double mean_acf_objective_coerced(const ClusterSeries& s, int lag) {
    double acc = 0.0;
    for (int j = 0; j < s.num_clusters; ++j) {
        const std::vector<double> col = s.column(j);
        try {
            acc += acf(col, lag);
        } catch (const ZeroVariance&) {
        }
    }
    return acc / static_cast<double>(s.num_clusters);
}

namespace {

double cluster_ratio_sum(const ServiceArea& sa, const std::vector<int>& assignment,
                         int num_clusters, bool coerce) {
    std::vector<double> vs(static_cast<std::size_t>(num_clusters), 0.0);
    std::vector<double> ts(static_cast<std::size_t>(num_clusters), 0.0);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        const int j = assignment[i];
        if (j < 0 || j >= num_clusters) throw UnassignedElement(static_cast<int>(i));
        vs[static_cast<std::size_t>(j)] += sa.serviced[i];
        ts[static_cast<std::size_t>(j)] += sa.total[i];
    }
    double acc = 0.0;
    for (int j = 0; j < num_clusters; ++j) {
        if (ts[static_cast<std::size_t>(j)] <= 0.0) {
            if (!coerce) throw ZeroArea(j);
            continue;
        }
        acc += vs[static_cast<std::size_t>(j)] / ts[static_cast<std::size_t>(j)];
    }
    return acc;
}

}  // namespace

double specificity_objective(const ServiceArea& sa, const std::vector<int>& assignment,
                             int num_clusters) {
    return cluster_ratio_sum(sa, assignment, num_clusters, false) /
           static_cast<double>(num_clusters);
}

double specificity_objective_coerced(const ServiceArea& sa, const std::vector<int>& assignment,
                                     int num_clusters) {
    return cluster_ratio_sum(sa, assignment, num_clusters, true) /
           static_cast<double>(num_clusters);
}

std::pair<double, double> serviced_area_from_geohash(const std::vector<Point>& records,
                                                     const Polygon& element) {
    validate_polygon(element);
    const BoundingBox box = polygon_bbox(element);
    const GeohashIndex lo = geohash_index({box.lon_min, box.lat_min});
    const GeohashIndex hi = geohash_index({box.lon_max, box.lat_max});

    std::vector<std::uint64_t> occupied;
    occupied.reserve(records.size());
    for (const Point& rec : records) {
        if (!box.contains(rec)) continue;
        occupied.push_back(geohash_index(rec).key());
    }
    std::sort(occupied.begin(), occupied.end());
    occupied.erase(std::unique(occupied.begin(), occupied.end()), occupied.end());

    double ts = 0.0, vs = 0.0;
    for (std::uint32_t col = lo.col; col <= hi.col; ++col) {
        for (std::uint32_t row = lo.row; row <= hi.row; ++row) {
            const GeohashIndex idx{col, row};
            if (!point_in_polygon(geohash_cell_center(idx), element)) continue;
            ts += 1.0;
            if (std::binary_search(occupied.begin(), occupied.end(), idx.key())) vs += 1.0;
        }
    }
    return {vs, ts};
}

double mean_daily_demand(std::span<const double> series, std::int64_t interval_seconds) {
    double total = 0.0;
    for (double v : series) total += v;
    const double days =
        static_cast<double>(series.size()) * static_cast<double>(interval_seconds) / 86400.0;
    return days > 0.0 ? total / days : 0.0;
}

MapeResult mape_at_recall(const ClusterSeries& actual, const ClusterSeries& predicted,
                          double min_daily_demand) {
    if (actual.num_intervals != predicted.num_intervals ||
        actual.num_clusters != predicted.num_clusters)
        throw std::invalid_argument("series shapes differ");

    double total_demand = 0.0, retained_demand = 0.0;
    std::vector<char> keep(static_cast<std::size_t>(actual.num_clusters), 0);
    for (int j = 0; j < actual.num_clusters; ++j) {
        const std::vector<double> col = actual.column(j);
        double sum = 0.0;
        for (double v : col) sum += v;
        total_demand += sum;
        if (regiongen::mean_daily_demand(col, actual.interval_seconds) >= min_daily_demand) {
            keep[static_cast<std::size_t>(j)] = 1;
            retained_demand += sum;
        }
    }
    MapeResult res;
    res.clusters_retained = static_cast<int>(std::count(keep.begin(), keep.end(), 1));
    if (res.clusters_retained == 0) throw NothingRetained();
    res.recall = total_demand > 0.0 ? retained_demand / total_demand : 0.0;

    double err = 0.0;
    std::int64_t terms = 0;
    for (int t = 0; t < actual.num_intervals; ++t) {
        for (int j = 0; j < actual.num_clusters; ++j) {
            if (!keep[static_cast<std::size_t>(j)]) continue;
            const double a = actual.at(t, j);
            if (a <= 0.0) continue;  // relative error undefined at zero
            err += std::abs(predicted.at(t, j) - a) / a;
            ++terms;
        }
    }
    res.mape = terms > 0 ? err / static_cast<double>(terms) : 0.0;
    return res;
}

ClusterSeries seasonal_naive_predict(const ClusterSeries& s, int horizon) {
    const int lag = daily_lag(s.interval_seconds);
    if (horizon < 1 || s.num_intervals - horizon < lag) throw HistoryTooShort();

    ClusterSeries out;
    out.num_intervals = horizon;
    out.num_clusters = s.num_clusters;
    out.interval_seconds = s.interval_seconds;
    out.values.assign(static_cast<std::size_t>(horizon) * s.num_clusters, 0.0);
    const int start = s.num_intervals - horizon;
    for (int h = 0; h < horizon; ++h)
        for (int j = 0; j < s.num_clusters; ++j) out.at(h, j) = s.at(start + h - lag, j);
    return out;
}

ClusterSeries tail(const ClusterSeries& s, int horizon) {
    if (horizon < 1 || horizon > s.num_intervals) throw EmptyTimeRange();
    ClusterSeries out;
    out.num_intervals = horizon;
    out.num_clusters = s.num_clusters;
    out.interval_seconds = s.interval_seconds;
    out.values.assign(static_cast<std::size_t>(horizon) * s.num_clusters, 0.0);
    const int start = s.num_intervals - horizon;
    for (int h = 0; h < horizon; ++h)
        for (int j = 0; j < s.num_clusters; ++j) out.at(h, j) = s.at(start + h, j);
    return out;
}

}  // namespace regiongen
