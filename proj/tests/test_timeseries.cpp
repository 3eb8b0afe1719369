#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "regiongen/geohash.hpp"
#include "regiongen/timeseries.hpp"
#include "regiongen/rng.hpp"

using namespace regiongen;

TEST_CASE("acf of an exactly periodic integer series is exactly 1") {
    // Integer values with an integer mean keep every sum exact in doubles.
    const std::vector<double> period{3.0, 7.0, 2.0, 8.0, 1.0, 9.0};  // mean 5
    for (int repeats : {2, 5, 9}) {
        std::vector<double> series;
        for (int r = 0; r < repeats; ++r) series.insert(series.end(), period.begin(), period.end());
        CHECK(acf(series, static_cast<int>(period.size())) == 1.0);
    }
}

TEST_CASE("acf of an alternating series at lag 1 is exactly -1") {
    std::vector<double> series;
    for (int t = 0; t < 64; ++t) series.push_back(t % 2 == 0 ? 1.0 : -1.0);
    CHECK(acf(series, 1) == -1.0);
}

TEST_CASE("acf errors") {
    const std::vector<double> constant(50, 3.0);
    CHECK_THROWS_AS(acf(constant, 1), ZeroVariance);
    const std::vector<double> tiny{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(acf(tiny, 3), LagTooLarge);
    CHECK_THROWS_AS(acf(tiny, 0), LagTooLarge);
}

TEST_CASE("acf matches the brute-force oracle to 1e-12 relative") {
    Rng rng(17);
    for (int it = 0; it < 100; ++it) {
        const int t_total = 50 + rng.below_int(400);
        const int lag = 1 + rng.below_int(48);
        std::vector<double> series(static_cast<std::size_t>(t_total));
        for (double& v : series) v = rng.uniform(0.0, 100.0);
        const double mine = acf(series, lag);
        const double ref = oracles::brute_acf(series, lag);
        CHECK(std::abs(mine - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("acf_daily lags") {
    CHECK(daily_lag(3600) == 24);
    CHECK(daily_lag(1800) == 48);
    CHECK_THROWS(daily_lag(7 * 3600));

    // Quantized daily sinusoid: integer 24-periodic, exact 1.
    std::vector<double> series;
    for (int t = 0; t < 720; ++t)
        series.push_back(std::round(100.0 + 50.0 * std::sin(2.0 * M_PI * (t % 24) / 24.0)));
    CHECK(acf_daily(series, 3600) == 1.0);

    // Smooth sinusoid built from a periodic table is 1 to high precision.
    std::vector<double> smooth;
    for (int t = 0; t < 720; ++t)
        smooth.push_back(100.0 + 50.0 * std::sin(2.0 * M_PI * (t % 24) / 24.0));
    CHECK(acf_daily(smooth, 3600) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("acf_daily of iid noise stays small") {
    Rng rng(19);
    std::vector<double> series(720);
    for (double& v : series) v = static_cast<double>(rng.poisson(20.0));
    CHECK(std::abs(acf_daily(series, 3600)) < 0.1);
}

TEST_CASE("aggregate identity, totals, conservation") {
    DemandMatrix d;
    d.num_intervals = 4;
    d.num_elements = 3;
    d.values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};

    const ClusterSeries identity = aggregate(d, {0, 1, 2}, 3);
    CHECK(identity.values == d.values);

    const ClusterSeries total = aggregate(d, {0, 0, 0}, 1);
    for (int t = 0; t < 4; ++t) {
        double row_sum = 0.0;
        for (int i = 0; i < 3; ++i) row_sum += d.at(t, i);
        CHECK(total.at(t, 0) == row_sum);
    }

    const ClusterSeries mixed = aggregate(d, {1, 0, 1}, 2);
    for (int t = 0; t < 4; ++t) {
        double row_sum = 0.0;
        for (int i = 0; i < 3; ++i) row_sum += d.at(t, i);
        CHECK(mixed.at(t, 0) + mixed.at(t, 1) == row_sum);
    }

    CHECK_THROWS_AS(aggregate(d, {0, 1}, 2), UnassignedElement);
    CHECK_THROWS_AS(aggregate(d, {0, 1, 5}, 2), UnassignedElement);
}

TEST_CASE("mean_acf_objective basics") {
    ClusterSeries s;
    s.num_intervals = 48;
    s.num_clusters = 2;
    s.interval_seconds = 3600;
    s.values.assign(48 * 2, 0.0);
    for (int t = 0; t < 48; ++t) {
        s.at(t, 0) = static_cast<double>(5 + (t % 24));  // daily periodic
        s.at(t, 1) = static_cast<double>(3 + ((t + 7) % 24));
    }
    CHECK(mean_acf_objective(s) == doctest::Approx(1.0));

    // Permutation invariance.
    ClusterSeries swapped = s;
    for (int t = 0; t < 48; ++t) {
        swapped.at(t, 0) = s.at(t, 1);
        swapped.at(t, 1) = s.at(t, 0);
    }
    CHECK(mean_acf_objective(swapped) == doctest::Approx(mean_acf_objective(s)).epsilon(1e-12));

    // Flat cluster reports its id; the coerced variant scores it 0.
    ClusterSeries with_flat = s;
    for (int t = 0; t < 48; ++t) with_flat.at(t, 1) = 2.0;
    try {
        mean_acf_objective(with_flat);
        CHECK(false);
    } catch (const ZeroVariance& e) {
        CHECK(e.cluster_id == 1);
    }
    const double coerced = mean_acf_objective_coerced(with_flat, 24);
    CHECK(coerced == doctest::Approx(0.5 * acf(with_flat.column(0), 24)).epsilon(1e-12));
}

TEST_CASE("specificity objective") {
    ServiceArea sa;
    sa.total = {10.0, 10.0};
    sa.serviced = {4.0, 0.0};
    CHECK(specificity_objective(sa, {0, 0}, 1) == doctest::Approx(0.2));

    ServiceArea full;
    full.total = {7.0, 3.0};
    full.serviced = {7.0, 3.0};
    CHECK(specificity_objective(full, {0, 1}, 2) == doctest::Approx(1.0));

    ServiceArea zero;
    zero.total = {0.0};
    zero.serviced = {0.0};
    CHECK_THROWS_AS(specificity_objective(zero, {0}, 1), ZeroArea);
    CHECK(specificity_objective_coerced(zero, {0}, 1) == 0.0);

    // f2 stays within [0, 1].
    Rng rng(23);
    for (int it = 0; it < 20; ++it) {
        ServiceArea r;
        std::vector<int> assign;
        for (int i = 0; i < 6; ++i) {
            const double ts = rng.uniform(1.0, 20.0);
            r.total.push_back(ts);
            r.serviced.push_back(ts * rng.uniform(0.0, 1.0));
            assign.push_back(rng.below_int(2));
        }
        bool both = false;
        for (int i = 0; i < 6 && !both; ++i) both = assign[0] != assign[i];
        if (!both) assign[5] = 1 - assign[0];
        const double f2 = specificity_objective(r, assign, 2);
        CHECK(f2 >= 0.0);
        CHECK(f2 <= 1.0);
    }
}

TEST_CASE("serviced_area_from_geohash counts cells") {
    // Rectangle spanning exactly 10 x 10 geohash cells.
    const GeohashIndex base = geohash_index({116.40, 39.90});
    const double w = geohash_cell_width_deg();
    const double h = geohash_cell_height_deg();
    const double lon0 = -180.0 + base.col * w;
    const double lat0 = -90.0 + base.row * h;
    const Polygon rect = make_polygon({{lon0, lat0},
                                       {lon0 + 10 * w, lat0},
                                       {lon0 + 10 * w, lat0 + 10 * h},
                                       {lon0, lat0 + 10 * h},
                                       {lon0, lat0}});

    auto [vs_empty, ts_empty] = serviced_area_from_geohash({}, rect);
    CHECK(vs_empty == 0.0);
    CHECK(ts_empty == 100.0);

    // Records in 37 distinct cells -> specificity 0.37.
    std::vector<Point> records;
    for (int k = 0; k < 37; ++k) {
        const int col = k % 10, row = k / 10;
        records.push_back(geohash_cell_center({base.col + static_cast<std::uint32_t>(col),
                                               base.row + static_cast<std::uint32_t>(row)}));
    }
    auto [vs, ts] = serviced_area_from_geohash(records, rect);
    CHECK(ts == 100.0);
    CHECK(vs == 37.0);
    CHECK(vs / ts == doctest::Approx(0.37));

    // Saturation: a record in every cell.
    std::vector<Point> everywhere;
    for (int col = 0; col < 10; ++col)
        for (int row = 0; row < 10; ++row)
            everywhere.push_back(geohash_cell_center({base.col + static_cast<std::uint32_t>(col),
                                                      base.row + static_cast<std::uint32_t>(row)}));
    auto [vs_all, ts_all] = serviced_area_from_geohash(everywhere, rect);
    CHECK(vs_all == ts_all);
}

TEST_CASE("mape_at_recall") {
    ClusterSeries actual;
    actual.num_intervals = 48;
    actual.num_clusters = 2;
    actual.interval_seconds = 3600;
    actual.values.assign(48 * 2, 0.0);
    for (int t = 0; t < 48; ++t) {
        actual.at(t, 0) = 10.0 + (t % 5);
        actual.at(t, 1) = 2.0 + (t % 3);
    }

    const MapeResult perfect = mape_at_recall(actual, actual, 1.0);
    CHECK(perfect.mape == 0.0);
    CHECK(perfect.recall == 1.0);

    ClusterSeries scaled = actual;
    for (double& v : scaled.values) v *= 1.1;
    const MapeResult ten = mape_at_recall(actual, scaled, 1.0);
    CHECK(ten.mape == doctest::Approx(0.10).epsilon(1e-9));

    // Drop a nearly-empty cluster: recall falls below 1 and is reported.
    ClusterSeries with_empty = actual;
    for (int t = 0; t < 48; ++t) with_empty.at(t, 1) = t == 0 ? 1.0 : 0.0;
    const MapeResult dropped = mape_at_recall(with_empty, with_empty, 1.0);
    CHECK(dropped.clusters_retained == 1);
    CHECK(dropped.recall < 1.0);
    double total = 0.0, kept = 0.0;
    for (int t = 0; t < 48; ++t) {
        total += with_empty.at(t, 0) + with_empty.at(t, 1);
        kept += with_empty.at(t, 0);
    }
    CHECK(dropped.recall == doctest::Approx(kept / total).epsilon(1e-12));

    ClusterSeries hopeless = actual;
    for (double& v : hopeless.values) v = 0.0;
    CHECK_THROWS_AS(mape_at_recall(hopeless, hopeless, 1.0), NothingRetained);
}

TEST_CASE("seasonal_naive_predict") {
    ClusterSeries s;
    s.num_intervals = 96;
    s.num_clusters = 1;
    s.interval_seconds = 3600;
    s.values.assign(96, 0.0);
    for (int t = 0; t < 96; ++t) s.at(t, 0) = static_cast<double>(4 + (t % 24));

    const ClusterSeries pred = seasonal_naive_predict(s, 24);
    const ClusterSeries act = tail(s, 24);
    CHECK(pred.values == act.values);  // exactly daily-periodic -> zero error

    ClusterSeries constant = s;
    for (double& v : constant.values) v = 5.0;
    const ClusterSeries cp = seasonal_naive_predict(constant, 24);
    CHECK(cp.values == tail(constant, 24).values);

    ClusterSeries tiny;
    tiny.num_intervals = 30;
    tiny.num_clusters = 1;
    tiny.interval_seconds = 3600;
    tiny.values.assign(30, 1.0);
    CHECK_THROWS_AS(seasonal_naive_predict(tiny, 20), HistoryTooShort);
}

TEST_CASE("clusters with higher daily ACF get lower seasonal-naive MAPE") {
    // Poisson clusters with graded daily amplitude: rank correlation between
    // ACF and MAPE across clusters is negative.
    Rng rng(31);
    const int t_total = 720, m = 10;
    ClusterSeries s;
    s.num_intervals = t_total;
    s.num_clusters = m;
    s.interval_seconds = 3600;
    s.values.assign(static_cast<std::size_t>(t_total) * m, 0.0);
    for (int j = 0; j < m; ++j) {
        // Graded data volume at fixed relative amplitude: more data means a
        // cleaner daily signal and smaller relative errors.
        const double base = 4.0 * std::pow(1.8, j);
        for (int t = 0; t < t_total; ++t) {
            const double rate = base * (1.0 + 0.7 * std::sin(2.0 * M_PI * (t % 24) / 24.0));
            s.at(t, j) = static_cast<double>(rng.poisson(std::max(rate, 0.1)));
        }
    }
    std::vector<double> acfs, mapes;
    const ClusterSeries pred = seasonal_naive_predict(s, 72);
    const ClusterSeries act = tail(s, 72);
    for (int j = 0; j < m; ++j) {
        acfs.push_back(acf_daily(s.column(j), 3600));
        double err = 0.0;
        int terms = 0;
        for (int t = 0; t < 72; ++t) {
            if (act.at(t, j) <= 0.0) continue;
            err += std::abs(pred.at(t, j) - act.at(t, j)) / act.at(t, j);
            ++terms;
        }
        mapes.push_back(err / terms);
    }
    CHECK(oracles::spearman(acfs, mapes) < 0.0);
}

TEST_CASE("more data gives higher daily ACF (statistical tendency)") {
    // Poisson with a fixed daily profile scaled by a rate multiplier: mean
    // ACF over elements should be nondecreasing in the multiplier for at
    // least 90% of adjacent pairs across seeds.
    const std::vector<double> multipliers{0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
    int monotone = 0, pairs = 0;
    for (int seed = 0; seed < 30; ++seed) {
        Rng rng(1000 + static_cast<std::uint64_t>(seed));
        std::vector<double> mean_acfs;
        for (double mult : multipliers) {
            double acc = 0.0;
            int count = 0;
            for (int e = 0; e < 8; ++e) {
                std::vector<double> series(240);
                for (int t = 0; t < 240; ++t) {
                    const double rate =
                        mult * (2.0 + 1.5 * std::sin(2.0 * M_PI * (t % 24) / 24.0));
                    series[static_cast<std::size_t>(t)] =
                        static_cast<double>(rng.poisson(std::max(rate, 0.0)));
                }
                try {
                    acc += acf_daily(series, 3600);
                    ++count;
                } catch (const ZeroVariance&) {
                }
            }
            mean_acfs.push_back(count ? acc / count : 0.0);
        }
        for (std::size_t i = 0; i + 1 < mean_acfs.size(); ++i) {
            ++pairs;
            if (mean_acfs[i + 1] >= mean_acfs[i]) ++monotone;
        }
    }
    CHECK(static_cast<double>(monotone) / pairs >= 0.9);
}
