#include "regiongen/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace regiongen {

namespace {

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

bool parse_int_field(const std::string& s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

}  // namespace

std::optional<std::int64_t> parse_rfc3339(const std::string& text) {
    // YYYY-MM-DDTHH:MM:SS[.frac](Z|+HH:MM|-HH:MM)
    if (text.size() < 20) return std::nullopt;
    int y, mo, d, h, mi, s;
    if (!parse_int_field(text, 0, 4, y) || text[4] != '-' || !parse_int_field(text, 5, 2, mo) ||
        text[7] != '-' || !parse_int_field(text, 8, 2, d))
        return std::nullopt;
    if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') return std::nullopt;
    if (!parse_int_field(text, 11, 2, h) || text[13] != ':' || !parse_int_field(text, 14, 2, mi) ||
        text[16] != ':' || !parse_int_field(text, 17, 2, s))
        return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) return std::nullopt;

    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        const std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) return std::nullopt;  // dot with no digits
    }
    if (pos >= text.size()) return std::nullopt;

    std::int64_t offset = 0;
    if (text[pos] == 'Z' || text[pos] == 'z') {
        if (pos + 1 != text.size()) return std::nullopt;
    } else if (text[pos] == '+' || text[pos] == '-') {
        int oh, om;
        if (pos + 6 != text.size() || !parse_int_field(text, pos + 1, 2, oh) ||
            text[pos + 3] != ':' || !parse_int_field(text, pos + 4, 2, om))
            return std::nullopt;
        offset = (static_cast<std::int64_t>(oh) * 60 + om) * 60;
        if (text[pos] == '-') offset = -offset;
    } else {
        return std::nullopt;
    }
    const std::int64_t days = days_from_civil(y, mo, d);
    return days * 86400 + h * 3600 + mi * 60 + s - offset;
}

std::string format_rfc3339(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>((rem % 3600) / 60),
                  static_cast<int>(rem % 60));
    return buf;
}

std::vector<ServiceRecord> parse_records(const std::string& path,
                                         const std::optional<BoundingBox>& bbox,
                                         RecordParseStats* stats) {
    std::ifstream in(path);
    if (!in) throw FileUnreadable(path);

    RecordParseStats local;
    std::vector<ServiceRecord> records;
    std::string line;
    bool first = true;
    bool any_row = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            first = false;
            continue;  // header
        }
        if (line.empty()) continue;
        any_row = true;

        const std::size_t c1 = line.find(',');
        const std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos) {
            ++local.malformed;
            continue;
        }
        const std::string ts_text = line.substr(0, c1);
        const auto ts = parse_rfc3339(ts_text);
        double lat, lon;
        const char* lat_begin = line.data() + c1 + 1;
        const char* lat_end = line.data() + c2;
        const char* lon_begin = line.data() + c2 + 1;
        const char* lon_end = line.data() + line.size();
        const auto lat_res = std::from_chars(lat_begin, lat_end, lat);
        const auto lon_res = std::from_chars(lon_begin, lon_end, lon);
        if (!ts || lat_res.ec != std::errc() || lon_res.ec != std::errc() ||
            lat_res.ptr != lat_end || lon_res.ptr != lon_end ||
            !valid_point({lon, lat})) {
            ++local.malformed;
            continue;
        }
        const Point p{lon, lat};
        if (bbox && !bbox->contains(p)) {
            ++local.out_of_bbox;
            continue;
        }
        records.push_back({*ts, p});
        ++local.parsed;
    }
    if (any_row && records.empty() && local.malformed > 0 && local.out_of_bbox == 0)
        throw AllRowsMalformed();
    if (stats) *stats = local;
    return records;
}

namespace {

using nlohmann::json;

Polygon polygon_from_rings(const json& rings) {
    if (!rings.is_array() || rings.empty()) throw InvalidJson("polygon without rings");
    auto ring_points = [](const json& ring) {
        std::vector<Point> pts;
        for (const auto& coord : ring) {
            if (!coord.is_array() || coord.size() < 2) throw InvalidJson("bad coordinate");
            pts.push_back({coord[0].get<double>(), coord[1].get<double>()});
        }
        return pts;
    };
    std::vector<std::vector<Point>> holes;
    for (std::size_t i = 1; i < rings.size(); ++i) holes.push_back(ring_points(rings[i]));
    return make_polygon(ring_points(rings[0]), std::move(holes), true);
}

}  // namespace

GeometrySet parse_geometry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileUnreadable(path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InvalidJson(e.what());
    }
    if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
        !doc.contains("features"))
        throw InvalidJson("expected a FeatureCollection");

    GeometrySet out;
    for (const auto& feature : doc["features"]) {
        const auto props = feature.value("properties", json::object());
        const std::string kind = props.is_object() ? props.value("kind", "") : "";
        const auto& geom = feature.contains("geometry") ? feature["geometry"] : json();
        if (!geom.is_object() || kind.empty()) {
            ++out.skipped_features;
            continue;
        }
        const std::string type = geom.value("type", "");
        try {
            if (kind == "road" && type == "LineString") {
                Polyline line;
                for (const auto& coord : geom["coordinates"])
                    line.push_back({coord[0].get<double>(), coord[1].get<double>()});
                if (line.size() >= 2) out.roads.push_back(std::move(line));
            } else if (kind == "road" && type == "MultiLineString") {
                for (const auto& part : geom["coordinates"]) {
                    Polyline line;
                    for (const auto& coord : part)
                        line.push_back({coord[0].get<double>(), coord[1].get<double>()});
                    if (line.size() >= 2) out.roads.push_back(std::move(line));
                }
            } else if (kind == "obstacle" && type == "Polygon") {
                out.obstacles.push_back(polygon_from_rings(geom["coordinates"]));
            } else if (kind == "obstacle" && type == "MultiPolygon") {
                for (const auto& part : geom["coordinates"])
                    out.obstacles.push_back(polygon_from_rings(part));
            } else {
                ++out.skipped_features;
            }
        } catch (const json::exception& e) {
            throw InvalidJson(e.what());
        }
    }
    if (out.roads.empty()) throw NoRoads();
    return out;
}

SpatialIndex::SpatialIndex(const std::vector<Polygon>& polygons) : polygons_(&polygons) {
    if (polygons.empty()) {
        buckets_.resize(1);
        return;
    }
    extent_ = polygon_bbox(polygons.front());
    std::vector<BoundingBox> boxes;
    boxes.reserve(polygons.size());
    for (const Polygon& p : polygons) {
        const BoundingBox b = polygon_bbox(p);
        boxes.push_back(b);
        extent_.expand({b.lon_min, b.lat_min});
        extent_.expand({b.lon_max, b.lat_max});
    }
    const int cells = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(polygons.size()))));
    grid_w_ = 2 * cells;
    grid_h_ = 2 * cells;
    buckets_.assign(static_cast<std::size_t>(grid_w_) * grid_h_, {});

    const double lon_span = std::max(extent_.lon_max - extent_.lon_min, 1e-12);
    const double lat_span = std::max(extent_.lat_max - extent_.lat_min, 1e-12);
    for (std::size_t i = 0; i < polygons.size(); ++i) {
        const BoundingBox& b = boxes[i];
        const int c0 = std::clamp(
            static_cast<int>((b.lon_min - extent_.lon_min) / lon_span * grid_w_), 0, grid_w_ - 1);
        const int c1 = std::clamp(
            static_cast<int>((b.lon_max - extent_.lon_min) / lon_span * grid_w_), 0, grid_w_ - 1);
        const int r0 = std::clamp(
            static_cast<int>((b.lat_min - extent_.lat_min) / lat_span * grid_h_), 0, grid_h_ - 1);
        const int r1 = std::clamp(
            static_cast<int>((b.lat_max - extent_.lat_min) / lat_span * grid_h_), 0, grid_h_ - 1);
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c)
                buckets_[static_cast<std::size_t>(r) * grid_w_ + c].push_back(static_cast<int>(i));
    }
}

int SpatialIndex::locate(const Point& p) const {
    if (polygons_->empty() || !extent_.contains(p)) return -1;
    const double lon_span = std::max(extent_.lon_max - extent_.lon_min, 1e-12);
    const double lat_span = std::max(extent_.lat_max - extent_.lat_min, 1e-12);
    const int c = std::clamp(static_cast<int>((p.lon - extent_.lon_min) / lon_span * grid_w_), 0,
                             grid_w_ - 1);
    const int r = std::clamp(static_cast<int>((p.lat - extent_.lat_min) / lat_span * grid_h_), 0,
                             grid_h_ - 1);
    // Bucket entries are in ascending index order, so the first hit is the
    // lowest element id (boundary tie rule).
    for (int idx : buckets_[static_cast<std::size_t>(r) * grid_w_ + c])
        if (point_in_polygon(p, (*polygons_)[static_cast<std::size_t>(idx)])) return idx;
    return -1;
}

DemandMatrix bin_records(const std::vector<ServiceRecord>& records,
                         const std::vector<Polygon>& element_polygons,
                         std::int64_t interval_seconds, std::int64_t t0, std::int64_t t_end,
                         BinStats* stats) {
    if (t_end <= t0 || interval_seconds <= 0) throw EmptyTimeRange();
    DemandMatrix d;
    d.interval_seconds = interval_seconds;
    d.t0_epoch = t0;
    d.num_elements = static_cast<int>(element_polygons.size());
    d.num_intervals =
        static_cast<int>((t_end - t0 + interval_seconds - 1) / interval_seconds);
    d.values.assign(static_cast<std::size_t>(d.num_intervals) * d.num_elements, 0.0);

    const SpatialIndex index(element_polygons);
    BinStats local;
    for (const ServiceRecord& rec : records) {
        if (rec.timestamp < t0 || rec.timestamp >= t_end) {
            ++local.out_of_time;
            continue;
        }
        const int t = static_cast<int>((rec.timestamp - t0) / interval_seconds);
        const int i = index.locate(rec.location);
        if (i < 0) {
            ++local.unassigned_location;
            continue;
        }
        d.at(t, i) += 1.0;
        ++local.assigned;
    }
    if (stats) *stats = local;
    return d;
}

int PipelineConfig::lag() const { return acf_lag > 0 ? acf_lag : daily_lag(interval_seconds); }

void PipelineConfig::validate() const {
    if (interval_seconds <= 0 || 86400 % interval_seconds != 0)
        throw ConfigError("interval must divide 24 hours");
    if (alpha < 0.0) throw ConfigError("alpha must be nonnegative");
    if (tau_m <= 0.0) throw ConfigError("tau_m must be positive");
    if (max_area_km2 <= 0.0) throw ConfigError("max_area_km2 must be positive");
    if (dilation_kernel < 1 || dilation_kernel % 2 == 0)
        throw ConfigError("dilation_kernel must be odd and positive");
    if (raster_width < 16 || raster_height < 16)
        throw ConfigError("raster resolution below 16 pixels per axis");
    if (predictability_weight < 0.0 || predictability_weight > 1.0)
        throw ConfigError("w outside [0, 1]");
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda outside [0, 1]");
    if (max_epochs < 1) throw ConfigError("max_epochs must be positive");
    if (min_daily_demand < 0.0) throw ConfigError("min_daily_demand must be nonnegative");
    if (standalone_acf_threshold <= 0.0) throw ConfigError("standalone_acf_threshold must be positive");
    if (bbox && (bbox->lon_max <= bbox->lon_min || bbox->lat_max <= bbox->lat_min))
        throw ConfigError("bbox is empty");
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileUnreadable(path);
    PipelineConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto not_space = [](unsigned char c) { return !std::isspace(c); };
        line.erase(line.begin(), std::find_if(line.begin(), line.end(), not_space));
        line.erase(std::find_if(line.rbegin(), line.rend(), not_space).base(), line.end());
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        key.erase(std::find_if(key.rbegin(), key.rend(), not_space).base(), key.end());
        value.erase(value.begin(), std::find_if(value.begin(), value.end(), not_space));

        auto as_double = [&]() {
            try {
                return std::stod(value);
            } catch (...) {
                throw ConfigError(key + ": bad number '" + value + "'");
            }
        };
        auto as_int = [&]() {
            try {
                return std::stoll(value);
            } catch (...) {
                throw ConfigError(key + ": bad integer '" + value + "'");
            }
        };
        if (key == "interval_minutes") cfg.interval_seconds = as_int() * 60;
        else if (key == "alpha") cfg.alpha = as_double();
        else if (key == "tau_m") cfg.tau_m = as_double();
        else if (key == "max_area_km2") cfg.max_area_km2 = as_double();
        else if (key == "dilation_kernel") cfg.dilation_kernel = static_cast<int>(as_int());
        else if (key == "raster_width") cfg.raster_width = static_cast<int>(as_int());
        else if (key == "raster_height") cfg.raster_height = static_cast<int>(as_int());
        else if (key == "w") cfg.predictability_weight = as_double();
        else if (key == "lambda") cfg.lambda = as_double();
        else if (key == "max_epochs") cfg.max_epochs = as_int();
        else if (key == "acf_lag") cfg.acf_lag = static_cast<int>(as_int());
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int());
        else if (key == "min_daily_demand") cfg.min_daily_demand = as_double();
        else if (key == "standalone_acf_threshold") cfg.standalone_acf_threshold = as_double();
        else if (key == "optimizer_restarts") cfg.optimizer_restarts = as_int() != 0;
        else if (key == "bbox") {
            BoundingBox b;
            if (std::sscanf(value.c_str(), "%lf,%lf,%lf,%lf", &b.lon_min, &b.lat_min, &b.lon_max,
                            &b.lat_max) != 4)
                throw ConfigError("bbox: expected lon_min,lat_min,lon_max,lat_max");
            cfg.bbox = b;
        } else {
            throw ConfigError("unknown key '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

}  // namespace regiongen
