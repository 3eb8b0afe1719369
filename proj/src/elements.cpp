#include "regiongen/elements.hpp"

#include <algorithm>
#include <sstream>

#include "regiongen/timeseries.hpp"

namespace regiongen {

void AggregatableGraph::rebuild_adjacency() {
    adjacency.assign(static_cast<std::size_t>(num_elements), {});
    for (const auto& [u, v] : edges) {
        adjacency[static_cast<std::size_t>(u)].push_back(v);
        adjacency[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& nbrs : adjacency) std::sort(nbrs.begin(), nbrs.end());
}

FilterResult filter_elements(const std::vector<AtomicElement>& elements, double alpha,
                             std::int64_t interval_seconds) {
    if (alpha < 0.0) throw std::invalid_argument("alpha must be nonnegative");
    FilterResult res;
    double total = 0.0, retained = 0.0;
    for (const AtomicElement& e : elements) {
        double sum = 0.0;
        for (double v : e.series) sum += v;
        total += sum;
        if (mean_daily_demand(e.series, interval_seconds) >= alpha) {
            res.retained.push_back(e);
            retained += sum;
        } else {
            ++res.dropped;
        }
    }
    if (res.retained.empty()) throw AllFiltered();
    res.recall = total > 0.0 ? retained / total : 1.0;
    return res;
}

std::vector<char> mark_standalone(const std::vector<AtomicElement>& elements,
                                  double max_area_km2, double acf_threshold) {
    if (max_area_km2 <= 0.0 || acf_threshold <= 0.0)
        throw std::invalid_argument("standalone thresholds must be positive");
    std::vector<char> out(elements.size(), 0);
    for (std::size_t i = 0; i < elements.size(); ++i) {
        const AtomicElement& e = elements[i];
        const bool oversize = e.area_km2 > max_area_km2;
        const bool predictable = e.acf_daily.has_value() && *e.acf_daily > acf_threshold;
        out[i] = (oversize || predictable) ? 1 : 0;
    }
    return out;
}

AggregatableGraph build_edges(const std::vector<AtomicElement>& elements,
                              const std::vector<char>& standalone, double tau_m,
                              const std::vector<Polygon>& obstacles) {
    if (tau_m <= 0.0 && tau_m != 0.0) throw std::invalid_argument("tau must be nonnegative");
    AggregatableGraph g;
    g.num_elements = static_cast<int>(elements.size());
    g.standalone = standalone;

    std::vector<BoundingBox> boxes;
    boxes.reserve(elements.size());
    for (const AtomicElement& e : elements) boxes.push_back(polygon_bbox(e.polygon));

    for (std::size_t u = 0; u < elements.size(); ++u) {
        if (standalone[u]) continue;
        for (std::size_t v = u + 1; v < elements.size(); ++v) {
            if (standalone[v]) continue;
            if (bbox_distance_m(boxes[u], boxes[v]) >= tau_m) continue;
            if (min_distance_m(elements[u].polygon, elements[v].polygon) >= tau_m) continue;
            if (segment_crosses(elements[u].polygon, elements[v].polygon, obstacles)) continue;
            g.edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
        }
    }
    g.rebuild_adjacency();
    return g;
}

std::string graph_to_text(const AggregatableGraph& g) {
    std::ostringstream os;
    os << "standalone:";
    for (int i = 0; i < g.num_elements; ++i)
        if (g.standalone[static_cast<std::size_t>(i)]) os << ' ' << i;
    os << '\n';
    for (const auto& [u, v] : g.edges) os << u << ' ' << v << '\n';
    return os.str();
}

}  // namespace regiongen
