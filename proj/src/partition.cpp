#include "regiongen/partition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "regiongen/rng.hpp"

namespace regiongen {

namespace {

std::vector<int> component_ids(const std::vector<std::vector<int>>& adjacency) {
    const int n = static_cast<int>(adjacency.size());
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    int next = 0;
    std::deque<int> queue;
    for (int s = 0; s < n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        comp[static_cast<std::size_t>(s)] = next;
        queue.push_back(s);
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v : adjacency[static_cast<std::size_t>(u)]) {
                if (comp[static_cast<std::size_t>(v)] < 0) {
                    comp[static_cast<std::size_t>(v)] = next;
                    queue.push_back(v);
                }
            }
        }
        ++next;
    }
    return comp;
}

// Is cluster `c` still connected if `skip` is removed? Members given by the
// assignment; BFS from any remaining member restricted to the cluster.
bool connected_without(const std::vector<std::vector<int>>& adjacency,
                       const std::vector<int>& assignment, int cluster, int skip,
                       std::vector<int>& scratch_seen, int& stamp) {
    ++stamp;
    int start = -1, members = 0;
    for (int i = 0; i < static_cast<int>(assignment.size()); ++i) {
        if (assignment[static_cast<std::size_t>(i)] == cluster && i != skip) {
            ++members;
            if (start < 0) start = i;
        }
    }
    if (members <= 1) return true;
    std::deque<int> queue{start};
    scratch_seen[static_cast<std::size_t>(start)] = stamp;
    int reached = 1;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (int v : adjacency[static_cast<std::size_t>(u)]) {
            if (v == skip || assignment[static_cast<std::size_t>(v)] != cluster) continue;
            if (scratch_seen[static_cast<std::size_t>(v)] == stamp) continue;
            scratch_seen[static_cast<std::size_t>(v)] = stamp;
            ++reached;
            queue.push_back(v);
        }
    }
    return reached == members;
}

}  // namespace

int count_components(const std::vector<std::vector<int>>& adjacency) {
    if (adjacency.empty()) return 0;
    const std::vector<int> comp = component_ids(adjacency);
    return *std::max_element(comp.begin(), comp.end()) + 1;
}

FeasibilityReport check_feasible(const std::vector<int>& assignment, int num_clusters,
                                 const std::vector<std::vector<int>>& adjacency,
                                 const std::vector<double>& areas_km2, double max_area_km2) {
    FeasibilityReport report;
    const int n = static_cast<int>(assignment.size());
    std::vector<int> sizes(static_cast<std::size_t>(num_clusters), 0);
    std::vector<double> areas(static_cast<std::size_t>(num_clusters), 0.0);

    for (int i = 0; i < n; ++i) {
        const int j = assignment[static_cast<std::size_t>(i)];
        if (j < 0 || j >= num_clusters) {
            report.violations.push_back("element " + std::to_string(i) + " unassigned");
            continue;
        }
        ++sizes[static_cast<std::size_t>(j)];
        areas[static_cast<std::size_t>(j)] += areas_km2[static_cast<std::size_t>(i)];
    }
    for (int j = 0; j < num_clusters; ++j) {
        if (sizes[static_cast<std::size_t>(j)] == 0)
            report.violations.push_back("cluster " + std::to_string(j) + " empty");
        if (areas[static_cast<std::size_t>(j)] > max_area_km2)
            report.violations.push_back("cluster " + std::to_string(j) + " area " +
                                        std::to_string(areas[static_cast<std::size_t>(j)]) +
                                        " exceeds " + std::to_string(max_area_km2));
    }

    // Connectivity by BFS inside each cluster.
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> start(static_cast<std::size_t>(num_clusters), -1);
    for (int i = n - 1; i >= 0; --i) {
        const int j = assignment[static_cast<std::size_t>(i)];
        if (j >= 0 && j < num_clusters) start[static_cast<std::size_t>(j)] = i;
    }
    for (int j = 0; j < num_clusters; ++j) {
        if (sizes[static_cast<std::size_t>(j)] <= 1 || start[static_cast<std::size_t>(j)] < 0)
            continue;
        std::deque<int> queue{start[static_cast<std::size_t>(j)]};
        seen[static_cast<std::size_t>(start[static_cast<std::size_t>(j)])] = j + 1;
        int reached = 1;
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v : adjacency[static_cast<std::size_t>(u)]) {
                if (assignment[static_cast<std::size_t>(v)] != j ||
                    seen[static_cast<std::size_t>(v)] == j + 1)
                    continue;
                seen[static_cast<std::size_t>(v)] = j + 1;
                ++reached;
                queue.push_back(v);
            }
        }
        if (reached != sizes[static_cast<std::size_t>(j)])
            report.violations.push_back("cluster " + std::to_string(j) + " disconnected");
    }
    report.ok = report.violations.empty();
    return report;
}

void evaluate_solution(const ProblemInstance& inst, ClusterSolution& sol) {
    const ClusterSeries s = aggregate(inst.demand, sol.assignment, sol.num_clusters);
    sol.mean_acf = mean_acf_objective_coerced(s, inst.acf_lag);
    sol.mean_specificity =
        specificity_objective_coerced(inst.service, sol.assignment, sol.num_clusters);
    FeasibilityReport rep = check_feasible(sol.assignment, sol.num_clusters, inst.adjacency,
                                           inst.areas_km2, inst.max_area_km2);
    sol.feasible = rep.ok;
    sol.violations = std::move(rep.violations);
}

std::uint64_t assignment_hash(const ClusterSolution& sol) {
    // Canonical relabeling (clusters numbered by first appearance) so two
    // encodings of the same partition hash identically.
    std::vector<int> relabel(static_cast<std::size_t>(sol.num_clusters), -1);
    int next = 0;
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(sol.num_clusters));
    for (int a : sol.assignment) {
        int& slot = relabel[static_cast<std::size_t>(a)];
        if (slot < 0) slot = next++;
        mix(static_cast<std::uint64_t>(slot) + 0x9e3779b9ull);
    }
    return h;
}

// ---------------------------------------------------------------------------
// D-Balance: multilevel balanced partitioning.
// ---------------------------------------------------------------------------

namespace {

struct Level {
    // Adjacency with parallel-edge multiplicities accumulated as weights.
    std::vector<std::vector<std::pair<int, double>>> adj;
    std::vector<double> node_weight;
    std::vector<int> fine_to_coarse;  // size of the finer level
    int n() const { return static_cast<int>(adj.size()); }
};

Level make_base_level(const ProblemInstance& inst) {
    Level base;
    const int n = inst.n();
    base.adj.resize(static_cast<std::size_t>(n));
    base.node_weight.resize(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
        base.node_weight[static_cast<std::size_t>(u)] =
            inst.weights[static_cast<std::size_t>(u)] > 0.0
                ? inst.weights[static_cast<std::size_t>(u)]
                : 1.0;  // epsilon weight so zero-demand nodes still balance
        for (int v : inst.adjacency[static_cast<std::size_t>(u)])
            base.adj[static_cast<std::size_t>(u)].push_back({v, 1.0});
    }
    return base;
}

Level coarsen(const Level& fine, Rng& rng) {
    const int n = fine.n();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);

    std::vector<int> match(static_cast<std::size_t>(n), -1);
    for (int u : order) {
        if (match[static_cast<std::size_t>(u)] >= 0) continue;
        int best = -1;
        double best_w = -1.0;
        double best_node_w = std::numeric_limits<double>::infinity();
        for (const auto& [v, w] : fine.adj[static_cast<std::size_t>(u)]) {
            if (match[static_cast<std::size_t>(v)] >= 0) continue;
            const double vw = fine.node_weight[static_cast<std::size_t>(v)];
            if (w > best_w || (w == best_w && vw < best_node_w)) {
                best = v;
                best_w = w;
                best_node_w = vw;
            }
        }
        match[static_cast<std::size_t>(u)] = best >= 0 ? best : u;
        if (best >= 0) match[static_cast<std::size_t>(best)] = u;
    }

    Level coarse;
    coarse.fine_to_coarse.assign(static_cast<std::size_t>(n), -1);
    int next = 0;
    for (int u = 0; u < n; ++u) {
        if (coarse.fine_to_coarse[static_cast<std::size_t>(u)] >= 0) continue;
        const int m = match[static_cast<std::size_t>(u)];
        coarse.fine_to_coarse[static_cast<std::size_t>(u)] = next;
        coarse.fine_to_coarse[static_cast<std::size_t>(m)] = next;
        ++next;
    }
    coarse.adj.resize(static_cast<std::size_t>(next));
    coarse.node_weight.assign(static_cast<std::size_t>(next), 0.0);
    for (int u = 0; u < n; ++u)
        coarse.node_weight[static_cast<std::size_t>(
            coarse.fine_to_coarse[static_cast<std::size_t>(u)])] +=
            fine.node_weight[static_cast<std::size_t>(u)];

    // Accumulate coarse edge weights; neighbor lists are short, linear scan.
    for (int u = 0; u < n; ++u) {
        const int cu = coarse.fine_to_coarse[static_cast<std::size_t>(u)];
        for (const auto& [v, w] : fine.adj[static_cast<std::size_t>(u)]) {
            const int cv = coarse.fine_to_coarse[static_cast<std::size_t>(v)];
            if (cu == cv) continue;
            auto& nbrs = coarse.adj[static_cast<std::size_t>(cu)];
            bool found = false;
            for (auto& entry : nbrs) {
                if (entry.first == cv) {
                    entry.second += w;
                    found = true;
                    break;
                }
            }
            if (!found) nbrs.push_back({cv, w});
        }
    }
    return coarse;
}

double edge_cut(const Level& level, const std::vector<int>& part) {
    double cut = 0.0;
    for (int u = 0; u < level.n(); ++u)
        for (const auto& [v, w] : level.adj[static_cast<std::size_t>(u)])
            if (part[static_cast<std::size_t>(u)] != part[static_cast<std::size_t>(v)]) cut += w;
    return cut / 2.0;
}

double max_part_weight(const Level& level, const std::vector<int>& part, int m) {
    std::vector<double> w(static_cast<std::size_t>(m), 0.0);
    for (int u = 0; u < level.n(); ++u)
        w[static_cast<std::size_t>(part[static_cast<std::size_t>(u)])] +=
            level.node_weight[static_cast<std::size_t>(u)];
    return *std::max_element(w.begin(), w.end());
}

std::vector<std::vector<int>> plain_adjacency(const Level& level) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(level.n()));
    for (int u = 0; u < level.n(); ++u)
        for (const auto& [v, w] : level.adj[static_cast<std::size_t>(u)])
            adj[static_cast<std::size_t>(u)].push_back(v);
    return adj;
}

bool parts_all_connected(const Level& level, const std::vector<int>& part, int m) {
    const int n = level.n();
    std::vector<int> seen(static_cast<std::size_t>(n), -1);
    std::vector<int> sizes(static_cast<std::size_t>(m), 0);
    std::vector<int> head(static_cast<std::size_t>(m), -1);
    for (int u = 0; u < n; ++u) {
        ++sizes[static_cast<std::size_t>(part[static_cast<std::size_t>(u)])];
        head[static_cast<std::size_t>(part[static_cast<std::size_t>(u)])] = u;
    }
    for (int p = 0; p < m; ++p) {
        if (sizes[static_cast<std::size_t>(p)] == 0) return false;
        std::deque<int> queue{head[static_cast<std::size_t>(p)]};
        seen[static_cast<std::size_t>(head[static_cast<std::size_t>(p)])] = p;
        int reached = 1;
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (const auto& [v, w] : level.adj[static_cast<std::size_t>(u)]) {
                if (part[static_cast<std::size_t>(v)] != p ||
                    seen[static_cast<std::size_t>(v)] == p)
                    continue;
                seen[static_cast<std::size_t>(v)] = p;
                ++reached;
                queue.push_back(v);
            }
        }
        if (reached != sizes[static_cast<std::size_t>(p)]) return false;
    }
    return true;
}

// Exhaustive connected M-partition minimizing (max weight, cut). Only used
// when the coarsest level is tiny; returns false when the state budget runs
// out or nothing connected exists.
bool exhaustive_partition(const Level& level, int m, std::vector<int>& best_part) {
    const int n = level.n();
    if (n > 14 || m > 3) return false;
    std::vector<int> part(static_cast<std::size_t>(n), -1);
    double best_max = std::numeric_limits<double>::infinity();
    double best_cut = std::numeric_limits<double>::infinity();
    bool found = false;
    long long states = 0;

    std::vector<int> stack_part(static_cast<std::size_t>(n), 0);
    auto recurse = [&](auto&& self, int node, int used) -> void {
        if (++states > 4'000'000) return;
        if (node == n) {
            if (used != m) return;
            if (!parts_all_connected(level, stack_part, m)) return;
            const double maxw = max_part_weight(level, stack_part, m);
            const double cut = edge_cut(level, stack_part);
            if (maxw < best_max || (maxw == best_max && cut < best_cut)) {
                best_max = maxw;
                best_cut = cut;
                best_part = stack_part;
                found = true;
            }
            return;
        }
        const int limit = std::min(used + 1, m);
        for (int p = 0; p < limit; ++p) {
            stack_part[static_cast<std::size_t>(node)] = p;
            self(self, node + 1, std::max(used, p + 1));
        }
    };
    recurse(recurse, 0, 0);
    (void)part;
    return found && states <= 4'000'000;
}

// Greedy region growing: seed every component, then repeatedly let the
// lightest unsaturated part absorb a frontier node.
std::vector<int> grow_partition(const Level& level, int m, Rng& rng) {
    const int n = level.n();
    const std::vector<std::vector<int>> adj = plain_adjacency(level);
    const std::vector<int> comp = component_ids(adj);
    const int num_comp = *std::max_element(comp.begin(), comp.end()) + 1;

    std::vector<std::vector<int>> by_comp(static_cast<std::size_t>(num_comp));
    for (int u = 0; u < n; ++u) by_comp[static_cast<std::size_t>(comp[static_cast<std::size_t>(u)])].push_back(u);

    std::vector<int> seeds;
    std::vector<char> is_seed(static_cast<std::size_t>(n), 0);
    for (int c = 0; c < num_comp && static_cast<int>(seeds.size()) < m; ++c) {
        const auto& nodes = by_comp[static_cast<std::size_t>(c)];
        const int pick = nodes[static_cast<std::size_t>(rng.below_int(static_cast<int>(nodes.size())))];
        seeds.push_back(pick);
        is_seed[static_cast<std::size_t>(pick)] = 1;
    }
    while (static_cast<int>(seeds.size()) < m) {
        const int pick = rng.below_int(n);
        if (is_seed[static_cast<std::size_t>(pick)]) continue;
        seeds.push_back(pick);
        is_seed[static_cast<std::size_t>(pick)] = 1;
    }

    std::vector<int> part(static_cast<std::size_t>(n), -1);
    std::vector<double> weight(static_cast<std::size_t>(m), 0.0);
    std::vector<std::vector<int>> frontier(static_cast<std::size_t>(m));
    for (int p = 0; p < m; ++p) {
        const int s = seeds[static_cast<std::size_t>(p)];
        part[static_cast<std::size_t>(s)] = p;
        weight[static_cast<std::size_t>(p)] += level.node_weight[static_cast<std::size_t>(s)];
        for (int v : adj[static_cast<std::size_t>(s)]) frontier[static_cast<std::size_t>(p)].push_back(v);
    }

    int assigned = m;
    std::vector<char> saturated(static_cast<std::size_t>(m), 0);
    while (assigned < n) {
        int best_p = -1;
        double best_w = std::numeric_limits<double>::infinity();
        for (int p = 0; p < m; ++p) {
            if (saturated[static_cast<std::size_t>(p)]) continue;
            if (weight[static_cast<std::size_t>(p)] < best_w) {
                best_w = weight[static_cast<std::size_t>(p)];
                best_p = p;
            }
        }
        if (best_p < 0) break;
        auto& fr = frontier[static_cast<std::size_t>(best_p)];
        int chosen = -1;
        while (!fr.empty()) {
            const int cand = fr.back();
            fr.pop_back();
            if (part[static_cast<std::size_t>(cand)] < 0) {
                chosen = cand;
                break;
            }
        }
        if (chosen < 0) {
            saturated[static_cast<std::size_t>(best_p)] = 1;
            continue;
        }
        part[static_cast<std::size_t>(chosen)] = best_p;
        weight[static_cast<std::size_t>(best_p)] +=
            level.node_weight[static_cast<std::size_t>(chosen)];
        ++assigned;
        for (int v : adj[static_cast<std::size_t>(chosen)])
            if (part[static_cast<std::size_t>(v)] < 0) fr.push_back(v);
    }

    // Anything left belongs to a component whose parts all saturated; glue
    // it to the lightest part that touches it, or the lightest overall.
    for (int u = 0; u < n; ++u) {
        if (part[static_cast<std::size_t>(u)] >= 0) continue;
        int best_p = 0;
        double best_w = std::numeric_limits<double>::infinity();
        for (int v : adj[static_cast<std::size_t>(u)]) {
            const int p = part[static_cast<std::size_t>(v)];
            if (p >= 0 && weight[static_cast<std::size_t>(p)] < best_w) {
                best_w = weight[static_cast<std::size_t>(p)];
                best_p = p;
            }
        }
        if (best_w == std::numeric_limits<double>::infinity()) {
            for (int p = 0; p < m; ++p)
                if (weight[static_cast<std::size_t>(p)] < best_w) {
                    best_w = weight[static_cast<std::size_t>(p)];
                    best_p = p;
                }
        }
        part[static_cast<std::size_t>(u)] = best_p;
        weight[static_cast<std::size_t>(best_p)] += level.node_weight[static_cast<std::size_t>(u)];
    }
    return part;
}

// Boundary refinement: a balance phase moving weight from heavy to light
// parts, then a cut phase that may not worsen the balance target. Moves keep
// the source part connected.
void refine_level(const Level& level, std::vector<int>& part, int m, double imbalance) {
    const int n = level.n();
    const std::vector<std::vector<int>> adj = plain_adjacency(level);
    std::vector<double> weight(static_cast<std::size_t>(m), 0.0);
    std::vector<int> size(static_cast<std::size_t>(m), 0);
    double total = 0.0;
    for (int u = 0; u < n; ++u) {
        const int p = part[static_cast<std::size_t>(u)];
        weight[static_cast<std::size_t>(p)] += level.node_weight[static_cast<std::size_t>(u)];
        ++size[static_cast<std::size_t>(p)];
        total += level.node_weight[static_cast<std::size_t>(u)];
    }
    const double target = (1.0 + imbalance) * total / static_cast<double>(m);

    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    int stamp = 0;

    auto neighbor_parts = [&](int u, std::vector<int>& out) {
        out.clear();
        const int pu = part[static_cast<std::size_t>(u)];
        for (int v : adj[static_cast<std::size_t>(u)]) {
            const int pv = part[static_cast<std::size_t>(v)];
            if (pv != pu && std::find(out.begin(), out.end(), pv) == out.end()) out.push_back(pv);
        }
        std::sort(out.begin(), out.end());
    };

    auto apply = [&](int u, int to) {
        const int from = part[static_cast<std::size_t>(u)];
        part[static_cast<std::size_t>(u)] = to;
        weight[static_cast<std::size_t>(from)] -= level.node_weight[static_cast<std::size_t>(u)];
        weight[static_cast<std::size_t>(to)] += level.node_weight[static_cast<std::size_t>(u)];
        --size[static_cast<std::size_t>(from)];
        ++size[static_cast<std::size_t>(to)];
    };

    std::vector<int> cand;
    // Balance phase.
    for (int pass = 0; pass < 6; ++pass) {
        bool moved = false;
        for (int u = 0; u < n; ++u) {
            const int from = part[static_cast<std::size_t>(u)];
            if (size[static_cast<std::size_t>(from)] <= 1) continue;
            const double wu = level.node_weight[static_cast<std::size_t>(u)];
            neighbor_parts(u, cand);
            int best_to = -1;
            double best_new_max = std::numeric_limits<double>::infinity();
            for (int to : cand) {
                if (weight[static_cast<std::size_t>(to)] + wu >=
                    weight[static_cast<std::size_t>(from)])
                    continue;
                const double new_max = std::max(weight[static_cast<std::size_t>(from)] - wu,
                                                weight[static_cast<std::size_t>(to)] + wu);
                if (new_max < best_new_max) {
                    best_new_max = new_max;
                    best_to = to;
                }
            }
            if (best_to < 0) continue;
            if (!connected_without(adj, part, from, u, seen, stamp)) continue;
            apply(u, best_to);
            moved = true;
        }
        if (!moved) break;
    }

    // Cut phase within the balance envelope.
    const double cap = std::max(target, *std::max_element(weight.begin(), weight.end()));
    for (int pass = 0; pass < 4; ++pass) {
        bool moved = false;
        for (int u = 0; u < n; ++u) {
            const int from = part[static_cast<std::size_t>(u)];
            if (size[static_cast<std::size_t>(from)] <= 1) continue;
            const double wu = level.node_weight[static_cast<std::size_t>(u)];
            // Connectivity weight to each neighbor part.
            double to_from = 0.0;
            cand.clear();
            std::vector<std::pair<int, double>> link;
            for (const auto& [v, w] : level.adj[static_cast<std::size_t>(u)]) {
                const int pv = part[static_cast<std::size_t>(v)];
                if (pv == from) {
                    to_from += w;
                    continue;
                }
                bool hit = false;
                for (auto& entry : link)
                    if (entry.first == pv) {
                        entry.second += w;
                        hit = true;
                        break;
                    }
                if (!hit) link.push_back({pv, w});
            }
            std::sort(link.begin(), link.end());
            int best_to = -1;
            double best_gain = 0.0;
            for (const auto& [to, w] : link) {
                if (weight[static_cast<std::size_t>(to)] + wu > cap) continue;
                const double gain = w - to_from;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_to = to;
                }
            }
            if (best_to < 0) continue;
            if (!connected_without(adj, part, from, u, seen, stamp)) continue;
            apply(u, best_to);
            moved = true;
        }
        if (!moved) break;
    }
}

}  // namespace

ClusterSolution d_balance(const ProblemInstance& inst, int num_clusters, double imbalance,
                          std::uint64_t seed) {
    const int n = inst.n();
    if (num_clusters < 1 || num_clusters > n)
        throw InfeasibleM("M=" + std::to_string(num_clusters) + " outside [1, " +
                          std::to_string(n) + "]");
    const int components = count_components(inst.adjacency);
    if (components > num_clusters)
        throw InfeasibleM("graph has " + std::to_string(components) +
                          " components, more than M=" + std::to_string(num_clusters));

    ClusterSolution sol;
    sol.num_clusters = num_clusters;
    if (num_clusters == n) {
        sol.assignment.resize(static_cast<std::size_t>(n));
        std::iota(sol.assignment.begin(), sol.assignment.end(), 0);
        evaluate_solution(inst, sol);
        return sol;
    }

    Rng rng(seed);
    std::vector<Level> levels;
    levels.push_back(make_base_level(inst));
    const int coarse_floor = std::max(4 * num_clusters, 24);
    while (levels.back().n() > coarse_floor) {
        Level next = coarsen(levels.back(), rng);
        if (next.n() >= levels.back().n() * 0.95) break;  // matching stalled
        levels.push_back(std::move(next));
    }

    // Initial partition on the coarsest level.
    const Level& coarsest = levels.back();
    std::vector<int> part;
    if (!exhaustive_partition(coarsest, num_clusters, part)) {
        const int trials = coarsest.n() <= 64 ? 24 : 8;
        double best_max = std::numeric_limits<double>::infinity();
        double best_cut = std::numeric_limits<double>::infinity();
        for (int t = 0; t < trials; ++t) {
            std::vector<int> trial = grow_partition(coarsest, num_clusters, rng);
            refine_level(coarsest, trial, num_clusters, imbalance);
            const double maxw = max_part_weight(coarsest, trial, num_clusters);
            const double cut = edge_cut(coarsest, trial);
            if (maxw < best_max || (maxw == best_max && cut < best_cut)) {
                best_max = maxw;
                best_cut = cut;
                part = std::move(trial);
            }
        }
    }

    // Uncoarsen with boundary refinement at every level.
    for (int li = static_cast<int>(levels.size()) - 1; li > 0; --li) {
        const Level& coarse = levels[static_cast<std::size_t>(li)];
        const Level& fine = levels[static_cast<std::size_t>(li - 1)];
        std::vector<int> fine_part(static_cast<std::size_t>(fine.n()));
        for (int u = 0; u < fine.n(); ++u)
            fine_part[static_cast<std::size_t>(u)] =
                part[static_cast<std::size_t>(coarse.fine_to_coarse[static_cast<std::size_t>(u)])];
        refine_level(fine, fine_part, num_clusters, imbalance);
        part = std::move(fine_part);
    }
    if (levels.size() == 1) refine_level(levels[0], part, num_clusters, imbalance);

    sol.assignment = std::move(part);
    repair_connectivity(inst, sol);
    repair_area(inst, sol);
    evaluate_solution(inst, sol);
    return sol;
}

ScaleEstimate estimate_cluster_scale(const ProblemInstance& inst,
                                     const std::function<ClusterSolution(int)>& fast_solver) {
    double total_area = 0.0;
    for (double a : inst.areas_km2) total_area += a;
    if (total_area <= 0.0) throw std::invalid_argument("total area must be positive");

    const int n = inst.n();
    const int lower = static_cast<int>(std::ceil(total_area / inst.max_area_km2));
    for (int m = lower + 1; m < n; ++m) {
        ClusterSolution sol;
        try {
            sol = fast_solver(m);
        } catch (const InfeasibleM&) {
            continue;
        }
        if (sol.feasible) return {m, false};
    }
    return {n, true};
}

// ---------------------------------------------------------------------------
// Greedy growth.
// ---------------------------------------------------------------------------

namespace {

// Incremental per-cluster stats shared by greedy growth.
struct GrowState {
    int num_clusters = 0;
    std::vector<int> assignment;
    std::vector<std::vector<double>> series;  // per cluster, length T
    std::vector<double> vs, ts, area;
    std::vector<int> size;
    std::vector<double> cluster_acf;   // coerced to 0 on flat series
    std::vector<double> cluster_spec;  // coerced to 0 on zero area

    static double safe_acf(const std::vector<double>& s, int lag) {
        try {
            return acf(s, lag);
        } catch (const ZeroVariance&) {
            return 0.0;
        }
    }

    void init(const ProblemInstance& inst, int m) {
        num_clusters = m;
        assignment.assign(static_cast<std::size_t>(inst.n()), -1);
        series.assign(static_cast<std::size_t>(m),
                      std::vector<double>(static_cast<std::size_t>(inst.demand.num_intervals), 0.0));
        vs.assign(static_cast<std::size_t>(m), 0.0);
        ts.assign(static_cast<std::size_t>(m), 0.0);
        area.assign(static_cast<std::size_t>(m), 0.0);
        size.assign(static_cast<std::size_t>(m), 0);
        cluster_acf.assign(static_cast<std::size_t>(m), 0.0);
        cluster_spec.assign(static_cast<std::size_t>(m), 0.0);
    }

    void add(const ProblemInstance& inst, int node, int cluster) {
        assignment[static_cast<std::size_t>(node)] = cluster;
        auto& s = series[static_cast<std::size_t>(cluster)];
        for (int t = 0; t < inst.demand.num_intervals; ++t)
            s[static_cast<std::size_t>(t)] += inst.demand.at(t, node);
        vs[static_cast<std::size_t>(cluster)] += inst.service.serviced[static_cast<std::size_t>(node)];
        ts[static_cast<std::size_t>(cluster)] += inst.service.total[static_cast<std::size_t>(node)];
        area[static_cast<std::size_t>(cluster)] += inst.areas_km2[static_cast<std::size_t>(node)];
        ++size[static_cast<std::size_t>(cluster)];
        cluster_acf[static_cast<std::size_t>(cluster)] = safe_acf(s, inst.acf_lag);
        cluster_spec[static_cast<std::size_t>(cluster)] =
            ts[static_cast<std::size_t>(cluster)] > 0.0
                ? vs[static_cast<std::size_t>(cluster)] / ts[static_cast<std::size_t>(cluster)]
                : 0.0;
    }
};

std::vector<int> spread_seeds(const std::vector<std::vector<int>>& adjacency, int m, Rng& rng) {
    const int n = static_cast<int>(adjacency.size());
    const std::vector<int> comp = component_ids(adjacency);
    const int num_comp = *std::max_element(comp.begin(), comp.end()) + 1;
    std::vector<std::vector<int>> by_comp(static_cast<std::size_t>(num_comp));
    for (int u = 0; u < n; ++u) by_comp[static_cast<std::size_t>(comp[static_cast<std::size_t>(u)])].push_back(u);

    std::vector<int> seeds;
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    for (int c = 0; c < num_comp && static_cast<int>(seeds.size()) < m; ++c) {
        const auto& nodes = by_comp[static_cast<std::size_t>(c)];
        const int pick = nodes[static_cast<std::size_t>(rng.below_int(static_cast<int>(nodes.size())))];
        seeds.push_back(pick);
        used[static_cast<std::size_t>(pick)] = 1;
    }
    while (static_cast<int>(seeds.size()) < m) {
        const int pick = rng.below_int(n);
        if (used[static_cast<std::size_t>(pick)]) continue;
        seeds.push_back(pick);
        used[static_cast<std::size_t>(pick)] = 1;
    }
    return seeds;
}

}  // namespace

ClusterSolution greedy_grow(const ProblemInstance& inst, int num_clusters, double lambda,
                            std::uint64_t seed) {
    const int n = inst.n();
    if (num_clusters < 1 || num_clusters > n)
        throw InfeasibleM("M=" + std::to_string(num_clusters) + " outside [1, " +
                          std::to_string(n) + "]");
    if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("lambda outside [0, 1]");

    Rng rng(seed);
    GrowState state;
    state.init(inst, num_clusters);
    const std::vector<int> seeds = spread_seeds(inst.adjacency, num_clusters, rng);
    for (int p = 0; p < num_clusters; ++p) state.add(inst, seeds[static_cast<std::size_t>(p)], p);

    ClusterSolution sol;
    sol.num_clusters = num_clusters;

    // Lazy-invalidated max-heap of candidate appends.
    struct Cand {
        double gain;
        int node;
        int cluster;
        int stamp;
        bool over_area;
        bool operator<(const Cand& o) const {
            if (gain != o.gain) return gain < o.gain;
            if (node != o.node) return node > o.node;
            return cluster > o.cluster;
        }
    };
    std::vector<int> cluster_stamp(static_cast<std::size_t>(num_clusters), 0);
    std::vector<Cand> heap;

    auto gain_of = [&](int node, int cluster) -> std::pair<double, bool> {
        auto& s = state.series[static_cast<std::size_t>(cluster)];
        std::vector<double> merged(s);
        for (int t = 0; t < inst.demand.num_intervals; ++t)
            merged[static_cast<std::size_t>(t)] += inst.demand.at(t, node);
        const double new_acf = GrowState::safe_acf(merged, inst.acf_lag);
        const double new_ts =
            state.ts[static_cast<std::size_t>(cluster)] + inst.service.total[static_cast<std::size_t>(node)];
        const double new_vs = state.vs[static_cast<std::size_t>(cluster)] +
                              inst.service.serviced[static_cast<std::size_t>(node)];
        const double new_spec = new_ts > 0.0 ? new_vs / new_ts : 0.0;
        const double gain =
            lambda * (new_acf - state.cluster_acf[static_cast<std::size_t>(cluster)]) +
            (1.0 - lambda) * (new_spec - state.cluster_spec[static_cast<std::size_t>(cluster)]);
        const bool over = state.area[static_cast<std::size_t>(cluster)] +
                              inst.areas_km2[static_cast<std::size_t>(node)] >
                          inst.max_area_km2;
        return {gain, over};
    };

    auto push_candidates_around = [&](int node) {
        const int cluster = state.assignment[static_cast<std::size_t>(node)];
        for (int v : inst.adjacency[static_cast<std::size_t>(node)]) {
            if (state.assignment[static_cast<std::size_t>(v)] >= 0) continue;
            const auto [gain, over] = gain_of(v, cluster);
            heap.push_back({gain, v, cluster, cluster_stamp[static_cast<std::size_t>(cluster)], over});
            std::push_heap(heap.begin(), heap.end());
        }
    };
    for (int s : seeds) push_candidates_around(s);

    int assigned = num_clusters;
    while (assigned < n) {
        // Two sweeps over the heap: prefer area-respecting appends, fall
        // back to over-area ones so assignment stays total.
        Cand chosen{0.0, -1, -1, 0, false};
        std::vector<Cand> deferred;
        while (!heap.empty()) {
            std::pop_heap(heap.begin(), heap.end());
            Cand top = heap.back();
            heap.pop_back();
            if (state.assignment[static_cast<std::size_t>(top.node)] >= 0) continue;
            if (top.stamp != cluster_stamp[static_cast<std::size_t>(top.cluster)]) {
                const auto [gain, over] = gain_of(top.node, top.cluster);
                heap.push_back({gain, top.node, top.cluster,
                                cluster_stamp[static_cast<std::size_t>(top.cluster)], over});
                std::push_heap(heap.begin(), heap.end());
                continue;
            }
            if (top.over_area) {
                deferred.push_back(top);
                continue;
            }
            chosen = top;
            break;
        }
        if (chosen.node < 0 && !deferred.empty()) {
            chosen = deferred.front();  // best over-area candidate
            deferred.erase(deferred.begin());
        }
        for (const Cand& c : deferred) heap.push_back(c);
        std::make_heap(heap.begin(), heap.end());

        if (chosen.node < 0) break;  // frontier exhausted, leftovers below
        state.add(inst, chosen.node, chosen.cluster);
        ++cluster_stamp[static_cast<std::size_t>(chosen.cluster)];
        ++assigned;
        push_candidates_around(chosen.node);
    }

    // Unreachable leftovers: attach whole components to the cluster with
    // the most spare area so assignment stays total; connectivity gets
    // flagged by the feasibility check.
    std::vector<int> leftovers;
    for (int u = 0; u < n; ++u)
        if (state.assignment[static_cast<std::size_t>(u)] < 0) leftovers.push_back(u);
    if (!leftovers.empty()) {
        for (int u : leftovers) {
            int best = 0;
            double best_spare = -std::numeric_limits<double>::infinity();
            for (int p = 0; p < num_clusters; ++p) {
                const double spare = inst.max_area_km2 - state.area[static_cast<std::size_t>(p)];
                if (spare > best_spare) {
                    best_spare = spare;
                    best = p;
                }
            }
            state.add(inst, u, best);
            sol.violations.push_back("node " + std::to_string(u) + " unreachable from any seed");
        }
    }

    sol.assignment = std::move(state.assignment);
    repair_connectivity(inst, sol);
    repair_area(inst, sol);
    const std::vector<std::string> notes = std::move(sol.violations);
    evaluate_solution(inst, sol);
    sol.violations.insert(sol.violations.begin(), notes.begin(), notes.end());
    if (!notes.empty()) sol.feasible = sol.feasible && false;
    return sol;
}

// ---------------------------------------------------------------------------
// Fluid propagation.
// ---------------------------------------------------------------------------

ClusterSolution fluid_grow(const ProblemInstance& inst, int num_clusters, std::uint64_t seed,
                           int max_sweeps) {
    const int n = inst.n();
    if (num_clusters < 1 || num_clusters > n)
        throw InfeasibleM("M=" + std::to_string(num_clusters) + " outside [1, " +
                          std::to_string(n) + "]");

    Rng rng(seed);
    std::vector<int> comm(static_cast<std::size_t>(n), -1);
    std::vector<int> comm_size(static_cast<std::size_t>(num_clusters), 0);
    const std::vector<int> seeds = spread_seeds(inst.adjacency, num_clusters, rng);
    for (int p = 0; p < num_clusters; ++p) {
        comm[static_cast<std::size_t>(seeds[static_cast<std::size_t>(p)])] = p;
        comm_size[static_cast<std::size_t>(p)] = 1;
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    bool converged = false;
    std::vector<double> score(static_cast<std::size_t>(num_clusters), 0.0);
    std::vector<int> touched;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        rng.shuffle(order);
        bool changed = false;
        for (int u : order) {
            touched.clear();
            for (int v : inst.adjacency[static_cast<std::size_t>(u)]) {
                const int c = comm[static_cast<std::size_t>(v)];
                if (c < 0) continue;
                if (score[static_cast<std::size_t>(c)] == 0.0) touched.push_back(c);
                score[static_cast<std::size_t>(c)] +=
                    1.0 / static_cast<double>(comm_size[static_cast<std::size_t>(c)]);
            }
            if (touched.empty()) continue;
            std::sort(touched.begin(), touched.end());
            const int cur = comm[static_cast<std::size_t>(u)];
            int best = cur;
            double best_score = cur >= 0 && score[static_cast<std::size_t>(cur)] > 0.0
                                    ? score[static_cast<std::size_t>(cur)]
                                    : -1.0;
            for (int c : touched) {
                if (score[static_cast<std::size_t>(c)] > best_score) {
                    best_score = score[static_cast<std::size_t>(c)];
                    best = c;
                }
            }
            for (int c : touched) score[static_cast<std::size_t>(c)] = 0.0;
            if (best == cur) continue;
            // A community may not die out.
            if (cur >= 0 && comm_size[static_cast<std::size_t>(cur)] == 1) continue;
            if (cur >= 0) --comm_size[static_cast<std::size_t>(cur)];
            comm[static_cast<std::size_t>(u)] = best;
            ++comm_size[static_cast<std::size_t>(best)];
            changed = true;
        }
        converged = !changed;
    }

    ClusterSolution sol;
    sol.num_clusters = num_clusters;
    sol.converged = converged;

    std::vector<std::string> notes;
    if (!converged) notes.push_back("propagation hit the sweep cap before stabilizing");
    for (int u = 0; u < n; ++u) {
        if (comm[static_cast<std::size_t>(u)] >= 0) continue;
        // Unreached node (component without a seed): smallest community.
        int best = 0;
        for (int p = 1; p < num_clusters; ++p)
            if (comm_size[static_cast<std::size_t>(p)] < comm_size[static_cast<std::size_t>(best)])
                best = p;
        comm[static_cast<std::size_t>(u)] = best;
        ++comm_size[static_cast<std::size_t>(best)];
        notes.push_back("node " + std::to_string(u) + " unreachable from any seed");
    }

    sol.assignment = std::move(comm);
    repair_connectivity(inst, sol);
    repair_area(inst, sol);
    evaluate_solution(inst, sol);
    sol.violations.insert(sol.violations.begin(), notes.begin(), notes.end());
    return sol;
}

// ---------------------------------------------------------------------------
// Repair passes.
// ---------------------------------------------------------------------------

void repair_connectivity(const ProblemInstance& inst, ClusterSolution& sol) {
    const int n = inst.n();
    const int m = sol.num_clusters;
    std::vector<double> cluster_area(static_cast<std::size_t>(m), 0.0);
    for (int u = 0; u < n; ++u)
        cluster_area[static_cast<std::size_t>(sol.assignment[static_cast<std::size_t>(u)])] +=
            inst.areas_km2[static_cast<std::size_t>(u)];

    const std::vector<double> weights = [&] {
        std::vector<double> w(static_cast<std::size_t>(n));
        for (int u = 0; u < n; ++u)
            w[static_cast<std::size_t>(u)] =
                inst.weights[static_cast<std::size_t>(u)] > 0.0
                    ? inst.weights[static_cast<std::size_t>(u)]
                    : 1.0;
        return w;
    }();

    for (int guard = 0; guard < m + 4; ++guard) {
        bool changed = false;
        for (int j = 0; j < m; ++j) {
            // Fragments of cluster j.
            std::vector<int> members;
            for (int u = 0; u < n; ++u)
                if (sol.assignment[static_cast<std::size_t>(u)] == j) members.push_back(u);
            if (members.size() <= 1) continue;

            std::vector<int> frag(static_cast<std::size_t>(n), -1);
            int num_frag = 0;
            for (int s : members) {
                if (frag[static_cast<std::size_t>(s)] >= 0) continue;
                std::deque<int> queue{s};
                frag[static_cast<std::size_t>(s)] = num_frag;
                while (!queue.empty()) {
                    const int u = queue.front();
                    queue.pop_front();
                    for (int v : inst.adjacency[static_cast<std::size_t>(u)]) {
                        if (sol.assignment[static_cast<std::size_t>(v)] != j ||
                            frag[static_cast<std::size_t>(v)] >= 0)
                            continue;
                        frag[static_cast<std::size_t>(v)] = num_frag;
                        queue.push_back(v);
                    }
                }
                ++num_frag;
            }
            if (num_frag <= 1) continue;

            std::vector<double> frag_weight(static_cast<std::size_t>(num_frag), 0.0);
            for (int u : members)
                frag_weight[static_cast<std::size_t>(frag[static_cast<std::size_t>(u)])] +=
                    weights[static_cast<std::size_t>(u)];
            const int keep = static_cast<int>(std::max_element(frag_weight.begin(), frag_weight.end()) -
                                              frag_weight.begin());

            for (int f = 0; f < num_frag; ++f) {
                if (f == keep) continue;
                // Adjacent cluster with the most spare area capacity.
                int best = -1;
                double best_spare = -std::numeric_limits<double>::infinity();
                double frag_area = 0.0;
                for (int u : members) {
                    if (frag[static_cast<std::size_t>(u)] != f) continue;
                    frag_area += inst.areas_km2[static_cast<std::size_t>(u)];
                    for (int v : inst.adjacency[static_cast<std::size_t>(u)]) {
                        const int c = sol.assignment[static_cast<std::size_t>(v)];
                        if (c == j) continue;
                        const double spare =
                            inst.max_area_km2 - cluster_area[static_cast<std::size_t>(c)];
                        if (spare > best_spare || (spare == best_spare && c < best)) {
                            best_spare = spare;
                            best = c;
                        }
                    }
                }
                if (best < 0) continue;  // isolated fragment stays put, flagged later
                for (int u : members) {
                    if (frag[static_cast<std::size_t>(u)] != f) continue;
                    sol.assignment[static_cast<std::size_t>(u)] = best;
                }
                cluster_area[static_cast<std::size_t>(j)] -= frag_area;
                cluster_area[static_cast<std::size_t>(best)] += frag_area;
                changed = true;
            }
        }
        if (!changed) break;
    }
}

void repair_area(const ProblemInstance& inst, ClusterSolution& sol) {
    const int n = inst.n();
    const int m = sol.num_clusters;
    std::vector<double> area(static_cast<std::size_t>(m), 0.0);
    std::vector<int> size(static_cast<std::size_t>(m), 0);
    for (int u = 0; u < n; ++u) {
        const int j = sol.assignment[static_cast<std::size_t>(u)];
        area[static_cast<std::size_t>(j)] += inst.areas_km2[static_cast<std::size_t>(u)];
        ++size[static_cast<std::size_t>(j)];
    }

    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    int stamp = 0;
    for (int pass = 0; pass < 3 * m + 8; ++pass) {
        // Heaviest over-cap cluster first.
        int worst = -1;
        for (int j = 0; j < m; ++j)
            if (area[static_cast<std::size_t>(j)] > inst.max_area_km2 &&
                (worst < 0 || area[static_cast<std::size_t>(j)] > area[static_cast<std::size_t>(worst)]))
                worst = j;
        if (worst < 0) break;

        int best_node = -1, best_to = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int u = 0; u < n; ++u) {
            if (sol.assignment[static_cast<std::size_t>(u)] != worst) continue;
            if (size[static_cast<std::size_t>(worst)] <= 1) break;
            for (int v : inst.adjacency[static_cast<std::size_t>(u)]) {
                const int to = sol.assignment[static_cast<std::size_t>(v)];
                if (to == worst) continue;
                const double new_target =
                    area[static_cast<std::size_t>(to)] + inst.areas_km2[static_cast<std::size_t>(u)];
                if (new_target > inst.max_area_km2) continue;
                const double score = inst.max_area_km2 - new_target;
                if (score > best_score) {
                    if (!connected_without(inst.adjacency, sol.assignment, worst, u, seen, stamp))
                        continue;
                    best_score = score;
                    best_node = u;
                    best_to = to;
                }
            }
        }
        if (best_node < 0) break;  // stuck; flag stays via check_feasible
        area[static_cast<std::size_t>(worst)] -= inst.areas_km2[static_cast<std::size_t>(best_node)];
        area[static_cast<std::size_t>(best_to)] += inst.areas_km2[static_cast<std::size_t>(best_node)];
        --size[static_cast<std::size_t>(worst)];
        ++size[static_cast<std::size_t>(best_to)];
        sol.assignment[static_cast<std::size_t>(best_node)] = best_to;
    }
}

}  // namespace regiongen
