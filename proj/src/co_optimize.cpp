#include "regiongen/co_optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <unordered_set>

#include "regiongen/rng.hpp"

namespace regiongen {

namespace {

constexpr double kTie = 1e-12;

// Incrementally maintained per-cluster stats for one working solution.
struct MoveEngine {
    const ProblemInstance* inst = nullptr;
    std::vector<int> assignment;
    int m = 0;
    std::vector<std::vector<double>> series;
    std::vector<double> vs, ts, area;
    std::vector<int> size;
    std::vector<double> cluster_acf;
    std::vector<double> cluster_spec;
    double f1 = 0.0;
    double f2 = 0.0;

    static double safe_acf(const std::vector<double>& s, int lag) {
        try {
            return acf(s, lag);
        } catch (const ZeroVariance&) {
            return 0.0;
        }
    }

    void rebuild(const ProblemInstance& instance, const ClusterSolution& sol) {
        inst = &instance;
        assignment = sol.assignment;
        m = sol.num_clusters;
        const int t_total = instance.demand.num_intervals;
        series.assign(static_cast<std::size_t>(m),
                      std::vector<double>(static_cast<std::size_t>(t_total), 0.0));
        vs.assign(static_cast<std::size_t>(m), 0.0);
        ts.assign(static_cast<std::size_t>(m), 0.0);
        area.assign(static_cast<std::size_t>(m), 0.0);
        size.assign(static_cast<std::size_t>(m), 0);
        for (int i = 0; i < instance.n(); ++i) {
            const int j = assignment[static_cast<std::size_t>(i)];
            auto& s = series[static_cast<std::size_t>(j)];
            for (int t = 0; t < t_total; ++t) s[static_cast<std::size_t>(t)] += instance.demand.at(t, i);
            vs[static_cast<std::size_t>(j)] += instance.service.serviced[static_cast<std::size_t>(i)];
            ts[static_cast<std::size_t>(j)] += instance.service.total[static_cast<std::size_t>(i)];
            area[static_cast<std::size_t>(j)] += instance.areas_km2[static_cast<std::size_t>(i)];
            ++size[static_cast<std::size_t>(j)];
        }
        cluster_acf.assign(static_cast<std::size_t>(m), 0.0);
        cluster_spec.assign(static_cast<std::size_t>(m), 0.0);
        f1 = 0.0;
        f2 = 0.0;
        for (int j = 0; j < m; ++j) {
            cluster_acf[static_cast<std::size_t>(j)] =
                safe_acf(series[static_cast<std::size_t>(j)], instance.acf_lag);
            cluster_spec[static_cast<std::size_t>(j)] =
                ts[static_cast<std::size_t>(j)] > 0.0
                    ? vs[static_cast<std::size_t>(j)] / ts[static_cast<std::size_t>(j)]
                    : 0.0;
            f1 += cluster_acf[static_cast<std::size_t>(j)];
            f2 += cluster_spec[static_cast<std::size_t>(j)];
        }
        f1 /= static_cast<double>(m);
        f2 /= static_cast<double>(m);
    }

    bool source_connected_without(int node) const {
        const int cluster = assignment[static_cast<std::size_t>(node)];
        int start = -1, members = 0;
        for (int i = 0; i < inst->n(); ++i) {
            if (assignment[static_cast<std::size_t>(i)] == cluster && i != node) {
                ++members;
                if (start < 0) start = i;
            }
        }
        if (members <= 1) return members == 1;
        std::vector<char> seen(static_cast<std::size_t>(inst->n()), 0);
        std::deque<int> queue{start};
        seen[static_cast<std::size_t>(start)] = 1;
        int reached = 1;
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int v : inst->adjacency[static_cast<std::size_t>(u)]) {
                if (v == node || assignment[static_cast<std::size_t>(v)] != cluster ||
                    seen[static_cast<std::size_t>(v)])
                    continue;
                seen[static_cast<std::size_t>(v)] = 1;
                ++reached;
                queue.push_back(v);
            }
        }
        return reached == members;
    }

    /// Legal under the current assignment: cross-cluster edge move that
    /// keeps the source nonempty and connected and the target under the cap.
    bool legal(const BoundaryMove& mv) const {
        const int src = assignment[static_cast<std::size_t>(mv.node)];
        if (src == mv.target || mv.target < 0 || mv.target >= m) return false;
        if (size[static_cast<std::size_t>(src)] <= 1) return false;
        bool adjacent = false;
        for (int v : inst->adjacency[static_cast<std::size_t>(mv.node)]) {
            if (assignment[static_cast<std::size_t>(v)] == mv.target) {
                adjacent = true;
                break;
            }
        }
        if (!adjacent) return false;
        if (area[static_cast<std::size_t>(mv.target)] +
                inst->areas_km2[static_cast<std::size_t>(mv.node)] >
            inst->max_area_km2)
            return false;
        return source_connected_without(mv.node);
    }

    struct Gain {
        double f1_after = 0.0;
        double f2_after = 0.0;
        double acf_src = 0.0, acf_tgt = 0.0;
        double spec_src = 0.0, spec_tgt = 0.0;
    };

    /// Objectives after moving `node` into `target`, touching only the two
    /// affected clusters. Does not commit.
    Gain evaluate(int node, int target) const {
        const int src = assignment[static_cast<std::size_t>(node)];
        const int t_total = inst->demand.num_intervals;
        std::vector<double> src_series = series[static_cast<std::size_t>(src)];
        std::vector<double> tgt_series = series[static_cast<std::size_t>(target)];
        for (int t = 0; t < t_total; ++t) {
            const double v = inst->demand.at(t, node);
            src_series[static_cast<std::size_t>(t)] -= v;
            tgt_series[static_cast<std::size_t>(t)] += v;
        }
        Gain g;
        g.acf_src = safe_acf(src_series, inst->acf_lag);
        g.acf_tgt = safe_acf(tgt_series, inst->acf_lag);
        const double node_vs = inst->service.serviced[static_cast<std::size_t>(node)];
        const double node_ts = inst->service.total[static_cast<std::size_t>(node)];
        const double src_ts = ts[static_cast<std::size_t>(src)] - node_ts;
        const double tgt_ts = ts[static_cast<std::size_t>(target)] + node_ts;
        g.spec_src = src_ts > 0.0 ? (vs[static_cast<std::size_t>(src)] - node_vs) / src_ts : 0.0;
        g.spec_tgt = tgt_ts > 0.0 ? (vs[static_cast<std::size_t>(target)] + node_vs) / tgt_ts : 0.0;
        g.f1_after = f1 + (g.acf_src + g.acf_tgt - cluster_acf[static_cast<std::size_t>(src)] -
                           cluster_acf[static_cast<std::size_t>(target)]) /
                              static_cast<double>(m);
        g.f2_after = f2 + (g.spec_src + g.spec_tgt - cluster_spec[static_cast<std::size_t>(src)] -
                           cluster_spec[static_cast<std::size_t>(target)]) /
                              static_cast<double>(m);
        return g;
    }

    void commit(int node, int target, const Gain& g) {
        const int src = assignment[static_cast<std::size_t>(node)];
        const int t_total = inst->demand.num_intervals;
        auto& ss = series[static_cast<std::size_t>(src)];
        auto& st = series[static_cast<std::size_t>(target)];
        for (int t = 0; t < t_total; ++t) {
            const double v = inst->demand.at(t, node);
            ss[static_cast<std::size_t>(t)] -= v;
            st[static_cast<std::size_t>(t)] += v;
        }
        const double node_vs = inst->service.serviced[static_cast<std::size_t>(node)];
        const double node_ts = inst->service.total[static_cast<std::size_t>(node)];
        const double node_area = inst->areas_km2[static_cast<std::size_t>(node)];
        vs[static_cast<std::size_t>(src)] -= node_vs;
        vs[static_cast<std::size_t>(target)] += node_vs;
        ts[static_cast<std::size_t>(src)] -= node_ts;
        ts[static_cast<std::size_t>(target)] += node_ts;
        area[static_cast<std::size_t>(src)] -= node_area;
        area[static_cast<std::size_t>(target)] += node_area;
        --size[static_cast<std::size_t>(src)];
        ++size[static_cast<std::size_t>(target)];
        cluster_acf[static_cast<std::size_t>(src)] = g.acf_src;
        cluster_acf[static_cast<std::size_t>(target)] = g.acf_tgt;
        cluster_spec[static_cast<std::size_t>(src)] = g.spec_src;
        cluster_spec[static_cast<std::size_t>(target)] = g.spec_tgt;
        assignment[static_cast<std::size_t>(node)] = target;
        f1 = g.f1_after;
        f2 = g.f2_after;
    }

    ClusterSolution snapshot() const {
        ClusterSolution sol;
        sol.assignment = assignment;
        sol.num_clusters = m;
        sol.mean_acf = f1;
        sol.mean_specificity = f2;
        sol.feasible = true;  // legal moves preserve feasibility
        return sol;
    }
};

}  // namespace

bool dominates(const ClusterSolution& a, const ClusterSolution& b) {
    const bool ge1 = a.mean_acf >= b.mean_acf - kTie;
    const bool ge2 = a.mean_specificity >= b.mean_specificity - kTie;
    const bool gt1 = a.mean_acf > b.mean_acf + kTie;
    const bool gt2 = a.mean_specificity > b.mean_specificity + kTie;
    return ge1 && ge2 && (gt1 || gt2);
}

void prune_pareto(std::vector<ClusterSolution>& solutions) {
    // Deduplicate identical assignments first.
    std::unordered_set<std::uint64_t> seen;
    std::vector<ClusterSolution> unique;
    unique.reserve(solutions.size());
    for (auto& sol : solutions) {
        if (seen.insert(assignment_hash(sol)).second) unique.push_back(std::move(sol));
    }
    std::vector<ClusterSolution> kept;
    kept.reserve(unique.size());
    for (std::size_t i = 0; i < unique.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < unique.size() && !dominated; ++j)
            if (j != i && dominates(unique[j], unique[i])) dominated = true;
        if (!dominated) kept.push_back(std::move(unique[i]));
    }
    std::sort(kept.begin(), kept.end(), [](const ClusterSolution& a, const ClusterSolution& b) {
        if (a.mean_acf != b.mean_acf) return a.mean_acf > b.mean_acf;
        if (a.mean_specificity != b.mean_specificity) return a.mean_specificity > b.mean_specificity;
        return assignment_hash(a) < assignment_hash(b);
    });
    solutions = std::move(kept);
}

const ClusterSolution& ParetoSet::best_acf() const {
    return *std::max_element(solutions.begin(), solutions.end(),
                             [](const ClusterSolution& a, const ClusterSolution& b) {
                                 if (a.mean_acf != b.mean_acf) return a.mean_acf < b.mean_acf;
                                 return a.mean_specificity < b.mean_specificity;
                             });
}

const ClusterSolution& ParetoSet::best_specificity() const {
    return *std::max_element(solutions.begin(), solutions.end(),
                             [](const ClusterSolution& a, const ClusterSolution& b) {
                                 if (a.mean_specificity != b.mean_specificity)
                                     return a.mean_specificity < b.mean_specificity;
                                 return a.mean_acf < b.mean_acf;
                             });
}

std::vector<BoundaryMove> movable_boundary(const ProblemInstance& inst,
                                           const ClusterSolution& sol) {
    MoveEngine engine;
    engine.rebuild(inst, sol);

    std::vector<BoundaryMove> moves;
    for (int u = 0; u < inst.n(); ++u) {
        const int src = sol.assignment[static_cast<std::size_t>(u)];
        std::vector<int> targets;
        for (int v : inst.adjacency[static_cast<std::size_t>(u)]) {
            const int tgt = sol.assignment[static_cast<std::size_t>(v)];
            if (tgt != src && std::find(targets.begin(), targets.end(), tgt) == targets.end())
                targets.push_back(tgt);
        }
        std::sort(targets.begin(), targets.end());
        for (int tgt : targets) {
            const BoundaryMove mv{u, src, tgt};
            if (engine.legal(mv)) moves.push_back(mv);
        }
    }
    return moves;
}

MoveResult apply_move(const ProblemInstance& inst, const ClusterSolution& sol,
                      const BoundaryMove& move) {
    MoveEngine engine;
    engine.rebuild(inst, sol);
    if (!engine.legal(move)) throw IllegalMove();
    const MoveEngine::Gain g = engine.evaluate(move.node, move.target);
    const double df1 = g.f1_after - engine.f1;
    const double df2 = g.f2_after - engine.f2;
    engine.commit(move.node, move.target, g);
    MoveResult res{engine.snapshot(), df1, df2};
    res.solution.violations.clear();
    return res;
}

ParetoSet co_optimize(const ProblemInstance& inst,
                      const std::vector<ClusterSolution>& initial_solutions,
                      const OptimizerConfig& cfg, std::vector<EpochTrace>* trace) {
    std::vector<ClusterSolution> pareto;
    for (const ClusterSolution& sol : initial_solutions)
        if (sol.feasible) pareto.push_back(sol);
    if (pareto.empty()) throw EmptyInitialSet();
    prune_pareto(pareto);

    const double w = cfg.predictability_weight;
    if (w < 0.0 || w > 1.0) throw std::invalid_argument("w outside [0, 1]");

    Rng rng(cfg.seed);
    double best_acf = 0.0;
    double best_spec = 0.0;
    long long eps_left = cfg.max_epochs;
    long long evaluations = 0;
    long long outer = 0;

    // Solutions whose whole boundary was evaluated against an unchanged set
    // without yielding an accepted move, keyed by assignment hash. The
    // selector skips them, so the loop stops exactly when no member admits
    // an improving move; any change to the set clears the memo.
    std::unordered_set<std::uint64_t> exhausted;

    MoveEngine engine;
    auto argbest = [&](bool by_acf) -> const ClusterSolution* {
        const ClusterSolution* best = nullptr;
        for (const ClusterSolution& s : pareto) {
            if (exhausted.count(assignment_hash(s))) continue;
            if (!best ||
                (by_acf ? (s.mean_acf > best->mean_acf)
                        : (s.mean_specificity > best->mean_specificity)))
                best = &s;
        }
        return best;
    };

    ClusterSolution restart_holder;

    // Random walk of legal moves off a Pareto member; false when the
    // reachable neighborhood keeps landing on explored states.
    const int walk_limit = std::clamp(2 * inst.n(), 8, 64);
    auto perturb = [&]() -> bool {
        int dry_runs = 0;
        while (eps_left > 0 && dry_runs < 3) {
            restart_holder = pareto[rng.below(pareto.size())];
            const int kicks = 1 + rng.below_int(walk_limit);
            int stepped = 0;
            for (int k = 0; k < kicks && eps_left > 0; ++k) {
                const std::vector<BoundaryMove> moves = movable_boundary(inst, restart_holder);
                if (moves.empty()) break;
                // Prefer steps into states not yet swept so the walk drifts
                // toward unexplored territory.
                std::vector<int> fresh;
                for (std::size_t i = 0; i < moves.size(); ++i) {
                    ClusterSolution probe = restart_holder;
                    probe.assignment[static_cast<std::size_t>(moves[i].node)] = moves[i].target;
                    if (!exhausted.count(assignment_hash(probe)))
                        fresh.push_back(static_cast<int>(i));
                }
                const BoundaryMove mv =
                    fresh.empty() ? moves[rng.below(moves.size())]
                                  : moves[static_cast<std::size_t>(
                                        fresh[rng.below(fresh.size())])];
                engine.rebuild(inst, restart_holder);
                const MoveEngine::Gain g = engine.evaluate(mv.node, mv.target);
                --eps_left;
                ++evaluations;
                restart_holder.assignment[static_cast<std::size_t>(mv.node)] = mv.target;
                restart_holder.mean_acf = g.f1_after;
                restart_holder.mean_specificity = g.f2_after;
                ++stepped;
                if (!fresh.empty() && rng.uniform() < 0.5) break;  // fresh state found, sweep it
            }
            if (stepped == 0) {
                ++dry_runs;
                continue;
            }
            if (!exhausted.count(assignment_hash(restart_holder))) return true;
        }
        return false;
    };

    while (eps_left > 0) {
        const bool refine_acf = rng.uniform() < w;
        const ClusterSolution* pick = argbest(refine_acf);
        if (!pick) {
            // Every member is a local optimum; restart from a perturbation
            // instead of stopping with unspent budget.
            if (!cfg.restart_when_closed || !perturb()) break;
            pick = &restart_holder;
        }
        const ClusterSolution& selected = *pick;
        const std::uint64_t selected_hash = assignment_hash(selected);

        engine.rebuild(inst, selected);
        const std::vector<BoundaryMove> boundary = movable_boundary(inst, selected);

        // Every candidate is the selected solution plus one move, as in the
        // listing. A candidate is kept when it is new and no current member
        // dominates it; the best-value trackers are bookkeeping for the
        // trace, not an acceptance gate (gating on them can strand
        // dominated members whose dominators are never revisited).
        std::unordered_set<std::uint64_t> member_hashes;
        for (const ClusterSolution& y : pareto) member_hashes.insert(assignment_hash(y));

        bool improved = false;
        for (const BoundaryMove& mv : boundary) {
            if (eps_left <= 0) break;
            const MoveEngine::Gain g = engine.evaluate(mv.node, mv.target);
            --eps_left;
            ++evaluations;
            ClusterSolution candidate;
            candidate.num_clusters = engine.m;
            candidate.mean_acf = g.f1_after;
            candidate.mean_specificity = g.f2_after;
            bool dominated = false;
            for (const ClusterSolution& y : pareto) {
                if (dominates(y, candidate)) {
                    dominated = true;
                    break;
                }
            }
            if (dominated) continue;
            candidate.assignment = engine.assignment;
            candidate.assignment[static_cast<std::size_t>(mv.node)] = mv.target;
            candidate.feasible = true;  // legal moves preserve feasibility
            if (!member_hashes.insert(assignment_hash(candidate)).second) continue;
            if (g.f1_after > best_acf) best_acf = g.f1_after;
            if (g.f2_after > best_spec) best_spec = g.f2_after;
            pareto.push_back(std::move(candidate));
            improved = true;
        }

        prune_pareto(pareto);
        ++outer;
        if (trace)
            trace->push_back({outer, refine_acf ? 'a' : 's', pareto.size(), best_acf, best_spec,
                              evaluations});

        if (improved) {
            exhausted.clear();
        } else if (eps_left > 0) {
            // Fully evaluated with no acceptance; skip until the set changes.
            exhausted.insert(selected_hash);
        }
    }

    ParetoSet out;
    out.solutions = std::move(pareto);
    return out;
}

}  // namespace regiongen
