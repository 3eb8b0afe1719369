#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "regiongen/partition.hpp"

namespace regiongen {

struct EmptyInitialSet : std::runtime_error {
    EmptyInitialSet() : std::runtime_error("no feasible initial solution to optimize") {}
};
struct IllegalMove : std::runtime_error {
    IllegalMove() : std::runtime_error("move is not in the movable boundary") {}
};

struct OptimizerConfig {
    double predictability_weight = 0.7;  // w: probability of refining the best-ACF solution
    long long max_epochs = 200000;       // budget of gain evaluations ("epochs")
    std::uint64_t seed = 1;
    /// Once every member's boundary is explored without an acceptance, the
    /// leftover budget restarts from random walks of legal moves off Pareto
    /// members (walk length scales with the instance). Disabling stops the
    /// search at the first move-closed set.
    bool restart_when_closed = true;
};

/// Reassignment of `node` from its cluster to the cluster of a neighbor.
struct BoundaryMove {
    int node = 0;
    int source = 0;
    int target = 0;
};

/// Per-outer-iteration trace row for convergence plots.
struct EpochTrace {
    long long epoch = 0;             // outer iteration index
    char selected = 'a';             // 'a' = best-ACF refined, 's' = best-specificity
    std::size_t pareto_size = 0;
    double best_acf = 0.0;
    double best_specificity = 0.0;
    long long evaluations = 0;       // cumulative gain evaluations
};

struct ParetoSet {
    std::vector<ClusterSolution> solutions;

    const ClusterSolution& best_acf() const;
    const ClusterSolution& best_specificity() const;
};

/// Every cross-cluster edge move that keeps all four constraints: source
/// stays nonempty and connected, target stays within the area cap. Moves
/// are deduplicated per (node, target cluster) and come back sorted.
std::vector<BoundaryMove> movable_boundary(const ProblemInstance& inst,
                                           const ClusterSolution& sol);

struct MoveResult {
    ClusterSolution solution;
    double delta_f1 = 0.0;
    double delta_f2 = 0.0;
};

/// Apply one boundary move; objectives are updated by recomputing just the
/// two touched clusters.
MoveResult apply_move(const ProblemInstance& inst, const ClusterSolution& sol,
                      const BoundaryMove& move);

/// Pareto-driven refinement: pick the best-ACF solution with probability w
/// (otherwise best-specificity), sweep its boundary snapshot, keep every
/// move that pushes a global best tracker, prune dominated solutions, and
/// stop when the budget runs out or neither selectable solution can improve
/// a tracker.
ParetoSet co_optimize(const ProblemInstance& inst,
                      const std::vector<ClusterSolution>& initial_solutions,
                      const OptimizerConfig& cfg, std::vector<EpochTrace>* trace = nullptr);

/// a dominates b under strict Pareto dominance with a 1e-12 tie band.
bool dominates(const ClusterSolution& a, const ClusterSolution& b);

/// Drop dominated members and duplicate assignments, sort by f1 descending.
void prune_pareto(std::vector<ClusterSolution>& solutions);

}  // namespace regiongen
