#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "regiongen/timeseries.hpp"

namespace regiongen {

struct InfeasibleM : std::runtime_error {
    explicit InfeasibleM(const std::string& what) : std::runtime_error(what) {}
};

/// The clustering problem over the non-standalone elements, with dense node
/// ids 0..n-1. Demand columns, service cells, areas and balancing weights
/// line up with the adjacency index.
struct ProblemInstance {
    std::vector<std::vector<int>> adjacency;
    DemandMatrix demand;     // T x n
    ServiceArea service;     // per node
    std::vector<double> areas_km2;
    std::vector<double> weights;  // data counts used by the fast solver
    double max_area_km2 = 5.0;
    int acf_lag = 24;

    int n() const { return static_cast<int>(adjacency.size()); }
};

/// Assignment of every node to one of M clusters plus cached objectives.
struct ClusterSolution {
    std::vector<int> assignment;  // node -> cluster in [0, M)
    int num_clusters = 0;
    double mean_acf = 0.0;          // f1
    double mean_specificity = 0.0;  // f2
    bool feasible = false;
    bool converged = true;  // fluid growth may hit its sweep cap
    std::vector<std::string> violations;
};

struct FeasibilityReport {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Verifies total assignment, nonempty clusters, cluster areas <= L, and
/// per-cluster connectivity (breadth-first traversal of each induced
/// subgraph). Returns violations instead of throwing.
FeasibilityReport check_feasible(const std::vector<int>& assignment, int num_clusters,
                                 const std::vector<std::vector<int>>& adjacency,
                                 const std::vector<double>& areas_km2, double max_area_km2);

/// Recompute objectives and the feasibility flag in place.
void evaluate_solution(const ProblemInstance& inst, ClusterSolution& sol);

std::uint64_t assignment_hash(const ClusterSolution& sol);

/// Balanced weighted partition: coarsen by heavy-edge matching, seed the
/// coarsest level (exhaustively when it is tiny, greedy region growing
/// otherwise), refine boundary nodes while uncoarsening, then repair
/// connectivity. Zero weights count as one record so no node is orphaned.
ClusterSolution d_balance(const ProblemInstance& inst, int num_clusters,
                          double imbalance = 0.05, std::uint64_t seed = 1);

struct ScaleEstimate {
    int m_star = 0;
    bool fallback_singletons = false;
};

/// Walk M upward from ceil(total area / L) + 1 until the fast solver yields
/// a solution meeting all four constraints. Falls back to all-singletons
/// when nothing below N works.
ScaleEstimate estimate_cluster_scale(const ProblemInstance& inst,
                                     const std::function<ClusterSolution(int)>& fast_solver);

/// Seeded growth appending the frontier node with the greatest
/// lambda * dACF + (1 - lambda) * dSpecificity gain.
ClusterSolution greedy_grow(const ProblemInstance& inst, int num_clusters,
                            double lambda = 0.7, std::uint64_t seed = 1);

/// Fluid-communities propagation with M seeded communities of density
/// 1/size; sweeps nodes in random order until stable or the sweep cap.
ClusterSolution fluid_grow(const ProblemInstance& inst, int num_clusters,
                           std::uint64_t seed = 1, int max_sweeps = 100);

/// Split disconnected clusters into fragments, keep each cluster's heaviest
/// fragment and hand smaller fragments to the adjacent cluster with the
/// most spare area capacity (ties toward the lowest cluster id).
void repair_connectivity(const ProblemInstance& inst, ClusterSolution& sol);

/// Drain clusters above the area cap by moving boundary nodes (keeping the
/// source connected) into adjacent clusters with room.
void repair_area(const ProblemInstance& inst, ClusterSolution& sol);

int count_components(const std::vector<std::vector<int>>& adjacency);

}  // namespace regiongen
