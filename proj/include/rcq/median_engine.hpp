#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcq/point_access.hpp"
#include "rcq/solvers.hpp"

namespace rcq {

struct EngineConfig {
    double c1_median = 25.0;   // 5*(3+2/p) at swap width 1
    double c1_means = 75.0;    // squared local-search factor plus transfer slack
    double c1_internal = 64.0; // for grids built around sampled bi-criteria centers
    // Second-level cell divisor: r̄ = sceil(eps*R̄/divisor); 0 = the default
    // 40*c1*d. Stored-coreset builds try tighter values gated by spot checks.
    double grid_divisor = 0.0;
    int ls_swap_width = 1;
    double ls_tol = 1e-3;
    uint32_t ls_direct_max = 600;   // above this, pre-compress before local search
    uint32_t exact_solver_max_pts = 14;
    int exact_solver_max_k = 3;
    uint64_t seed = 0x5EED;

    double c1_for(CostKind kind) const { return kind == CostKind::Means ? c1_means : c1_median; }
};

struct ApproxCenters {
    std::vector<Point> centers;
    CostKind kind = CostKind::Median;
    double c1 = 25.0;
};

struct Coreset {
    std::vector<WeightedPoint> members;
    CostKind kind = CostKind::Median;
    int k = 1;
    double eps = 0.0;
    std::string provenance;  // from_centers | canonical | smaller | exact
    double total_weight = 0.0;
};

struct RadiusApprox {
    bool zero = false;      // every backend point coincides with a center
    StdLen alpha{};         // standard-length 2*sqrt(d)-approximation of r* = max d(p,A)
    double sandwich_r = 0;  // alpha / (c1 * total weight): the returned R
};

// Coverage probe: Covered => r* <= 2*alpha*sqrt(d); Uncovered => r* > alpha.
// Decided by exact location counts over deduplicated grid-cluster cells.
bool coverage_probe(const PointAccess& pa, std::span<const Point> centers, StdLen alpha);

// 2*sqrt(d)-approximation machinery for max_p d(p,A): binary search over
// standard-length exponents on the monotone coverage predicate.
RadiusApprox approx_radius(const PointAccess& pa, const ApproxCenters& A);

struct UnifiedGrid {
    double base = 0.0;            // R (median form) or sqrt-form base for means
    int levels = 0;               // M+1
    std::vector<int> rbar_e;      // anchor-cell side exponent per level (capped at root)
    std::vector<int> rsmall_e;    // second-level side exponent per level
    std::vector<Point> centers;   // deduplicated
};

UnifiedGrid build_unified_grid(const PointAccess& pa, const ApproxCenters& A, double eps,
                               CostKind kind, const RadiusApprox& ra, double divisor = 0.0);

// Pruned second-level cell set: pairwise interior-disjoint (cell, node) pairs
// whose slices partition the backend's points; cells not meeting the clip are
// dropped. Each pair carries the grid level it was charged at.
struct SecondLevelCell {
    CellId cell;
    uint32_t node;
};
std::vector<SecondLevelCell> collect_second_level_cells(const PointAccess& pa,
                                                        const UnifiedGrid& grid);

Coreset coreset_from_centers(const PointAccess& pa, const ApproxCenters& A, int k, double eps,
                             CostKind kind, const EngineConfig& cfg);

// Deterministic distance-weighted sampling of m candidate centers.
std::vector<Point> d2_sample(std::span<const WeightedPoint> pts, int m, CostKind kind,
                             uint64_t seed, int dim);

struct SmallerCoresetResult {
    Coreset coreset;
    ApproxCenters centers;
};
// Gonzalez seed + discrete local search over (a pre-compressed sketch of) s,
// then a fresh grid coreset of s around the resulting <= k centers.
SmallerCoresetResult smaller_coreset(const Coreset& s, int k, CostKind kind, double eps,
                                     const EngineConfig& cfg, int dim);

struct ClusteringAnswer {
    std::vector<Point> centers;
    double cost = 0.0;
    CostKind kind = CostKind::Median;
    std::string solver_tag;
    uint64_t point_accesses = 0;
    uint64_t coreset_size = 0;
    double coreset_total_weight = 0.0;
    double lb = 0.0;         // k-center lower bound (that engine only)
    double inflation = 0.0;  // additive cost inflation included in `cost`
    bool empty_range = false;
};

// Weighted single-shot solve on a coreset: exhaustive partition oracle at tiny
// sizes, otherwise local search (plus Lloyd refinement for means).
struct SolveResult {
    std::vector<Point> centers;
    double cost = 0.0;
    std::string tag;
};
SolveResult solve_single_shot(std::span<const WeightedPoint> pts, int k, CostKind kind,
                              const EngineConfig& cfg, int dim);

}  // namespace rcq
