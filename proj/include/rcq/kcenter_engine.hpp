#pragma once

#include <cstdint>
#include <vector>

#include "rcq/median_engine.hpp"
#include "rcq/point_access.hpp"

namespace rcq {

struct KCenterConfig {
    uint32_t exact_solver_max_pts = 14;
    int exact_solver_max_k = 3;
};

struct LowerBoundResult {
    bool exact = false;        // <= k distinct locations in q: solve exactly
    StdLen lb{};               // certified lower bound on Opt_k (when !exact)
    std::vector<CompressedQuadtree::CellRef> cover;  // nonempty cells of side 2*lb covering P_Q
    std::vector<WeightedPoint> distinct;             // exact path: the distinct locations in q
};

// Phase 1: level descent counting nonempty side-alpha cells; lb is the largest
// standard length whose nonempty-cell count exceeds k*3^d (a ball of radius
// < alpha meets at most 3^d such cells). Falls back to a Gonzalez-certified
// bound when too few distinct locations exist for the counting certificate.
LowerBoundResult kcenter_lower_bound(const IndexDispatch& disp, const Rect& q, int k);

// Phase 2: subdivide cover cells to side <= sfloor(eps*lb), one point per
// nonempty cell. Every point of P_Q is within sqrt(d)*eps*lb of the output.
std::vector<WeightedPoint> kcenter_coreset(const IndexDispatch& disp, const Rect& q, int k,
                                           double eps, const LowerBoundResult& lbr);

ClusteringAnswer kcenter_query(const IndexDispatch& disp, const Rect& q, int k, double eps,
                               const KCenterConfig& cfg);

}  // namespace rcq
