#include "rcq/kcenter_engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "rcq/solvers.hpp"

namespace rcq {

namespace {

uint64_t threshold_cells(int k, int dim) {
    uint64_t t = uint64_t(k);
    for (int i = 0; i < dim; ++i) t *= 3;
    return t;
}

// Lowest raw pid of slice(node) ∩ q, assuming the node is nonempty in q.
uint32_t rep_pid(const IndexDispatch& disp, uint32_t node, const Rect& q) {
    return disp.report_in_q(node, q);
}

}  // namespace

LowerBoundResult kcenter_lower_bound(const IndexDispatch& disp, const Rect& q, int k) {
    LowerBoundResult res;
    const CompressedQuadtree& t = *disp.qt;
    const int dim = t.dim();

    // Exact path: at most k distinct locations inside q.
    {
        uint64_t found = 0;
        bool more = false;
        t.subdivide_visit(t.root(), kMaxLevel, &q, [&](const CellId&, uint32_t node) {
            if (disp.empty_in_q(node, q)) return true;
            if (++found > uint64_t(k)) {
                more = true;
                return false;
            }
            uint32_t pid = rep_pid(disp, node, q);
            res.distinct.push_back(WeightedPoint{t.point(pid), 1.0, pid});
            return true;
        });
        if (!more) {
            res.exact = true;
            return res;
        }
        res.distinct.clear();
    }

    const uint64_t thresh = threshold_cells(k, dim);
    std::vector<CompressedQuadtree::CellRef> prev;  // full nonempty list at the previous level
    for (int lev = 0; lev <= kMaxLevel; ++lev) {
        std::vector<CompressedQuadtree::CellRef> cur;
        bool over = false;
        t.subdivide_visit(t.root(), lev, &q, [&](const CellId& c, uint32_t node) {
            if (disp.empty_in_q(node, q)) return true;
            cur.push_back(CompressedQuadtree::CellRef{c, node});
            if (cur.size() > thresh) {
                over = true;
                return false;
            }
            return true;
        });
        if (over) {
            res.lb = StdLen{lev};
            res.cover = std::move(prev);
            assert(!res.cover.empty());
            return res;
        }
        prev = std::move(cur);
    }

    // Too few distinct locations for the counting certificate (k < distinct
    // <= k*3^d): certify via Gonzalez on the distinct locations instead.
    std::vector<WeightedPoint> locs;
    for (const auto& cr : prev) {
        uint32_t pid = rep_pid(disp, cr.node, q);
        locs.push_back(WeightedPoint{t.point(pid), 1.0, pid});
    }
    std::vector<Point> centers = gonzalez(locs, k, dim);
    double gz = phi_cost(locs, centers, CostKind::Center, dim);
    assert(gz > 0.0);
    res.lb = sfloor(std::min(1.0, gz / 2.0));
    // Cover: nonempty cells of side 2*lb (the max-level cells already cover;
    // coarsen only when that stays within the certificate budget).
    int cover_lev = std::max(0, res.lb.e - 1);
    std::vector<CompressedQuadtree::CellRef> cover;
    t.subdivide_visit(t.root(), cover_lev, &q, [&](const CellId& c, uint32_t node) {
        if (!disp.empty_in_q(node, q)) cover.push_back(CompressedQuadtree::CellRef{c, node});
        return true;
    });
    res.cover = std::move(cover);
    return res;
}

std::vector<WeightedPoint> kcenter_coreset(const IndexDispatch& disp, const Rect& q, int k,
                                           double eps, const LowerBoundResult& lbr) {
    (void)k;
    const CompressedQuadtree& t = *disp.qt;
    std::vector<WeightedPoint> out;
    double target = eps * lbr.lb.value();
    int target_lev = sfloor(std::min(1.0, target)).e;
    for (const auto& cr : lbr.cover) {
        int lev = std::max(target_lev, int(cr.cell.level));
        t.subdivide_visit(cr.node, lev, &q, [&](const CellId&, uint32_t node) {
            if (disp.empty_in_q(node, q)) return true;
            uint32_t pid = rep_pid(disp, node, q);
            out.push_back(WeightedPoint{t.point(pid), 1.0, pid});
            return true;
        });
    }
    return out;
}

ClusteringAnswer kcenter_query(const IndexDispatch& disp, const Rect& q, int k, double eps,
                               const KCenterConfig& cfg) {
    ClusteringAnswer ans;
    ans.kind = CostKind::Center;
    const int dim = disp.qt->dim();
    if (disp.rt->count(q) == 0) {
        ans.empty_range = true;
        ans.solver_tag = "empty";
        return ans;
    }
    LowerBoundResult lbr = kcenter_lower_bound(disp, q, k);
    if (lbr.exact) {
        for (const WeightedPoint& wp : lbr.distinct) ans.centers.push_back(wp.p);
        ans.cost = 0.0;
        ans.solver_tag = "exact_distinct";
        return ans;
    }
    std::vector<WeightedPoint> coreset = kcenter_coreset(disp, q, k, eps, lbr);
    ans.coreset_size = coreset.size();
    ans.coreset_total_weight = double(coreset.size());
    ans.lb = lbr.lb.value();

    if (coreset.size() <= cfg.exact_solver_max_pts && k <= cfg.exact_solver_max_k) {
        OracleResult orc = oracle_exact(coreset, k, CostKind::Center, dim);
        ans.centers = orc.centers;
        ans.cost = orc.cost;
        ans.solver_tag = "exact_partition";
    } else {
        ans.centers = gonzalez(coreset, k, dim);
        ans.cost = phi_cost(coreset, ans.centers, CostKind::Center, dim);
        ans.solver_tag = "gonzalez";
    }
    // One-sided reporting: the inflated value bounds the true cost over P_Q.
    ans.inflation = std::sqrt(double(dim)) * eps * lbr.lb.value();
    ans.cost += ans.inflation;
    return ans;
}

}  // namespace rcq
