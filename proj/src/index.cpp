#include "rcq/index.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace rcq {

Index Index::build(const std::vector<Point>& raw, int dim, const IndexParams& params) {
    Index idx;
    idx.dim_ = dim;
    idx.params_ = params;
    auto nr = normalize(raw, dim);
    if (!nr) throw std::invalid_argument("empty input or non-finite coordinates");
    idx.norm_ = nr->norm;

    auto perm = zorder_permutation(nr->points, dim);
    idx.pts_.resize(perm.size());
    for (size_t i = 0; i < perm.size(); ++i) idx.pts_[i] = nr->points[perm[i]];
    std::vector<double> w(idx.pts_.size(), 1.0);
    idx.qt_ = CompressedQuadtree::build(idx.pts_, w, dim);
    idx.rt_.build(&idx.pts_, dim);
    idx.pt_.build(idx.qt_, idx.pts_, dim);
    idx.aet_.build(idx.pts_, dim);
    if (idx.pts_.size() <= params.coreset_tree_max_n) {
        CoresetTree::Params cp;
        cp.delta = params.delta;
        cp.k_max = params.k_max;
        cp.store_threshold = params.store_threshold;
        cp.seed = params.seed;
        idx.ct_.build(idx.rt_, &idx.pts_, dim, cp);
    }
    return idx;
}

Coreset Index::canonical_coreset_norm(const Rect& q_norm, int k, CostKind kind) const {
    Coreset s;
    s.kind = kind;
    s.k = k;
    s.eps = ct_.built() ? params_.delta : 0.0;
    s.provenance = "canonical";
    int kindi = (kind == CostKind::Means) ? 1 : 0;
    if (ct_.built()) {
        s.members = ct_.canonical_coreset(rt_, q_norm, k, kindi);
    } else {
        // Raw fallback: exact union of canonical slices (a (k,0)-coreset).
        for (uint32_t gid : rt_.canonical_nodes(q_norm)) {
            for (uint32_t pid : rt_.node_pids(gid))
                s.members.push_back(WeightedPoint{pts_[pid], 1.0, pid});
        }
        s.eps = 0.0;
    }
    for (const WeightedPoint& wp : s.members) s.total_weight += wp.w;
    return s;
}

Coreset Index::query_coreset_norm(const Rect& q_norm, int k, double eps, CostKind kind) const {
    Coreset s = canonical_coreset_norm(q_norm, k, kind);
    if (s.members.empty()) return s;
    SmallerCoresetResult sm = smaller_coreset(s, k, kind, 2.0, params_.engine, dim_);
    PointAccess pa = PointAccess::index_backend(qt_, rt_, pt_, q_norm);
    return coreset_from_centers(pa, sm.centers, k, eps, kind, params_.engine);
}

ClusteringAnswer Index::cluster_query(const Rect& q, int k, double eps, CostKind kind) const {
    instr().point_accesses = 0;
    ClusteringAnswer ans;
    ans.kind = kind;
    Rect qn = to_norm_query(q);
    uint64_t total = rt_.count(qn);
    if (total == 0) {
        ans.empty_range = true;
        ans.solver_tag = "empty";
        return ans;
    }
    if (k < 1 || uint64_t(k) > pts_.size()) throw std::invalid_argument("k out of range");

    // Few distinct locations: exact zero-cost answer.
    {
        std::vector<Point> distinct;
        bool more = false;
        IndexDispatch disp = dispatch();
        qt_.subdivide_visit(qt_.root(), kMaxLevel, &qn, [&](const CellId&, uint32_t node) {
            if (disp.empty_in_q(node, qn)) return true;
            if (distinct.size() >= size_t(k)) {
                more = true;
                return false;
            }
            uint32_t pid = disp.report_in_q(node, qn);
            distinct.push_back(pts_[pid]);
            return true;
        });
        if (!more) {
            for (const Point& p : distinct) ans.centers.push_back(norm_.from_norm(p));
            ans.cost = 0.0;
            ans.solver_tag = "exact_distinct";
            ans.point_accesses = instr().point_accesses;
            return ans;
        }
    }

    // eps budget: one third to the final grid coreset, the rest absorbs the
    // solver's behavior at tiny scale (exhaustive there).
    Coreset final_cs = query_coreset_norm(qn, k, eps / 3.0, kind);
    SolveResult sol = solve_single_shot(final_cs.members, k, kind, params_.engine, dim_);
    ans.coreset_size = final_cs.members.size();
    ans.coreset_total_weight = final_cs.total_weight;
    ans.solver_tag = sol.tag;
    for (const Point& c : sol.centers) ans.centers.push_back(norm_.from_norm(c));
    double scale = norm_.scale;
    ans.cost = (kind == CostKind::Means) ? sol.cost * scale * scale : sol.cost * scale;
    ans.point_accesses = instr().point_accesses;
    return ans;
}

ClusteringAnswer Index::kmedian(const Rect& q, int k, double eps) const {
    return cluster_query(q, k, eps, CostKind::Median);
}
ClusteringAnswer Index::kmeans(const Rect& q, int k, double eps) const {
    return cluster_query(q, k, eps, CostKind::Means);
}

ClusteringAnswer Index::kcenter(const Rect& q, int k, double eps) const {
    instr().point_accesses = 0;
    Rect qn = to_norm_query(q);
    if (k < 1 || uint64_t(k) > pts_.size()) throw std::invalid_argument("k out of range");
    ClusteringAnswer ans = kcenter_query(dispatch(), qn, k, eps, params_.kcenter);
    for (Point& c : ans.centers) c = norm_.from_norm(c);
    ans.cost *= norm_.scale;
    ans.lb *= norm_.scale;
    ans.inflation *= norm_.scale;
    ans.point_accesses = instr().point_accesses;
    return ans;
}

ExtentAnswer Index::diameter(const Rect& q, double eps) const {
    instr().point_accesses = 0;
    Rect qn = to_norm_query(q);
    ExtentAnswer ans = diameter_query(dispatch(), aet_, qn, eps, params_.extent);
    ans.value *= norm_.scale;
    ans.point_accesses = instr().point_accesses;
    return ans;
}

ExtentAnswer Index::radius(const Rect& q, double eps) const {
    instr().point_accesses = 0;
    Rect qn = to_norm_query(q);
    ExtentAnswer ans = radius_query(dispatch(), aet_, qn, eps, params_.extent);
    ans.value *= norm_.scale;
    ans.center = norm_.from_norm(ans.center);
    ans.point_accesses = instr().point_accesses;
    return ans;
}

}  // namespace rcq
