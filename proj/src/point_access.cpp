#include "rcq/point_access.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace rcq {

namespace {

// Closed box equivalent of the half-open cell membership: shrink the upper
// bounds by one ulp so range-tree queries never pick up neighbor-cell points
// sitting exactly on the shared boundary.
Rect halfopen_box(const CellId& cell) {
    Rect r = cell.box();
    for (int i = 0; i < r.dim; ++i) r.hi[i] = std::nextafter(r.hi[i], -1.0);
    return r;
}

// When the cell crosses exactly one facet hyperplane of q (all other axis
// slabs strictly contain it), emptiness is an O(1) comparison against the
// stored point closest to that facet.
struct OneFacet {
    bool yes = false;
    int axis = 0;
    bool lower = false;  // crossing q.lo (true) or q.hi
};

OneFacet one_facet(const Rect& cellbox, const Rect& q, int dim) {
    OneFacet of;
    int crossings = 0;
    for (int a = 0; a < dim; ++a) {
        bool lo_in = q.lo[a] >= cellbox.lo[a] && q.lo[a] <= cellbox.hi[a];
        bool hi_in = q.hi[a] >= cellbox.lo[a] && q.hi[a] <= cellbox.hi[a];
        if (lo_in && hi_in) return OneFacet{};
        if (lo_in || hi_in) {
            ++crossings;
            if (crossings > 1) return OneFacet{};
            of.axis = a;
            of.lower = lo_in;
        }
    }
    of.yes = (crossings == 1);
    return of;
}

}  // namespace

uint64_t IndexDispatch::count_in_q(uint32_t node, const Rect& q) const {
    const QtNode& n = qt->node(node);
    FaceClass fc = classify_cell(n.cell, q);
    switch (fc.kind) {
        case FaceClass::Outside: return 0;
        case FaceClass::Inside: return n.raw_count();
        case FaceClass::Corner: return rt->count(Rect::intersect(q, halfopen_box(n.cell)));
        default: return pt->count(node, q, fc.witness);
    }
}

bool IndexDispatch::empty_in_q(uint32_t node, const Rect& q) const {
    const QtNode& n = qt->node(node);
    if (n.raw_count() == 0) return true;
    Rect cellbox = n.cell.box();
    if (!cellbox.intersects(q)) return true;
    if (q.contains_rect(cellbox)) return false;
    OneFacet of = one_facet(cellbox, q, q.dim);
    if (of.yes) {
        uint32_t pid = of.lower ? n.facet_pid[size_t(2 * of.axis + 1)]  // max-coordinate point
                                : n.facet_pid[size_t(2 * of.axis)];
        const Point& p = qt->point(pid);
        return of.lower ? (p[of.axis] < q.lo[of.axis]) : (p[of.axis] > q.hi[of.axis]);
    }
    FaceClass fc = classify_box(cellbox, q);
    if (fc.kind == FaceClass::Corner) return rt->empty(Rect::intersect(q, halfopen_box(n.cell)));
    return pt->empty(node, q, fc.witness);
}

uint32_t IndexDispatch::report_in_q(uint32_t node, const Rect& q) const {
    const QtNode& n = qt->node(node);
    FaceClass fc = classify_cell(n.cell, q);
    switch (fc.kind) {
        case FaceClass::Outside: return kNone;
        case FaceClass::Inside: return n.sample_pid;
        case FaceClass::Corner: return rt->report_min(Rect::intersect(q, halfopen_box(n.cell)));
        default: return pt->report_min(node, q, fc.witness);
    }
}

PointAccess PointAccess::index_backend(const CompressedQuadtree& qt, const RangeTree& rt,
                                       const ProjectionTables& pt, const Rect& q) {
    PointAccess pa;
    pa.dim_ = qt.dim();
    pa.is_index_ = true;
    pa.has_clip_ = true;
    pa.clip_ = q;
    pa.tree_ = &qt;
    pa.disp_ = IndexDispatch{&qt, &rt, &pt};
    pa.total_locations_ = rt.count(q);
    pa.total_weight_ = double(pa.total_locations_);
    return pa;
}

PointAccess PointAccess::explicit_backend(std::span<const WeightedPoint> members, int dim) {
    PointAccess pa;
    pa.dim_ = dim;
    pa.is_index_ = false;
    pa.has_clip_ = false;
    std::vector<Point> raw(members.size());
    for (size_t i = 0; i < members.size(); ++i) raw[i] = members[i].p;
    auto perm = zorder_permutation(raw, dim);
    std::vector<Point> sorted(raw.size());
    std::vector<double> w(raw.size());
    pa.members_.resize(members.size());
    for (size_t i = 0; i < perm.size(); ++i) {
        sorted[i] = raw[perm[i]];
        w[i] = members[perm[i]].w;
        pa.members_[i] = members[perm[i]];
    }
    pa.own_tree_ = std::make_shared<CompressedQuadtree>(CompressedQuadtree::build(sorted, w, dim));
    pa.tree_ = pa.own_tree_.get();
    pa.total_weight_ = pa.own_tree_->total_weight();
    pa.total_locations_ = pa.own_tree_->empty() ? 0 : pa.own_tree_->entries().size();
    return pa;
}

double PointAccess::weight_of(uint32_t node) const {
    if (!is_index_) return tree_->node(node).weight;
    return double(disp_.count_in_q(node, clip_));
}

uint64_t PointAccess::locations_of(uint32_t node) const {
    if (!is_index_) {
        const QtNode& n = tree_->node(node);
        return n.entry_end - n.entry_begin;
    }
    return disp_.count_in_q(node, clip_);
}

std::optional<WeightedPoint> PointAccess::report_one(uint32_t node) const {
    if (!is_index_) {
        const QtNode& n = tree_->node(node);
        if (n.raw_count() == 0) return std::nullopt;
        return members_[n.sample_pid];
    }
    uint32_t pid = disp_.report_in_q(node, clip_);
    if (pid == kNone) return std::nullopt;
    return WeightedPoint{tree_->point(pid), 1.0, pid};
}

uint64_t PointAccess::locations_at(const Point& p) const {
    CellId cell = cell_of_point(p, kMaxLevel, dim_);
    auto node = tree_->compressed_cell(cell);
    if (!node) return 0;
    return locations_of(*node);
}

}  // namespace rcq
