#include "rcq/quadtree.hpp"

#include <algorithm>
#include <cassert>

namespace rcq {

namespace {

inline int msb_pos(uint64_t x) { return 63 - __builtin_clzll(x); }

// Deepest level at which two max-level grid coordinate vectors share a cell.
int common_level(const std::array<uint64_t, kMaxDim>& a, const std::array<uint64_t, kMaxDim>& b, int dim) {
    int lev = kMaxLevel;
    for (int i = 0; i < dim; ++i) {
        uint64_t x = a[size_t(i)] ^ b[size_t(i)];
        if (x) lev = std::min(lev, kMaxLevel - 1 - msb_pos(x));
    }
    return lev;
}

}  // namespace

std::vector<uint32_t> zorder_permutation(const std::vector<Point>& raw, int dim) {
    std::vector<std::array<uint64_t, kMaxDim>> g(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) g[i] = grid_coords(raw[i], dim);
    std::vector<uint32_t> perm(raw.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = uint32_t(i);
    std::stable_sort(perm.begin(), perm.end(), [&](uint32_t a, uint32_t b) {
        return cmp_zorder(g[a], g[b], dim) < 0;
    });
    return perm;
}

CompressedQuadtree CompressedQuadtree::build(const std::vector<Point>& pts,
                                             const std::vector<double>& weights, int dim) {
    CompressedQuadtree t;
    t.dim_ = dim;
    t.pts_ = pts;
    t.wts_ = weights;
    if (pts.empty()) return t;

    // Merge runs of points sharing the max-level grid cell.
    std::array<uint64_t, kMaxDim> prev{};
    for (uint32_t i = 0; i < pts.size(); ++i) {
        auto g = grid_coords(pts[i], dim);
        if (i == 0 || cmp_zorder(prev, g, dim) != 0) {
            ZEntry e;
            e.loc = pts[i];
            e.pid_begin = i;
            e.pid_end = i + 1;
            e.weight = weights[i];
            t.entries_.push_back(e);
        } else {
            t.entries_.back().pid_end = i + 1;
            t.entries_.back().weight += weights[i];
        }
        prev = g;
    }
    t.nodes_.reserve(2 * t.entries_.size());
    t.root_ = t.build_rec(0, uint32_t(t.entries_.size()), 0, kNone);
    return t;
}

uint32_t CompressedQuadtree::build_rec(uint32_t elo, uint32_t ehi, int, uint32_t parent) {
    const uint32_t id = uint32_t(nodes_.size());
    nodes_.emplace_back();
    {
        QtNode& n = nodes_[id];
        n.parent = parent;
        n.entry_begin = elo;
        n.entry_end = ehi;
        n.pid_begin = entries_[elo].pid_begin;
        n.pid_end = entries_[ehi - 1].pid_end;
        n.sample_pid = n.pid_begin;
        n.facet_pid.fill(kNone);
    }
    double w = 0.0;
    for (uint32_t e = elo; e < ehi; ++e) w += entries_[e].weight;
    nodes_[id].weight = w;

    if (ehi - elo == 1) {
        QtNode& n = nodes_[id];
        n.cell = cell_of_point(entries_[elo].loc, kMaxLevel, dim_);
        for (int a = 0; a < dim_; ++a) {
            uint32_t lopid = n.pid_begin, hipid = n.pid_begin;
            for (uint32_t p = n.pid_begin + 1; p < n.pid_end; ++p) {
                if (pts_[p][a] < pts_[lopid][a]) lopid = p;
                if (pts_[p][a] > pts_[hipid][a]) hipid = p;
            }
            n.facet_pid[size_t(2 * a)] = lopid;
            n.facet_pid[size_t(2 * a + 1)] = hipid;
        }
        return id;
    }

    auto glo = grid_coords(entries_[elo].loc, dim_);
    auto ghi = grid_coords(entries_[ehi - 1].loc, dim_);
    const int lev = common_level(glo, ghi, dim_);
    assert(lev < kMaxLevel);
    nodes_[id].cell = cell_of_point(entries_[elo].loc, lev, dim_);

    // Split entries by quadrant at lev+1; entries are Z-sorted so each
    // quadrant is a contiguous range.
    std::vector<uint32_t> kid_ids;
    uint32_t s = elo;
    while (s < ehi) {
        CellId q = cell_of_point(entries_[s].loc, lev + 1, dim_);
        uint32_t e = s + 1;
        while (e < ehi && cell_of_point(entries_[e].loc, lev + 1, dim_) == q) ++e;
        kid_ids.push_back(build_rec(s, e, 0, id));
        s = e;
    }
    assert(kid_ids.size() >= 2);

    QtNode& n = nodes_[id];
    n.child_begin = uint32_t(children_.size());
    n.child_count = uint32_t(kid_ids.size());
    children_.insert(children_.end(), kid_ids.begin(), kid_ids.end());
    for (int a = 0; a < dim_; ++a) {
        uint32_t lopid = kNone, hipid = kNone;
        for (uint32_t k : kid_ids) {
            uint32_t cl = nodes_[k].facet_pid[size_t(2 * a)];
            uint32_t ch = nodes_[k].facet_pid[size_t(2 * a + 1)];
            if (lopid == kNone || pts_[cl][a] < pts_[lopid][a]) lopid = cl;
            if (hipid == kNone || pts_[ch][a] > pts_[hipid][a]) hipid = ch;
        }
        n.facet_pid[size_t(2 * a)] = lopid;
        n.facet_pid[size_t(2 * a + 1)] = hipid;
    }
    return id;
}

std::optional<uint32_t> CompressedQuadtree::compressed_cell(const CellId& cell) const {
    if (nodes_.empty()) return std::nullopt;
    uint32_t v = root_;
    for (;;) {
        const QtNode& n = nodes_[v];
        if (cell.contains_cell(n.cell)) return v;  // includes equality
        if (!n.cell.contains_cell(cell)) return std::nullopt;
        if (n.leaf()) return std::nullopt;  // leaf cell strictly contains query cell: single
                                            // location at max level cannot be split further
        const CellId quad = cell.ancestor(n.cell.level + 1);
        uint32_t next = kNone;
        for (uint32_t i = 0; i < n.child_count; ++i) {
            uint32_t u = children_[n.child_begin + i];
            if (nodes_[u].cell.ancestor(n.cell.level + 1) == quad) {
                next = u;
                break;
            }
        }
        if (next == kNone) return std::nullopt;
        v = next;
    }
}

bool CompressedQuadtree::descend_emit(const CellId& cur, uint32_t node, int target_level,
                                      const Rect* clip,
                                      const std::function<bool(const CellId&, uint32_t)>& emit) const {
    if (clip != nullptr && !cur.box().intersects(*clip)) return true;
    if (cur.level >= target_level) return emit(cur, node);
    const QtNode& n = nodes_[node];
    if (n.cell.level > cur.level) {
        // Chain jump: every point of cur sits inside one quadrant.
        return descend_emit(n.cell.ancestor(cur.level + 1), node, target_level, clip, emit);
    }
    for (uint32_t i = 0; i < n.child_count; ++i) {
        uint32_t u = children_[n.child_begin + i];
        CellId q = nodes_[u].cell.ancestor(cur.level + 1);
        if (!descend_emit(q, u, target_level, clip, emit)) return false;
    }
    return true;
}

void CompressedQuadtree::subdivide_visit(uint32_t node, int target_level, const Rect* clip,
                                         const std::function<bool(const CellId&, uint32_t)>& emit) const {
    if (nodes_.empty()) return;
    const QtNode& n = nodes_[node];
    CellId start = n.cell;
    if (start.level >= target_level) {
        if (clip == nullptr || start.box().intersects(*clip)) emit(start, node);
        return;
    }
    descend_emit(start, node, target_level, clip, emit);
}

std::vector<CompressedQuadtree::CellRef> CompressedQuadtree::subdivide_to_side(
    uint32_t node, int target_level, const Rect* clip) const {
    std::vector<CellRef> out;
    subdivide_visit(node, target_level, clip, [&](const CellId& c, uint32_t v) {
        out.push_back(CellRef{c, v});
        return true;
    });
    return out;
}

}  // namespace rcq
