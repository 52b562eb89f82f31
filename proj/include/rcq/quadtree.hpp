#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "rcq/geometry.hpp"

namespace rcq {

inline constexpr uint32_t kNone = std::numeric_limits<uint32_t>::max();

// One distinct point location in Z-order, carrying the merged multiplicity
// (weight) and the contiguous range of input ids mapped to it.
struct ZEntry {
    Point loc;
    double weight = 0.0;
    uint32_t pid_begin = 0;
    uint32_t pid_end = 0;
};

struct QtNode {
    CellId cell;
    uint32_t parent = kNone;
    uint32_t child_begin = 0;  // into child index array
    uint32_t child_count = 0;
    uint32_t entry_begin = 0;  // into ZOrderArray entries
    uint32_t entry_end = 0;
    uint32_t pid_begin = 0;    // raw input ids covered by this node
    uint32_t pid_end = 0;
    double weight = 0.0;
    uint32_t sample_pid = 0;                      // lowest Z-order id in the subtree
    std::array<uint32_t, 2 * kMaxDim> facet_pid;  // per axis: [min-side, max-side] closest point

    bool leaf() const { return child_count == 0; }
    uint32_t raw_count() const { return pid_end - pid_begin; }
};

// Compressed quadtree over normalized points. Points are stored in Z-order:
// every node's point set is a contiguous slice of both the entry array and
// the raw id sequence 0..n-1 (ids are assigned in Z-order at build time).
class CompressedQuadtree {
  public:
    // `pts` must be Z-sorted already (see build()); weight per raw point.
    static CompressedQuadtree build(const std::vector<Point>& z_sorted_pts,
                                    const std::vector<double>& weights, int dim);

    int dim() const { return dim_; }
    uint32_t root() const { return root_; }
    bool empty() const { return nodes_.empty(); }
    const std::vector<QtNode>& nodes() const { return nodes_; }
    const QtNode& node(uint32_t id) const { return nodes_[id]; }
    uint32_t child(const QtNode& n, uint32_t i) const { return children_[n.child_begin + i]; }
    const std::vector<ZEntry>& entries() const { return entries_; }
    const Point& point(uint32_t pid) const { return pts_[pid]; }
    double weight_of(uint32_t pid) const { return wts_[pid]; }
    size_t size() const { return pts_.size(); }
    double total_weight() const { return nodes_.empty() ? 0.0 : nodes_[root_].weight; }

    // Compressed-cell lookup: the unique node whose point set equals cell's,
    // or nullopt when the cell holds no point. O(depth).
    std::optional<uint32_t> compressed_cell(const CellId& cell) const;

    // Maximal standard cells of side <= 2^-target_level under `node`, pruning
    // empty branches and cells missing `clip`. Emits (standard cell, node)
    // pairs where the node's slice equals the cell's point set.
    struct CellRef {
        CellId cell;
        uint32_t node;
    };
    std::vector<CellRef> subdivide_to_side(uint32_t node, int target_level, const Rect* clip) const;

    // Same traversal with a per-cell visitor; return false from the visitor to stop.
    void subdivide_visit(uint32_t node, int target_level, const Rect* clip,
                         const std::function<bool(const CellId&, uint32_t)>& emit) const;

  private:
    int dim_ = 0;
    uint32_t root_ = kNone;
    std::vector<QtNode> nodes_;
    std::vector<uint32_t> children_;
    std::vector<ZEntry> entries_;
    std::vector<Point> pts_;     // raw points in Z-order (pid = index)
    std::vector<double> wts_;

    uint32_t build_rec(uint32_t elo, uint32_t ehi, int forced_min_level, uint32_t parent);
    bool descend_emit(const CellId& cur, uint32_t node, int target_level, const Rect* clip,
                      const std::function<bool(const CellId&, uint32_t)>& emit) const;
};

// Z-sorts raw points (stable by input order within one max-level grid cell)
// and returns the permutation applied: out[i] = index into `raw`.
std::vector<uint32_t> zorder_permutation(const std::vector<Point>& raw, int dim);

}  // namespace rcq
