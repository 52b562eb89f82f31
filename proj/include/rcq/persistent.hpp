#pragma once

#include <cstdint>
#include <vector>

#include "rcq/geometry.hpp"
#include "rcq/quadtree.hpp"

namespace rcq {

// Per-query instrumentation. point_accesses counts probes into point-bearing
// structures (range tree, projection versions, axis-extreme lookups); O(1)
// reads of precomputed node fields are free.
struct Instrumentation {
    uint64_t point_accesses = 0;
};
Instrumentation& instr();

// Arena of immutable nodes for path-copied weight-balanced search trees,
// nested per axis. All versions of all roots share one arena.
class PersistentStore {
  public:
    struct Node {
        uint32_t left = kNone;
        uint32_t right = kNone;
        uint32_t assoc = kNone;   // structure over this subtree on the next axis
        uint32_t size = 0;
        uint32_t pid = 0;
        uint32_t min_pid = 0;
    };

    PersistentStore(const std::vector<Point>* pts, std::vector<int> axes)
        : pts_(pts), axes_(std::move(axes)) {}

    // pids must be sorted by (coord on axes[level], pid).
    uint32_t build_sorted(const std::vector<uint32_t>& pids, int level);
    uint32_t build(std::vector<uint32_t> pids, int level);  // sorts internally
    uint32_t insert(uint32_t root, uint32_t pid, int level);

    uint64_t count(uint32_t root, const double* lo, const double* hi) const;
    // Lowest pid in the box, kNone if empty.
    uint32_t report_min(uint32_t root, const double* lo, const double* hi) const;
    // Extreme pid by key coordinate within key window [lo,hi] on axes[0]
    // (single-axis use). Ties resolved toward larger pid for max, smaller for min.
    uint32_t extreme(uint32_t root, double lo, double hi, bool want_max) const;

    size_t arena_size() const { return nodes_.size(); }
    uint32_t subtree_size(uint32_t nd) const { return nd == kNone ? 0 : nodes_[nd].size; }

  private:
    const std::vector<Point>* pts_;
    std::vector<int> axes_;
    std::vector<Node> nodes_;

    double key(uint32_t pid, int level) const { return (*pts_)[pid][axes_[size_t(level)]]; }
    bool key_less(uint32_t a, uint32_t b, int level) const {
        double ka = key(a, level), kb = key(b, level);
        if (ka != kb) return ka < kb;
        return a < b;
    }
    uint32_t mknode(uint32_t pid, int level);
    uint32_t build_range(const uint32_t* pids, uint32_t n, int level);
    void collect(uint32_t nd, std::vector<uint32_t>& out) const;
    uint32_t rebuild(uint32_t nd, int level);
    bool point_in_suffix(uint32_t pid, int from_level, const double* lo, const double* hi) const;
    uint64_t count_rec(uint32_t nd, int level, const double* lo, const double* hi) const;
    uint64_t count_ge(uint32_t nd, int level, const double* lo, const double* hi) const;
    uint64_t count_le(uint32_t nd, int level, const double* lo, const double* hi) const;
    uint64_t full_count(uint32_t nd, int next_level, const double* lo, const double* hi) const;
    uint32_t rep_rec(uint32_t nd, int level, const double* lo, const double* hi) const;
    uint32_t rep_ge(uint32_t nd, int level, const double* lo, const double* hi) const;
    uint32_t rep_le(uint32_t nd, int level, const double* lo, const double* hi) const;
    uint32_t full_rep(uint32_t nd, int next_level, const double* lo, const double* hi) const;
};

// For every axis subset I (1 <= |I| <= d-1) and every compressed-quadtree node,
// a version handle to a (d-|I|)-dimensional counting structure over the node's
// points. Versions are built bottom-up: the child with the most points is
// reused, the remaining children's points are inserted persistently.
class ProjectionTables {
  public:
    void build(const CompressedQuadtree& t, const std::vector<Point>& pts, int dim);

    // Exact |slice(node) ∩ q| given a witness axis set whose facets miss the
    // node's cell. q is the full-dimensional query box.
    uint64_t count(uint32_t node, const Rect& q, uint32_t witness_mask) const;
    bool empty(uint32_t node, const Rect& q, uint32_t witness_mask) const;
    uint32_t report_min(uint32_t node, const Rect& q, uint32_t witness_mask) const;

    uint64_t insertions_per_table() const { return insertions_; }
    bool built() const { return !tables_.empty(); }

  private:
    struct Table {
        std::vector<int> axes;
        std::vector<uint32_t> roots;  // per quadtree node
        PersistentStore store{nullptr, {}};
    };
    int dim_ = 0;
    std::vector<int> table_of_mask_;  // witness mask -> table index, -1 if none
    std::vector<Table> tables_;
    uint64_t insertions_ = 0;
};

// Per axis i: compressed quadtree over the points projected orthogonally to
// axis i, plus per-node persistent trees keyed by the dropped coordinate.
class AxisExtremeTables {
  public:
    void build(const std::vector<Point>& pts, int dim);

    const CompressedQuadtree& projected_tree(int axis) const { return axes_[size_t(axis)].tree; }
    // Among points whose projection lies in the given projected-tree node,
    // the one with extreme axis-i coordinate within [lo,hi]; kNone if none.
    uint32_t extreme(int axis, uint32_t proj_node, double lo, double hi, bool want_max) const;
    // Map a raw pid of the projected tree back to the original point id.
    uint32_t original_pid(int axis, uint32_t proj_pid) const { return axes_[size_t(axis)].perm[proj_pid]; }

  private:
    struct PerAxis {
        CompressedQuadtree tree;           // over projected points (dim-1)
        std::vector<uint32_t> perm;        // projected pid -> original pid
        std::vector<uint32_t> roots;       // per projected-tree node
        PersistentStore store{nullptr, {}};
        std::vector<Point> keyspace;       // original points, for key lookups
    };
    int dim_ = 0;
    std::vector<PerAxis> axes_;
};

}  // namespace rcq
