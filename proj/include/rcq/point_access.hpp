#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rcq/geometry.hpp"
#include "rcq/persistent.hpp"
#include "rcq/quadtree.hpp"
#include "rcq/rangetree.hpp"

namespace rcq {

// Exact dispatch helpers against the index: all of them answer about
// slice(node) ∩ q where slice(node) equals the point set of the node's cell.
struct IndexDispatch {
    const CompressedQuadtree* qt = nullptr;
    const RangeTree* rt = nullptr;
    const ProjectionTables* pt = nullptr;

    uint64_t count_in_q(uint32_t node, const Rect& q) const;
    bool empty_in_q(uint32_t node, const Rect& q) const;    // uses the O(1) facet trick
    uint32_t report_in_q(uint32_t node, const Rect& q) const;  // lowest pid, kNone if empty
};

// One engine serves both the index-backed query path and explicit weighted
// point lists; both backends answer cell queries identically.
class PointAccess {
  public:
    // Index backend: quadtree over P plus structures, restricted to q (normalized).
    static PointAccess index_backend(const CompressedQuadtree& qt, const RangeTree& rt,
                                     const ProjectionTables& pt, const Rect& q);
    // Explicit backend: a private quadtree over the weighted members, no clip.
    static PointAccess explicit_backend(std::span<const WeightedPoint> members, int dim);

    int dim() const { return dim_; }
    const CompressedQuadtree& tree() const { return *tree_; }
    const Rect* clip() const { return has_clip_ ? &clip_ : nullptr; }

    double total_weight() const { return total_weight_; }
    uint64_t total_locations() const { return total_locations_; }
    bool is_explicit() const { return !is_index_; }
    // Explicit mode only: the members in quadtree pid order.
    std::span<const WeightedPoint> explicit_members() const { return members_; }

    // Weight / distinct-location count of the node's slice within the clip.
    double weight_of(uint32_t node) const;
    uint64_t locations_of(uint32_t node) const;
    // Lowest-order member of the node's slice within the clip.
    std::optional<WeightedPoint> report_one(uint32_t node) const;

    // Count of members coinciding exactly with the given location.
    uint64_t locations_at(const Point& p) const;

  private:
    int dim_ = 0;
    bool is_index_ = false;
    bool has_clip_ = false;
    Rect clip_{};
    const CompressedQuadtree* tree_ = nullptr;
    IndexDispatch disp_{};
    double total_weight_ = 0.0;
    uint64_t total_locations_ = 0;
    // explicit mode storage
    std::shared_ptr<CompressedQuadtree> own_tree_;
    std::vector<WeightedPoint> members_;      // in quadtree pid order
};

}  // namespace rcq
