#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rcq/extent_engine.hpp"
#include "rcq/kcenter_engine.hpp"
#include "rcq/median_engine.hpp"
#include "rcq/persistent.hpp"
#include "rcq/point_access.hpp"
#include "rcq/quadtree.hpp"
#include "rcq/rangetree.hpp"

namespace rcq {

struct IndexParams {
    double delta = 0.5;     // coreset-tree accuracy
    int k_max = 16;         // largest stored k̄ (power of two)
    uint64_t seed = 0x5EED;
    uint32_t store_threshold = 512;
    uint64_t coreset_tree_max_n = 50000;  // above this the canonical stage stays raw
    EngineConfig engine;
    KCenterConfig kcenter;
    ExtentConfig extent;
};

// The query index over a static point set: normalizer, compressed quadtree
// with Z-ordered points, range tree, coreset tree, persistent projection
// tables and per-axis extreme tables. Immutable after build.
class Index {
  public:
    static Index build(const std::vector<Point>& raw, int dim, const IndexParams& params);

    int dim() const { return dim_; }
    size_t size() const { return pts_.size(); }
    const IndexParams& params() const { return params_; }
    const Normalizer& normalizer() const { return norm_; }
    const CompressedQuadtree& quadtree() const { return qt_; }
    const RangeTree& rangetree() const { return rt_; }
    const ProjectionTables& projections() const { return pt_; }
    const AxisExtremeTables& axis_tables() const { return aet_; }
    const CoresetTree& coreset_tree() const { return ct_; }
    const std::vector<Point>& points() const { return pts_; }  // normalized, Z-order

    IndexDispatch dispatch() const { return IndexDispatch{&qt_, &rt_, &pt_}; }

    // Queries take rectangles in original coordinates and report costs and
    // centers in original units.
    ClusteringAnswer kmedian(const Rect& q, int k, double eps) const;
    ClusteringAnswer kmeans(const Rect& q, int k, double eps) const;
    ClusteringAnswer kcenter(const Rect& q, int k, double eps) const;
    ExtentAnswer diameter(const Rect& q, double eps) const;
    ExtentAnswer radius(const Rect& q, double eps) const;

    // Canonical-node coreset in normalized space (Lemma-1 style stage).
    Coreset canonical_coreset_norm(const Rect& q_norm, int k, CostKind kind) const;
    // The full staged pipeline's final coreset (normalized space), exposed for
    // verification.
    Coreset query_coreset_norm(const Rect& q_norm, int k, double eps, CostKind kind) const;

    Rect to_norm_query(const Rect& q) const { return norm_.to_norm_clamped(q); }

  private:
    int dim_ = 0;
    IndexParams params_;
    Normalizer norm_;
    std::vector<Point> pts_;  // normalized, Z-order (pid = index)
    CompressedQuadtree qt_;
    RangeTree rt_;
    ProjectionTables pt_;
    AxisExtremeTables aet_;
    CoresetTree ct_;

    ClusteringAnswer cluster_query(const Rect& q, int k, double eps, CostKind kind) const;
};

}  // namespace rcq
