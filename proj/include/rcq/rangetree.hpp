#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rcq/geometry.hpp"
#include "rcq/quadtree.hpp"

namespace rcq {

// Static d-dimensional range tree: nested segment decompositions over
// coordinate-sorted arrays. Exact counting / emptiness / report-one /
// per-axis extremes. Last-level segment nodes are the canonical nodes that
// carry the per-k coresets of the coreset tree.
class RangeTree {
  public:
    void build(const std::vector<Point>* pts, int dim);

    uint64_t count(const Rect& q) const;
    bool empty(const Rect& q) const { return count(q) == 0; }
    uint32_t report_min(const Rect& q) const;            // lowest pid in q, kNone if empty
    std::optional<Rect> extremes(const Rect& q) const;   // smallest enclosing box of P∩q

    // Canonical level-d nodes whose slices partition P∩q. Returned values are
    // global ids into the last-level segment arena.
    std::vector<uint32_t> canonical_nodes(const Rect& q) const;

    uint32_t canonical_count() const { return uint32_t(last_segs_.size()); }
    uint32_t node_size(uint32_t gid) const { return last_segs_[gid].hi - last_segs_[gid].lo; }
    std::span<const uint32_t> node_pids(uint32_t gid) const {
        const Seg& s = last_segs_[gid];
        return {last_pids_.data() + s.lo, size_t(s.hi - s.lo)};
    }

  private:
    struct Seg {
        uint32_t lo = 0, hi = 0;          // absolute range into the level pid array
        uint32_t left = kNone, right = kNone;
        uint32_t assoc = kNone;           // structure id at next level (non-last levels)
    };
    struct Structure {
        uint32_t root = kNone;
        uint32_t pid_begin = 0, pid_end = 0;  // into level pid array
    };
    struct Level {
        std::vector<uint32_t> pids;       // concatenated, sorted by (coord, pid) per structure
        std::vector<Seg> segs;
        std::vector<Structure> structs;
    };

    const std::vector<Point>* pts_ = nullptr;
    int dim_ = 0;
    std::vector<Level> levels_;
    std::vector<Seg> last_segs_;          // level d-1 segment nodes (global arena)
    std::vector<uint32_t> last_pids_;
    std::vector<Structure> last_structs_;
    std::vector<uint32_t> last_minpid_;                  // per last seg
    std::vector<std::array<uint32_t, 2 * kMaxDim>> last_extreme_;  // per last seg: min/max pid per axis

    uint32_t build_structure(int level, std::vector<uint32_t> pids);
    uint32_t build_segs(int level, uint32_t str_id, uint32_t lo, uint32_t hi);

    // Locate the closed coordinate range [qlo,qhi] inside a structure's pid run.
    std::pair<uint32_t, uint32_t> locate(int level, const Structure& s, double qlo, double qhi) const;

    template <typename Fn>
    void decompose(int level, uint32_t seg, uint32_t lo, uint32_t hi, Fn&& fn) const;

    uint64_t count_struct(int level, uint32_t str_id, const Rect& q) const;
    uint32_t rep_struct(int level, uint32_t str_id, const Rect& q) const;
    void ext_struct(int level, uint32_t str_id, const Rect& q, Rect& acc, bool& any) const;
    void canon_struct(int level, uint32_t str_id, const Rect& q, std::vector<uint32_t>& out) const;
};

// Stored (k̄, δ)-coresets at heavy canonical nodes, for k̄ = 1,2,4,...,K_max
// and both sum-type cost kinds. Light nodes fall back to their raw slices.
class CoresetTree {
  public:
    struct Params {
        double delta = 0.5;
        int k_max = 16;
        uint32_t store_threshold = 512;  // nodes smaller than this stay raw
        uint64_t seed = 0x5EED;
    };

    // kind index: 0 = median, 1 = means
    void build(const RangeTree& rt, const std::vector<Point>* pts, int dim, const Params& p);
    bool built() const { return built_; }
    const Params& params() const { return params_; }

    // Union over canonical nodes of stored coresets for the smallest power of
    // two >= min(k, K_max); raw slices where nothing is stored.
    std::vector<WeightedPoint> canonical_coreset(const RangeTree& rt, const Rect& q, int k,
                                                 int kind) const;

  private:
    struct StoredSet {
        std::vector<WeightedPoint> members;  // empty => raw fallback
        bool stored = false;
    };
    bool built_ = false;
    Params params_;
    int dim_ = 0;
    const std::vector<Point>* pts_ = nullptr;
    int nk_ = 0;  // number of k̄ values
    // stored_[gid] -> per (kind, k̄ index) sets; only heavy gids present.
    std::vector<std::pair<uint32_t, std::vector<StoredSet>>> stored_;

    const std::vector<StoredSet>* find(uint32_t gid) const;
};

}  // namespace rcq
