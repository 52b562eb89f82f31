#include "rcq/rangetree.hpp"

#include <algorithm>
#include <cassert>

#include "rcq/persistent.hpp"

namespace rcq {

uint32_t RangeTree::build_structure(int level, std::vector<uint32_t> pids) {
    const int axis = level;
    std::sort(pids.begin(), pids.end(), [&](uint32_t a, uint32_t b) {
        double ka = (*pts_)[a][axis], kb = (*pts_)[b][axis];
        if (ka != kb) return ka < kb;
        return a < b;
    });
    const bool last = (level == dim_ - 1);
    auto& pid_arr = last ? last_pids_ : levels_[size_t(level)].pids;
    auto& structs = last ? last_structs_ : levels_[size_t(level)].structs;

    Structure s;
    s.pid_begin = uint32_t(pid_arr.size());
    pid_arr.insert(pid_arr.end(), pids.begin(), pids.end());
    s.pid_end = uint32_t(pid_arr.size());
    uint32_t sid = uint32_t(structs.size());
    structs.push_back(s);
    uint32_t root = build_segs(level, sid, s.pid_begin, s.pid_end);
    structs[sid].root = root;
    return sid;
}

uint32_t RangeTree::build_segs(int level, uint32_t str_id, uint32_t lo, uint32_t hi) {
    const bool last = (level == dim_ - 1);
    auto& segs = last ? last_segs_ : levels_[size_t(level)].segs;
    uint32_t id = uint32_t(segs.size());
    segs.push_back(Seg{lo, hi, kNone, kNone, kNone});
    if (last) {
        const auto& pid_arr = last_pids_;
        uint32_t mp = kNone;
        std::array<uint32_t, 2 * kMaxDim> ext;
        ext.fill(kNone);
        for (uint32_t i = lo; i < hi; ++i) {
            uint32_t p = pid_arr[i];
            mp = std::min(mp, p);
            for (int a = 0; a < dim_; ++a) {
                uint32_t& emin = ext[size_t(2 * a)];
                uint32_t& emax = ext[size_t(2 * a + 1)];
                if (emin == kNone || (*pts_)[p][a] < (*pts_)[emin][a]) emin = p;
                if (emax == kNone || (*pts_)[p][a] > (*pts_)[emax][a]) emax = p;
            }
        }
        last_minpid_.push_back(mp);
        last_extreme_.push_back(ext);
    } else {
        const auto& pid_arr = levels_[size_t(level)].pids;
        std::vector<uint32_t> sub(pid_arr.begin() + lo, pid_arr.begin() + hi);
        uint32_t assoc = build_structure(level + 1, std::move(sub));
        auto& segs2 = levels_[size_t(level)].segs;
        segs2[id].assoc = assoc;
    }
    if (hi - lo >= 2) {
        uint32_t mid = lo + (hi - lo) / 2;
        uint32_t l = build_segs(level, str_id, lo, mid);
        uint32_t r = build_segs(level, str_id, mid, hi);
        auto& segs2 = last ? last_segs_ : levels_[size_t(level)].segs;
        segs2[id].left = l;
        segs2[id].right = r;
    }
    return id;
}

void RangeTree::build(const std::vector<Point>* pts, int dim) {
    pts_ = pts;
    dim_ = dim;
    levels_.assign(size_t(std::max(0, dim - 1)), Level{});
    last_segs_.clear();
    last_pids_.clear();
    last_structs_.clear();
    last_minpid_.clear();
    last_extreme_.clear();
    std::vector<uint32_t> all(pts->size());
    for (uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    if (!all.empty()) build_structure(0, std::move(all));
}

std::pair<uint32_t, uint32_t> RangeTree::locate(int level, const Structure& s, double qlo,
                                                double qhi) const {
    const auto& pid_arr = (level == dim_ - 1) ? last_pids_ : levels_[size_t(level)].pids;
    const int axis = level;
    auto cmp_lo = [&](uint32_t p, double v) { return (*pts_)[p][axis] < v; };
    auto it0 = std::lower_bound(pid_arr.begin() + s.pid_begin, pid_arr.begin() + s.pid_end, qlo, cmp_lo);
    auto cmp_hi = [&](double v, uint32_t p) { return v < (*pts_)[p][axis]; };
    auto it1 = std::upper_bound(pid_arr.begin() + s.pid_begin, pid_arr.begin() + s.pid_end, qhi, cmp_hi);
    return {uint32_t(it0 - pid_arr.begin()), uint32_t(it1 - pid_arr.begin())};
}

template <typename Fn>
void RangeTree::decompose(int level, uint32_t seg, uint32_t lo, uint32_t hi, Fn&& fn) const {
    const auto& segs = (level == dim_ - 1) ? last_segs_ : levels_[size_t(level)].segs;
    const Seg& s = segs[seg];
    if (hi <= s.lo || s.hi <= lo) return;
    if (lo <= s.lo && s.hi <= hi) {
        fn(seg);
        return;
    }
    if (s.left != kNone) {
        decompose(level, s.left, lo, hi, fn);
        decompose(level, s.right, lo, hi, fn);
    }
}

uint64_t RangeTree::count_struct(int level, uint32_t str_id, const Rect& q) const {
    const bool last = (level == dim_ - 1);
    const Structure& s = last ? last_structs_[str_id] : levels_[size_t(level)].structs[str_id];
    auto [i0, i1] = locate(level, s, q.lo[level], q.hi[level]);
    if (i0 >= i1) return 0;
    if (last) return i1 - i0;
    uint64_t total = 0;
    decompose(level, s.root, i0, i1,
              [&](uint32_t seg) { total += count_struct(level + 1, levels_[size_t(level)].segs[seg].assoc, q); });
    return total;
}

uint64_t RangeTree::count(const Rect& q) const {
    if (last_structs_.empty() && levels_.empty()) return 0;
    if (pts_ == nullptr || pts_->empty()) return 0;
    ++instr().point_accesses;
    if (q.empty()) return 0;
    return count_struct(0, 0, q);
}

uint32_t RangeTree::rep_struct(int level, uint32_t str_id, const Rect& q) const {
    const bool last = (level == dim_ - 1);
    const Structure& s = last ? last_structs_[str_id] : levels_[size_t(level)].structs[str_id];
    auto [i0, i1] = locate(level, s, q.lo[level], q.hi[level]);
    if (i0 >= i1) return kNone;
    uint32_t best = kNone;
    if (last) {
        decompose(level, s.root, i0, i1, [&](uint32_t seg) { best = std::min(best, last_minpid_[seg]); });
        return best;
    }
    decompose(level, s.root, i0, i1, [&](uint32_t seg) {
        best = std::min(best, rep_struct(level + 1, levels_[size_t(level)].segs[seg].assoc, q));
    });
    return best;
}

uint32_t RangeTree::report_min(const Rect& q) const {
    if (pts_ == nullptr || pts_->empty()) return kNone;
    ++instr().point_accesses;
    if (q.empty()) return kNone;
    return rep_struct(0, 0, q);
}

void RangeTree::ext_struct(int level, uint32_t str_id, const Rect& q, Rect& acc, bool& any) const {
    const bool last = (level == dim_ - 1);
    const Structure& s = last ? last_structs_[str_id] : levels_[size_t(level)].structs[str_id];
    auto [i0, i1] = locate(level, s, q.lo[level], q.hi[level]);
    if (i0 >= i1) return;
    if (last) {
        decompose(level, s.root, i0, i1, [&](uint32_t seg) {
            const auto& ext = last_extreme_[seg];
            for (int a = 0; a < dim_; ++a) {
                double mn = (*pts_)[ext[size_t(2 * a)]][a];
                double mx = (*pts_)[ext[size_t(2 * a + 1)]][a];
                if (!any) {
                    acc.lo[a] = mn;
                    acc.hi[a] = mx;
                } else {
                    acc.lo[a] = std::min(acc.lo[a], mn);
                    acc.hi[a] = std::max(acc.hi[a], mx);
                }
            }
            any = true;
        });
        return;
    }
    decompose(level, s.root, i0, i1,
              [&](uint32_t seg) { ext_struct(level + 1, levels_[size_t(level)].segs[seg].assoc, q, acc, any); });
}

std::optional<Rect> RangeTree::extremes(const Rect& q) const {
    if (pts_ == nullptr || pts_->empty()) return std::nullopt;
    ++instr().point_accesses;
    if (q.empty()) return std::nullopt;
    Rect acc;
    acc.dim = dim_;
    bool any = false;
    ext_struct(0, 0, q, acc, any);
    if (!any) return std::nullopt;
    return acc;
}

void RangeTree::canon_struct(int level, uint32_t str_id, const Rect& q, std::vector<uint32_t>& out) const {
    const bool last = (level == dim_ - 1);
    const Structure& s = last ? last_structs_[str_id] : levels_[size_t(level)].structs[str_id];
    auto [i0, i1] = locate(level, s, q.lo[level], q.hi[level]);
    if (i0 >= i1) return;
    if (last) {
        decompose(level, s.root, i0, i1, [&](uint32_t seg) { out.push_back(seg); });
        return;
    }
    decompose(level, s.root, i0, i1,
              [&](uint32_t seg) { canon_struct(level + 1, levels_[size_t(level)].segs[seg].assoc, q, out); });
}

std::vector<uint32_t> RangeTree::canonical_nodes(const Rect& q) const {
    std::vector<uint32_t> out;
    if (pts_ == nullptr || pts_->empty() || q.empty()) return out;
    ++instr().point_accesses;
    canon_struct(0, 0, q, out);
    return out;
}

}  // namespace rcq
