#include "rcq/persistent.hpp"

#include <algorithm>
#include <cassert>

namespace rcq {

Instrumentation& instr() {
    thread_local Instrumentation inst;
    return inst;
}

uint32_t PersistentStore::mknode(uint32_t pid, int level) {
    uint32_t id = uint32_t(nodes_.size());
    Node n;
    n.size = 1;
    n.pid = pid;
    n.min_pid = pid;
    if (level + 1 < int(axes_.size())) {
        nodes_.push_back(n);  // reserve slot before recursive allocation
        uint32_t a = build_range(&pid, 1, level + 1);
        nodes_[id].assoc = a;
        return id;
    }
    nodes_.push_back(n);
    return id;
}

uint32_t PersistentStore::build_range(const uint32_t* pids, uint32_t n, int level) {
    if (n == 0) return kNone;
    uint32_t mid = n / 2;
    Node nd;
    nd.pid = pids[mid];
    nd.size = n;
    uint32_t id = uint32_t(nodes_.size());
    nodes_.push_back(nd);
    uint32_t l = build_range(pids, mid, level);
    uint32_t r = build_range(pids + mid + 1, n - mid - 1, level);
    uint32_t mp = pids[mid];
    if (l != kNone) mp = std::min(mp, nodes_[l].min_pid);
    if (r != kNone) mp = std::min(mp, nodes_[r].min_pid);
    uint32_t assoc = kNone;
    if (level + 1 < int(axes_.size())) {
        std::vector<uint32_t> copy(pids, pids + n);
        std::sort(copy.begin(), copy.end(), [&](uint32_t a, uint32_t b) { return key_less(a, b, level + 1); });
        assoc = build_range(copy.data(), n, level + 1);
    }
    Node& out = nodes_[id];
    out.left = l;
    out.right = r;
    out.min_pid = mp;
    out.assoc = assoc;
    return id;
}

uint32_t PersistentStore::build_sorted(const std::vector<uint32_t>& pids, int level) {
    return build_range(pids.data(), uint32_t(pids.size()), level);
}

uint32_t PersistentStore::build(std::vector<uint32_t> pids, int level) {
    std::sort(pids.begin(), pids.end(), [&](uint32_t a, uint32_t b) { return key_less(a, b, level); });
    return build_range(pids.data(), uint32_t(pids.size()), level);
}

void PersistentStore::collect(uint32_t nd, std::vector<uint32_t>& out) const {
    if (nd == kNone) return;
    collect(nodes_[nd].left, out);
    out.push_back(nodes_[nd].pid);
    collect(nodes_[nd].right, out);
}

uint32_t PersistentStore::rebuild(uint32_t nd, int level) {
    std::vector<uint32_t> pids;
    pids.reserve(nodes_[nd].size);
    collect(nd, pids);
    return build_range(pids.data(), uint32_t(pids.size()), level);
}

uint32_t PersistentStore::insert(uint32_t root, uint32_t pid, int level) {
    if (root == kNone) return mknode(pid, level);
    const Node src = nodes_[root];
    uint32_t id = uint32_t(nodes_.size());
    Node n = src;
    n.size = src.size + 1;
    n.min_pid = std::min(src.min_pid, pid);
    nodes_.push_back(n);
    if (level + 1 < int(axes_.size()))
        nodes_[id].assoc = insert(src.assoc, pid, level + 1);
    if (key_less(pid, src.pid, level)) {
        uint32_t l = insert(src.left, pid, level);
        nodes_[id].left = l;
    } else {
        uint32_t r = insert(src.right, pid, level);
        nodes_[id].right = r;
    }
    // Weight balance: rebuild when one side holds more than ~72% of the subtree.
    const Node& cur = nodes_[id];
    uint32_t ls = subtree_size(cur.left), rs = subtree_size(cur.right);
    uint32_t total = cur.size;
    if (total >= 8 && (4 * (ls + 1) > 3 * (total + 1) || 4 * (rs + 1) > 3 * (total + 1)))
        return rebuild(id, level);
    return id;
}

bool PersistentStore::point_in_suffix(uint32_t pid, int from_level, const double* lo, const double* hi) const {
    for (int l = from_level; l < int(axes_.size()); ++l) {
        double v = key(pid, l);
        if (v < lo[l] || v > hi[l]) return false;
    }
    return true;
}

uint64_t PersistentStore::full_count(uint32_t nd, int next_level, const double* lo, const double* hi) const {
    if (nd == kNone) return 0;
    if (next_level >= int(axes_.size())) return nodes_[nd].size;
    return count_rec(nodes_[nd].assoc, next_level, lo, hi);
}

uint64_t PersistentStore::count_ge(uint32_t nd, int level, const double* lo, const double* hi) const {
    if (nd == kNone) return 0;
    const Node& n = nodes_[nd];
    if (key(n.pid, level) >= lo[level]) {
        uint64_t c = count_ge(n.left, level, lo, hi);
        if (point_in_suffix(n.pid, level + 1, lo, hi)) ++c;
        return c + full_count(n.right, level + 1, lo, hi);
    }
    return count_ge(n.right, level, lo, hi);
}

uint64_t PersistentStore::count_le(uint32_t nd, int level, const double* lo, const double* hi) const {
    if (nd == kNone) return 0;
    const Node& n = nodes_[nd];
    if (key(n.pid, level) <= hi[level]) {
        uint64_t c = count_le(n.right, level, lo, hi);
        if (point_in_suffix(n.pid, level + 1, lo, hi)) ++c;
        return c + full_count(n.left, level + 1, lo, hi);
    }
    return count_le(n.left, level, lo, hi);
}

uint64_t PersistentStore::count_rec(uint32_t nd, int level, const double* lo, const double* hi) const {
    if (nd == kNone) return 0;
    const Node& n = nodes_[nd];
    double v = key(n.pid, level);
    if (v < lo[level]) return count_rec(n.right, level, lo, hi);
    if (v > hi[level]) return count_rec(n.left, level, lo, hi);
    uint64_t c = count_ge(n.left, level, lo, hi) + count_le(n.right, level, lo, hi);
    if (point_in_suffix(n.pid, level + 1, lo, hi)) ++c;
    return c;
}

uint64_t PersistentStore::count(uint32_t root, const double* lo, const double* hi) const {
    return count_rec(root, 0, lo, hi);
}

uint32_t PersistentStore::full_rep(uint32_t nd, int next_level, const double* lo, const double* hi) const {
    if (nd == kNone) return kNone;
    if (next_level >= int(axes_.size())) return nodes_[nd].min_pid;
    return rep_rec(nodes_[nd].assoc, next_level, lo, hi);
}

uint32_t PersistentStore::rep_ge(uint32_t nd, int level, const double* lo, const double* hi) const {
    if (nd == kNone) return kNone;
    const Node& n = nodes_[nd];
    if (key(n.pid, level) >= lo[level]) {
        uint32_t best = rep_ge(n.left, level, lo, hi);
        if (point_in_suffix(n.pid, level + 1, lo, hi)) best = std::min(best, n.pid);
        return std::min(best, full_rep(n.right, level + 1, lo, hi));
    }
    return rep_ge(n.right, level, lo, hi);
}

uint32_t PersistentStore::rep_le(uint32_t nd, int level, const double* lo, const double* hi) const {
    if (nd == kNone) return kNone;
    const Node& n = nodes_[nd];
    if (key(n.pid, level) <= hi[level]) {
        uint32_t best = rep_le(n.right, level, lo, hi);
        if (point_in_suffix(n.pid, level + 1, lo, hi)) best = std::min(best, n.pid);
        return std::min(best, full_rep(n.left, level + 1, lo, hi));
    }
    return rep_le(n.left, level, lo, hi);
}

uint32_t PersistentStore::rep_rec(uint32_t nd, int level, const double* lo, const double* hi) const {
    if (nd == kNone) return kNone;
    const Node& n = nodes_[nd];
    double v = key(n.pid, level);
    if (v < lo[level]) return rep_rec(n.right, level, lo, hi);
    if (v > hi[level]) return rep_rec(n.left, level, lo, hi);
    uint32_t best = std::min(rep_ge(n.left, level, lo, hi), rep_le(n.right, level, lo, hi));
    if (point_in_suffix(n.pid, level + 1, lo, hi)) best = std::min(best, n.pid);
    return best;
}

uint32_t PersistentStore::report_min(uint32_t root, const double* lo, const double* hi) const {
    return rep_rec(root, 0, lo, hi);
}

uint32_t PersistentStore::extreme(uint32_t root, double lo, double hi, bool want_max) const {
    uint32_t best = kNone;
    uint32_t nd = root;
    while (nd != kNone) {
        const Node& n = nodes_[nd];
        double v = key(n.pid, 0);
        if (want_max) {
            if (v > hi) nd = n.left;
            else {
                if (v >= lo) best = nd;
                nd = n.right;
            }
        } else {
            if (v < lo) nd = n.right;
            else {
                if (v <= hi) best = nd;
                nd = n.left;
            }
        }
    }
    return best == kNone ? kNone : nodes_[best].pid;
}

// ---------------------------------------------------------------------------

namespace {

// Children of a node ordered with the heaviest (by raw count) first; ties keep
// the earlier (lower Morton) child first.
std::vector<uint32_t> children_heaviest_first(const CompressedQuadtree& t, const QtNode& n) {
    std::vector<uint32_t> kids(n.child_count);
    for (uint32_t i = 0; i < n.child_count; ++i) kids[i] = t.child(n, i);
    uint32_t best = 0;
    for (uint32_t i = 1; i < kids.size(); ++i)
        if (t.node(kids[i]).raw_count() > t.node(kids[best]).raw_count()) best = i;
    std::swap(kids[0], kids[best]);
    return kids;
}

}  // namespace

void ProjectionTables::build(const CompressedQuadtree& t, const std::vector<Point>& pts, int dim) {
    dim_ = dim;
    insertions_ = 0;
    tables_.clear();
    table_of_mask_.assign(size_t(1) << dim, -1);
    if (t.empty()) return;
    for (uint32_t mask = 1; mask < (uint32_t(1) << dim); ++mask) {
        int pc = __builtin_popcount(mask);
        if (pc < 1 || pc > dim - 1) continue;
        table_of_mask_[mask] = int(tables_.size());
        Table tab;
        for (int a = 0; a < dim; ++a)
            if (!(mask & (uint32_t(1) << a))) tab.axes.push_back(a);
        tab.store = PersistentStore(&pts, tab.axes);
        tab.roots.assign(t.nodes().size(), kNone);
        tables_.push_back(std::move(tab));
    }

    // Bottom-up (postorder); node ids from the builder are preorder, so a
    // reverse sweep sees children before parents.
    const auto& nodes = t.nodes();
    for (uint32_t id = uint32_t(nodes.size()); id-- > 0;) {
        const QtNode& n = nodes[id];
        if (n.leaf()) {
            std::vector<uint32_t> pids(n.raw_count());
            for (uint32_t p = 0; p < pids.size(); ++p) pids[p] = n.pid_begin + p;
            for (Table& tab : tables_) tab.roots[id] = tab.store.build(pids, 0);
            continue;
        }
        auto kids = children_heaviest_first(t, n);
        bool counted = false;
        for (Table& tab : tables_) {
            uint32_t root = tab.roots[kids[0]];
            for (uint32_t i = 1; i < kids.size(); ++i) {
                const QtNode& kn = nodes[kids[i]];
                for (uint32_t p = kn.pid_begin; p < kn.pid_end; ++p) {
                    root = tab.store.insert(root, p, 0);
                    if (!counted) ++insertions_;
                }
            }
            counted = true;  // identical insert count for every table
            tab.roots[id] = root;
        }
    }
}

uint64_t ProjectionTables::count(uint32_t node, const Rect& q, uint32_t witness_mask) const {
    int ti = table_of_mask_[witness_mask];
    assert(ti >= 0);
    const Table& tab = tables_[size_t(ti)];
    ++instr().point_accesses;
    double lo[kMaxDim], hi[kMaxDim];
    for (size_t l = 0; l < tab.axes.size(); ++l) {
        lo[l] = q.lo[tab.axes[l]];
        hi[l] = q.hi[tab.axes[l]];
    }
    return tab.store.count(tab.roots[node], lo, hi);
}

bool ProjectionTables::empty(uint32_t node, const Rect& q, uint32_t witness_mask) const {
    return count(node, q, witness_mask) == 0;
}

uint32_t ProjectionTables::report_min(uint32_t node, const Rect& q, uint32_t witness_mask) const {
    int ti = table_of_mask_[witness_mask];
    assert(ti >= 0);
    const Table& tab = tables_[size_t(ti)];
    ++instr().point_accesses;
    double lo[kMaxDim], hi[kMaxDim];
    for (size_t l = 0; l < tab.axes.size(); ++l) {
        lo[l] = q.lo[tab.axes[l]];
        hi[l] = q.hi[tab.axes[l]];
    }
    return tab.store.report_min(tab.roots[node], lo, hi);
}

// ---------------------------------------------------------------------------

void AxisExtremeTables::build(const std::vector<Point>& pts, int dim) {
    dim_ = dim;
    axes_.clear();
    axes_.resize(size_t(dim));
    for (int axis = 0; axis < dim; ++axis) {
        PerAxis& pa = axes_[size_t(axis)];
        // Project out `axis`: remaining coordinates shift down.
        std::vector<Point> proj(pts.size());
        for (size_t i = 0; i < pts.size(); ++i) {
            int c = 0;
            for (int a = 0; a < dim; ++a)
                if (a != axis) proj[i][c++] = pts[i][a];
        }
        pa.perm = zorder_permutation(proj, dim - 1);
        std::vector<Point> sorted(proj.size());
        std::vector<double> w(proj.size(), 1.0);
        for (size_t i = 0; i < pa.perm.size(); ++i) sorted[i] = proj[pa.perm[i]];
        pa.tree = CompressedQuadtree::build(sorted, w, dim - 1);
        pa.keyspace = pts;  // keys are original coordinates, indexed by original pid

        // The persistent trees are keyed by the dropped coordinate of the
        // pre-image point; stored pids are projected (z-order) ids mapped
        // through perm at key-lookup time. To keep PersistentStore simple we
        // instead key directly on a point table re-indexed by projected pid.
        std::vector<Point> keyed(pts.size());
        for (size_t i = 0; i < pa.perm.size(); ++i) keyed[i] = pts[pa.perm[i]];
        pa.keyspace = std::move(keyed);
        pa.store = PersistentStore(&pa.keyspace, {axis});
        pa.roots.assign(pa.tree.nodes().size(), kNone);
        const auto& nodes = pa.tree.nodes();
        for (uint32_t id = uint32_t(nodes.size()); id-- > 0;) {
            const QtNode& n = nodes[id];
            if (n.leaf()) {
                std::vector<uint32_t> pids(n.raw_count());
                for (uint32_t p = 0; p < pids.size(); ++p) pids[p] = n.pid_begin + p;
                pa.roots[id] = pa.store.build(pids, 0);
                continue;
            }
            auto kids = children_heaviest_first(pa.tree, n);
            uint32_t root = pa.roots[kids[0]];
            for (uint32_t i = 1; i < kids.size(); ++i) {
                const QtNode& kn = nodes[kids[i]];
                for (uint32_t p = kn.pid_begin; p < kn.pid_end; ++p) root = pa.store.insert(root, p, 0);
            }
            pa.roots[id] = root;
        }
    }
}

uint32_t AxisExtremeTables::extreme(int axis, uint32_t proj_node, double lo, double hi, bool want_max) const {
    const PerAxis& pa = axes_[size_t(axis)];
    ++instr().point_accesses;
    uint32_t ppid = pa.store.extreme(pa.roots[proj_node], lo, hi, want_max);
    return ppid == kNone ? kNone : pa.perm[ppid];
}

}  // namespace rcq
