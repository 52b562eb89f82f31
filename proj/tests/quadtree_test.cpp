#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "rcq/quadtree.hpp"
#include "rcq/solvers.hpp"

using namespace rcq;

namespace {

Point mk(double x, double y) {
    Point p{};
    p[0] = x;
    p[1] = y;
    return p;
}

CompressedQuadtree build_from(std::vector<Point> raw, int dim) {
    auto perm = zorder_permutation(raw, dim);
    std::vector<Point> sorted(raw.size());
    for (size_t i = 0; i < perm.size(); ++i) sorted[i] = raw[perm[i]];
    std::vector<double> w(raw.size(), 1.0);
    return CompressedQuadtree::build(sorted, w, dim);
}

std::vector<Point> random_points(Rng& rng, size_t n, int dim) {
    std::vector<Point> pts(n);
    for (auto& p : pts)
        for (int i = 0; i < dim; ++i) p[i] = rng.uniform();
    return pts;
}

// Reference structure: standard quadtree built by repeated subdivision, then
// single-child chains contracted. Returns the set of (level, coords) cells.
void ref_compressed_cells(const std::vector<Point>& pts, const CellId& cell,
                          std::set<std::pair<int, std::array<uint64_t, kMaxDim>>>& out, int dim) {
    std::vector<Point> inside;
    for (const Point& p : pts)
        if (cell_of_point(p, cell.level, dim) == cell) inside.push_back(p);
    if (inside.empty()) return;
    // Smallest cell containing the same point set.
    CellId cur = cell;
    for (;;) {
        if (cur.level == kMaxLevel) break;
        // count children with points
        std::map<std::array<uint64_t, kMaxDim>, int> kids;
        for (const Point& p : inside) kids[cell_of_point(p, cur.level + 1, dim).c]++;
        if (kids.size() != 1) break;
        cur = cell_of_point(inside[0], cur.level + 1, dim);
    }
    out.insert({cur.level, cur.c});
    if (cur.level == kMaxLevel) return;
    bool multi = false;
    {
        std::map<std::array<uint64_t, kMaxDim>, int> kids;
        for (const Point& p : inside) kids[cell_of_point(p, cur.level + 1, dim).c]++;
        multi = kids.size() > 1;
    }
    if (!multi) return;
    for (uint32_t code = 0; code < (1u << dim); ++code) {
        CellId ch;
        ch.dim = int8_t(dim);
        ch.level = int8_t(cur.level + 1);
        for (int i = 0; i < dim; ++i)
            ch.c[size_t(i)] = (cur.c[size_t(i)] << 1) + ((code >> (dim - 1 - i)) & 1);
        ref_compressed_cells(inside, ch, out, dim);
    }
}

}  // namespace

TEST_CASE("two far points contract to a root with two leaves") {
    auto t = build_from({mk(0.1, 0.1), mk(0.9, 0.9)}, 2);
    const QtNode& root = t.node(t.root());
    CHECK(root.child_count == 2);
    CHECK(t.node(t.child(root, 0)).leaf());
    CHECK(t.node(t.child(root, 1)).leaf());
    CHECK(t.nodes().size() == 3);
}

TEST_CASE("equal points merge into a single leaf with multiplicity") {
    std::vector<Point> raw(17, mk(0.37, 0.61));
    auto t = build_from(raw, 2);
    CHECK(t.nodes().size() == 1);
    CHECK(t.node(t.root()).leaf());
    CHECK(t.node(t.root()).weight == doctest::Approx(17.0));
    CHECK(t.node(t.root()).raw_count() == 17);
}

TEST_CASE("8x8 grid structure matches the contracted reference builder") {
    std::vector<Point> raw;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) raw.push_back(mk((i + 0.5) / 8.0, (j + 0.5) / 8.0));
    auto t = build_from(raw, 2);
    CHECK(t.nodes().size() <= 2 * raw.size());

    std::set<std::pair<int, std::array<uint64_t, kMaxDim>>> want;
    CellId root;
    root.dim = 2;
    ref_compressed_cells(raw, root, want, 2);
    std::set<std::pair<int, std::array<uint64_t, kMaxDim>>> got;
    for (const QtNode& n : t.nodes()) got.insert({n.cell.level, n.cell.c});
    CHECK(got == want);
}

TEST_CASE("invariants on random data") {
    Rng rng(13);
    for (int trial = 0; trial < 4; ++trial) {
        int dim = 2 + int(trial % 2);
        auto raw = random_points(rng, 2000, dim);
        auto perm = zorder_permutation(raw, dim);
        std::vector<Point> sorted(raw.size());
        for (size_t i = 0; i < perm.size(); ++i) sorted[i] = raw[perm[i]];
        std::vector<double> w(raw.size(), 1.0);
        auto t = CompressedQuadtree::build(sorted, w, dim);
        CHECK(t.nodes().size() <= 2 * raw.size());
        for (const QtNode& n : t.nodes()) {
            CHECK(n.child_count != 1);
            // Z-order contiguity: slice equals brute-force cell membership.
            uint64_t cnt = 0;
            for (const Point& p : sorted)
                if (cell_of_point(p, n.cell.level, dim) == n.cell) ++cnt;
            CHECK(cnt == n.raw_count());
            for (uint32_t pid = n.pid_begin; pid < n.pid_end; ++pid)
                CHECK(cell_of_point(t.point(pid), n.cell.level, dim) == n.cell);
            // Facet-closest points are the coordinate extremes of the slice.
            for (int a = 0; a < dim; ++a) {
                double lo = 1e9, hi = -1e9;
                for (uint32_t pid = n.pid_begin; pid < n.pid_end; ++pid) {
                    lo = std::min(lo, t.point(pid)[a]);
                    hi = std::max(hi, t.point(pid)[a]);
                }
                CHECK(t.point(n.facet_pid[size_t(2 * a)])[a] == lo);
                CHECK(t.point(n.facet_pid[size_t(2 * a + 1)])[a] == hi);
            }
        }
    }
}

TEST_CASE("compressed_cell matches brute force and is idempotent") {
    Rng rng(31);
    int dim = 2;
    auto raw = random_points(rng, 500, dim);
    auto t = build_from(raw, dim);
    CellId root;
    root.dim = 2;
    CHECK(t.compressed_cell(root) == t.root());

    for (int trial = 0; trial < 3000; ++trial) {
        Point a{};
        for (int i = 0; i < dim; ++i) a[i] = rng.uniform();
        CellId cell = cell_of_point(a, int(rng.below(9)), dim);
        auto node = t.compressed_cell(cell);
        // Oracle: points inside the cell.
        std::vector<uint32_t> want;
        for (uint32_t pid = 0; pid < raw.size(); ++pid)
            if (cell_of_point(t.point(pid), cell.level, dim) == cell) want.push_back(pid);
        if (want.empty()) {
            CHECK(!node.has_value());
        } else {
            REQUIRE(node.has_value());
            const QtNode& n = t.node(*node);
            CHECK(n.pid_begin == want.front());
            CHECK(n.pid_end == want.back() + 1);
            CHECK(n.raw_count() == want.size());
            // Idempotence: looking up the returned node's own cell yields it again.
            CHECK(t.compressed_cell(n.cell) == *node);
        }
    }
}

TEST_CASE("subdivide_to_side pinned and random behavior") {
    Rng rng(77);
    int dim = 2;
    auto raw = random_points(rng, 800, dim);
    auto t = build_from(raw, dim);

    // target = node side: the node's own cell.
    const QtNode& root = t.node(t.root());
    auto cells = t.subdivide_to_side(t.root(), root.cell.level, nullptr);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].cell == root.cell);

    for (int trial = 0; trial < 200; ++trial) {
        Rect clip;
        clip.dim = dim;
        for (int i = 0; i < dim; ++i) {
            double x = rng.uniform(), y = rng.uniform();
            clip.lo[i] = std::min(x, y);
            clip.hi[i] = std::max(x, y);
        }
        int target = int(rng.below(8));
        auto out = t.subdivide_to_side(t.root(), target, &clip);
        // Pairwise interior-disjoint.
        for (size_t i = 0; i < out.size(); ++i)
            for (size_t j = i + 1; j < out.size(); ++j) {
                CHECK(!out[i].cell.contains_cell(out[j].cell));
                CHECK(!out[j].cell.contains_cell(out[i].cell));
            }
        // Exactly the points of slice∩clip are covered.
        std::set<uint32_t> covered;
        for (const auto& cr : out) {
            CHECK(cr.cell.box().intersects(clip));
            CHECK(int(cr.cell.level) >= std::min<int>(target, t.node(t.root()).cell.level));
            const QtNode& n = t.node(cr.node);
            for (uint32_t pid = n.pid_begin; pid < n.pid_end; ++pid) covered.insert(pid);
        }
        for (uint32_t pid = 0; pid < raw.size(); ++pid)
            if (clip.contains(t.point(pid))) CHECK(covered.count(pid) == 1);
    }
}
