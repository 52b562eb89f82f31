#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rcq/geometry.hpp"
#include "rcq/solvers.hpp"

using namespace rcq;

namespace {

Point mk(double x, double y = 0, double z = 0) {
    Point p{};
    p[0] = x;
    p[1] = y;
    p[2] = z;
    return p;
}

// Reference bit interleaver: Z-order position of a cell among the 2^(d*level)
// cells of its level, axis 0 most significant within each group.
uint64_t ref_interleave(const CellId& c) {
    uint64_t pos = 0;
    for (int lev = 1; lev <= c.level; ++lev)
        for (int a = 0; a < c.dim; ++a)
            pos = (pos << 1) | ((c.c[size_t(a)] >> (c.level - lev)) & 1);
    return pos;
}

// Brute-force face classification: enumerate all faces of q by dimension and
// test intersection with the cell box.
int ref_min_face_dim(const Rect& cell, const Rect& q, int dim) {
    int best = dim + 1;
    // A face fixes a side (lo/hi) on a subset of axes.
    for (uint32_t sub = 1; sub < (1u << dim); ++sub) {
        int fixed = __builtin_popcount(sub);
        for (uint32_t sides = 0;; ++sides) {
            // iterate side choices over the fixed axes
            uint32_t s = sides;
            bool valid = true;
            Rect face = q;
            uint32_t bit = 0;
            for (int a = 0; a < dim; ++a) {
                if (!(sub & (1u << a))) continue;
                double v = ((s >> bit) & 1) ? q.hi[a] : q.lo[a];
                face.lo[a] = v;
                face.hi[a] = v;
                ++bit;
            }
            (void)valid;
            if (cell.intersects(face)) best = std::min(best, dim - fixed);
            if (sides + 1 >= (1u << fixed)) break;
        }
    }
    return best;
}

}  // namespace

TEST_CASE("sfloor and sceil on pinned values") {
    CHECK(sfloor(0.3).value() == 0.25);
    CHECK(sfloor(0.25).value() == 0.25);
    CHECK(sceil(0.3).value() == 0.5);
    CHECK(sceil(0.25).value() == 0.25);
    CHECK(sfloor(1.0).value() == 1.0);
}

TEST_CASE("sfloor/sceil sandwich over random draws") {
    Rng rng(42);
    for (int i = 0; i < 100000; ++i) {
        double x = rng.uniform();
        if (x <= 0.0) continue;
        double f = sfloor(x).value();
        double c = sceil(x).value();
        if (x >= std::ldexp(1.0, -kMaxLevel)) {
            CHECK(f <= x);
            CHECK(x < 2 * f);
        }
        if (x <= 1.0 && x >= std::ldexp(1.0, -kMaxLevel)) {
            CHECK(c / 2 < x);
            CHECK(x <= c);
        }
    }
}

TEST_CASE("cell_of_point pinned examples") {
    CellId c = cell_of_point(mk(0.3, 0.7), 1, 2);
    CHECK(c.c[0] == 0);
    CHECK(c.c[1] == 1);
    c = cell_of_point(mk(0.5, 0.5), 1, 2);
    CHECK(c.c[0] == 1);  // half-open cells: the boundary belongs to the upper cell
    CHECK(c.c[1] == 1);
    c = cell_of_point(mk(0.26, 0.01), 2, 2);
    CHECK(c.c[0] == 1);
    CHECK(c.c[1] == 0);
}

TEST_CASE("grid_cluster sizes") {
    CellId inner = cell_of_point(mk(0.5, 0.5), 3, 2);
    CHECK(grid_cluster(inner).size() == 9);
    CellId corner;
    corner.dim = 2;
    corner.level = 3;
    CHECK(grid_cluster(corner).size() == 4);
    CellId inner3 = cell_of_point(mk(0.5, 0.5, 0.5), 3, 3);
    CHECK(grid_cluster(inner3).size() == 27);
}

TEST_CASE("grid_cluster contains every point within one side length (L-inf)") {
    Rng rng(7);
    for (int t = 0; t < 2000; ++t) {
        int dim = 2 + int(rng.below(2));
        int lev = 1 + int(rng.below(6));
        Point a{};
        for (int i = 0; i < dim; ++i) a[i] = rng.uniform();
        CellId cell = cell_of_point(a, lev, dim);
        auto cluster = grid_cluster(cell);
        double side = cell.side();
        Point p{};
        for (int i = 0; i < dim; ++i) {
            double off = (rng.uniform() * 2.0 - 1.0) * side;
            p[i] = std::clamp(cell.lo(i) + rng.uniform() * side + off, 0.0, 1.0 - 1e-12);
        }
        bool within = true;
        for (int i = 0; i < dim; ++i) {
            double lo = cell.lo(i), hi = cell.hi(i);
            double d = std::max({lo - p[i], p[i] - hi, 0.0});
            if (d > side) within = false;
        }
        if (within) {
            bool found = false;
            for (const CellId& nb : cluster)
                if (cell_contains_point(nb, p)) found = true;
            CHECK(found);
        }
    }
}

TEST_CASE("morton_key pinned examples and interval nesting") {
    CellId root;
    root.dim = 2;
    root.level = 0;
    CHECK(morton_key(root).nbits == 0);  // the root interval covers everything

    CellId first;
    first.dim = 3;
    first.level = 1;
    ZKey k1 = morton_key(first);
    CHECK(k1.nbits == 3);
    CHECK(k1.bit(0) == 0);

    // d=2, level 2, coords (1,0): frozen from the reference interleaver.
    CellId c;
    c.dim = 2;
    c.level = 2;
    c.c[0] = 1;
    c.c[1] = 0;
    CHECK(ref_interleave(c) == 2);
    ZKey k = morton_key(c);
    uint64_t pos = 0;
    for (int i = 0; i < k.nbits; ++i) pos = (pos << 1) | uint64_t(k.bit(i));
    CHECK(pos == 2);
}

TEST_CASE("zkey relation equals geometric nesting/disjointness") {
    Rng rng(99);
    for (int t = 0; t < 5000; ++t) {
        int dim = 2 + int(rng.below(2));
        Point a{}, b{};
        for (int i = 0; i < dim; ++i) {
            a[i] = rng.uniform();
            b[i] = rng.uniform();
        }
        CellId ca = cell_of_point(a, int(rng.below(6)), dim);
        CellId cb = cell_of_point(b, int(rng.below(6)), dim);
        ZRel rel = zkey_relation(morton_key(ca), morton_key(cb));
        if (ca == cb) CHECK(rel == ZRel::Equal);
        else if (ca.contains_cell(cb)) CHECK(rel == ZRel::AContainsB);
        else if (cb.contains_cell(ca)) CHECK(rel == ZRel::BContainsA);
        else CHECK((rel == ZRel::ABefore || rel == ZRel::BBefore));
    }
}

TEST_CASE("classify_cell pinned examples") {
    Rect q;
    q.dim = 2;
    q.lo = mk(0.1, 0.1);
    q.hi = mk(0.9, 0.9);
    CellId cell = cell_of_point(mk(0.3, 0.3), 2, 2);  // [0.25,0.5]^2
    CHECK(classify_cell(cell, q).kind == FaceClass::Inside);
    cell = cell_of_point(mk(0.1, 0.1), 2, 2);  // [0,0.25]^2 contains corner (0.1,0.1)
    CHECK(classify_cell(cell, q).kind == FaceClass::Corner);
    cell = cell_of_point(mk(0.3, 0.1), 2, 2);  // crosses only the bottom edge
    FaceClass fc = classify_cell(cell, q);
    CHECK(fc.kind == FaceClass::AvoidsBelow);
    CHECK(fc.t == 1);
    CHECK(fc.witness == 0b01u);  // axis 0 avoided
}

TEST_CASE("classify_cell agrees with brute-force face enumeration") {
    Rng rng(5);
    for (int t = 0; t < 20000; ++t) {
        int dim = 2 + int(rng.below(2));
        Rect q;
        q.dim = dim;
        for (int i = 0; i < dim; ++i) {
            double x = rng.uniform(), y = rng.uniform();
            q.lo[i] = std::min(x, y);
            q.hi[i] = std::max(x, y);
        }
        Point a{};
        for (int i = 0; i < dim; ++i) a[i] = rng.uniform();
        CellId cell = cell_of_point(a, 1 + int(rng.below(5)), dim);
        Rect cb = cell.box();
        FaceClass fc = classify_cell(cell, q);
        if (!cb.intersects(q)) {
            CHECK(fc.kind == FaceClass::Outside);
            continue;
        }
        if (q.contains_rect(cb)) {
            CHECK(fc.kind == FaceClass::Inside);
            continue;
        }
        int mind = ref_min_face_dim(cb, q, dim);
        if (mind == 0) {
            CHECK(fc.kind == FaceClass::Corner);
        } else {
            REQUIRE(fc.kind == FaceClass::AvoidsBelow);
            CHECK(fc.t == mind);
            CHECK(__builtin_popcount(fc.witness) == fc.t);
            // No witness-axis facet may intersect the cell.
            for (int a2 = 0; a2 < dim; ++a2) {
                if (!(fc.witness & (1u << a2))) continue;
                CHECK(!(q.lo[a2] >= cb.lo[a2] && q.lo[a2] <= cb.hi[a2]));
                CHECK(!(q.hi[a2] >= cb.lo[a2] && q.hi[a2] <= cb.hi[a2]));
            }
        }
    }
}

TEST_CASE("normalize pinned examples and round trip") {
    {
        auto r = normalize({mk(0, 0), mk(2, 2)}, 2);
        REQUIRE(r.has_value());
        CHECK(r->norm.scale == doctest::Approx(2.0 * (1 + std::ldexp(1.0, -10))));
        for (const Point& p : r->points)
            for (int i = 0; i < 2; ++i) {
                CHECK(p[i] >= 0.0);
                CHECK(p[i] < 1.0);
            }
    }
    {
        auto r = normalize({mk(5, 7)}, 2);
        REQUIRE(r.has_value());
        CHECK(r->norm.scale == 1.0);
        CHECK(r->points[0][0] == 0.0);
        CHECK(r->points[0][1] == 0.0);
    }
    {
        std::vector<Point> raw = {mk(0, 0), mk(1, 0), mk(0, 3)};
        auto r = normalize(raw, 2);
        REQUIRE(r.has_value());
        CHECK(r->norm.scale == doctest::Approx(3.0 * (1 + std::ldexp(1.0, -10))));
        for (size_t i = 0; i < raw.size(); ++i) {
            Point back = r->norm.from_norm(r->points[i]);
            for (int a = 0; a < 2; ++a) CHECK(back[a] == doctest::Approx(raw[i][a]).epsilon(1e-12));
        }
    }
    CHECK(!normalize({}, 2).has_value());
    CHECK(!normalize({mk(std::nan(""), 0)}, 2).has_value());
}
