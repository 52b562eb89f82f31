#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace rcq {

inline constexpr int kMaxDim = 8;
// Cells below side 2^-50 are not split further; points that close are
// treated as coincident and carried with multiplicity.
inline constexpr int kMaxLevel = 50;

struct Point {
    std::array<double, kMaxDim> x{};

    double& operator[](int i) { return x[size_t(i)]; }
    double operator[](int i) const { return x[size_t(i)]; }
};

inline bool same_point(const Point& a, const Point& b, int dim) {
    for (int i = 0; i < dim; ++i)
        if (a[i] != b[i]) return false;
    return true;
}

double dist2(const Point& a, const Point& b, int dim);
double dist(const Point& a, const Point& b, int dim);

struct WeightedPoint {
    Point p;
    double w = 0.0;
    uint32_t pid = 0;  // id of the representative input point
};

// Closed axis-parallel box.
struct Rect {
    Point lo, hi;
    int dim = 0;

    bool contains(const Point& p) const {
        for (int i = 0; i < dim; ++i)
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
        return true;
    }
    bool intersects(const Rect& o) const {
        for (int i = 0; i < dim; ++i)
            if (hi[i] < o.lo[i] || o.hi[i] < lo[i]) return false;
        return true;
    }
    bool contains_rect(const Rect& o) const {
        for (int i = 0; i < dim; ++i)
            if (o.lo[i] < lo[i] || o.hi[i] > hi[i]) return false;
        return true;
    }
    static Rect intersect(const Rect& a, const Rect& b) {
        Rect r;
        r.dim = a.dim;
        for (int i = 0; i < a.dim; ++i) {
            r.lo[i] = std::max(a.lo[i], b.lo[i]);
            r.hi[i] = std::min(a.hi[i], b.hi[i]);
        }
        return r;
    }
    bool empty() const {
        for (int i = 0; i < dim; ++i)
            if (lo[i] > hi[i]) return true;
        return false;
    }
};

// A value 2^-e, represented exactly by its exponent.
struct StdLen {
    int e = 0;
    double value() const { return std::ldexp(1.0, -e); }
    bool operator==(const StdLen& o) const { return e == o.e; }
    bool operator<(const StdLen& o) const { return e > o.e; }  // smaller exponent = larger length
};

// Largest standard length <= x. Requires x > 0; exponent clamped to [0, kMaxLevel].
StdLen sfloor(double x);
// Smallest standard length >= x (clamped at 1 above, 2^-kMaxLevel below).
// For x not an exact power of two, sceil(x) < 2x, i.e. sceil(x) is the unique
// standard length in [x, 2x).
StdLen sceil(double x);

// A standard-quadtree cell: level plus integer grid coordinates in [0, 2^level).
struct CellId {
    int8_t dim = 0;
    int8_t level = 0;
    std::array<uint64_t, kMaxDim> c{};

    double side() const { return std::ldexp(1.0, -level); }
    double lo(int axis) const { return std::ldexp(double(c[size_t(axis)]), -level); }
    double hi(int axis) const { return std::ldexp(double(c[size_t(axis)]) + 1.0, -level); }
    Rect box() const {
        Rect r;
        r.dim = dim;
        for (int i = 0; i < dim; ++i) {
            r.lo[i] = lo(i);
            r.hi[i] = hi(i);
        }
        return r;
    }
    bool operator==(const CellId& o) const {
        if (dim != o.dim || level != o.level) return false;
        for (int i = 0; i < dim; ++i)
            if (c[size_t(i)] != o.c[size_t(i)]) return false;
        return true;
    }
    bool operator<(const CellId& o) const {
        if (level != o.level) return level < o.level;
        for (int i = 0; i < dim; ++i)
            if (c[size_t(i)] != o.c[size_t(i)]) return c[size_t(i)] < o.c[size_t(i)];
        return false;
    }
    // Ancestor cell at a coarser level.
    CellId ancestor(int lev) const {
        CellId a = *this;
        a.level = int8_t(lev);
        for (int i = 0; i < dim; ++i) a.c[size_t(i)] >>= (level - lev);
        return a;
    }
    // True iff this cell's box contains o's box (equivalently o is this or a descendant).
    bool contains_cell(const CellId& o) const {
        return level <= o.level && o.ancestor(level) == *this;
    }
};

// Cell of side 2^-level containing p under the half-open convention.
CellId cell_of_point(const Point& p, int level, int dim);

// Membership consistent with cell_of_point (half-open boxes, closed at the root top).
bool cell_contains_point(const CellId& cell, const Point& p);

// The <=3^d same-level cells sharing a face or corner with `cell` (cell included),
// clipped to the root square.
std::vector<CellId> grid_cluster(const CellId& cell);

// Z-order comparison of points on the level-kMaxLevel grid; ties by nothing
// (equal grid cells compare equal). Axis 0 contributes the most significant
// bit of each interleaved group.
std::array<uint64_t, kMaxDim> grid_coords(const Point& p, int dim);
int cmp_zorder(const std::array<uint64_t, kMaxDim>& a, const std::array<uint64_t, kMaxDim>& b, int dim);

// Bit-interleaved key of a cell: the Z-order position prefix. Keys order cells
// by leaf-interval start; prefix containment equals geometric nesting.
struct ZKey {
    int nbits = 0;
    std::array<uint64_t, 7> w{};  // MSB-first packed bits

    void push(int bit) {
        if (bit) w[size_t(nbits >> 6)] |= (uint64_t(1) << (63 - (nbits & 63)));
        ++nbits;
    }
    int bit(int i) const { return int((w[size_t(i >> 6)] >> (63 - (i & 63))) & 1); }
};

ZKey morton_key(const CellId& cell);

enum class ZRel { Equal, AContainsB, BContainsA, ABefore, BBefore };
ZRel zkey_relation(const ZKey& a, const ZKey& b);

// Classification of a cell against a closed query rectangle.
struct FaceClass {
    enum Kind { Inside, Corner, AvoidsBelow, Outside } kind = Outside;
    int t = 0;               // AvoidsBelow: minimal dimension of a face of q meeting the cell
    uint32_t witness = 0;    // AvoidsBelow: axis set I (bitmask), |I| = t, no I-facet meets the cell
};

FaceClass classify_cell(const CellId& cell, const Rect& q);
// Same classification for an arbitrary closed box instead of a quadtree cell.
FaceClass classify_box(const Rect& cell, const Rect& q);

// Maps the dataset bounding box into [0,1)^d with uniform scale and padding.
struct Normalizer {
    Point offset{};
    double scale = 1.0;
    int dim = 0;

    Point to_norm(const Point& p) const {
        Point r;
        for (int i = 0; i < dim; ++i) r[i] = (p[i] - offset[i]) / scale;
        return r;
    }
    Point from_norm(const Point& p) const {
        Point r;
        for (int i = 0; i < dim; ++i) r[i] = p[i] * scale + offset[i];
        return r;
    }
    // Query rectangles are clamped into the unit square; parts outside hold no points.
    Rect to_norm_clamped(const Rect& q) const {
        Rect r;
        r.dim = dim;
        for (int i = 0; i < dim; ++i) {
            r.lo[i] = std::max(0.0, (q.lo[i] - offset[i]) / scale);
            r.hi[i] = std::min(1.0, (q.hi[i] - offset[i]) / scale);
        }
        return r;
    }
};

struct NormalizeResult {
    Normalizer norm;
    std::vector<Point> points;
};

// Errors: empty input or non-finite coordinates are reported by returning nullopt.
std::optional<NormalizeResult> normalize(const std::vector<Point>& raw, int dim);

}  // namespace rcq
