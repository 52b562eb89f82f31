#include "rcq/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace rcq {

double dist2(const Point& a, const Point& b, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double dist(const Point& a, const Point& b, int dim) { return std::sqrt(dist2(a, b, dim)); }

StdLen sfloor(double x) {
    int e;
    std::frexp(x, &e);  // x = m * 2^e, m in [0.5, 1)
    int ex = 1 - e;     // sfloor(x) = 2^(e-1)
    ex = std::clamp(ex, 0, kMaxLevel);
    return StdLen{ex};
}

StdLen sceil(double x) {
    int e;
    double m = std::frexp(x, &e);
    int ex = (m == 0.5) ? (1 - e) : -e;
    ex = std::clamp(ex, 0, kMaxLevel);
    return StdLen{ex};
}

CellId cell_of_point(const Point& p, int level, int dim) {
    CellId cell;
    cell.dim = int8_t(dim);
    cell.level = int8_t(level);
    const uint64_t maxc = (level >= 63) ? ~uint64_t(0) : ((uint64_t(1) << level) - 1);
    for (int i = 0; i < dim; ++i) {
        double s = std::ldexp(p[i], level);
        double f = std::floor(s);
        uint64_t v = (f <= 0.0) ? 0 : uint64_t(f);
        cell.c[size_t(i)] = std::min(v, maxc);
    }
    return cell;
}

bool cell_contains_point(const CellId& cell, const Point& p) {
    return cell_of_point(p, cell.level, cell.dim) == cell;
}

std::vector<CellId> grid_cluster(const CellId& cell) {
    const int dim = cell.dim;
    const uint64_t maxc = (uint64_t(1) << cell.level) - 1;
    std::vector<CellId> out;
    std::array<int, kMaxDim> off{};
    off.fill(-1);
    for (;;) {
        CellId nb = cell;
        bool ok = true;
        for (int i = 0; i < dim && ok; ++i) {
            if (off[size_t(i)] < 0) {
                if (cell.c[size_t(i)] == 0) ok = false;
                else nb.c[size_t(i)] = cell.c[size_t(i)] - 1;
            } else if (off[size_t(i)] > 0) {
                if (cell.c[size_t(i)] == maxc) ok = false;
                else nb.c[size_t(i)] = cell.c[size_t(i)] + 1;
            }
        }
        if (ok) out.push_back(nb);
        int i = 0;
        while (i < dim && off[size_t(i)] == 1) off[size_t(i++)] = -1;
        if (i == dim) break;
        ++off[size_t(i)];
    }
    return out;
}

std::array<uint64_t, kMaxDim> grid_coords(const Point& p, int dim) {
    std::array<uint64_t, kMaxDim> g{};
    const uint64_t maxc = (uint64_t(1) << kMaxLevel) - 1;
    for (int i = 0; i < dim; ++i) {
        double s = std::ldexp(p[i], kMaxLevel);
        double f = std::floor(s);
        uint64_t v = (f <= 0.0) ? 0 : uint64_t(f);
        g[size_t(i)] = std::min(v, maxc);
    }
    return g;
}

namespace {
inline bool less_msb(uint64_t a, uint64_t b) { return a < b && a < (a ^ b); }
}  // namespace

int cmp_zorder(const std::array<uint64_t, kMaxDim>& a, const std::array<uint64_t, kMaxDim>& b, int dim) {
    int best = -1;
    uint64_t bestx = 0;
    for (int i = 0; i < dim; ++i) {
        uint64_t x = a[size_t(i)] ^ b[size_t(i)];
        if (x != 0 && (best < 0 || less_msb(bestx, x))) {
            best = i;
            bestx = x;
        }
    }
    if (best < 0) return 0;
    return a[size_t(best)] < b[size_t(best)] ? -1 : 1;
}

ZKey morton_key(const CellId& cell) {
    ZKey k;
    for (int lev = 1; lev <= cell.level; ++lev) {
        for (int i = 0; i < cell.dim; ++i) {
            k.push(int((cell.c[size_t(i)] >> (cell.level - lev)) & 1));
        }
    }
    return k;
}

ZRel zkey_relation(const ZKey& a, const ZKey& b) {
    int n = std::min(a.nbits, b.nbits);
    for (int i = 0; i < n; ++i) {
        int ab = a.bit(i), bb = b.bit(i);
        if (ab != bb) return ab < bb ? ZRel::ABefore : ZRel::BBefore;
    }
    if (a.nbits == b.nbits) return ZRel::Equal;
    return a.nbits < b.nbits ? ZRel::AContainsB : ZRel::BContainsA;
}

FaceClass classify_box(const Rect& cellbox, const Rect& q) {
    const int dim = q.dim;
    FaceClass fc;
    if (!cellbox.intersects(q)) {
        fc.kind = FaceClass::Outside;
        return fc;
    }
    if (q.contains_rect(cellbox)) {
        fc.kind = FaceClass::Inside;
        return fc;
    }
    // K = axes with a facet hyperplane of q crossing the cell's extent.
    int kcount = 0;
    uint32_t witness = 0;
    for (int i = 0; i < dim; ++i) {
        bool plane = (q.lo[i] >= cellbox.lo[i] && q.lo[i] <= cellbox.hi[i]) ||
                     (q.hi[i] >= cellbox.lo[i] && q.hi[i] <= cellbox.hi[i]);
        if (plane) ++kcount;
        else witness |= (uint32_t(1) << i);
    }
    if (kcount == dim) {
        fc.kind = FaceClass::Corner;
        return fc;
    }
    fc.kind = FaceClass::AvoidsBelow;
    fc.t = dim - kcount;
    fc.witness = witness;
    return fc;
}

FaceClass classify_cell(const CellId& cell, const Rect& q) { return classify_box(cell.box(), q); }

std::optional<NormalizeResult> normalize(const std::vector<Point>& raw, int dim) {
    if (raw.empty() || dim < 1 || dim > kMaxDim) return std::nullopt;
    Point lo = raw[0], hi = raw[0];
    for (const Point& p : raw) {
        for (int i = 0; i < dim; ++i) {
            if (!std::isfinite(p[i])) return std::nullopt;
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    }
    double ext = 0.0;
    for (int i = 0; i < dim; ++i) ext = std::max(ext, hi[i] - lo[i]);

    NormalizeResult res;
    res.norm.dim = dim;
    res.norm.offset = lo;
    // Pad so no point lands on the closed upper root boundary.
    res.norm.scale = (ext == 0.0) ? 1.0 : ext * (1.0 + std::ldexp(1.0, -10));
    res.points.reserve(raw.size());
    for (const Point& p : raw) res.points.push_back(res.norm.to_norm(p));
    return res;
}

}  // namespace rcq
