#include "rcq/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace rcq {
namespace oracle {

uint64_t scan_count(std::span<const Point> pts, const Rect& q, int dim) {
    uint64_t c = 0;
    for (const Point& p : pts) {
        bool in = true;
        for (int a = 0; a < dim && in; ++a) in = p[a] >= q.lo[a] && p[a] <= q.hi[a];
        c += in ? 1 : 0;
    }
    return c;
}

std::optional<Rect> scan_extremes(std::span<const Point> pts, const Rect& q, int dim) {
    Rect r;
    r.dim = dim;
    bool any = false;
    for (const Point& p : pts) {
        if (!q.contains(p)) continue;
        if (!any) {
            r.lo = p;
            r.hi = p;
            any = true;
        } else {
            for (int a = 0; a < dim; ++a) {
                r.lo[a] = std::min(r.lo[a], p[a]);
                r.hi[a] = std::max(r.hi[a], p[a]);
            }
        }
    }
    if (!any) return std::nullopt;
    return r;
}

uint64_t scan_count_cell(std::span<const Point> pts, const Rect& q, const CellId& cell, int dim) {
    uint64_t c = 0;
    for (const Point& p : pts)
        if (q.contains(p) && cell_of_point(p, cell.level, dim) == cell) ++c;
    return c;
}

std::vector<uint32_t> scan_members(std::span<const Point> pts, const Rect& q, int dim) {
    std::vector<uint32_t> out;
    for (uint32_t i = 0; i < pts.size(); ++i) {
        bool in = true;
        for (int a = 0; a < dim && in; ++a) in = pts[i][a] >= q.lo[a] && pts[i][a] <= q.hi[a];
        if (in) out.push_back(i);
    }
    return out;
}

double scan_rstar(std::span<const Point> pts, const Rect& q, std::span<const Point> centers,
                  int dim) {
    double worst = 0.0;
    for (const Point& p : pts) {
        if (!q.contains(p)) continue;
        double best = -1.0;
        for (const Point& c : centers) {
            double d = dist2(p, c, dim);
            if (best < 0.0 || d < best) best = d;
        }
        if (best > worst) worst = best;
    }
    return worst <= 0.0 ? 0.0 : std::sqrt(worst);
}

double scan_diameter(std::span<const Point> pts, const Rect& q, int dim) {
    std::vector<uint32_t> ids = scan_members(pts, q, dim);
    double best = 0.0;
    for (size_t i = 0; i < ids.size(); ++i)
        for (size_t j = i + 1; j < ids.size(); ++j)
            best = std::max(best, dist2(pts[ids[i]], pts[ids[j]], dim));
    return std::sqrt(best);
}

double phi_reference(std::span<const WeightedPoint> pts, std::span<const Point> centers,
                     CostKind kind, int dim) {
    double acc = 0.0;
    for (const WeightedPoint& wp : pts) {
        if (wp.w <= 0.0) continue;
        double best = -1.0;
        for (const Point& c : centers) {
            double s = 0.0;
            for (int a = 0; a < dim; ++a) s += (wp.p[a] - c[a]) * (wp.p[a] - c[a]);
            if (best < 0.0 || s < best) best = s;
        }
        double d = std::sqrt(std::max(0.0, best));
        if (kind == CostKind::Median) acc += wp.w * d;
        else if (kind == CostKind::Means) acc += wp.w * d * d;
        else acc = std::max(acc, d);
    }
    return acc;
}

}  // namespace oracle
}  // namespace rcq
