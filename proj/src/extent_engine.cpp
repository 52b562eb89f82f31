#include "rcq/extent_engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

#include "rcq/solvers.hpp"

namespace rcq {

namespace {

// Projection of a full-dimensional rect orthogonally to `axis`.
Rect project_rect(const Rect& r, int axis) {
    Rect p;
    p.dim = r.dim - 1;
    int c = 0;
    for (int a = 0; a < r.dim; ++a) {
        if (a == axis) continue;
        p.lo[c] = r.lo[a];
        p.hi[c] = r.hi[a];
        ++c;
    }
    return p;
}

}  // namespace

ExtentCoreset extent_coreset(const IndexDispatch& disp, const AxisExtremeTables& aet,
                             const Rect& q, double eps, const ExtentConfig& cfg) {
    ExtentCoreset cs;
    const CompressedQuadtree& t = *disp.qt;
    const int dim = t.dim();
    auto meb_opt = disp.rt->extremes(q);
    if (!meb_opt) return cs;  // empty range
    const Rect meb = *meb_opt;
    double apx2 = 0.0;
    for (int a = 0; a < dim; ++a) {
        double e = meb.hi[a] - meb.lo[a];
        apx2 += e * e;
    }
    cs.apx = std::sqrt(apx2);
    if (cs.apx == 0.0) {
        cs.exact = true;
        uint32_t pid = disp.report_in_q(t.root(), q);
        if (pid != kNone) cs.pids.push_back(pid);
        return cs;
    }
    const double eps_eff = std::min(eps, 1.0);
    cs.grid_side = sfloor(std::min(1.0, eps_eff * cs.apx / (cfg.calibration * double(dim))));
    const double gamma = cs.grid_side.value();
    const int glev = cs.grid_side.e;

    std::vector<uint32_t> pids;

    // Boundary pass: grid cells meeting a facet of the MEB, enumerated through
    // the quadtree so only nonempty cells are touched.
    for (int a = 0; a < dim; ++a) {
        for (int side = 0; side < 2; ++side) {
            Rect slab = meb;
            double v = (side == 0) ? meb.lo[a] : meb.hi[a];
            slab.lo[a] = v;
            slab.hi[a] = v;
            t.subdivide_visit(t.root(), glev, &slab, [&](const CellId&, uint32_t node) {
                if (!disp.empty_in_q(node, q)) {
                    uint32_t pid = disp.report_in_q(node, q);
                    if (pid != kNone) pids.push_back(pid);
                }
                return true;
            });
        }
    }

    // Interior box Q': the union of grid cells fully inside the MEB.
    Rect qprime;
    qprime.dim = dim;
    bool has_interior = true;
    for (int a = 0; a < dim; ++a) {
        double lo = std::ceil(meb.lo[a] / gamma) * gamma;
        double hi = std::floor(meb.hi[a] / gamma) * gamma;
        if (hi - lo < gamma) {
            has_interior = false;
            break;
        }
        qprime.lo[a] = lo;
        qprime.hi[a] = hi;
    }
    if (has_interior) {
        for (int axis = 0; axis < dim; ++axis) {
            const CompressedQuadtree& pt = aet.projected_tree(axis);
            if (pt.empty()) continue;
            Rect col_clip = project_rect(qprime, axis);
            // Shrink by half a cell on both sides: with the grid-aligned Q',
            // exactly the columns fully inside proj(Q') survive the clip.
            for (int a = 0; a < dim - 1; ++a) {
                col_clip.lo[a] += gamma / 2;
                col_clip.hi[a] -= gamma / 2;
            }
            double wlo = qprime.lo[axis], whi = qprime.hi[axis];
            pt.subdivide_visit(pt.root(), glev, &col_clip, [&](const CellId&, uint32_t node) {
                uint32_t pmax = aet.extreme(axis, node, wlo, whi, true);
                if (pmax != kNone) pids.push_back(pmax);
                uint32_t pmin = aet.extreme(axis, node, wlo, whi, false);
                if (pmin != kNone) pids.push_back(pmin);
                return true;
            });
        }
    }

    std::sort(pids.begin(), pids.end());
    pids.erase(std::unique(pids.begin(), pids.end()), pids.end());
    cs.pids = std::move(pids);
    return cs;
}

ExtentAnswer diameter_query(const IndexDispatch& disp, const AxisExtremeTables& aet, const Rect& q,
                            double eps, const ExtentConfig& cfg) {
    ExtentAnswer ans;
    ExtentCoreset cs = extent_coreset(disp, aet, q, eps, cfg);
    ans.coreset_size = cs.pids.size();
    if (cs.pids.empty()) {
        ans.empty = true;
        return ans;
    }
    const CompressedQuadtree& t = *disp.qt;
    const int dim = t.dim();
    double best = 0.0;
    for (size_t i = 0; i < cs.pids.size(); ++i)
        for (size_t j = i + 1; j < cs.pids.size(); ++j)
            best = std::max(best, dist2(t.point(cs.pids[i]), t.point(cs.pids[j]), dim));
    ans.value = std::sqrt(best);
    return ans;
}

ExtentAnswer radius_query(const IndexDispatch& disp, const AxisExtremeTables& aet, const Rect& q,
                          double eps, const ExtentConfig& cfg) {
    ExtentAnswer ans;
    ExtentCoreset cs = extent_coreset(disp, aet, q, eps, cfg);
    ans.coreset_size = cs.pids.size();
    if (cs.pids.empty()) {
        ans.empty = true;
        return ans;
    }
    const CompressedQuadtree& t = *disp.qt;
    const int dim = t.dim();
    std::vector<Point> pts;
    pts.reserve(cs.pids.size());
    for (uint32_t pid : cs.pids) pts.push_back(t.point(pid));
    Ball b = seb(pts, dim);
    // One-sided answer: the far point's displacement from a kept point is at
    // most (dim+2) cells, so the inflated radius always covers P∩Q.
    double inflation = cs.exact ? 0.0 : double(dim + 2) * cs.grid_side.value();
    ans.value = b.radius + inflation;
    ans.center = b.center;
    return ans;
}

}  // namespace rcq
