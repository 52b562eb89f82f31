#include "rcq/median_engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace rcq {

namespace {

std::vector<Point> dedup_points(std::span<const Point> pts, int dim) {
    std::vector<Point> out(pts.begin(), pts.end());
    std::sort(out.begin(), out.end(), [&](const Point& a, const Point& b) {
        for (int i = 0; i < dim; ++i)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [&](const Point& a, const Point& b) { return same_point(a, b, dim); }),
              out.end());
    return out;
}

}  // namespace

bool coverage_probe(const PointAccess& pa, std::span<const Point> centers, StdLen alpha) {
    std::vector<CellId> cells;
    for (const Point& a : centers) {
        CellId anchor = cell_of_point(a, alpha.e, pa.dim());
        auto cluster = grid_cluster(anchor);
        cells.insert(cells.end(), cluster.begin(), cluster.end());
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    uint64_t covered = 0;
    for (const CellId& c : cells) {
        auto node = pa.tree().compressed_cell(c);
        if (node) covered += pa.locations_of(*node);
    }
    return covered == pa.total_locations();
}

RadiusApprox approx_radius(const PointAccess& pa, const ApproxCenters& A) {
    RadiusApprox ra;
    const int dim = pa.dim();
    std::vector<Point> centers = dedup_points(A.centers, dim);

    // Exact zero test: every backend point coincides (at merge resolution)
    // with some center location.
    {
        std::vector<CellId> cells;
        for (const Point& a : centers) cells.push_back(cell_of_point(a, kMaxLevel, dim));
        std::sort(cells.begin(), cells.end());
        cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
        uint64_t at = 0;
        for (const CellId& c : cells) {
            auto node = pa.tree().compressed_cell(c);
            if (node) at += pa.locations_of(*node);
        }
        if (at == pa.total_locations()) {
            ra.zero = true;
            return ra;
        }
    }

    // Coverage is monotone in the probe length; find the smallest covered one.
    int lo = 0, hi = kMaxLevel;  // exponent of the probe: covered at lo
    while (lo < hi) {
        int mid = lo + (hi - lo + 1) / 2;
        if (coverage_probe(pa, centers, StdLen{mid})) lo = mid;
        else hi = mid - 1;
    }
    ra.alpha = StdLen{lo};
    double w = std::max(1.0, pa.total_weight());
    ra.sandwich_r = ra.alpha.value() / (A.c1 * w);
    return ra;
}

UnifiedGrid build_unified_grid(const PointAccess& pa, const ApproxCenters& A, double eps,
                               CostKind kind, const RadiusApprox& ra, double divisor) {
    UnifiedGrid g;
    const int dim = pa.dim();
    g.centers = dedup_points(A.centers, dim);
    const double w = std::max(1.0, pa.total_weight());
    const double c1 = A.c1;
    if (divisor <= 0.0) divisor = 40.0 * c1 * double(dim);
    g.base = (kind == CostKind::Means) ? ra.alpha.value() / std::sqrt(c1 * w)
                                       : ra.alpha.value() / (c1 * w);
    int m_levels = int(std::ceil(2.0 * std::log2(std::max(2.0, 2.0 * std::sqrt(double(dim)) * c1 * w))));
    const int e0 = sceil(std::min(1.0, g.base)).e;
    g.levels = 0;
    for (int j = 0; j <= m_levels; ++j) {
        int ebar = std::max(0, e0 - j);
        int prev = g.rbar_e.empty() ? -1 : g.rbar_e.back();
        if (prev == 0 && ebar == 0) break;  // saturated at the root
        double rb = std::ldexp(1.0, -ebar);
        double x = eps * rb / divisor;
        int esmall = sceil(x).e;
        esmall = std::max(esmall, std::min(kMaxLevel, ebar + 1));  // at most half the anchor side
        g.rbar_e.push_back(ebar);
        g.rsmall_e.push_back(esmall);
        ++g.levels;
    }
    return g;
}

namespace {

struct Candidate {
    uint32_t node;
    uint32_t lo, hi;  // raw pid interval of the node
    int target_e;     // second-level side exponent
    uint32_t parent = kNone;
    std::vector<uint32_t> kids;  // indices of maximal candidates strictly inside
};

// Enumerate first-level cells for (center, level j): the side-rbar/2 standard
// cells of the grid cluster of the anchor, minus the previous level's cluster.
void first_level_cells(const UnifiedGrid& g, int dim, const Point& a, int j,
                       std::vector<std::pair<CellId, int>>& out) {
    const int ebar = g.rbar_e[size_t(j)];
    const int target = g.rsmall_e[size_t(j)];
    CellId anchor = cell_of_point(a, ebar, dim);
    auto cluster = grid_cluster(anchor);
    if (ebar >= kMaxLevel) {
        for (const CellId& c : cluster) out.emplace_back(c, target);
        return;
    }
    std::vector<CellId> excl;
    if (j > 0 && g.rbar_e[size_t(j) - 1] == ebar + 1) {
        CellId prev_anchor = cell_of_point(a, ebar + 1, dim);
        excl = grid_cluster(prev_anchor);
        std::sort(excl.begin(), excl.end());
    }
    for (const CellId& big : cluster) {
        // Children at ebar+1.
        const uint64_t bx = 0;
        (void)bx;
        std::array<uint64_t, kMaxDim> basec{};
        for (int i = 0; i < dim; ++i) basec[size_t(i)] = big.c[size_t(i)] << 1;
        for (uint32_t code = 0; code < (uint32_t(1) << dim); ++code) {
            CellId ch;
            ch.dim = int8_t(dim);
            ch.level = int8_t(ebar + 1);
            for (int i = 0; i < dim; ++i)
                ch.c[size_t(i)] = basec[size_t(i)] + ((code >> (dim - 1 - i)) & 1);
            if (!excl.empty() && std::binary_search(excl.begin(), excl.end(), ch)) continue;
            out.emplace_back(ch, target);
        }
    }
}

}  // namespace

std::vector<SecondLevelCell> collect_second_level_cells(const PointAccess& pa,
                                                        const UnifiedGrid& grid) {
    const int dim = pa.dim();
    const Rect* clip = pa.clip();
    std::vector<std::pair<CellId, int>> fl;
    for (const Point& a : grid.centers)
        for (int j = 0; j < grid.levels; ++j) first_level_cells(grid, dim, a, j, fl);

    // Map to compressed nodes, keep the finest target per node.
    std::vector<Candidate> cand;
    {
        std::vector<std::pair<uint32_t, int>> seen;  // (node, target)
        for (auto& [cell, target] : fl) {
            if (clip != nullptr && !cell.box().intersects(*clip)) continue;
            auto node = pa.tree().compressed_cell(cell);
            if (!node) continue;
            seen.emplace_back(*node, target);
        }
        std::sort(seen.begin(), seen.end());
        for (size_t i = 0; i < seen.size(); ++i) {
            if (i + 1 < seen.size() && seen[i + 1].first == seen[i].first) continue;  // keep max target
            const QtNode& n = pa.tree().node(seen[i].first);
            Candidate c;
            c.node = seen[i].first;
            c.lo = n.pid_begin;
            c.hi = n.pid_end;
            c.target_e = seen[i].second;
            cand.push_back(c);
        }
    }

    // Nesting forest by pid intervals (intervals are nested or disjoint).
    std::vector<uint32_t> order(cand.size());
    for (uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
        if (cand[a].lo != cand[b].lo) return cand[a].lo < cand[b].lo;
        return cand[a].hi > cand[b].hi;
    });
    std::vector<uint32_t> stack;
    for (uint32_t oi : order) {
        while (!stack.empty() && cand[stack.back()].hi <= cand[oi].lo) stack.pop_back();
        if (!stack.empty()) {
            cand[oi].parent = stack.back();
            cand[stack.back()].kids.push_back(oi);
        }
        stack.push_back(oi);
    }

    // Emit: per candidate, descend its subtree to the target side, skipping
    // regions owned by finer nested candidates and splitting cells that
    // contain one.
    std::vector<SecondLevelCell> out;
    const CompressedQuadtree& t = pa.tree();
    for (uint32_t ci = 0; ci < cand.size(); ++ci) {
        const Candidate& v = cand[ci];
        // Exclusion intervals, sorted by start (children are disjoint).
        std::vector<std::pair<uint32_t, uint32_t>> excl;
        for (uint32_t k : v.kids) excl.emplace_back(cand[k].lo, cand[k].hi);
        std::sort(excl.begin(), excl.end());
        auto inside_excl = [&](uint32_t lo, uint32_t hi) {
            auto it = std::upper_bound(excl.begin(), excl.end(), std::make_pair(lo, UINT32_MAX));
            if (it == excl.begin()) return false;
            --it;
            return it->first <= lo && hi <= it->second;
        };
        auto contains_excl = [&](uint32_t lo, uint32_t hi) {
            auto it = std::lower_bound(excl.begin(), excl.end(), std::make_pair(lo, uint32_t(0)));
            return it != excl.end() && it->second <= hi;
        };

        struct Frame {
            CellId cell;
            uint32_t node;
        };
        std::vector<Frame> work;
        work.push_back(Frame{t.node(v.node).cell, v.node});
        while (!work.empty()) {
            Frame f = work.back();
            work.pop_back();
            if (clip != nullptr && !f.cell.box().intersects(*clip)) continue;
            const QtNode& n = t.node(f.node);
            if (inside_excl(n.pid_begin, n.pid_end)) continue;
            bool has_excl = contains_excl(n.pid_begin, n.pid_end);
            if (f.cell.level >= v.target_e && !has_excl) {
                out.push_back(SecondLevelCell{n.cell, f.node});
                continue;
            }
            if (n.cell.level > f.cell.level) {
                work.push_back(Frame{n.cell.ancestor(f.cell.level + 1), f.node});
                continue;
            }
            if (n.leaf()) {
                // A leaf cannot strictly contain another candidate; emit it.
                out.push_back(SecondLevelCell{n.cell, f.node});
                continue;
            }
            for (uint32_t i = 0; i < n.child_count; ++i) {
                uint32_t u = t.child(n, i);
                work.push_back(Frame{t.node(u).cell.ancestor(f.cell.level + 1), u});
            }
        }
    }
    return out;
}

namespace {

// Explicit-backend fast path: the same unified-grid charging computed by a
// direct sweep. Each point is charged at the granularity of the finest grid
// level whose cluster reaches it, over all centers; groups share cells.
Coreset sweep_grid_coreset(const PointAccess& pa, const UnifiedGrid& grid, int k, double eps,
                           CostKind kind) {
    Coreset cs;
    cs.kind = kind;
    cs.k = k;
    cs.eps = eps;
    cs.provenance = "from_centers";
    const int dim = pa.dim();
    auto members = pa.explicit_members();
    std::vector<std::array<uint64_t, kMaxDim>> gp(members.size());
    for (size_t i = 0; i < members.size(); ++i) gp[i] = grid_coords(members[i].p, dim);
    std::vector<std::array<uint64_t, kMaxDim>> ga(grid.centers.size());
    for (size_t i = 0; i < grid.centers.size(); ++i) ga[i] = grid_coords(grid.centers[i], dim);

    const int e0 = grid.rbar_e[0];
    const int e_top = grid.rbar_e[size_t(grid.levels) - 1];
    auto cluster_at = [&](size_t pi, size_t ci, int e) {
        // p lies in the grid cluster of the center's level-e cell.
        for (int a = 0; a < dim; ++a) {
            uint64_t x = gp[pi][size_t(a)] >> (kMaxLevel - e);
            uint64_t y = ga[ci][size_t(a)] >> (kMaxLevel - e);
            if ((x > y ? x - y : y - x) > 1) return false;
        }
        return true;
    };

    struct Charged {
        CellId cell;
        uint32_t idx;
    };
    std::vector<Charged> charged(members.size());
    for (size_t pi = 0; pi < members.size(); ++pi) {
        int best_j = -1;
        for (size_t ci = 0; ci < grid.centers.size(); ++ci) {
            // Finest level whose cluster contains p: locate by the top differing
            // bit of the grid coordinates, then settle exactly.
            uint64_t dmax = 0;
            for (int a = 0; a < dim; ++a) {
                uint64_t x = gp[pi][size_t(a)], y = ga[ci][size_t(a)];
                dmax = std::max(dmax, x > y ? x - y : y - x);
            }
            int e_guess = dmax == 0 ? e0 : kMaxLevel + 1 - (64 - __builtin_clzll(dmax));
            int e_hi = std::min(e0, e_guess + 1);
            int e_found = -1;
            for (int e = e_hi; e >= e_top; --e) {
                if (cluster_at(pi, ci, e)) {
                    e_found = e;
                    break;
                }
            }
            if (e_found < 0) continue;  // not covered by this center's grid
            int j = e0 - e_found;
            if (j >= grid.levels) continue;
            if (best_j < 0 || j < best_j) best_j = j;
            if (best_j == 0) break;
        }
        assert(best_j >= 0);
        if (best_j < 0) best_j = grid.levels - 1;
        int estar = grid.rsmall_e[size_t(best_j)];
        charged[pi].cell = cell_of_point(members[pi].p, estar, dim);
        charged[pi].idx = uint32_t(pi);
    }
    std::sort(charged.begin(), charged.end(), [](const Charged& a, const Charged& b) {
        if (!(a.cell == b.cell)) return a.cell < b.cell;
        return a.idx < b.idx;
    });
    for (size_t i = 0; i < charged.size();) {
        size_t j = i;
        double w = 0.0;
        uint32_t best = charged[i].idx;
        while (j < charged.size() && charged[j].cell == charged[i].cell) {
            w += members[charged[j].idx].w;
            if (members[charged[j].idx].pid < members[best].pid) best = charged[j].idx;
            ++j;
        }
        cs.members.push_back(WeightedPoint{members[best].p, w, members[best].pid});
        cs.total_weight += w;
        i = j;
    }
    return cs;
}

}  // namespace

Coreset coreset_from_centers(const PointAccess& pa, const ApproxCenters& A, int k, double eps,
                             CostKind kind, const EngineConfig& cfg) {
    Coreset cs;
    cs.kind = kind;
    cs.k = k;
    cs.eps = eps;
    cs.provenance = "from_centers";
    if (pa.total_locations() == 0 || pa.tree().empty()) return cs;

    RadiusApprox ra = approx_radius(pa, A);
    if (ra.zero) {
        // All points coincide with centers: distinct locations with weights.
        pa.tree().subdivide_visit(pa.tree().root(), kMaxLevel, pa.clip(),
                                  [&](const CellId&, uint32_t node) {
                                      double w = pa.weight_of(node);
                                      if (w > 0.0) {
                                          auto rep = pa.report_one(node);
                                          cs.members.push_back(WeightedPoint{rep->p, w, rep->pid});
                                          cs.total_weight += w;
                                      }
                                      return true;
                                  });
        return cs;
    }

    UnifiedGrid grid = build_unified_grid(pa, A, eps, kind, ra, cfg.grid_divisor);
    if (pa.is_explicit()) {
        Coreset swept = sweep_grid_coreset(pa, grid, k, eps, kind);
        assert(std::fabs(swept.total_weight - pa.total_weight()) <=
               1e-6 * std::max(1.0, pa.total_weight()));
        return swept;
    }
    auto cells = collect_second_level_cells(pa, grid);
    for (const SecondLevelCell& sc : cells) {
        double w = pa.weight_of(sc.node);
        if (w <= 0.0) continue;
        auto rep = pa.report_one(sc.node);
        assert(rep.has_value());
        cs.members.push_back(WeightedPoint{rep->p, w, rep->pid});
        cs.total_weight += w;
    }
    // Charging partition: every point lands in exactly one emitted cell.
    assert(std::fabs(cs.total_weight - pa.total_weight()) <=
           1e-6 * std::max(1.0, pa.total_weight()));
    return cs;
}

std::vector<Point> d2_sample(std::span<const WeightedPoint> pts, int m, CostKind kind,
                             uint64_t seed, int dim) {
    std::vector<Point> centers;
    if (pts.empty() || m <= 0) return centers;
    size_t start = 0;
    for (size_t i = 1; i < pts.size(); ++i)
        if (pts[i].pid < pts[start].pid) start = i;
    centers.push_back(pts[start].p);
    std::vector<double> d(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) d[i] = dist(pts[i].p, centers[0], dim);
    Rng rng(seed);
    while (int(centers.size()) < m) {
        double total = 0.0;
        for (size_t i = 0; i < pts.size(); ++i) {
            double t = kind == CostKind::Means ? d[i] * d[i] : d[i];
            total += pts[i].w * t;
        }
        if (total <= 0.0) break;
        double r = rng.uniform() * total;
        size_t pick = pts.size() - 1;
        double acc = 0.0;
        for (size_t i = 0; i < pts.size(); ++i) {
            double t = kind == CostKind::Means ? d[i] * d[i] : d[i];
            acc += pts[i].w * t;
            if (acc >= r) {
                pick = i;
                break;
            }
        }
        centers.push_back(pts[pick].p);
        for (size_t i = 0; i < pts.size(); ++i) d[i] = std::min(d[i], dist(pts[i].p, centers.back(), dim));
    }
    return centers;
}

SmallerCoresetResult smaller_coreset(const Coreset& s, int k, CostKind kind, double eps,
                                     const EngineConfig& cfg, int dim) {
    SmallerCoresetResult out;
    out.centers.kind = kind;
    out.centers.c1 = cfg.c1_for(kind);
    if (s.members.empty()) {
        out.coreset = s;
        out.coreset.provenance = "smaller";
        return out;
    }
    std::vector<Point> locs;
    for (const WeightedPoint& wp : s.members) locs.push_back(wp.p);
    std::vector<Point> distinct = dedup_points(locs, dim);
    if (int(distinct.size()) <= k) {
        out.centers.centers = distinct;
        out.coreset = s;
        out.coreset.provenance = "smaller";
        return out;
    }

    // Local search runs on s directly when small, else on a fixed-eps sketch.
    std::span<const WeightedPoint> ls_input = s.members;
    Coreset sketch;
    if (s.members.size() > cfg.ls_direct_max) {
        int m = std::min<int>(int(distinct.size()), 2 * k + 16);
        ApproxCenters bi;
        bi.kind = kind;
        bi.c1 = cfg.c1_internal;
        bi.centers = d2_sample(s.members, m, kind, cfg.seed, dim);
        PointAccess epa = PointAccess::explicit_backend(s.members, dim);
        sketch = coreset_from_centers(epa, bi, k, 0.5, kind, cfg);
        ls_input = sketch.members;
    }
    std::vector<Point> c0 = gonzalez(ls_input, k, dim);
    LocalSearchOpts lso;
    lso.swap_width = cfg.ls_swap_width;
    lso.tol = cfg.ls_tol;
    out.centers.centers = local_search(ls_input, k, kind, c0, lso, dim);

    PointAccess epa = PointAccess::explicit_backend(s.members, dim);
    out.coreset = coreset_from_centers(epa, out.centers, k, eps, kind, cfg);
    out.coreset.provenance = "smaller";
    return out;
}

SolveResult solve_single_shot(std::span<const WeightedPoint> pts, int k, CostKind kind,
                              const EngineConfig& cfg, int dim) {
    SolveResult res;
    if (pts.empty()) return res;
    if (pts.size() <= cfg.exact_solver_max_pts && k <= cfg.exact_solver_max_k) {
        OracleResult orc = oracle_exact(pts, k, kind, dim);
        res.centers = orc.centers;
        res.cost = orc.cost;
        res.tag = "exact_partition";
        return res;
    }
    if (kind == CostKind::Center) {
        res.centers = gonzalez(pts, k, dim);
        res.cost = phi_cost(pts, res.centers, kind, dim);
        res.tag = "gonzalez";
        return res;
    }
    std::span<const WeightedPoint> input = pts;
    std::vector<WeightedPoint> sketch_members;
    std::string tag = "local_search";
    if (pts.size() > cfg.ls_direct_max) {
        // Pre-compress before the quadratic search.
        int m = std::min<int>(int(pts.size()), 2 * k + 16);
        ApproxCenters bi;
        bi.kind = kind;
        bi.c1 = cfg.c1_internal;
        bi.centers = d2_sample(pts, m, kind, cfg.seed, dim);
        PointAccess epa = PointAccess::explicit_backend(pts, dim);
        Coreset sk = coreset_from_centers(epa, bi, k, 0.5, kind, cfg);
        sketch_members = std::move(sk.members);
        input = sketch_members;
        tag = "local_search_sketch";
    }
    std::vector<Point> c0 = gonzalez(input, k, dim);
    LocalSearchOpts lso;
    lso.swap_width = cfg.ls_swap_width;
    lso.tol = cfg.ls_tol;
    res.centers = local_search(input, k, kind, c0, lso, dim);
    if (kind == CostKind::Means) {
        // Lloyd refinement on the solver input.
        for (int it = 0; it < 30; ++it) {
            std::vector<std::vector<WeightedPoint>> parts(res.centers.size());
            for (const WeightedPoint& wp : input) {
                size_t best = 0;
                double bd = dist2(wp.p, res.centers[0], dim);
                for (size_t c = 1; c < res.centers.size(); ++c) {
                    double d = dist2(wp.p, res.centers[c], dim);
                    if (d < bd) {
                        bd = d;
                        best = c;
                    }
                }
                parts[best].push_back(wp);
            }
            bool moved = false;
            for (size_t c = 0; c < res.centers.size(); ++c) {
                if (parts[c].empty()) continue;
                Point nc = centroid(parts[c], dim);
                if (!same_point(nc, res.centers[c], dim)) moved = true;
                res.centers[c] = nc;
            }
            if (!moved) break;
        }
        tag += "+lloyd";
    }
    res.cost = phi_cost(pts, res.centers, kind, dim);
    res.tag = tag;
    return res;
}

}  // namespace rcq
