#include "rcq/validate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rcq/oracle.hpp"

namespace rcq {

namespace {

Rect random_rect_norm(Rng& rng, int dim) {
    Rect q;
    q.dim = dim;
    for (int a = 0; a < dim; ++a) {
        double x = rng.uniform(), y = rng.uniform();
        q.lo[a] = std::min(x, y);
        q.hi[a] = std::max(x, y);
    }
    return q;
}

void tally(CheckResult& cr, bool ok, double slack) {
    ++cr.trials;
    if (!ok) {
        ++cr.violations;
        cr.pass = false;
    }
    cr.worst_slack = std::max(cr.worst_slack, slack);
}

std::vector<Point> random_centers(Rng& rng, std::span<const Point> pool, const Rect& q, int dim,
                                  int kmax) {
    int k = 1 + int(rng.below(uint64_t(kmax)));
    std::vector<Point> cs;
    for (int i = 0; i < k; ++i) {
        if (!pool.empty() && rng.below(2) == 0) {
            cs.push_back(pool[rng.below(pool.size())]);
        } else {
            Point p{};
            for (int a = 0; a < dim; ++a) p[a] = q.lo[a] + rng.uniform() * (q.hi[a] - q.lo[a]);
            cs.push_back(p);
        }
    }
    return cs;
}

}  // namespace

ValidationReport validate_structures(const Index& idx, uint64_t budget, uint64_t seed) {
    ValidationReport rep;
    const int dim = idx.dim();
    const auto& pts = idx.points();
    Rng rng(seed);
    uint64_t rects = std::max<uint64_t>(8, budget);

    CheckResult c_count{"range_count_exact"};
    CheckResult c_ext{"range_extremes_exact"};
    CheckResult c_canon{"canonical_union_exact"};
    CheckResult c_cell{"cell_range_count_exact"};
    CheckResult c_rep{"report_one_member"};
    for (uint64_t t = 0; t < rects; ++t) {
        Rect q = random_rect_norm(rng, dim);
        uint64_t got = idx.rangetree().count(q);
        uint64_t want = oracle::scan_count(pts, q, dim);
        tally(c_count, got == want, got == want ? 0.0 : 1.0);

        auto ge = idx.rangetree().extremes(q);
        auto we = oracle::scan_extremes(pts, q, dim);
        bool ok = ge.has_value() == we.has_value();
        if (ok && ge) {
            for (int a = 0; a < dim; ++a)
                ok = ok && ge->lo[a] == we->lo[a] && ge->hi[a] == we->hi[a];
        }
        tally(c_ext, ok, ok ? 0.0 : 1.0);

        // Canonical decomposition: slices disjoint, union = P∩q.
        auto nodes = idx.rangetree().canonical_nodes(q);
        std::vector<uint32_t> all;
        for (uint32_t gid : nodes) {
            auto span = idx.rangetree().node_pids(gid);
            all.insert(all.end(), span.begin(), span.end());
        }
        std::sort(all.begin(), all.end());
        bool dup = std::adjacent_find(all.begin(), all.end()) != all.end();
        auto want_ids = oracle::scan_members(pts, q, dim);
        bool same = !dup && all.size() == want_ids.size() &&
                    std::equal(all.begin(), all.end(), want_ids.begin());
        tally(c_canon, same, same ? 0.0 : 1.0);

        // Per-cell counting across all face classes via random cells around q.
        IndexDispatch disp = idx.dispatch();
        for (int i = 0; i < 8; ++i) {
            int lev = 1 + int(rng.below(8));
            Point anchor{};
            for (int a = 0; a < dim; ++a) anchor[a] = rng.uniform();
            CellId cell = cell_of_point(anchor, lev, dim);
            auto node = idx.quadtree().compressed_cell(cell);
            uint64_t wantc = oracle::scan_count_cell(pts, q, cell, dim);
            uint64_t gotc = 0;
            if (node) gotc = disp.count_in_q(*node, q);
            tally(c_cell, gotc == wantc, gotc == wantc ? 0.0 : 1.0);
        }

        uint32_t pid = idx.rangetree().report_min(q);
        bool repok = (pid == kNone) ? (want == 0) : (want > 0 && q.contains(pts[pid]));
        tally(c_rep, repok, repok ? 0.0 : 1.0);
    }
    rep.entries = {c_count, c_ext, c_canon, c_cell, c_rep};

    // Persistence freeze: child versions answer like their slices.
    CheckResult c_pers{"projection_versions_exact"};
    IndexDispatch disp = idx.dispatch();
    uint64_t node_budget = std::min<uint64_t>(idx.quadtree().nodes().size(), 4 * budget);
    for (uint64_t i = 0; i < node_budget; ++i) {
        uint32_t node = uint32_t(rng.below(idx.quadtree().nodes().size()));
        Rect q = random_rect_norm(rng, dim);
        const QtNode& n = idx.quadtree().node(node);
        uint64_t want = 0;
        for (uint32_t p = n.pid_begin; p < n.pid_end; ++p)
            if (q.contains(pts[p])) ++want;
        uint64_t got = disp.count_in_q(node, q);
        tally(c_pers, got == want, got == want ? 0.0 : 1.0);
    }
    rep.entries.push_back(c_pers);

    CheckResult c_ins{"projection_insertions_bound"};
    double n = double(std::max<size_t>(2, idx.size()));
    double bound = 4.0 * n * std::log2(n);
    double got = double(idx.projections().insertions_per_table());
    tally(c_ins, got <= bound, got / std::max(1.0, bound));
    rep.entries.push_back(c_ins);
    return rep;
}

ValidationReport validate_coresets(const Index& idx, uint64_t budget, uint64_t seed) {
    ValidationReport rep;
    const int dim = idx.dim();
    const auto& pts = idx.points();
    Rng rng(seed);
    CheckResult c_w{"coreset_weight_partition"};
    CheckResult c_ineq{"coreset_inequality"};
    CheckResult c_radius{"approx_radius_sandwich"};
    uint64_t queries = std::max<uint64_t>(4, budget / 4);
    const double epss[2] = {0.2, 0.05};
    for (uint64_t t = 0; t < queries; ++t) {
        Rect q = random_rect_norm(rng, dim);
        uint64_t total = idx.rangetree().count(q);
        if (total == 0) continue;
        int k = 1 << rng.below(4);
        CostKind kind = rng.below(2) == 0 ? CostKind::Median : CostKind::Means;
        double eps = epss[rng.below(2)];
        Coreset cs = idx.query_coreset_norm(q, k, eps, kind);
        bool wok = std::llround(cs.total_weight) == int64_t(total);
        tally(c_w, wok, wok ? 0.0 : 1.0);

        std::vector<WeightedPoint> full;
        for (uint32_t pid : oracle::scan_members(pts, q, dim))
            full.push_back(WeightedPoint{pts[pid], 1.0, pid});

        // approx_radius sandwich against the exact scan.
        {
            Coreset s = idx.canonical_coreset_norm(q, k, kind);
            SmallerCoresetResult sm = smaller_coreset(s, k, kind, 2.0, idx.params().engine, dim);
            if (!sm.centers.centers.empty()) {
                PointAccess pa = PointAccess::index_backend(idx.quadtree(), idx.rangetree(),
                                                            idx.projections(), q);
                RadiusApprox ra = approx_radius(pa, sm.centers);
                double rstar = oracle::scan_rstar(pts, q, sm.centers.centers, dim);
                double mid = rstar / (sm.centers.c1 * double(total));
                double sd = 2.0 * std::sqrt(double(dim));
                bool ok = ra.zero ? rstar == 0.0
                                  : (ra.sandwich_r / sd <= mid + 1e-12 && mid <= sd * ra.sandwich_r + 1e-12);
                tally(c_radius, ok, ok ? 0.0 : 1.0);
            }
        }

        for (int trial = 0; trial < 100; ++trial) {
            auto centers = random_centers(rng, pts, q, dim, k);
            double pf = phi_cost(full, centers, kind, dim);
            double pc = phi_cost(cs.members, centers, kind, dim);
            double dev = (pf > 0.0) ? std::fabs(pc - pf) / pf : std::fabs(pc);
            bool ok = dev <= eps + 1e-9;
            tally(c_ineq, ok, dev / eps);
        }
    }
    rep.entries = {c_w, c_ineq, c_radius};
    return rep;
}

ValidationReport validate_clustering(const Index& idx, uint64_t budget, uint64_t seed) {
    ValidationReport rep;
    const int dim = idx.dim();
    Rng rng(seed);
    CheckResult c_lb{"kcenter_lb_below_opt"};
    CheckResult c_disp{"kcenter_coreset_displacement"};
    CheckResult c_med{"kmedian_tiny_factor"};
    // Tiny-instance end-to-end vs the exhaustive oracle on fresh indexes.
    uint64_t tiny = std::max<uint64_t>(4, budget / 8);
    for (uint64_t t = 0; t < tiny; ++t) {
        int n = 4 + int(rng.below(11));
        auto raw = std::vector<Point>(size_t(n));
        for (auto& p : raw)
            for (int a = 0; a < dim; ++a) p[a] = rng.uniform();
        IndexParams ip = idx.params();
        Index tiny_idx = Index::build(raw, dim, ip);
        Rect q;
        q.dim = dim;
        for (int a = 0; a < dim; ++a) {
            q.lo[a] = -0.5;
            q.hi[a] = 1.5;
        }
        int k = 1 + int(rng.below(3));
        double eps = 0.1;
        std::vector<WeightedPoint> wpts;
        for (const Point& p : raw) wpts.push_back(WeightedPoint{p, 1.0, uint32_t(wpts.size())});

        auto ans = tiny_idx.kmedian(q, k, eps);
        OracleResult orc = oracle_exact(wpts, k, CostKind::Median, dim);
        bool ok = ans.cost <= (1.0 + 3.0 * eps) * orc.cost + 1e-9;
        tally(c_med, ok, orc.cost > 0 ? ans.cost / std::max(1e-300, orc.cost) : 0.0);

        auto kc = tiny_idx.kcenter(q, k, eps);
        OracleResult oc = oracle_exact(wpts, k, CostKind::Center, dim);
        bool lbok = kc.lb <= oc.cost + 1e-9;
        tally(c_lb, lbok, oc.cost > 0 ? kc.lb / std::max(1e-300, oc.cost) : 0.0);
    }
    // Mid-scale displacement bound on the built index.
    const auto& pts = idx.points();
    uint64_t mid = std::max<uint64_t>(4, budget / 8);
    IndexDispatch disp = idx.dispatch();
    for (uint64_t t = 0; t < mid; ++t) {
        Rect q = random_rect_norm(rng, dim);
        if (idx.rangetree().count(q) == 0) continue;
        int k = 1 + int(rng.below(8));
        double eps = 0.25;
        LowerBoundResult lbr = kcenter_lower_bound(disp, q, k);
        if (lbr.exact) continue;
        auto cs = kcenter_coreset(disp, q, k, eps, lbr);
        double bound = std::sqrt(double(dim)) * eps * lbr.lb.value();
        double worst = 0.0;
        for (const Point& p : pts) {
            if (!q.contains(p)) continue;
            double best = -1.0;
            for (const WeightedPoint& s : cs) {
                double d = dist2(p, s.p, dim);
                if (best < 0 || d < best) best = d;
            }
            worst = std::max(worst, std::sqrt(std::max(0.0, best)));
        }
        bool ok = worst <= bound + 1e-12;
        tally(c_disp, ok, bound > 0 ? worst / bound : 0.0);
    }
    rep.entries = {c_lb, c_disp, c_med};
    return rep;
}

ValidationReport validate_extent(const Index& idx, uint64_t budget, uint64_t seed) {
    ValidationReport rep;
    const int dim = idx.dim();
    const auto& pts = idx.points();
    Rng rng(seed);
    CheckResult c_diam{"diameter_sandwich"};
    CheckResult c_rad{"radius_sandwich"};
    uint64_t queries = std::max<uint64_t>(8, budget / 2);
    const double epss[2] = {0.3, 0.1};
    IndexDispatch disp = idx.dispatch();
    for (uint64_t t = 0; t < queries; ++t) {
        Rect q = random_rect_norm(rng, dim);
        auto members = oracle::scan_members(pts, q, dim);
        if (members.empty()) continue;
        double eps = epss[rng.below(2)];
        double dtrue = oracle::scan_diameter(pts, q, dim);
        ExtentAnswer da = diameter_query(disp, idx.axis_tables(), q, eps, idx.params().extent);
        bool dok = da.value <= dtrue + 1e-12 && da.value >= dtrue / (1.0 + eps) - 1e-12;
        tally(c_diam, dok, dtrue > 0 ? std::fabs(da.value - dtrue) / dtrue : 0.0);

        std::vector<Point> sub;
        for (uint32_t pid : members) sub.push_back(pts[pid]);
        Ball b = seb(sub, dim);
        ExtentAnswer ra = radius_query(disp, idx.axis_tables(), q, eps, idx.params().extent);
        bool rok = ra.value >= b.radius - 1e-12 && ra.value <= (1.0 + eps) * b.radius + 1e-12;
        tally(c_rad, rok, b.radius > 0 ? std::fabs(ra.value - b.radius) / b.radius : 0.0);
    }
    rep.entries = {c_diam, c_rad};
    return rep;
}

ValidationReport validate_all(const Index& idx, uint64_t budget, uint64_t seed) {
    ValidationReport rep;
    for (auto fn : {validate_structures, validate_coresets, validate_clustering, validate_extent}) {
        ValidationReport r = fn(idx, budget, seed);
        rep.entries.insert(rep.entries.end(), r.entries.begin(), r.entries.end());
    }
    return rep;
}

std::string report_to_json(const ValidationReport& rep) {
    std::string out = "{\n  \"schema\": 1,\n  \"checks\": [\n";
    char buf[256];
    for (size_t i = 0; i < rep.entries.size(); ++i) {
        const CheckResult& e = rep.entries[i];
        snprintf(buf, sizeof buf,
                 "    {\"name\": \"%s\", \"pass\": %s, \"trials\": %llu, \"violations\": %llu, "
                 "\"worst_slack\": %.17g}%s\n",
                 e.name.c_str(), e.pass ? "true" : "false", (unsigned long long)e.trials,
                 (unsigned long long)e.violations, e.worst_slack,
                 i + 1 < rep.entries.size() ? "," : "");
        out += buf;
    }
    out += "  ],\n";
    out += std::string("  \"all_pass\": ") + (rep.all_pass() ? "true" : "false") + "\n}\n";
    return out;
}

}  // namespace rcq
