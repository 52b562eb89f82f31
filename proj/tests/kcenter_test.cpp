#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rcq/index.hpp"
#include "rcq/oracle.hpp"

using namespace rcq;

namespace {

std::vector<Point> random_points(Rng& rng, size_t n, int dim) {
    std::vector<Point> pts(n);
    for (auto& p : pts)
        for (int i = 0; i < dim; ++i) p[i] = rng.uniform();
    return pts;
}

Rect everything(int dim) {
    Rect q;
    q.dim = dim;
    for (int i = 0; i < dim; ++i) {
        q.lo[i] = -1.0;
        q.hi[i] = 2.0;
    }
    return q;
}

Rect random_rect(Rng& rng, int dim) {
    Rect q;
    q.dim = dim;
    for (int i = 0; i < dim; ++i) {
        double x = rng.uniform(), y = rng.uniform();
        q.lo[i] = std::min(x, y);
        q.hi[i] = std::max(x, y);
    }
    return q;
}

}  // namespace

TEST_CASE("k >= distinct points: exact zero-cost path") {
    Rng rng(51);
    auto raw = random_points(rng, 7, 2);
    Index idx = Index::build(raw, 2, IndexParams{});
    auto ans = idx.kcenter(everything(2), 7, 0.1);
    CHECK(ans.cost == 0.0);
    CHECK(ans.centers.size() == 7);
    CHECK(ans.solver_tag == "exact_distinct");
}

TEST_CASE("four corners, k=1: lb is positive and below Opt") {
    std::vector<Point> raw = {Point{{0, 0}}, Point{{0, 1}}, Point{{1, 0}}, Point{{1, 1}}};
    Index idx = Index::build(raw, 2, IndexParams{});
    Rect qn = idx.to_norm_query(everything(2));
    LowerBoundResult lbr = kcenter_lower_bound(idx.dispatch(), qn, 1);
    REQUIRE(!lbr.exact);
    double lb_orig = lbr.lb.value() * idx.normalizer().scale;
    CHECK(lb_orig > 0.0);
    CHECK(lb_orig <= std::sqrt(2.0) / 2.0 + 1e-12);
}

TEST_CASE("four corners, k=2, tiny eps: symmetric optimum within (1+2*sqrt(d)*eps)") {
    std::vector<Point> raw = {Point{{0, 0}}, Point{{0, 1}}, Point{{1, 0}}, Point{{1, 1}}};
    Index idx = Index::build(raw, 2, IndexParams{});
    double eps = 0.01;
    auto ans = idx.kcenter(everything(2), 2, eps);
    CHECK(ans.solver_tag == "exact_partition");
    CHECK(ans.cost >= 0.5 - 1e-12);
    CHECK(ans.cost <= (1.0 + 2.0 * std::sqrt(2.0) * eps) * 0.5 + 1e-12);
}

TEST_CASE("lb below oracle Opt on random tiny instances") {
    Rng rng(52);
    for (int t = 0; t < 150; ++t) {
        int n = 4 + int(rng.below(9));
        auto raw = random_points(rng, size_t(n), 2);
        Index idx = Index::build(raw, 2, IndexParams{});
        int k = 1 + int(rng.below(3));
        std::vector<WeightedPoint> wpts;
        for (uint32_t i = 0; i < raw.size(); ++i) wpts.push_back(WeightedPoint{raw[i], 1.0, i});
        auto orc = oracle_exact(wpts, k, CostKind::Center, 2);
        auto ans = idx.kcenter(everything(2), k, 0.25);
        CHECK(ans.lb <= orc.cost + 1e-9);
        if (ans.solver_tag == "exact_partition") {
            CHECK(ans.cost <= (1.0 + 2.0 * std::sqrt(2.0) * 0.25) * orc.cost + 1e-9);
        } else if (ans.solver_tag == "gonzalez") {
            CHECK(ans.cost <= 2.0 * (1.0 + 2.0 * std::sqrt(2.0) * 0.25) * orc.cost + 1e-9);
        }
    }
}

TEST_CASE("coreset displacement bound on mid-scale queries") {
    Rng rng(53);
    auto raw = random_points(rng, 1500, 2);
    Index idx = Index::build(raw, 2, IndexParams{});
    const auto& pts = idx.points();
    IndexDispatch disp = idx.dispatch();
    int tested = 0;
    for (int t = 0; t < 60 && tested < 30; ++t) {
        Rect q = random_rect(rng, 2);
        if (idx.rangetree().count(q) <= 8) continue;
        int k = 1 + int(rng.below(4));
        double eps = 0.3;
        LowerBoundResult lbr = kcenter_lower_bound(disp, q, k);
        if (lbr.exact) continue;
        ++tested;
        auto cs = kcenter_coreset(disp, q, k, eps, lbr);
        CHECK(!cs.empty());
        double bound = std::sqrt(2.0) * eps * lbr.lb.value();
        for (const Point& p : pts) {
            if (!q.contains(p)) continue;
            double best = 1e300;
            for (const auto& s : cs) best = std::min(best, dist(p, s.p, 2));
            CHECK(best <= bound + 1e-12);
        }
        // Coreset points lie in P∩q.
        for (const auto& s : cs) CHECK(q.contains(s.p));
    }
    CHECK(tested >= 10);
}

TEST_CASE("huge eps: one point per cover cell") {
    Rng rng(54);
    auto raw = random_points(rng, 200, 2);
    Index idx = Index::build(raw, 2, IndexParams{});
    Rect qn = idx.to_norm_query(everything(2));
    IndexDispatch disp = idx.dispatch();
    LowerBoundResult lbr = kcenter_lower_bound(disp, qn, 2);
    REQUIRE(!lbr.exact);
    auto cs = kcenter_coreset(disp, qn, 2, 1e9, lbr);
    CHECK(cs.size() == lbr.cover.size());
}

TEST_CASE("cover invariants: disjoint cells of side <= 2*lb covering P_Q") {
    Rng rng(55);
    auto raw = random_points(rng, 600, 2);
    Index idx = Index::build(raw, 2, IndexParams{});
    const auto& pts = idx.points();
    IndexDispatch disp = idx.dispatch();
    for (int t = 0; t < 30; ++t) {
        Rect q = random_rect(rng, 2);
        if (idx.rangetree().count(q) == 0) continue;
        int k = 1 + int(rng.below(3));
        LowerBoundResult lbr = kcenter_lower_bound(disp, q, k);
        if (lbr.exact) continue;
        uint64_t limit = uint64_t(k) * 9;  // k * 3^d at d=2
        CHECK(lbr.cover.size() <= 4 * limit);  // spec bound 6^d k = 36k; certificate gives 9k
        for (const auto& cr : lbr.cover) CHECK(cr.cell.side() <= 2.0 * lbr.lb.value() + 1e-15);
        for (size_t i = 0; i < lbr.cover.size(); ++i)
            for (size_t j = i + 1; j < lbr.cover.size(); ++j)
                CHECK(!lbr.cover[i].cell.contains_cell(lbr.cover[j].cell));
        // Covering: every point of P∩q lies in some cover cell.
        for (const Point& p : pts) {
            if (!q.contains(p)) continue;
            bool in = false;
            for (const auto& cr : lbr.cover)
                if (cell_contains_point(cr.cell, p)) in = true;
            CHECK(in);
        }
    }
}
