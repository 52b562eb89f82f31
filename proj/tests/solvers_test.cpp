#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rcq/oracle.hpp"
#include "rcq/solvers.hpp"

using namespace rcq;

namespace {

WeightedPoint wp(double x, double y, double w, uint32_t pid) {
    WeightedPoint p;
    p.p[0] = x;
    p.p[1] = y;
    p.w = w;
    p.pid = pid;
    return p;
}

std::vector<WeightedPoint> random_wpts(Rng& rng, size_t n, int dim, bool weighted) {
    std::vector<WeightedPoint> pts(n);
    for (uint32_t i = 0; i < n; ++i) {
        for (int a = 0; a < dim; ++a) pts[i].p[a] = rng.uniform();
        pts[i].w = weighted ? 0.25 + rng.uniform() : 1.0;
        pts[i].pid = i;
    }
    return pts;
}

// Exhaustive discrete optimum: centers restricted to input locations.
double discrete_opt(std::span<const WeightedPoint> pts, int k, CostKind kind, int dim) {
    size_t n = pts.size();
    double best = 1e300;
    // enumerate k-subsets
    auto comb = std::vector<uint32_t>(size_t(k));
    for (uint32_t i = 0; i < uint32_t(k); ++i) comb[i] = i;
    for (;;) {
        std::vector<Point> centers;
        for (uint32_t c : comb) centers.push_back(pts[c].p);
        best = std::min(best, phi_cost(pts, centers, kind, dim));
        int i = k - 1;
        while (i >= 0 && comb[size_t(i)] == n - size_t(k) + size_t(i)) --i;
        if (i < 0) break;
        ++comb[size_t(i)];
        for (int j = i + 1; j < k; ++j) comb[size_t(j)] = comb[size_t(j - 1)] + 1;
    }
    return best;
}

}  // namespace

TEST_CASE("phi pinned values") {
    std::vector<WeightedPoint> pts = {wp(0, 0, 2, 0)};
    std::vector<Point> c1 = {Point{{3, 0}}};
    CHECK(phi_cost(pts, c1, CostKind::Median, 2) == doctest::Approx(6.0));
    CHECK(phi_cost(pts, c1, CostKind::Means, 2) == doctest::Approx(18.0));
    CHECK(phi_cost(pts, c1, CostKind::Center, 2) == doctest::Approx(3.0));
    std::vector<Point> on = {Point{{0, 0}}};
    CHECK(phi_cost(pts, on, CostKind::Median, 2) == 0.0);
}

TEST_CASE("phi equals an independent evaluator") {
    Rng rng(21);
    for (int t = 0; t < 500; ++t) {
        auto pts = random_wpts(rng, 1 + rng.below(40), 2, true);
        std::vector<Point> centers(1 + rng.below(4));
        for (auto& c : centers)
            for (int a = 0; a < 2; ++a) c[a] = rng.uniform();
        for (CostKind kind : {CostKind::Median, CostKind::Means, CostKind::Center}) {
            double a = phi_cost(pts, centers, kind, 2);
            double b = oracle::phi_reference(pts, centers, kind, 2);
            CHECK(a == doctest::Approx(b).epsilon(1e-12));
        }
    }
}

TEST_CASE("gonzalez pinned square example") {
    std::vector<WeightedPoint> pts = {wp(0, 0, 1, 0), wp(0, 1, 1, 1), wp(1, 0, 1, 2), wp(1, 1, 1, 3)};
    auto centers = gonzalez(pts, 2, 2);
    REQUIRE(centers.size() == 2);
    CHECK(centers[0][0] == 0.0);
    CHECK(centers[0][1] == 0.0);
    CHECK(centers[1][0] == 1.0);
    CHECK(centers[1][1] == 1.0);
    CHECK(phi_cost(pts, centers, CostKind::Center, 2) == doctest::Approx(1.0));

    auto all = gonzalez(pts, 10, 2);
    CHECK(all.size() == 4);
    CHECK(phi_cost(pts, all, CostKind::Center, 2) == 0.0);
}

TEST_CASE("gonzalez is a 2-approximation on tiny instances") {
    Rng rng(22);
    for (int t = 0; t < 120; ++t) {
        auto pts = random_wpts(rng, 4 + rng.below(8), 2, false);
        int k = 1 + int(rng.below(3));
        auto centers = gonzalez(pts, k, 2);
        double got = phi_cost(pts, centers, CostKind::Center, 2);
        auto orc = oracle_exact(pts, k, CostKind::Center, 2);
        CHECK(got <= 2.0 * orc.cost + 1e-9);
    }
}

TEST_CASE("local search pinned collinear example") {
    std::vector<WeightedPoint> pts = {wp(0, 0, 1, 0), wp(1, 0, 1, 1), wp(10, 0, 1, 2)};
    auto seed = gonzalez(pts, 1, 2);
    auto centers = local_search(pts, 1, CostKind::Median, seed, LocalSearchOpts{}, 2);
    REQUIRE(centers.size() == 1);
    CHECK(centers[0][0] == doctest::Approx(1.0));
    CHECK(phi_cost(pts, centers, CostKind::Median, 2) == doctest::Approx(10.0));
}

TEST_CASE("local search: k locations give zero cost") {
    std::vector<WeightedPoint> pts = {wp(0.2, 0.2, 1, 0), wp(0.8, 0.8, 1, 1)};
    auto centers = local_search(pts, 2, CostKind::Median, gonzalez(pts, 2, 2), LocalSearchOpts{}, 2);
    CHECK(phi_cost(pts, centers, CostKind::Median, 2) == 0.0);
}

TEST_CASE("local search within (3+2/p)(1+tol) of the discrete optimum") {
    Rng rng(23);
    for (int t = 0; t < 60; ++t) {
        auto pts = random_wpts(rng, 5 + rng.below(7), 2, true);
        int k = 1 + int(rng.below(3));
        if (size_t(k) >= pts.size()) continue;
        auto seed = gonzalez(pts, k, 2);
        LocalSearchOpts opts;
        auto centers = local_search(pts, k, CostKind::Median, seed, opts, 2);
        double got = phi_cost(pts, centers, CostKind::Median, 2);
        double opt = discrete_opt(pts, k, CostKind::Median, 2);
        CHECK(got <= 5.0 * (1.0 + 10 * opts.tol) * opt + 1e-9);
        // Never worse than its seed.
        CHECK(got <= phi_cost(pts, seed, CostKind::Median, 2) + 1e-12);
    }
}

TEST_CASE("weiszfeld and centroid") {
    // Equilateral triangle: geometric median = centroid by symmetry.
    std::vector<WeightedPoint> tri = {wp(0, 0, 1, 0), wp(1, 0, 1, 1), wp(0.5, std::sqrt(3) / 2, 1, 2)};
    Point w = weiszfeld(tri, 2);
    Point c = centroid(tri, 2);
    CHECK(dist(w, c, 2) < 1e-8);
    // Vertex optimality: a dominant weight pins the median to that vertex.
    std::vector<WeightedPoint> dom = {wp(0.1, 0.1, 100, 0), wp(0.9, 0.2, 1, 1), wp(0.3, 0.8, 1, 2)};
    Point v = weiszfeld(dom, 2);
    CHECK(dist(v, dom[0].p, 2) < 1e-9);
}

TEST_CASE("seb pinned and 3-point cross-check") {
    std::vector<Point> two = {Point{{0, 0}}, Point{{1, 0}}};
    Ball b = seb(two, 2);
    CHECK(b.radius == doctest::Approx(0.5));
    CHECK(b.center[0] == doctest::Approx(0.5));
    CHECK(b.center[1] == doctest::Approx(0.0).epsilon(1e-12));

    Rng rng(24);
    for (int t = 0; t < 500; ++t) {
        std::vector<Point> tri(3);
        for (auto& p : tri)
            for (int a = 0; a < 2; ++a) p[a] = rng.uniform();
        Ball bb = seb(tri, 2);
        // Closed-form: circumradius when the triangle is acute, else half the
        // longest edge.
        double ab = dist(tri[0], tri[1], 2), bc = dist(tri[1], tri[2], 2), ca = dist(tri[2], tri[0], 2);
        double longest = std::max({ab, bc, ca});
        double s = (ab + bc + ca) / 2;
        double area = std::sqrt(std::max(0.0, s * (s - ab) * (s - bc) * (s - ca)));
        double expect;
        if (longest * longest >= ab * ab + bc * bc + ca * ca - longest * longest)
            expect = longest / 2;
        else
            expect = ab * bc * ca / (4 * area);
        CHECK(bb.radius == doctest::Approx(expect).epsilon(1e-9));
        for (const Point& p : tri) CHECK(dist(p, bb.center, 2) <= bb.radius * (1 + 1e-9) + 1e-12);
    }
}

TEST_CASE("oracle_exact pinned values and cross-check") {
    std::vector<WeightedPoint> sq = {wp(0, 0, 1, 0), wp(0, 1, 1, 1), wp(1, 0, 1, 2), wp(1, 1, 1, 3)};
    auto r = oracle_exact(sq, 4, CostKind::Median, 2);
    CHECK(r.cost == doctest::Approx(0.0));
    auto c2 = oracle_exact(sq, 2, CostKind::Center, 2);
    CHECK(c2.cost == doctest::Approx(0.5));

    // Cross-check the means oracle against direct assignment enumeration.
    Rng rng(25);
    for (int t = 0; t < 30; ++t) {
        auto pts = random_wpts(rng, 4 + rng.below(4), 2, false);
        int k = 1 + int(rng.below(2));
        auto orc = oracle_exact(pts, k, CostKind::Means, 2);
        // Assignment-matrix enumeration: each point picks a part in [0,k).
        size_t n = pts.size();
        double best = 1e300;
        std::vector<int> asgn(n, 0);
        for (uint64_t code = 0; code < uint64_t(std::pow(double(k), double(n))); ++code) {
            uint64_t c = code;
            for (size_t i = 0; i < n; ++i) {
                asgn[i] = int(c % uint64_t(k));
                c /= uint64_t(k);
            }
            double total = 0.0;
            for (int part = 0; part < k; ++part) {
                std::vector<WeightedPoint> members;
                for (size_t i = 0; i < n; ++i)
                    if (asgn[i] == part) members.push_back(pts[i]);
                if (members.empty()) continue;
                Point c0 = centroid(members, 2);
                std::array<Point, 1> cs{c0};
                total += phi_cost(members, cs, CostKind::Means, 2);
            }
            best = std::min(best, total);
        }
        CHECK(orc.cost == doctest::Approx(best).epsilon(1e-9));
    }
}

TEST_CASE("solver costs are self-consistent with phi") {
    Rng rng(26);
    auto pts = random_wpts(rng, 30, 2, true);
    auto orc = oracle_exact(std::span(pts).subspan(0, 10), 3, CostKind::Median, 2);
    CHECK(orc.cost ==
          doctest::Approx(phi_cost(std::span(pts).subspan(0, 10), orc.centers, CostKind::Median, 2)));
}
