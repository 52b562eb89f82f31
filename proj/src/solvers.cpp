#include "rcq/solvers.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

namespace rcq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double min_dist(const Point& p, std::span<const Point> centers, int dim) {
    double best = kInf;
    for (const Point& c : centers) best = std::min(best, dist2(p, c, dim));
    return std::sqrt(best);
}
}  // namespace

double phi_cost(std::span<const WeightedPoint> pts, std::span<const Point> centers, CostKind kind,
                int dim) {
    if (centers.empty()) return kInf;
    double acc = 0.0;
    for (const WeightedPoint& wp : pts) {
        if (wp.w <= 0.0) continue;
        double d = min_dist(wp.p, centers, dim);
        switch (kind) {
            case CostKind::Median: acc += wp.w * d; break;
            case CostKind::Means: acc += wp.w * d * d; break;
            case CostKind::Center: acc = std::max(acc, d); break;
        }
    }
    return acc;
}

std::vector<Point> gonzalez(std::span<const WeightedPoint> pts, int k, int dim) {
    std::vector<Point> centers;
    if (pts.empty() || k <= 0) return centers;
    size_t start = 0;
    for (size_t i = 1; i < pts.size(); ++i)
        if (pts[i].pid < pts[start].pid) start = i;
    centers.push_back(pts[start].p);
    std::vector<double> d2(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) d2[i] = dist2(pts[i].p, centers[0], dim);
    while (int(centers.size()) < k) {
        size_t far = 0;
        for (size_t i = 1; i < pts.size(); ++i)
            if (d2[i] > d2[far]) far = i;
        if (d2[far] <= 0.0) break;  // all locations covered
        centers.push_back(pts[far].p);
        for (size_t i = 0; i < pts.size(); ++i)
            d2[i] = std::min(d2[i], dist2(pts[i].p, centers.back(), dim));
    }
    return centers;
}

namespace {

struct Assign {
    std::vector<double> d1, d2;   // nearest / second-nearest distance
    std::vector<int> n1;          // nearest center index
};

void assign_all(std::span<const WeightedPoint> pts, const std::vector<Point>& centers, int dim,
                Assign& a) {
    size_t m = pts.size();
    a.d1.assign(m, kInf);
    a.d2.assign(m, kInf);
    a.n1.assign(m, -1);
    for (size_t i = 0; i < m; ++i) {
        for (size_t c = 0; c < centers.size(); ++c) {
            double d = dist(pts[i].p, centers[c], dim);
            if (d < a.d1[i]) {
                a.d2[i] = a.d1[i];
                a.d1[i] = d;
                a.n1[i] = int(c);
            } else if (d < a.d2[i]) {
                a.d2[i] = d;
            }
        }
    }
}

double cost_term(double d, CostKind kind) { return kind == CostKind::Means ? d * d : d; }

}  // namespace

std::vector<Point> local_search(std::span<const WeightedPoint> pts, int k, CostKind kind,
                                const std::vector<Point>& seed_centers, const LocalSearchOpts& opts,
                                int dim) {
    assert(kind != CostKind::Center);
    assert(opts.swap_width >= 1 && opts.swap_width <= 2);
    // Candidate locations: distinct input locations plus the seed centers.
    std::vector<Point> cand;
    cand.reserve(pts.size() + seed_centers.size());
    for (const WeightedPoint& wp : pts) cand.push_back(wp.p);
    for (const Point& c : seed_centers) cand.push_back(c);
    std::sort(cand.begin(), cand.end(), [&](const Point& a, const Point& b) {
        for (int i = 0; i < dim; ++i)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    });
    cand.erase(std::unique(cand.begin(), cand.end(),
                           [&](const Point& a, const Point& b) { return same_point(a, b, dim); }),
               cand.end());

    std::vector<Point> centers = seed_centers;
    if (centers.empty()) return centers;
    if (int(cand.size()) <= k) return std::vector<Point>(cand.begin(), cand.end());

    const size_t m = pts.size();
    double cur = phi_cost(pts, centers, kind, dim);
    uint64_t max_iters = opts.max_iters;
    if (max_iters == 0) {
        double b = double(k) * double(m);
        max_iters = uint64_t(std::min(1e9, b * b / opts.tol)) + 16;
    }
    Assign a;
    std::vector<double> swap_cost(centers.size());
    for (uint64_t iter = 0; iter < max_iters; ++iter) {
        assign_all(pts, centers, dim, a);
        double best_cost = cur;
        int best_out = -1;
        size_t best_in = 0;
        // Single swaps: for each candidate x compute, in one pass, the cost of
        // swapping x in against every possible center removal.
        for (size_t x = 0; x < cand.size(); ++x) {
            bool is_center = false;
            for (const Point& c : centers)
                if (same_point(c, cand[x], dim)) is_center = true;
            if (is_center) continue;
            std::fill(swap_cost.begin(), swap_cost.end(), 0.0);
            double base = 0.0;  // cost with x added, vs removal adjustments
            for (size_t i = 0; i < m; ++i) {
                double dx = dist(pts[i].p, cand[x], dim);
                double keep = std::min(a.d1[i], dx);
                base += pts[i].w * cost_term(keep, kind);
                // If center n1[i] is removed, point i pays min(d2, dx) instead of keep.
                double repl = std::min(a.d2[i], dx);
                swap_cost[size_t(a.n1[i])] += pts[i].w * (cost_term(repl, kind) - cost_term(keep, kind));
            }
            for (size_t c = 0; c < centers.size(); ++c) {
                double total = base + swap_cost[c];
                if (total < best_cost) {
                    best_cost = total;
                    best_out = int(c);
                    best_in = x;
                }
            }
        }
        if (opts.swap_width >= 2 && best_out < 0 && centers.size() >= 2) {
            // Pair swaps, brute force; only attempted once single swaps stall.
            std::vector<Point> trial = centers;
            for (size_t x = 0; x < cand.size() && best_out < 0; ++x) {
                for (size_t y = x + 1; y < cand.size(); ++y) {
                    for (size_t c1 = 0; c1 < centers.size(); ++c1) {
                        for (size_t c2 = c1 + 1; c2 < centers.size(); ++c2) {
                            trial = centers;
                            trial[c1] = cand[x];
                            trial[c2] = cand[y];
                            double tc = phi_cost(pts, trial, kind, dim);
                            if (tc < cur * (1.0 - opts.tol)) {
                                centers = trial;
                                cur = tc;
                                goto next_iter;
                            }
                        }
                    }
                }
            }
        }
        if (best_out >= 0 && best_cost < cur * (1.0 - opts.tol)) {
            centers[size_t(best_out)] = cand[best_in];
            cur = best_cost;
            continue;
        }
        if (best_out >= 0 && best_cost < cur) {
            // Non-qualifying improvement: take it once, then stop.
            centers[size_t(best_out)] = cand[best_in];
        }
        break;
    next_iter:;
    }
    return centers;
}

Point centroid(std::span<const WeightedPoint> pts, int dim) {
    Point c{};
    double w = 0.0;
    for (const WeightedPoint& wp : pts) {
        for (int i = 0; i < dim; ++i) c[i] += wp.w * wp.p[i];
        w += wp.w;
    }
    if (w > 0.0)
        for (int i = 0; i < dim; ++i) c[i] /= w;
    return c;
}

Point weiszfeld(std::span<const WeightedPoint> pts, int dim) {
    double wtot = 0.0;
    for (const WeightedPoint& wp : pts) wtot += wp.w;
    if (pts.empty() || wtot <= 0.0) return Point{};
    Point y = centroid(pts, dim);
    double scale = 0.0;
    for (const WeightedPoint& wp : pts) scale = std::max(scale, dist(wp.p, y, dim));
    if (scale == 0.0) return y;
    const double tol = 1e-10 * scale;
    for (int it = 0; it < 500; ++it) {
        // Vardi-Zhang step: handles y coinciding with an input point.
        Point num{};
        double den = 0.0;
        double w_at = 0.0;
        Point grad{};  // sum over p != y of w*(p-y)/|p-y|
        for (const WeightedPoint& wp : pts) {
            double d = dist(wp.p, y, dim);
            if (d < 1e-18 * scale) {
                w_at += wp.w;
                continue;
            }
            double f = wp.w / d;
            for (int i = 0; i < dim; ++i) {
                num[i] += f * wp.p[i];
                grad[i] += f * (wp.p[i] - y[i]);
            }
            den += f;
        }
        if (den == 0.0) return y;  // all mass at y
        double gnorm = 0.0;
        for (int i = 0; i < dim; ++i) gnorm += grad[i] * grad[i];
        gnorm = std::sqrt(gnorm);
        Point t{};
        for (int i = 0; i < dim; ++i) t[i] = num[i] / den;
        Point ynew;
        if (w_at > 0.0) {
            if (gnorm <= w_at) return y;  // vertex optimality
            double step = std::min(1.0, (gnorm - w_at) / gnorm);
            for (int i = 0; i < dim; ++i) ynew[i] = y[i] + step * (t[i] - y[i]);
        } else {
            ynew = t;
        }
        double move = dist(y, ynew, dim);
        y = ynew;
        if (move < tol) break;
    }
    return y;
}

namespace {

// Exact ball with all support points on the boundary (|support| <= dim+1).
Ball ball_of_support(std::span<const Point> sup, int dim) {
    Ball b;
    if (sup.empty()) {
        b.radius = -1.0;
        return b;
    }
    if (sup.size() == 1) {
        b.center = sup[0];
        b.radius = 0.0;
        return b;
    }
    int m = int(sup.size()) - 1;
    // Solve for c = p0 + sum y_i v_i with v_i = p_i - p0, via the Gram system.
    double G[kMaxDim + 1][kMaxDim + 2];
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            double g = 0.0;
            for (int a = 0; a < dim; ++a) g += (sup[size_t(i + 1)][a] - sup[0][a]) * (sup[size_t(j + 1)][a] - sup[0][a]);
            G[i][j] = g;
        }
        double rhs = 0.0;
        for (int a = 0; a < dim; ++a) {
            double v = sup[size_t(i + 1)][a] - sup[0][a];
            rhs += v * v;
        }
        G[i][m] = rhs / 2.0;
    }
    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::fabs(G[r][col]) > std::fabs(G[piv][col])) piv = r;
        if (std::fabs(G[piv][col]) < 1e-30) {
            b.radius = -1.0;  // degenerate support; caller skips
            return b;
        }
        if (piv != col)
            for (int cc = 0; cc <= m; ++cc) std::swap(G[piv][cc], G[col][cc]);
        for (int r = 0; r < m; ++r) {
            if (r == col) continue;
            double f = G[r][col] / G[col][col];
            for (int cc = col; cc <= m; ++cc) G[r][cc] -= f * G[col][cc];
        }
    }
    b.center = sup[0];
    for (int i = 0; i < m; ++i) {
        double y = G[i][m] / G[i][i];
        for (int a = 0; a < dim; ++a) b.center[a] += y * (sup[size_t(i + 1)][a] - sup[0][a]);
    }
    b.radius = dist(b.center, sup[0], dim);
    return b;
}

Ball welzl(std::vector<Point>& pts, size_t n, std::vector<Point>& support, int dim) {
    if (n == 0 || support.size() == size_t(dim) + 1) {
        Ball b = ball_of_support(support, dim);
        if (b.radius < 0.0 && !support.empty()) {
            // Degenerate support: drop the newest point.
            std::vector<Point> sub(support.begin(), support.end() - 1);
            b = ball_of_support(sub, dim);
        }
        return b;
    }
    Ball b = welzl(pts, n - 1, support, dim);
    const Point& p = pts[n - 1];
    if (b.radius >= 0.0 && dist(p, b.center, dim) <= b.radius * (1.0 + 1e-12) + 1e-15) return b;
    support.push_back(p);
    Ball b2 = welzl(pts, n - 1, support, dim);
    support.pop_back();
    if (b2.radius < 0.0) return b;
    // Move-to-front keeps the expected recursion shallow.
    std::rotate(pts.begin(), pts.begin() + long(n) - 1, pts.begin() + long(n));
    return b2;
}

}  // namespace

Ball seb(std::span<const Point> pts, int dim, uint64_t seed) {
    Ball b;
    if (pts.empty()) {
        b.radius = 0.0;
        return b;
    }
    std::vector<Point> work(pts.begin(), pts.end());
    Rng rng(seed);
    for (size_t i = work.size(); i > 1; --i) std::swap(work[i - 1], work[rng.below(i)]);
    std::vector<Point> support;
    support.reserve(size_t(dim) + 1);
    b = welzl(work, work.size(), support, dim);
    if (b.radius < 0.0) {
        b.center = pts[0];
        b.radius = 0.0;
        for (const Point& p : pts) b.radius = std::max(b.radius, dist(p, pts[0], dim));
    }
    // Tighten: the exact radius is the farthest input distance from the center.
    double r = 0.0;
    for (const Point& p : pts) r = std::max(r, dist(p, b.center, dim));
    b.radius = r;
    return b;
}

OracleResult oracle_exact(std::span<const WeightedPoint> pts, int k, CostKind kind, int dim) {
    OracleResult out;
    const int m = int(pts.size());
    assert(m <= 16 && k <= 4 && k >= 1);
    if (m == 0) return out;
    const uint32_t full = (uint32_t(1) << m) - 1;

    std::vector<double> cost1(size_t(full) + 1, 0.0);
    std::vector<Point> center1(size_t(full) + 1);
    std::vector<WeightedPoint> sub;
    std::vector<Point> subp;
    for (uint32_t mask = 1; mask <= full; ++mask) {
        sub.clear();
        subp.clear();
        for (int i = 0; i < m; ++i)
            if (mask & (uint32_t(1) << i)) {
                sub.push_back(pts[size_t(i)]);
                subp.push_back(pts[size_t(i)].p);
            }
        Point c;
        if (kind == CostKind::Median) c = weiszfeld(sub, dim);
        else if (kind == CostKind::Means) c = centroid(sub, dim);
        else {
            Ball b = seb(subp, dim);
            c = b.center;
        }
        center1[mask] = c;
        std::array<Point, 1> cs{c};
        cost1[mask] = phi_cost(sub, cs, kind, dim);
    }

    const bool maxcombine = (kind == CostKind::Center);
    // dp[j][mask]: best cost partitioning mask into exactly j nonempty parts.
    std::vector<std::vector<double>> dp(size_t(k) + 1, std::vector<double>(size_t(full) + 1, kInf));
    std::vector<std::vector<uint32_t>> choice(size_t(k) + 1,
                                              std::vector<uint32_t>(size_t(full) + 1, 0));
    dp[1] = cost1;
    dp[1][0] = kInf;
    for (int j = 2; j <= k; ++j) {
        for (uint32_t mask = 1; mask <= full; ++mask) {
            uint32_t low = mask & (~mask + 1);  // the lowest point always joins the first part
            for (uint32_t s = mask; s > 0; s = (s - 1) & mask) {
                if (!(s & low)) continue;
                if (dp[size_t(j) - 1][mask ^ s] == kInf) continue;
                double c = maxcombine ? std::max(cost1[s], dp[size_t(j) - 1][mask ^ s])
                                      : cost1[s] + dp[size_t(j) - 1][mask ^ s];
                if (c < dp[size_t(j)][mask]) {
                    dp[size_t(j)][mask] = c;
                    choice[size_t(j)][mask] = s;
                }
            }
        }
    }
    int bestj = 1;
    for (int j = 2; j <= std::min(k, m); ++j)
        if (dp[size_t(j)][full] < dp[size_t(bestj)][full]) bestj = j;
    out.cost = dp[size_t(bestj)][full];
    uint32_t mask = full;
    for (int j = bestj; j >= 1; --j) {
        uint32_t s = (j == 1) ? mask : choice[size_t(j)][mask];
        out.centers.push_back(center1[s]);
        mask ^= s;
    }
    return out;
}

}  // namespace rcq
