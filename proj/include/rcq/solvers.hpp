#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rcq/geometry.hpp"

namespace rcq {

enum class CostKind { Median, Means, Center };

inline const char* kind_name(CostKind k) {
    switch (k) {
        case CostKind::Median: return "median";
        case CostKind::Means: return "means";
        default: return "center";
    }
}

// Sum of w*phi, sum of w*phi^2, or max over support of phi. Weights do not
// scale the max for the center kind.
double phi_cost(std::span<const WeightedPoint> pts, std::span<const Point> centers, CostKind kind,
                int dim);

// Farthest-first traversal from the lowest-pid point; 2-approximation for
// the center cost. Returns min(k, #distinct locations) centers.
std::vector<Point> gonzalez(std::span<const WeightedPoint> pts, int k, int dim);

struct LocalSearchOpts {
    int swap_width = 1;  // 1 or 2
    double tol = 1e-3;
    uint64_t max_iters = 0;  // 0 = (k*m)^2/tol bound
};

// Discrete local search over input locations, seeded with seed_centers.
std::vector<Point> local_search(std::span<const WeightedPoint> pts, int k, CostKind kind,
                                const std::vector<Point>& seed_centers, const LocalSearchOpts& opts,
                                int dim);

// Geometric median via damped iteration with vertex handling; tolerance 1e-10.
Point weiszfeld(std::span<const WeightedPoint> pts, int dim);
// Weighted mean (exact 1-means optimum).
Point centroid(std::span<const WeightedPoint> pts, int dim);

struct Ball {
    Point center{};
    double radius = 0.0;
};
// Exact smallest enclosing ball, randomized incremental with a fixed seed.
Ball seb(std::span<const Point> pts, int dim, uint64_t seed = 0x5EED);

struct OracleResult {
    double cost = 0.0;
    std::vector<Point> centers;
};
// Exhaustive partition oracle: enumerate all partitions into <= k parts via
// subset DP; per part weiszfeld / centroid / seb. Requires |pts| <= 16, k <= 4.
OracleResult oracle_exact(std::span<const WeightedPoint> pts, int k, CostKind kind, int dim);

// Deterministic splitmix64-based RNG used for all seeded randomness.
struct Rng {
    uint64_t s;
    explicit Rng(uint64_t seed) : s(seed) {}
    uint64_t next() {
        uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    uint64_t below(uint64_t n) { return n ? next() % n : 0; }
};

}  // namespace rcq
