#include <algorithm>
#include <cassert>
#include <cmath>

#include "rcq/median_engine.hpp"
#include "rcq/rangetree.hpp"
#include "rcq/solvers.hpp"

namespace rcq {

namespace {

// Splitmix-style mixing for per-node deterministic seeds.
uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Spot-check the coreset inequality against random center sets.
bool spot_check(std::span<const WeightedPoint> full, std::span<const WeightedPoint> cs, int kbar,
                double delta, CostKind kind, int dim, uint64_t seed, int trials) {
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        std::vector<Point> centers(size_t(1 + rng.below(uint64_t(kbar))));
        for (Point& c : centers) {
            if (rng.below(2) == 0 && !full.empty()) {
                c = full[rng.below(full.size())].p;
            } else {
                for (int i = 0; i < dim; ++i) c[i] = rng.uniform();
            }
        }
        double pf = phi_cost(full, centers, kind, dim);
        double pc = phi_cost(cs, centers, kind, dim);
        double slack = delta * pf + 1e-12 * std::max(1.0, pf);
        if (pc < pf - slack || pc > pf + slack) return false;
    }
    return true;
}

}  // namespace

void CoresetTree::build(const RangeTree& rt, const std::vector<Point>* pts, int dim,
                        const Params& p) {
    params_ = p;
    dim_ = dim;
    pts_ = pts;
    stored_.clear();
    nk_ = 1;
    while ((1 << nk_) <= p.k_max) ++nk_;  // k̄ = 1,2,...,2^(nk_-1)

    EngineConfig cfg;
    cfg.seed = p.seed;

    for (uint32_t gid = 0; gid < rt.canonical_count(); ++gid) {
        uint32_t sz = rt.node_size(gid);
        if (sz < p.store_threshold) continue;
        auto pid_span = rt.node_pids(gid);
        std::vector<WeightedPoint> full;
        full.reserve(sz);
        for (uint32_t pid : pid_span) full.push_back(WeightedPoint{(*pts)[pid], 1.0, pid});

        std::vector<StoredSet> sets(size_t(2 * nk_));
        bool any = false;
        PointAccess epa = PointAccess::explicit_backend(full, dim);
        for (int kindi = 0; kindi < 2; ++kindi) {
            CostKind kind = kindi == 0 ? CostKind::Median : CostKind::Means;
            for (int ki = 0; ki < nk_; ++ki) {
                int kbar = 1 << ki;
                uint64_t seed = mix(p.seed, (uint64_t(gid) << 8) | uint64_t(2 * ki + kindi));
                // Bi-criteria centers: distance-weighted sample, then the
                // exponential grid snap at accuracy delta. The paper-grade
                // divisor leaves nothing to merge at desk scale, so tighter
                // grids are tried first, each gated by the spot check.
                int m = std::min<int>(int(sz), 2 * kbar + int(std::ceil(std::log2(double(sz) + 2))));
                ApproxCenters bi;
                bi.kind = kind;
                bi.c1 = cfg.c1_internal;
                bi.centers = d2_sample(full, m, kind, seed, dim);
                const double divisors[3] = {4.0 * dim, 16.0 * dim, 0.0};
                Coreset cs;
                bool ok = false;
                for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
                    EngineConfig acfg = cfg;
                    acfg.grid_divisor = divisors[attempt];
                    cs = coreset_from_centers(epa, bi, kbar, p.delta, kind, acfg);
                    if (cs.members.size() >= size_t(0.8 * double(sz))) break;  // no compression left
                    ok = spot_check(full, cs.members, kbar, p.delta, kind, dim, mix(seed, 77), 32);
                }
                StoredSet& out = sets[size_t(2 * ki + kindi)];
                if (ok && cs.members.size() < size_t(0.8 * double(sz))) {
                    out.members = std::move(cs.members);
                    out.stored = true;
                    any = true;
                }
                // Otherwise the node stays raw for this (kind, k̄).
            }
        }
        if (any) stored_.emplace_back(gid, std::move(sets));
    }
    built_ = true;
}

const std::vector<CoresetTree::StoredSet>* CoresetTree::find(uint32_t gid) const {
    auto it = std::lower_bound(stored_.begin(), stored_.end(), gid,
                               [](const auto& a, uint32_t g) { return a.first < g; });
    if (it == stored_.end() || it->first != gid) return nullptr;
    return &it->second;
}

std::vector<WeightedPoint> CoresetTree::canonical_coreset(const RangeTree& rt, const Rect& q,
                                                          int k, int kind) const {
    std::vector<WeightedPoint> out;
    int kc = std::min(k, params_.k_max);
    int ki = 0;
    while ((1 << ki) < kc) ++ki;  // smallest power of two >= min(k, K_max)
    bool use_stored = (k <= params_.k_max);
    for (uint32_t gid : rt.canonical_nodes(q)) {
        const std::vector<StoredSet>* sets = use_stored ? find(gid) : nullptr;
        if (sets != nullptr) {
            const StoredSet& s = (*sets)[size_t(2 * ki + kind)];
            if (s.stored) {
                out.insert(out.end(), s.members.begin(), s.members.end());
                continue;
            }
        }
        for (uint32_t pid : rt.node_pids(gid)) out.push_back(WeightedPoint{(*pts_)[pid], 1.0, pid});
    }
    return out;
}

}  // namespace rcq
