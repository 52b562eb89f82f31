// rcq: build a range-clustering index over a point set, then answer
// k-median / k-means / k-center / diameter / radius queries on axis-parallel
// rectangles with per-query k and epsilon.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "rcq/index.hpp"
#include "rcq/io.hpp"
#include "rcq/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

// Range syntax: "lo1,lo2,...xhi1,hi2,...".
bool parse_range(const std::string& text, int dim, rcq::Rect& out) {
    auto xpos = text.find('x');
    if (xpos == std::string::npos) return false;
    auto parse_list = [&](const std::string& s, rcq::Point& p) {
        std::stringstream ss(s);
        std::string tok;
        int i = 0;
        while (std::getline(ss, tok, ',')) {
            if (i >= dim) return false;
            try {
                p[i++] = std::stod(tok);
            } catch (...) {
                return false;
            }
        }
        return i == dim;
    };
    out.dim = dim;
    if (!parse_list(text.substr(0, xpos), out.lo)) return false;
    if (!parse_list(text.substr(xpos + 1), out.hi)) return false;
    for (int i = 0; i < dim; ++i)
        if (out.lo[i] > out.hi[i]) return false;
    return true;
}

std::string centers_json(const std::vector<rcq::Point>& cs, int dim) {
    std::string out = "[";
    char buf[64];
    for (size_t i = 0; i < cs.size(); ++i) {
        out += (i ? ", [" : "[");
        for (int a = 0; a < dim; ++a) {
            snprintf(buf, sizeof buf, "%.17g", cs[i][a]);
            out += (a ? "," : "") + std::string(buf);
        }
        out += "]";
    }
    return out + "]";
}

double now_ms() {
    using namespace std::chrono;
    return double(duration_cast<microseconds>(steady_clock::now().time_since_epoch()).count()) / 1000.0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"range-clustering queries over static point sets"};
    app.require_subcommand(1);

    // --- build ---
    auto* build = app.add_subcommand("build", "build an index bundle from CSV");
    std::string build_in, build_out;
    rcq::IndexParams params;
    build->add_option("input", build_in, "input CSV (d numeric columns, optional header)")->required();
    build->add_option("output", build_out, "output bundle path")->required();
    build->add_option("--delta", params.delta, "coreset tree accuracy");
    build->add_option("--kmax", params.k_max, "largest stored coreset k (power of two)");
    build->add_option("--seed", params.seed, "deterministic seed");
    build->add_option("--coreset-tree-max-n", params.coreset_tree_max_n,
                      "skip stored coresets above this point count");

    // --- query ---
    auto* query = app.add_subcommand("query", "run one query against a bundle");
    std::string q_bundle, q_type, q_range;
    int q_k = 1;
    double q_eps = 0.1;
    bool q_stable = false;
    query->add_option("bundle", q_bundle)->required();
    query->add_option("--type", q_type, "kmedian|kmeans|kcenter|diameter|radius")->required();
    query->add_option("--range", q_range, "lo1,lo2,...xhi1,hi2,...")->required();
    query->add_option("-k", q_k, "number of centers (clustering types)");
    query->add_option("--eps", q_eps, "accuracy parameter")->required();
    query->add_flag("--stable", q_stable, "suppress wall time for byte-identical replays");

    // --- validate ---
    auto* val = app.add_subcommand("validate", "run property suites against a bundle");
    std::string v_bundle, v_suite = "all";
    uint64_t v_budget = 64, v_seed = 0x5EED;
    val->add_option("bundle", v_bundle)->required();
    val->add_option("--suite", v_suite, "structures|coresets|clustering|extent|all");
    val->add_option("--budget", v_budget, "trial multiplier");
    val->add_option("--seed", v_seed);

    // --- gen ---
    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset CSV");
    rcq::GenSpec spec;
    std::string g_out;
    gen->add_option("output", g_out)->required();
    gen->add_option("--n", spec.n)->required();
    gen->add_option("--d", spec.dim)->required();
    gen->add_option("--mixture", spec.mixture, "uniform|gaussians");
    gen->add_option("--components", spec.components);
    gen->add_option("--sigma", spec.sigma);
    gen->add_option("--seed", spec.seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (build->parsed()) {
            rcq::CsvError cerr_info;
            auto ds = rcq::load_csv(build_in, &cerr_info);
            if (!ds) {
                std::cerr << "error: " << build_in << ":" << cerr_info.line << ": "
                          << cerr_info.message << "\n";
                return kExitData;
            }
            if (ds->dim < 2 || ds->dim > 8) {
                std::cerr << "error: dimension " << ds->dim << " outside [2,8]\n";
                return kExitData;
            }
            double t0 = now_ms();
            rcq::Index idx = rcq::Index::build(ds->points, ds->dim, params);
            double t1 = now_ms();
            if (!rcq::save_bundle(build_out, *ds, params)) {
                std::cerr << "error: cannot write " << build_out << "\n";
                return kExitData;
            }
            std::cerr << "built n=" << ds->points.size() << " d=" << ds->dim
                      << " nodes=" << idx.quadtree().nodes().size()
                      << " insertions=" << idx.projections().insertions_per_table()
                      << " build_ms=" << (t1 - t0) << "\n";
            return kExitOk;
        }

        if (query->parsed() || val->parsed()) {
            std::string path = query->parsed() ? q_bundle : v_bundle;
            std::string err;
            auto loaded = rcq::load_bundle(path, &err);
            if (!loaded) {
                std::cerr << "error: " << err << "\n";
                return kExitData;
            }
            rcq::Index idx = rcq::Index::build(loaded->first.points, loaded->first.dim,
                                               loaded->second);
            if (val->parsed()) {
                rcq::ValidationReport rep;
                if (v_suite == "structures") rep = rcq::validate_structures(idx, v_budget, v_seed);
                else if (v_suite == "coresets") rep = rcq::validate_coresets(idx, v_budget, v_seed);
                else if (v_suite == "clustering") rep = rcq::validate_clustering(idx, v_budget, v_seed);
                else if (v_suite == "extent") rep = rcq::validate_extent(idx, v_budget, v_seed);
                else if (v_suite == "all") rep = rcq::validate_all(idx, v_budget, v_seed);
                else {
                    std::cerr << "error: unknown suite " << v_suite << "\n";
                    return kExitUsage;
                }
                std::cout << rcq::report_to_json(rep);
                return kExitOk;
            }

            rcq::Rect range;
            if (!parse_range(q_range, idx.dim(), range)) {
                std::cerr << "error: bad range syntax\n";
                return kExitUsage;
            }
            char buf[128];
            std::string out = "{\"schema\": 1, \"type\": \"" + q_type + "\"";
            double t0 = now_ms();
            if (q_type == "kmedian" || q_type == "kmeans" || q_type == "kcenter") {
                if (q_k < 1 || size_t(q_k) > idx.size()) {
                    std::cerr << "error: k out of range\n";
                    return kExitUsage;
                }
                rcq::ClusteringAnswer ans = q_type == "kmedian" ? idx.kmedian(range, q_k, q_eps)
                                            : q_type == "kmeans" ? idx.kmeans(range, q_k, q_eps)
                                                                 : idx.kcenter(range, q_k, q_eps);
                snprintf(buf, sizeof buf, ", \"k\": %d, \"eps\": %.17g", q_k, q_eps);
                out += buf;
                out += ", \"centers\": " + centers_json(ans.centers, idx.dim());
                snprintf(buf, sizeof buf, ", \"cost\": %.17g, \"coreset_size\": %llu",
                         ans.cost, (unsigned long long)ans.coreset_size);
                out += buf;
                snprintf(buf, sizeof buf, ", \"point_accesses\": %llu",
                         (unsigned long long)ans.point_accesses);
                out += buf;
                if (ans.empty_range) out += ", \"warning\": \"empty range\"";
            } else if (q_type == "diameter" || q_type == "radius") {
                rcq::ExtentAnswer ans = q_type == "diameter" ? idx.diameter(range, q_eps)
                                                             : idx.radius(range, q_eps);
                snprintf(buf, sizeof buf, ", \"eps\": %.17g", q_eps);
                out += buf;
                snprintf(buf, sizeof buf, ", \"value\": %.17g, \"coreset_size\": %llu",
                         ans.value, (unsigned long long)ans.coreset_size);
                out += buf;
                if (q_type == "radius" && !ans.empty)
                    out += ", \"center\": " + centers_json({ans.center}, idx.dim());
                snprintf(buf, sizeof buf, ", \"point_accesses\": %llu",
                         (unsigned long long)ans.point_accesses);
                out += buf;
                if (ans.empty) out += ", \"warning\": \"empty range\"";
            } else {
                std::cerr << "error: unknown query type " << q_type << "\n";
                return kExitUsage;
            }
            if (!q_stable) {
                snprintf(buf, sizeof buf, ", \"wall_ms\": %.3f", now_ms() - t0);
                out += buf;
            }
            out += "}";
            std::cout << out << "\n";
            return kExitOk;
        }

        if (gen->parsed()) {
            if (spec.n == 0) {
                std::cerr << "error: n must be positive\n";
                return kExitUsage;
            }
            if (spec.dim < 2 || spec.dim > 8) {
                std::cerr << "error: dimension outside [2,8]\n";
                return kExitUsage;
            }
            rcq::Dataset ds = rcq::generate(spec);
            if (!rcq::save_csv(g_out, ds)) {
                std::cerr << "error: cannot write " << g_out << "\n";
                return kExitData;
            }
            return kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
