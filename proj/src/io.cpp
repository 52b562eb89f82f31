#include "rcq/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rcq/solvers.hpp"

namespace rcq {

static_assert(std::endian::native == std::endian::little, "bundle format assumes little-endian host");

std::optional<Dataset> load_csv(const std::string& path, CsvError* err) {
    std::ifstream in(path);
    if (!in) {
        if (err) *err = {0, "cannot open " + path};
        return std::nullopt;
    }
    Dataset ds;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (line.back() == '\r') line.pop_back();
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string tok;
        bool bad = false;
        while (std::getline(ss, tok, ',')) {
            try {
                size_t used = 0;
                double v = std::stod(tok, &used);
                while (used < tok.size() && std::isspace(uint8_t(tok[used]))) ++used;
                if (used != tok.size()) bad = true;
                vals.push_back(v);
            } catch (...) {
                bad = true;
            }
            if (bad) break;
        }
        if (bad) {
            if (lineno == 1 && ds.points.empty()) continue;  // header
            if (err) *err = {lineno, "malformed row"};
            return std::nullopt;
        }
        if (ds.points.empty()) {
            ds.dim = int(vals.size());
        } else if (int(vals.size()) != ds.dim) {
            if (err) *err = {lineno, "inconsistent column count"};
            return std::nullopt;
        }
        if (ds.dim < 1 || ds.dim > kMaxDim) {
            if (err) *err = {lineno, "dimension out of range"};
            return std::nullopt;
        }
        Point p{};
        for (int i = 0; i < ds.dim; ++i) {
            if (!std::isfinite(vals[size_t(i)])) {
                if (err) *err = {lineno, "non-finite coordinate"};
                return std::nullopt;
            }
            p[i] = vals[size_t(i)];
        }
        ds.points.push_back(p);
    }
    if (ds.points.empty()) {
        if (err) *err = {lineno, "no data rows"};
        return std::nullopt;
    }
    return ds;
}

bool save_csv(const std::string& path, const Dataset& ds) {
    std::ofstream out(path);
    if (!out) return false;
    char buf[64];
    for (const Point& p : ds.points) {
        for (int i = 0; i < ds.dim; ++i) {
            snprintf(buf, sizeof buf, "%.17g", p[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
    return bool(out);
}

Dataset generate(const GenSpec& spec) {
    Dataset ds;
    ds.dim = spec.dim;
    Rng rng(spec.seed);
    if (spec.mixture == "uniform") {
        for (uint64_t i = 0; i < spec.n; ++i) {
            Point p{};
            for (int a = 0; a < spec.dim; ++a) p[a] = rng.uniform();
            ds.points.push_back(p);
        }
        return ds;
    }
    // Gaussian mixture via Box-Muller around uniformly placed component means.
    std::vector<Point> means(size_t(std::max(1, spec.components)));
    for (Point& m : means)
        for (int a = 0; a < spec.dim; ++a) m[a] = rng.uniform();
    for (uint64_t i = 0; i < spec.n; ++i) {
        const Point& m = means[rng.below(means.size())];
        Point p{};
        for (int a = 0; a < spec.dim; ++a) {
            double u1 = rng.uniform(), u2 = rng.uniform();
            u1 = std::max(u1, 1e-300);
            double g = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
            p[a] = m[a] + spec.sigma * g;
        }
        ds.points.push_back(p);
    }
    return ds;
}

namespace {
constexpr char kMagic[4] = {'R', 'C', 'Q', 'X'};
constexpr uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
template <typename T>
bool get(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return bool(in);
}
}  // namespace

bool save_bundle(const std::string& path, const Dataset& ds, const IndexParams& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) return false;
    out.write(kMagic, 4);
    put(out, kVersion);
    put(out, uint32_t(ds.dim));
    put(out, uint64_t(ds.points.size()));
    put(out, params.delta);
    put(out, uint32_t(params.k_max));
    put(out, params.seed);
    put(out, params.store_threshold);
    put(out, params.coreset_tree_max_n);
    put(out, params.engine.c1_median);
    put(out, params.engine.c1_means);
    put(out, params.extent.calibration);
    for (const Point& p : ds.points)
        for (int a = 0; a < ds.dim; ++a) put(out, p[a]);
    return bool(out);
}

std::optional<std::pair<Dataset, IndexParams>> load_bundle(const std::string& path,
                                                           std::string* err) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (err) *err = "cannot open " + path;
        return std::nullopt;
    }
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        if (err) *err = "not a bundle file";
        return std::nullopt;
    }
    uint32_t version = 0, dim = 0, kmax = 0, store_thr = 0;
    uint64_t n = 0;
    Dataset ds;
    IndexParams params;
    if (!get(in, version) || version != kVersion) {
        if (err) *err = "unsupported bundle version";
        return std::nullopt;
    }
    bool ok = get(in, dim) && get(in, n) && get(in, params.delta) && get(in, kmax) &&
              get(in, params.seed) && get(in, store_thr) && get(in, params.coreset_tree_max_n) &&
              get(in, params.engine.c1_median) && get(in, params.engine.c1_means) &&
              get(in, params.extent.calibration);
    if (!ok || dim < 1 || dim > uint32_t(kMaxDim)) {
        if (err) *err = "corrupt bundle header";
        return std::nullopt;
    }
    params.k_max = int(kmax);
    params.store_threshold = store_thr;
    ds.dim = int(dim);
    ds.points.resize(n);
    for (Point& p : ds.points)
        for (uint32_t a = 0; a < dim; ++a)
            if (!get(in, p[int(a)])) {
                if (err) *err = "truncated bundle payload";
                return std::nullopt;
            }
    return std::make_pair(std::move(ds), params);
}

}  // namespace rcq
