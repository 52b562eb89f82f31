#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcq/geometry.hpp"
#include "rcq/index.hpp"

namespace rcq {

struct Dataset {
    std::vector<Point> points;
    int dim = 0;
};

struct CsvError {
    size_t line = 0;
    std::string message;
};

// Comma-separated floats, optional non-numeric header line.
std::optional<Dataset> load_csv(const std::string& path, CsvError* err);
bool save_csv(const std::string& path, const Dataset& ds);

struct GenSpec {
    uint64_t n = 0;
    int dim = 2;
    std::string mixture = "uniform";  // uniform | gaussians
    int components = 5;               // gaussians
    double sigma = 0.05;
    uint64_t seed = 1;
};
Dataset generate(const GenSpec& spec);

// Bundle: versioned header + parameters + the raw dataset, little-endian.
// Structures are rebuilt deterministically on load.
bool save_bundle(const std::string& path, const Dataset& ds, const IndexParams& params);
std::optional<std::pair<Dataset, IndexParams>> load_bundle(const std::string& path,
                                                           std::string* err);

}  // namespace rcq
