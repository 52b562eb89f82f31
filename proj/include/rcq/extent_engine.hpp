#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rcq/persistent.hpp"
#include "rcq/point_access.hpp"

namespace rcq {

struct ExtentCoreset {
    std::vector<uint32_t> pids;   // selected points of P∩Q (deduplicated)
    double apx = 0.0;             // constant-factor diameter estimate (MEB diagonal)
    StdLen grid_side{};
    bool exact = false;  // apx == 0 or tiny point count: coreset is all of P∩Q's locations
};

struct ExtentConfig {
    // grid side = sfloor(eps_eff/(cal*d) * apx); cal*d keeps the displacement
    // argument valid for every eps (eps_eff = min(eps,1)).
    double calibration = 16.0;
};

// Boundary cells of the smallest enclosing box plus per-axis extreme cells of
// the interior grid; one point of P∩Q per selected cell.
ExtentCoreset extent_coreset(const IndexDispatch& disp, const AxisExtremeTables& aet,
                             const Rect& q, double eps, const ExtentConfig& cfg);

struct ExtentAnswer {
    double value = 0.0;
    Point center{};  // radius queries
    uint64_t coreset_size = 0;
    uint64_t point_accesses = 0;
    bool empty = false;
};

ExtentAnswer diameter_query(const IndexDispatch& disp, const AxisExtremeTables& aet, const Rect& q,
                            double eps, const ExtentConfig& cfg);
ExtentAnswer radius_query(const IndexDispatch& disp, const AxisExtremeTables& aet, const Rect& q,
                          double eps, const ExtentConfig& cfg);

}  // namespace rcq
