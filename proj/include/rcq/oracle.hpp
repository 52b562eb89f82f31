#pragma once

// Linear-scan reference implementations, independent of every index path.
// Used by the validation suites and the acceptance harness.

#include <optional>
#include <span>
#include <vector>

#include "rcq/geometry.hpp"
#include "rcq/solvers.hpp"

namespace rcq {
namespace oracle {

uint64_t scan_count(std::span<const Point> pts, const Rect& q, int dim);
std::optional<Rect> scan_extremes(std::span<const Point> pts, const Rect& q, int dim);
uint64_t scan_count_cell(std::span<const Point> pts, const Rect& q, const CellId& cell, int dim);
std::vector<uint32_t> scan_members(std::span<const Point> pts, const Rect& q, int dim);

// max over p in P∩q of d(p, A); 0 when P∩q is empty.
double scan_rstar(std::span<const Point> pts, const Rect& q, std::span<const Point> centers, int dim);

double scan_diameter(std::span<const Point> pts, const Rect& q, int dim);

// Independent second evaluator for the cost functions (naive loops).
double phi_reference(std::span<const WeightedPoint> pts, std::span<const Point> centers,
                     CostKind kind, int dim);

}  // namespace oracle
}  // namespace rcq
