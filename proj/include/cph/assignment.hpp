#pragma once

#include <cstdint>
#include <vector>

namespace cph {

// Minimum-cost perfect assignment on a square cost matrix (Hungarian method
// with potentials, O(n^3)). Returns row -> column.
std::vector<int> min_cost_assignment(const std::vector<std::vector<std::int64_t>>& cost);

}  // namespace cph
