#pragma once

#include <cstdint>
#include <Eigen/Core>

namespace cph {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

// Rank by fraction-free (Bareiss) elimination. Exact as long as every minor
// fits in int64, which always holds for incidence-derived matrices.
int exact_rank(const IntMatrix& a);

// Exact solution of M X = B for square nonsingular M with integer solution,
// via Bareiss elimination with exact back substitution.
// Returns false if M is singular or some entry of X is not an integer.
bool exact_solve(const IntMatrix& m, const IntMatrix& b, IntMatrix& x);

}  // namespace cph
