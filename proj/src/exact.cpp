#include "cph/exact.hpp"

#include <utility>

namespace cph {

namespace {

// Bareiss forward elimination in place. Returns the rank; `pivot_cols` receives
// the pivot column of each pivot row. Only columns [0, ncols) are used for pivoting.
int bareiss_forward(IntMatrix& a, Eigen::Index ncols, std::vector<Eigen::Index>& pivot_cols) {
  const Eigen::Index rows = a.rows();
  std::int64_t prev = 1;
  Eigen::Index r = 0;
  pivot_cols.clear();
  for (Eigen::Index c = 0; c < ncols && r < rows; ++c) {
    Eigen::Index p = r;
    while (p < rows && a(p, c) == 0) ++p;
    if (p == rows) continue;
    if (p != r) a.row(p).swap(a.row(r));
    const std::int64_t piv = a(r, c);
    for (Eigen::Index i = r + 1; i < rows; ++i) {
      for (Eigen::Index j = c + 1; j < a.cols(); ++j) a(i, j) = (piv * a(i, j) - a(i, c) * a(r, j)) / prev;
      a(i, c) = 0;
    }
    // Entries of rows above the pivot row in skipped columns stay untouched; they are not used again.
    prev = piv;
    pivot_cols.push_back(c);
    ++r;
  }
  return static_cast<int>(r);
}

}  // namespace

int exact_rank(const IntMatrix& a) {
  IntMatrix work = a;
  std::vector<Eigen::Index> piv;
  return bareiss_forward(work, work.cols(), piv);
}

bool exact_solve(const IntMatrix& m, const IntMatrix& b, IntMatrix& x) {
  const Eigen::Index n = m.rows();
  if (m.cols() != n || b.rows() != n) return false;
  IntMatrix aug(n, n + b.cols());
  aug << m, b;
  std::vector<Eigen::Index> piv;
  if (bareiss_forward(aug, n, piv) != n) return false;
  // After Bareiss the last pivot is +-det(M); with it as common denominator
  // every back-substitution division is exact.
  const std::int64_t det = aug(n - 1, n - 1);
  x.resize(n, b.cols());
  IntMatrix num(n, b.cols());
  for (Eigen::Index k = 0; k < b.cols(); ++k) {
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      std::int64_t acc = det * aug(i, n + k);
      for (Eigen::Index j = i + 1; j < n; ++j) acc -= aug(i, j) * num(j, k);
      if (acc % aug(i, i) != 0) return false;
      num(i, k) = acc / aug(i, i);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < b.cols(); ++k) {
      if (num(i, k) % det != 0) return false;
      x(i, k) = num(i, k) / det;
    }
  return true;
}

}  // namespace cph
