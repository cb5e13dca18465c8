#pragma once

#include <array>
#include <string>
#include <vector>

#include "cph/exact.hpp"
#include "cph/graph.hpp"

namespace cph {

// F[e, f] for link e (row) and twig f (column), entries in {-1, 0, +1}:
// v_N = -F v_T and i_T = F^T i_N.
struct LoopCutsetMatrix {
  IntMatrix f;
  std::vector<int> links;  // row -> edge
  std::vector<int> twigs;  // column -> edge

  // Entry for a (link, twig) pair of edge indices; 0 if either is not in range.
  int at(int link, int twig) const;
};

// F = -A[N, 0..n-2] * A[T, 0..n-2]^{-1}, in exact integer arithmetic.
LoopCutsetMatrix compute_f(const IncidenceMatrix& a, const TreeDecomposition& td);

enum class TwigGroup { c, l, v, r };
enum class LinkGroup { L, C, I, R };

// Edge sets c, l, v, r (twigs) and L, C, I, R (links), each in edge order.
struct EdgePartition {
  std::array<std::vector<int>, 4> twig_sets;
  std::array<std::vector<int>, 4> link_sets;

  const std::vector<int>& operator[](TwigGroup g) const { return twig_sets[static_cast<std::size_t>(g)]; }
  const std::vector<int>& operator[](LinkGroup g) const { return link_sets[static_cast<std::size_t>(g)]; }
  int size(TwigGroup g) const { return static_cast<int>((*this)[g].size()); }
  int size(LinkGroup g) const { return static_cast<int>((*this)[g].size()); }

  // Twigs in (c, l, v, r) order followed by links in (L, C, I, R) order.
  std::vector<int> partition_order() const;
};

const char* group_name(TwigGroup g);
const char* group_name(LinkGroup g);

// Throws AssumptionError if a voltage source is a link or a current source a twig.
EdgePartition partition_edges(const TreeDecomposition& td, const std::vector<ElementKind>& kinds);

// F regrouped: rows (L, C, I, R), columns (c, l, v, r).
class BlockF {
 public:
  // Throws AssumptionError naming the first nonzero in a Cl, Cr or Rl block.
  BlockF(const LoopCutsetMatrix& f, const EdgePartition& p, const std::vector<std::string>& labels);

  const IntMatrix& block(LinkGroup row, TwigGroup col) const {
    return blocks_[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
  }
  // Whole F with rows and columns permuted into block order.
  const IntMatrix& reordered() const { return reordered_; }
  const std::vector<int>& row_edges() const { return row_edges_; }
  const std::vector<int>& col_edges() const { return col_edges_; }

 private:
  std::array<std::array<IntMatrix, 4>, 4> blocks_;
  IntMatrix reordered_;
  std::vector<int> row_edges_;
  std::vector<int> col_edges_;
};

}  // namespace cph
