#pragma once

#include <string>
#include <vector>

#include "cph/exact.hpp"
#include "cph/netlist.hpp"

namespace cph {

// m x n edge-node incidence: +1 at the start node, -1 at the end node.
struct IncidenceMatrix {
  IntMatrix a;
  std::vector<std::string> labels;  // one per row (edge)

  int edges() const { return static_cast<int>(a.rows()); }
  int nodes() const { return static_cast<int>(a.cols()); }
  // Start/end node (zero-based) of an edge.
  int from(int edge) const;
  int to(int edge) const;
};

IncidenceMatrix incidence_matrix(const Circuit& c);

// A violating V-loop or I-cutset, named by edge labels.
struct Witness {
  std::string kind;  // "V-loop" or "I-cutset"
  std::vector<std::string> labels;
};

struct WellPosednessReport {
  bool a1 = true;  // no loop made only of voltage sources
  bool a2 = true;  // no cutset made only of current sources
  std::vector<Witness> witnesses;

  bool ok() const { return a1 && a2; }
};

// Rank tests on the reduced incidence matrix (last node grounded), plus
// a witness for each violation.
WellPosednessReport check_a1_a2(const IncidenceMatrix& a, const std::vector<ElementKind>& kinds);

// Twig/link split of the edge set. Both lists are in increasing edge order.
struct TreeDecomposition {
  std::vector<int> twigs;
  std::vector<int> links;
};

// Kind weights of the maximum-weight spanning tree: V > C > R > L > I.
int tree_weight(ElementKind kind);

// Greedy maximum-weight spanning tree with ties broken by lowest edge index.
// Maximises #V, then #V+#C, ... simultaneously, hence most CV and fewest LI
// elements. Throws AssumptionError if A1 or A2 fails.
TreeDecomposition optimal_tree(const IncidenceMatrix& a, const std::vector<ElementKind>& kinds);

// Builds a decomposition from an explicit twig set; throws AssumptionError
// unless the twigs form a spanning tree.
TreeDecomposition make_tree(const IncidenceMatrix& a, std::vector<int> twigs);

}  // namespace cph
