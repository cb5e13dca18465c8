#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cph/error.hpp"
#include "cph/graph.hpp"
#include "cph/running_example.hpp"
#include "oracles.hpp"

using namespace cph;

namespace {

std::vector<std::string> labels_of(const Circuit& c, const std::vector<int>& edges) {
  std::vector<std::string> out;
  for (int e : edges) out.push_back(c.element(e).label);
  return out;
}

}  // namespace

TEST_CASE("incidence matrix of a single edge") {
  const Circuit c = parse_netlist("C1 1 2 1.0");
  const IncidenceMatrix a = incidence_matrix(c);
  REQUIRE(a.edges() == 1);
  REQUIRE(a.nodes() == 2);
  CHECK(a.a(0, 0) == 1);
  CHECK(a.a(0, 1) == -1);
  CHECK(a.from(0) == 0);
  CHECK(a.to(0) == 1);
}

TEST_CASE("incidence matrix of the running example") {
  const Circuit c = parse_netlist(kRunningExampleNetlist);
  const IncidenceMatrix a = incidence_matrix(c);
  IntMatrix expected(8, 5);
  expected << 1, -1, 0, 0, 0,   //
      1, 0, -1, 0, 0,           //
      1, 0, 0, -1, 0,           //
      1, 0, 0, 0, -1,           //
      0, 1, -1, 0, 0,           //
      0, 0, 1, -1, 0,           //
      0, 0, 0, 1, -1,           //
      0, -1, 0, 0, 1;
  CHECK(a.a == expected);
  CHECK(a.labels == std::vector<std::string>{"R1", "V2", "C3", "L4", "R5", "C6", "L7", "I8"});
  // Every row sums to zero.
  CHECK((a.a.rowwise().sum().array() == 0).all());
}

TEST_CASE("parallel edges give identical rows") {
  const Circuit c = parse_netlist("R1 1 2 1\nC2 1 2 1\nL3 2 1 1");
  const IncidenceMatrix a = incidence_matrix(c);
  CHECK(a.a.row(0) == a.a.row(1));
  CHECK(a.a.row(0) == -a.a.row(2));
}

TEST_CASE("A1 and A2 on the running example") {
  const Circuit c = parse_netlist(kRunningExampleNetlist);
  const auto r = check_a1_a2(incidence_matrix(c), c.kinds());
  CHECK(r.a1);
  CHECK(r.a2);
  CHECK(r.witnesses.empty());
}

TEST_CASE("V-loop witness") {
  const Circuit c = parse_netlist("V1 1 2 1\nV2 1 2 cos(t)\nR3 1 2 1");
  const auto r = check_a1_a2(incidence_matrix(c), c.kinds());
  CHECK_FALSE(r.a1);
  CHECK(r.a2);
  REQUIRE(r.witnesses.size() == 1);
  CHECK(r.witnesses[0].kind == "V-loop");
  CHECK(r.witnesses[0].labels == std::vector<std::string>{"V1", "V2"});
  CHECK_THROWS_AS(optimal_tree(incidence_matrix(c), c.kinds()), AssumptionError);
}

TEST_CASE("I-cutset witness") {
  const Circuit c = parse_netlist("I1 1 2 1\nR2 2 3 1\nC3 3 2 1");
  const auto r = check_a1_a2(incidence_matrix(c), c.kinds());
  CHECK(r.a1);
  CHECK_FALSE(r.a2);
  REQUIRE(r.witnesses.size() == 1);
  CHECK(r.witnesses[0].kind == "I-cutset");
  CHECK(r.witnesses[0].labels == std::vector<std::string>{"I1"});
  CHECK_THROWS_AS(optimal_tree(incidence_matrix(c), c.kinds()), AssumptionError);
}

TEST_CASE("A1/A2 agree with the rational rank oracle and witnesses are genuine") {
  std::mt19937_64 rng(11);
  int violations = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const int m = n - 1 + static_cast<int>(rng() % 7);
    const Circuit c = oracle::random_circuit(rng, n, m, "CLRVVII");
    const auto [a1, a2] = oracle::a1_a2(c);
    const auto r = check_a1_a2(incidence_matrix(c), c.kinds());
    REQUIRE(r.a1 == a1);
    REQUIRE(r.a2 == a2);
    violations += !a1 || !a2;
    for (const Witness& w : r.witnesses) {
      std::vector<int> edges;
      for (const auto& l : w.labels) edges.push_back(c.find(l));
      if (w.kind == "V-loop") {
        for (int e : edges) CHECK(c.kind(e) == ElementKind::VoltageSource);
        // Dependent set with every proper subset independent: a single loop.
        CHECK(oracle::rational_rank(oracle::reduced_rows(c, edges)) == static_cast<int>(edges.size()) - 1);
      } else {
        REQUIRE(w.kind == "I-cutset");
        for (int e : edges) CHECK(c.kind(e) == ElementKind::CurrentSource);
        std::vector<int> rest;
        for (int e = 0; e < c.edge_count(); ++e)
          if (std::find(edges.begin(), edges.end(), e) == edges.end()) rest.push_back(e);
        CHECK(oracle::rational_rank(oracle::reduced_rows(c, rest)) < n - 1);
      }
    }
  }
  CHECK(violations > 50);
}

TEST_CASE("optimal tree of the running example") {
  const Circuit c = parse_netlist(kRunningExampleNetlist);
  const TreeDecomposition td = optimal_tree(incidence_matrix(c), c.kinds());
  CHECK(labels_of(c, td.twigs) == std::vector<std::string>{"R1", "V2", "C3", "L4"});
  CHECK(labels_of(c, td.links) == std::vector<std::string>{"R5", "C6", "L7", "I8"});
}

TEST_CASE("V-C loop puts the source in the tree") {
  const Circuit c = parse_netlist("V1 1 2 sin(t)\nC2 1 2 0.5");
  const TreeDecomposition td = optimal_tree(incidence_matrix(c), c.kinds());
  CHECK(td.twigs == std::vector<int>{0});
  CHECK(td.links == std::vector<int>{1});
}

TEST_CASE("C-L loop puts the capacitor in the tree") {
  const Circuit c = parse_netlist("L1 1 2 0.5\nC2 1 2 0.5");
  const TreeDecomposition td = optimal_tree(incidence_matrix(c), c.kinds());
  CHECK(td.twigs == std::vector<int>{1});
  CHECK(td.links == std::vector<int>{0});
}

TEST_CASE("optimal tree maximises every kind threshold count over all spanning trees") {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const int m = std::min(10, n - 1 + static_cast<int>(rng() % 6));
    const Circuit c = oracle::random_circuit(rng, n, m, "CLRVI");
    const auto [a1, a2] = oracle::a1_a2(c);
    if (!a1 || !a2) continue;
    const IncidenceMatrix a = incidence_matrix(c);
    const TreeDecomposition td = optimal_tree(a, c.kinds());
    REQUIRE(static_cast<int>(td.twigs.size()) == n - 1);
    const auto trees = oracle::spanning_trees(c);
    REQUIRE(std::find(trees.begin(), trees.end(), td.twigs) != trees.end());
    for (int threshold = 1; threshold <= 5; ++threshold) {
      auto count = [&](const std::vector<int>& twigs) {
        int k = 0;
        for (int e : twigs) k += tree_weight(c.kind(e)) >= threshold;
        return k;
      };
      int best = 0;
      for (const auto& t : trees) best = std::max(best, count(t));
      CHECK(count(td.twigs) == best);
    }
    ++checked;
  }
  CHECK(checked > 100);
}

TEST_CASE("tree weights order the kinds") {
  CHECK(tree_weight(ElementKind::VoltageSource) > tree_weight(ElementKind::Capacitor));
  CHECK(tree_weight(ElementKind::Capacitor) > tree_weight(ElementKind::Resistor));
  CHECK(tree_weight(ElementKind::Resistor) > tree_weight(ElementKind::Inductor));
  CHECK(tree_weight(ElementKind::Inductor) > tree_weight(ElementKind::CurrentSource));
}

TEST_CASE("make_tree rejects non-trees") {
  const Circuit c = parse_netlist(kRunningExampleNetlist);
  const IncidenceMatrix a = incidence_matrix(c);
  CHECK_THROWS_AS(make_tree(a, {0, 1, 2}), AssumptionError);
  CHECK_THROWS_AS(make_tree(a, {0, 1, 4, 5}), AssumptionError);  // R1 V2 R5 form a loop
  const TreeDecomposition td = make_tree(a, {4, 1, 2, 3});
  CHECK(td.twigs == std::vector<int>{1, 2, 3, 4});
  CHECK(td.links == std::vector<int>{0, 5, 6, 7});
}
