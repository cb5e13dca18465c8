#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "cph/assignment.hpp"
#include "cph/circgen.hpp"
#include "cph/error.hpp"
#include "cph/sigma.hpp"
#include "cph/running_example.hpp"
#include "oracles.hpp"

using namespace cph;

namespace {

constexpr int X = kNegInf;

// Storage group of an edge: 0 for capacitors, 1 for inductors, 2 for resistors.
int group_of(ElementKind k) {
  switch (k) {
    case ElementKind::Capacitor: return 0;
    case ElementKind::Inductor: return 1;
    default: return 2;
  }
}

std::vector<Circuit> random_circuits(std::uint64_t seed, int count, int max_edges) {
  std::vector<Circuit> out;
  GenConfig cfg;
  cfg.max_edges = max_edges;
  cfg.coupling_probability = 0.5;
  for (int k = 0; k < count; ++k) {
    cfg.seed = seed + static_cast<std::uint64_t>(k);
    out.push_back(generate_circuit(cfg).circuit);
  }
  return out;
}

}  // namespace

TEST_CASE("signature matrix of the running example") {
  const CphDae dae = build_dae(parse_netlist(kRunningExampleNetlist));
  const SignatureMatrix s = build_sigma(dae);
  Eigen::MatrixXi expected(6, 6);
  // rows f_C6 f_c3 f_l4 f_L7 f_r1 f_R5, columns in the same order
  expected << 0, 0, X, X, X, X,  //
      1, 1, X, 0, X, X,          //
      X, X, 0, 0, X, X,          //
      X, 0, 1, 1, X, X,          //
      X, X, X, X, 0, 0,          //
      X, X, X, X, 0, 0;
  CHECK(s.sigma == expected);
  CHECK(s.row_labels == std::vector<std::string>{"f_C6", "f_c3", "f_l4", "f_L7", "f_r1", "f_R5"});
  CHECK(s.col_labels == std::vector<std::string>{"q_C6", "q_c3", "phi_l4", "phi_L7", "v_r1", "v_R5"});

  const StructuralResult sr = analyze_structure(dae);
  CHECK(sr.hvt.value == 2);
  CHECK(sr.offsets.c == std::vector<int>{1, 0, 1, 0, 0, 0});
  CHECK(sr.offsets.d == std::vector<int>{1, 1, 1, 1, 0, 0});
  CHECK(sr.dof == 2);
  CHECK(sr.index == 2);
  CHECK(sr.classified_index == 2);
  CHECK(sr.sa_amenable);
  CHECK(offsets_valid(sr.sigma, sr.offsets, sr.hvt));
  const Offsets block = block_offsets(dae);
  CHECK(block.c == sr.offsets.c);
  CHECK(block.d == sr.offsets.d);
  // Outputs: x_v2 needs q_C6', x_I8 needs phi_l4'.
  const SignatureMatrix full = build_sigma(dae, true);
  REQUIRE(full.rows() == 8);
  CHECK(full.row_labels[6] == "f_v2");
  CHECK(full.row_labels[7] == "f_I8");
  CHECK(full.sigma(6, 0) == 1);
  CHECK(full.sigma(7, 2) == 1);
  CHECK(full.sigma(6, 6) == 0);
  CHECK(sr.full_offsets.c[6] == 0);
  CHECK(sr.full_offsets.d[6] == 0);
}

TEST_CASE("system Jacobian of the running example") {
  const CphDae dae = build_dae(parse_netlist(kRunningExampleNetlist));
  const StructuralResult sr = analyze_structure(dae);
  const double C3 = 0.50689, L4 = 0.91901, C6 = 0.48617, L7 = 0.57219, R1 = 0.8666, R5 = 0.58256;
  Eigen::MatrixXd jc(2, 2), jl(2, 2), jg(2, 2);
  jc << 1 / C6, -1 / C3, 1, 1;
  jl << 1 / L4, 1 / L7, -1, 1;
  jg << 1 / R1, -1 / R5, 1, 1;
  CHECK((sr.jacobian.jc - jc).norm() < 1e-12);
  CHECK((sr.jacobian.jl - jl).norm() < 1e-12);
  CHECK((sr.jacobian.jg - jg).norm() < 1e-12);
  const double det = jc.determinant() * jl.determinant() * jg.determinant();
  CHECK(sr.jacobian.det == Catch::Approx(det).epsilon(1e-12));
  CHECK(sr.jacobian.det == Catch::Approx(32.8024).epsilon(1e-5));
  CHECK(sr.jacobian.nonsingular);
}

TEST_CASE("assignment solver finds the minimum") {
  CHECK(min_cost_assignment({{4, 1, 3}, {2, 0, 5}, {3, 2, 2}}) == std::vector<int>{1, 0, 2});
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 7);
    std::vector<std::vector<std::int64_t>> cost(static_cast<std::size_t>(n), std::vector<std::int64_t>(static_cast<std::size_t>(n)));
    Eigen::MatrixXi neg(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = static_cast<std::int64_t>(rng() % 20);
        neg(i, j) = -static_cast<int>(cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      }
    const auto a = min_cost_assignment(cost);
    std::int64_t total = 0;
    for (int i = 0; i < n; ++i) total += cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(a[static_cast<std::size_t>(i)])];
    CHECK(-total == oracle::brute_force_hvt_value(neg));
  }
}

TEST_CASE("HVT value matches brute force and the closed form") {
  int checked = 0;
  for (const Circuit& c : random_circuits(100, 120, 9)) {
    const CphDae dae = build_dae(c);
    const StructuralResult sr = analyze_structure(dae);
    const auto& p = dae.partition();
    CHECK(sr.hvt.value == oracle::brute_force_hvt_value(sr.sigma.sigma));
    CHECK(sr.full_hvt.value == oracle::brute_force_hvt_value(sr.full_sigma.sigma));
    CHECK(sr.hvt.value == p.size(TwigGroup::c) + p.size(LinkGroup::L));
    CHECK(sr.dof == p.size(TwigGroup::c) + p.size(LinkGroup::L));
    ++checked;
  }
  CHECK(checked == 120);
}

TEST_CASE("maximal transversals stay inside the diagonal blocks") {
  for (const Circuit& c : random_circuits(300, 80, 10)) {
    const CphDae dae = build_dae(c);
    const SignatureMatrix s = build_sigma(dae);
    const auto& p = dae.partition();
    const int value = p.size(TwigGroup::c) + p.size(LinkGroup::L);
    const auto all = oracle::max_transversals(s.sigma, value);
    REQUIRE_FALSE(all.empty());
    CHECK(oracle::max_transversals(s.sigma, value + 1).empty());
    for (const auto& t : all)
      for (int i = 0; i < s.rows(); ++i)
        CHECK(group_of(c.kind(s.row_edges[static_cast<std::size_t>(i)])) ==
              group_of(c.kind(s.col_edges[static_cast<std::size_t>(t[static_cast<std::size_t>(i)])])));
  }
}

TEST_CASE("SPD block construction: P is nonsingular for any N") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 3.0);
  double worst = 1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n1 = 1 + static_cast<int>(rng() % 4), n2 = 1 + static_cast<int>(rng() % 4);
    const Eigen::MatrixXd m = oracle::random_spd(n1 + n2, rng);
    Eigen::MatrixXd n(n2, n1);
    for (int i = 0; i < n2; ++i)
      for (int j = 0; j < n1; ++j) n(i, j) = g(rng);
    Eigen::MatrixXd p(n1 + n2, n1 + n2);
    p.topLeftCorner(n1, n1) = m.topLeftCorner(n1, n1) - n.transpose() * m.bottomLeftCorner(n2, n1);
    p.topRightCorner(n1, n2) = m.topRightCorner(n1, n2) - n.transpose() * m.bottomRightCorner(n2, n2);
    p.bottomLeftCorner(n2, n1) = n;
    p.bottomRightCorner(n2, n2) = Eigen::MatrixXd::Identity(n2, n2);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(p);
    const auto sv = svd.singularValues();
    worst = std::min(worst, sv(sv.size() - 1) / sv(0));
  }
  CHECK(worst > 1e-8);
}

TEST_CASE("System Jacobian factorises over the diagonal blocks") {
  for (const Circuit& c : random_circuits(500, 200, 12)) {
    GenConfig cfg;
    const CphDae dae = build_dae(c);
    const StructuralResult sr = analyze_structure(dae, 7);
    REQUIRE(sr.jacobian.nonsingular);
    CHECK(sr.sa_amenable);
    const double product = sr.jacobian.det_c * sr.jacobian.det_l * sr.jacobian.det_g;
    CHECK(std::abs(sr.jacobian.det - product) <= 1e-9 * std::abs(sr.jacobian.det));
    CHECK(std::abs(sr.jacobian.j.determinant() - sr.jacobian.det) <= 1e-9 * std::abs(sr.jacobian.det));
  }
}

TEST_CASE("random SPD couplings keep J nonsingular") {
  std::mt19937_64 rng(41);
  const Circuit c = parse_netlist(kRunningExampleNetlist);
  for (int trial = 0; trial < 200; ++trial) {
    CouplingBlocks cb;
    cb.capacitance = LabeledMatrix{{"C3", "C6"}, oracle::random_spd(2, rng)};
    cb.inductance = LabeledMatrix{{"L4", "L7"}, oracle::random_spd(2, rng)};
    cb.conductance = LabeledMatrix{{"R1", "R5"}, oracle::random_spd(2, rng)};
    const StructuralResult sr = analyze_structure(build_dae(c, cb), static_cast<std::uint64_t>(trial));
    CHECK(sr.sa_amenable);
    CHECK(sr.jacobian.sv_ratio > 1e-12);
  }
}

TEST_CASE("index classifier on small circuits") {
  auto analyse = [](const char* text) { return analyze_structure(build_dae(parse_netlist(text))); };
  const StructuralResult lc = analyse("C1 1 2 0.5\nL2 1 2 0.5");
  CHECK(lc.classified_index == 0);
  CHECK(lc.index == 0);
  CHECK(lc.dof == 2);
  const StructuralResult rc = analyse("R1 1 2 2\nC2 1 2 0.5");
  CHECK(rc.classified_index == 1);
  CHECK(rc.index == 1);
  CHECK(rc.dof == 1);
  const StructuralResult rlc = analyse("V1 1 2 sin(t)\nR2 2 3 1\nL3 3 4 0.5\nC4 4 1 0.25");
  CHECK(rlc.index == 1);
  CHECK(rlc.dof == 2);
}

TEST_CASE("pure resistor network") {
  const StructuralResult sr = analyze_structure(build_dae(parse_netlist("R1 1 2 1\nR2 1 2 2\nR3 2 3 1")));
  CHECK((sr.sigma.sigma.array() == 0 || sr.sigma.sigma.array() == X).all());
  CHECK((sr.sigma.sigma.array() == 0).count() == 5);
  CHECK(sr.hvt.value == 0);
  CHECK(sr.dof == 0);
  CHECK(sr.index == 1);
  CHECK(sr.classified_index == 1);
  CHECK(sr.sa_amenable);
}

TEST_CASE("capacitor across a source needs the output rows") {
  const CphDae dae = build_dae(parse_netlist("V1 1 2 sin(t)\nC2 1 2 0.5"));
  const StructuralResult sr = analyze_structure(dae);
  // The reduced matrix alone sees an algebraic q_C2.
  CHECK(sr.reduced_offsets.c == std::vector<int>{0});
  CHECK(sr.reduced_offsets.d == std::vector<int>{0});
  // With f_v1 = i_v1 - q_C2' included, q_C2 is differentiated once.
  CHECK(sr.offsets.c == std::vector<int>{1});
  CHECK(sr.offsets.d == std::vector<int>{1});
  CHECK(sr.offsets.c == block_offsets(dae).c);
  CHECK(sr.index == 1);
  CHECK(sr.classified_index == 1);
  CHECK(sr.dof == 0);
}

TEST_CASE("an inductor bridge is algebraic") {
  // L1 is the only element between node 1 and the rest, so phi_l1 = 0 with
  // no differentiation; the block prediction and the classifier both assume
  // an f_l row needs one.
  const CphDae dae = build_dae(parse_netlist("L1 1 2 1\nC2 2 3 1\nR3 2 3 1"));
  const StructuralResult sr = analyze_structure(dae);
  CHECK(sr.sa_amenable);
  CHECK(sr.offsets.c == std::vector<int>{0, 0, 0});
  CHECK(sr.offsets.d == std::vector<int>{1, 0, 0});
  CHECK(block_offsets(dae).c != sr.offsets.c);
  CHECK(sr.index == 1);
  CHECK(sr.classified_index == 2);
}

TEST_CASE("no finite transversal is an SA failure") {
  SignatureMatrix s;
  s.sigma.resize(2, 2);
  s.sigma << 0, X, 0, X;
  s.row_edges = {0, 1};
  s.col_edges = {0, 1};
  CHECK_THROWS_AS(find_hvt(s), SaFailure);
}

TEST_CASE("canonical offsets are the smallest valid ones") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    SignatureMatrix s;
    s.sigma.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s.sigma(i, j) = rng() % 3 == 0 ? X : static_cast<int>(rng() % 3);
    for (int i = 0; i < n; ++i) s.sigma(i, i) = std::max(s.sigma(i, i), 0);
    const Transversal t = find_hvt(s);
    CHECK(t.value == oracle::brute_force_hvt_value(s.sigma));
    const Offsets o = canonical_offsets(s, t);
    CHECK(offsets_valid(s, o, t));
    CHECK(*std::min_element(o.c.begin(), o.c.end()) == 0);
    int sum_d = 0, sum_c = 0;
    for (int v : o.d) sum_d += v;
    for (int v : o.c) sum_c += v;
    CHECK(sum_d - sum_c == t.value);
  }
}
