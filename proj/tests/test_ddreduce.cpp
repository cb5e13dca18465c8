#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Eigenvalues>

#include "cph/circgen.hpp"
#include "cph/ddreduce.hpp"
#include "cph/error.hpp"
#include "cph/integrator.hpp"
#include "cph/mna.hpp"
#include "cph/running_example.hpp"
#include "oracles.hpp"

using namespace cph;
using Eigen::VectorXd;

namespace {

ExplicitOde ode_for(const Circuit& c, const CouplingBlocks& cb = {}) {
  const CphDae dae = build_dae(c, cb);
  const StructuralResult sr = analyze_structure(dae);
  return reduce_to_ode(dae, select_dummies(dae, sr));
}

// max_k |a_k - b_k|_inf / max(max_k |b_k|_inf, floor)
double relative_error(const std::vector<VectorXd>& a, const std::vector<VectorXd>& b, double floor) {
  double diff = 0, scale = floor;
  for (std::size_t k = 0; k < a.size(); ++k) {
    diff = std::max(diff, (a[k] - b[k]).lpNorm<Eigen::Infinity>());
    scale = std::max(scale, b[k].lpNorm<Eigen::Infinity>());
  }
  return diff / scale;
}

}  // namespace

TEST_CASE("RC reduces to exponential decay") {
  const ExplicitOde ode = ode_for(parse_netlist("R1 1 2 2\nC2 1 2 0.5"));
  REQUIRE(ode.dimension() == 1);
  CHECK(ode.m()(0, 0) == Catch::Approx(-1.0));
  const Trajectory tr = integrate(ode, 0, 5, VectorXd::Ones(1), 1e-10);
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    CHECK(tr.s[k](0) == Catch::Approx(std::exp(-tr.times[k])).margin(1e-8));
}

TEST_CASE("LC tank oscillates at 1/sqrt(LC) and conserves energy") {
  const ExplicitOde ode = ode_for(parse_netlist("C1 1 2 0.5\nL2 1 2 0.5"));
  REQUIRE(ode.dimension() == 2);
  const Eigen::VectorXcd ev = ode.m().eigenvalues();
  for (Eigen::Index k = 0; k < 2; ++k) {
    CHECK(std::abs(ev(k).real()) < 1e-12);
    CHECK(std::abs(ev(k).imag()) == Catch::Approx(2.0));
  }
  const Trajectory tr = integrate(ode, 0, 100, VectorXd::Ones(2), 1e-10);
  const double h0 = tr.energy.front();
  CHECK(h0 == Catch::Approx(0.5 / 0.5 + 0.5 / 0.5));
  for (double h : tr.energy) CHECK(std::abs(h - h0) <= 1e-6 * h0);
}

TEST_CASE("running example agrees with the nodal reference") {
  const Circuit c = parse_netlist(kRunningExampleNetlist);
  const ExplicitOde ode = ode_for(c);
  REQUIRE(ode.dimension() == 2);
  // Pivoting keeps q_c3 and phi_l4; 1/L7 > 1/L4 makes phi_L7 the dummy.
  CHECK(ode.state_edges() == std::vector<int>{2, 3});
  const VectorXd s0 = VectorXd::Ones(2);
  const auto samples = uniform_samples(0, 10, 201);
  const Trajectory dd = integrate(ode, 0, 10, s0, 1e-10, samples);
  const Trajectory ref = mna_oracle(c, {}, 0, 10, ode.state_edges(), s0, 1e-10, samples);
  CHECK(relative_error(dd.x, ref.x, 1e-10) < 1e-6);
  CHECK(relative_error(dd.v, ref.v, 1e-10) < 1e-6);
  CHECK(relative_error(dd.i, ref.i, 1e-10) < 1e-6);
  // Energy from both models.
  for (std::size_t k = 0; k < samples.size(); ++k) CHECK(dd.energy[k] == Catch::Approx(ref.energy[k]).margin(1e-7));
}

TEST_CASE("reconstructed states satisfy every equation, hidden constraints included") {
  GenConfig cfg;
  cfg.coupling_probability = 0.5;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    cfg.seed = seed;
    const GeneratedCircuit g = generate_circuit(cfg);
    const ExplicitOde ode = ode_for(g.circuit, g.coupling);
    const VectorXd s0 = VectorXd::Constant(ode.dimension(), 0.5);
    const Trajectory tr = integrate(ode, 0, 2, s0, 1e-9, uniform_samples(0, 2, 11));
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      const VectorXd f = ode.dae().residual(tr.times[k], tr.x[k], tr.xdot[k]);
      const double scale = 1 + tr.x[k].lpNorm<Eigen::Infinity>() + tr.xdot[k].lpNorm<Eigen::Infinity>();
      CHECK(f.lpNorm<Eigen::Infinity>() <= 1e-10 * scale);
      // The state equation itself: s' from rhs matches the reconstructed derivative.
      const VectorXd sd = ode.rhs(tr.times[k], tr.s[k]);
      for (int a = 0; a < ode.dimension(); ++a)
        CHECK(sd(a) == Catch::Approx(tr.xdot[k](ode.state_edges()[static_cast<std::size_t>(a)])).margin(1e-10));
    }
    // Projection inverts reconstruction.
    VectorXd x, xd;
    ode.reconstruct(0.3, s0, x, xd);
    CHECK((ode.project(x) - s0).norm() < 1e-14);
  }
}

TEST_CASE("capacitor across a source is fully algebraic") {
  const ExplicitOde ode = ode_for(parse_netlist("V1 1 2 sin(t)\nC2 1 2 0.5"));
  CHECK(ode.dimension() == 0);
  VectorXd x, xd;
  ode.reconstruct(0.7, VectorXd(0), x, xd);
  CHECK(x(1) == Catch::Approx(0.5 * std::sin(0.7)));
  CHECK(xd(1) == Catch::Approx(0.5 * std::cos(0.7)));
  // KCL at node 1: i_v1 + i_C2 = 0.
  CHECK(x(0) == Catch::Approx(-0.5 * std::cos(0.7)));
}

TEST_CASE("power balance holds at accepted steps") {
  GenConfig cfg;
  cfg.coupling_probability = 0.5;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    cfg.seed = seed;
    const GeneratedCircuit g = generate_circuit(cfg);
    const ExplicitOde ode = ode_for(g.circuit, g.coupling);
    const Trajectory tr = integrate(ode, 0, 3, VectorXd::Ones(ode.dimension()), 1e-9);
    REQUIRE(tr.step_times.size() >= 2);
    for (std::size_t k = 0; k < tr.step_times.size(); ++k) {
      VectorXd x, xd;
      ode.reconstruct(tr.step_times[k], tr.step_s[k], x, xd);
      const PowerBalance pb = power_balance(ode.dae(), tr.step_times[k], x, xd);
      CHECK(std::abs(pb.residual()) <= 1e-9 * pb.scale() + 1e-14);
    }
  }
}

TEST_CASE("dissipation is never negative and passive circuits lose energy") {
  const ExplicitOde ode = ode_for(parse_netlist("C1 1 2 1\nL2 2 3 0.5\nR3 3 1 0.7\nC4 1 3 0.3\nR5 1 2 2"));
  const Trajectory tr = integrate(ode, 0, 10, VectorXd::Ones(ode.dimension()), 1e-10);
  for (std::size_t k = 1; k < tr.energy.size(); ++k) CHECK(tr.energy[k] <= tr.energy[k - 1] + 1e-9);
}

TEST_CASE("dummy selection is well conditioned among all choices") {
  std::mt19937_64 rng(19);
  const Circuit c = parse_netlist("C1 1 2 1\nC2 1 2 2\nC3 1 2 3\nR4 1 2 1\nL5 1 2 1");
  for (int trial = 0; trial < 100; ++trial) {
    CouplingBlocks cb;
    cb.capacitance = LabeledMatrix{{"C1", "C2", "C3"}, oracle::random_spd(3, rng)};
    const CphDae dae = build_dae(c, cb);
    const StructuralResult sr = analyze_structure(dae);
    const DdSelection sel = select_dummies(dae, sr);
    REQUIRE(sel.y_c.size() == 2);
    REQUIRE(sel.s_c.size() == 1);
    // Condition number of the f_C rows of J_C over each 2-column choice.
    const auto& caps = dae.capacitor_edges();
    const Eigen::MatrixXd top = sr.jacobian.jc.topRows(2);
    auto cond = [&](int a, int b) {
      Eigen::MatrixXd k(2, 2);
      k.col(0) = top.col(a);
      k.col(1) = top.col(b);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(k);
      return svd.singularValues()(0) / svd.singularValues()(1);
    };
    double best = std::min({cond(0, 1), cond(0, 2), cond(1, 2)});
    int ia = -1, ib = -1;
    for (int j = 0; j < 3; ++j) {
      if (caps[static_cast<std::size_t>(j)] == sel.y_c[0]) ia = j;
      if (caps[static_cast<std::size_t>(j)] == sel.y_c[1]) ib = j;
    }
    REQUIRE(ia >= 0);
    REQUIRE(ib >= 0);
    CHECK(cond(ia, ib) <= 10 * best);
    // The selected block is the one the reduction inverts.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sel.k_c);
    CHECK(svd.singularValues()(0) / svd.singularValues()(1) == Catch::Approx(cond(ia, ib)).epsilon(1e-9));
  }
}

TEST_CASE("initial state dimension is checked") {
  const ExplicitOde ode = ode_for(parse_netlist("R1 1 2 2\nC2 1 2 0.5"));
  CHECK_THROWS_AS(integrate(ode, 0, 1, VectorXd::Ones(3), 1e-8), Error);
}

TEST_CASE("DOPRI5 on a known solution") {
  // y'' = -y, y(0) = 0, y'(0) = 1
  const OdeRhs rhs = [](double, const VectorXd& y, VectorXd& dy) {
    dy.resize(2);
    dy << y(1), -y(0);
  };
  VectorXd y0(2);
  y0 << 0, 1;
  const auto samples = uniform_samples(0, 20, 41);
  OdeOptions opts;
  opts.rtol = opts.atol = 1e-11;
  const OdeSolution sol = integrate_dopri5(rhs, 0, 20, y0, samples, opts);
  REQUIRE(sol.times.size() == 41);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    CHECK(sol.states[k](0) == Catch::Approx(std::sin(samples[k])).margin(1e-8));
    CHECK(sol.states[k](1) == Catch::Approx(std::cos(samples[k])).margin(1e-8));
  }
  CHECK(sol.rejected >= 0);
  // Tighter tolerance takes more steps.
  opts.rtol = opts.atol = 1e-6;
  CHECK(integrate_dopri5(rhs, 0, 20, y0, samples, opts).accepted < sol.accepted);
  // Non-finite right-hand side.
  const OdeRhs bad = [](double, const VectorXd& y, VectorXd& dy) { dy = y * std::numeric_limits<double>::quiet_NaN(); };
  CHECK_THROWS_AS(integrate_dopri5(bad, 0, 1, y0, samples, opts), IntegrationError);
}
