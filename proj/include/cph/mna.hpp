#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cph/coupling.hpp"
#include "cph/ddreduce.hpp"
#include "cph/netlist.hpp"

namespace cph {

// Grounded modified nodal analysis of the same circuit, used only as an
// independent reference. Unknowns y = (node potentials without ground,
// inductor currents, voltage-source currents):
//   KCL:        Bc^T C Bc p' + Br^T G Br p + Bl^T i_L + Bv^T i_V + Bi^T I(t) = 0
//   inductors:  L i_L' - Bl p = 0
//   sources:    Bv p = V(t)
// The pencil is reduced to y' = M y + sum_k G_k w^(k)(t) by exact rational
// elimination; the algebraic constraints met on the way are kept for
// initialization.
class MnaSystem {
 public:
  MnaSystem(const Circuit& circuit, const CouplingBlocks& coupling = {}, int ground = 1);

  const Circuit& circuit() const { return circuit_; }
  int ground() const { return ground_; }
  int size() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& m() const { return m_; }
  // Forcing on the k-th derivative of the sources (source_edges() order).
  const std::vector<Eigen::MatrixXd>& forcing() const { return g_; }
  const std::vector<int>& source_edges() const { return src_edges_; }

  Eigen::VectorXd rhs(double t, const Eigen::VectorXd& y) const;

  // Consistent y at t0 with the given charges/fluxes prescribed for
  // `state_edges` (capacitor or inductor edges). Throws Error if they do not
  // determine a unique consistent state.
  Eigen::VectorXd initial_state(double t0, const std::vector<int>& state_edges, const Eigen::VectorXd& values) const;

  // CpH-convention full state (q, phi, i_V, v_R, v_I in edge order) and port
  // vectors from y and y'.
  Eigen::VectorXd cph_state(double t, const Eigen::VectorXd& y) const;
  PortValues ports(double t, const Eigen::VectorXd& y, const Eigen::VectorXd& ydot) const;
  // 1/2 v_C^T C v_C + 1/2 i_L^T L i_L.
  double energy(const Eigen::VectorXd& y) const;

 private:
  Eigen::VectorXd waveforms(double t, int order) const;
  Eigen::RowVectorXd branch_row(int edge) const;  // v_edge = row . potentials

  Circuit circuit_;
  int ground_;
  int n_pot_ = 0;
  std::vector<int> cap_edges_, ind_edges_, res_edges_, vsrc_edges_, src_edges_;
  std::vector<int> ind_index_, vsrc_index_;  // edge -> slot in i_L / i_V or -1
  Eigen::MatrixXd cap_, ind_, cond_;
  Eigen::MatrixXd m_;
  std::vector<Eigen::MatrixXd> g_;
  // Constraints c y = sum_k h_k w^(k)(t) collected during elimination.
  Eigen::MatrixXd constraint_y_;
  std::vector<Eigen::MatrixXd> constraint_w_;
  std::vector<std::vector<Waveform>> derivatives_;  // [source][order]
};

// Integrates the MNA system from the state fixed by `values` on
// `state_edges`, with rtol = atol = tol, sampled at `sample_times`.
Trajectory mna_oracle(const Circuit& circuit, const CouplingBlocks& coupling, double t0, double t1,
                      const std::vector<int>& state_edges, const Eigen::VectorXd& values, double tol,
                      const std::vector<double>& sample_times, int ground = 1);

}  // namespace cph
