#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cph/coupling.hpp"
#include "cph/loopcut.hpp"
#include "cph/netlist.hpp"

namespace cph {

// Ordering of the per-edge states.
//   q (charge) for C, phi (flux) for L, i for V, v for I and R.
// Full state vectors passed to CphDae are always in edge order.
struct StateLayout {
  std::vector<int> partition_order;  // c, l, v, r, L, C, I, R
  std::vector<int> sigma_order;      // C, c, l, L, r, R: the analysed (reduced) unknowns and equations
  std::vector<int> output_edges;     // v twigs then I links: explicit output variables

  int reduced_size() const { return static_cast<int>(sigma_order.size()); }
};

// Role prefix of an edge's state: "q", "phi", "i" or "v".
const char* state_role(ElementKind kind);

struct PortValues {
  Eigen::VectorXd v;  // edge voltages, edge order
  Eigen::VectorXd i;  // edge currents, edge order
};

// Compact port-Hamiltonian DAE of a linear RLC circuit:
//   f_T = i_T - F^T i_N,   f_N = v_N + F v_T,
// with H = q^T C^{-1} q / 2 + phi^T L^{-1} phi / 2 and resistor currents G v.
// Since every constitutive map is linear, f(t, x, x') = E x' + K x + S w(t),
// where w(t) are the source waveforms in edge order. Immutable.
class CphDae {
 public:
  CphDae(Circuit circuit, LoopCutsetMatrix f, EdgePartition partition, CouplingBlocks coupling = {});

  const Circuit& circuit() const { return circuit_; }
  const LoopCutsetMatrix& loop_cutset() const { return f_; }
  const EdgePartition& partition() const { return partition_; }
  const StateLayout& layout() const { return layout_; }
  const CouplingBlocks& coupling() const { return coupling_; }
  int size() const { return circuit_.edge_count(); }

  // Storage/dissipation groups in coupling-block order: (C, c), (l, L), (r, R).
  const std::vector<int>& capacitor_edges() const { return cap_edges_; }
  const std::vector<int>& inductor_edges() const { return ind_edges_; }
  const std::vector<int>& resistor_edges() const { return res_edges_; }
  const Eigen::MatrixXd& capacitance() const { return cap_; }
  const Eigen::MatrixXd& inductance() const { return ind_; }
  const Eigen::MatrixXd& conductance() const { return cond_; }
  // Hessians of H: inverse capacitance and inverse inductance.
  const Eigen::MatrixXd& capacitor_hessian() const { return cap_hess_; }
  const Eigen::MatrixXd& inductor_hessian() const { return ind_hess_; }

  const std::vector<int>& source_edges() const { return src_edges_; }
  // Source values (or their k-th derivatives) at t, ordered as source_edges().
  Eigen::VectorXd sources(double t, int derivative = 0) const;

  // f = E x' + K x + S w, rows and columns in edge order.
  const Eigen::MatrixXd& e_matrix() const { return e_; }
  const Eigen::MatrixXd& k_matrix() const { return k_; }
  const Eigen::MatrixXd& s_matrix() const { return s_; }
  // Structural nonzero patterns of E and K (no cancellation).
  const Eigen::MatrixXi& e_pattern() const { return e_pat_; }
  const Eigen::MatrixXi& k_pattern() const { return k_pat_; }

  PortValues eval_ports(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& xdot) const;
  Eigen::VectorXd residual(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& xdot) const;

  // Residual of the reduced system, equations and unknowns in sigma_order.
  Eigen::VectorXd reduced_residual(double t, const Eigen::VectorXd& xr, const Eigen::VectorXd& xrdot) const;
  // d f_reduced / d x_reduced and d f_reduced / d x_reduced'.
  Eigen::MatrixXd reduced_jacobian_x() const;
  Eigen::MatrixXd reduced_jacobian_xdot() const;

  // Values of x_v then x_I (layout().output_edges order) implied by the
  // other components of x and xdot.
  Eigen::VectorXd output_variables(double t, const Eigen::VectorXd& x, const Eigen::VectorXd& xdot) const;

  double hamiltonian(const Eigen::VectorXd& x) const;
  // dH/dx in edge order (zero for non-storage edges).
  Eigen::VectorXd hamiltonian_gradient(const Eigen::VectorXd& x) const;

  // e.g. "q_C6", "phi_l4", "i_v2": role plus label, lowercase label letter for twigs.
  std::string state_name(int edge) const;
  std::string equation_name(int edge) const;

 private:
  Circuit circuit_;
  LoopCutsetMatrix f_;
  EdgePartition partition_;
  CouplingBlocks coupling_;
  StateLayout layout_;
  std::vector<int> cap_edges_, ind_edges_, res_edges_, src_edges_;
  std::vector<bool> is_twig_;
  Eigen::MatrixXd cap_, ind_, cond_, cap_hess_, ind_hess_;
  Eigen::MatrixXd e_, k_, s_;
  Eigen::MatrixXi e_pat_, k_pat_;
};

// Convenience pipeline: incidence, optimal tree, F, partition and assembly.
// Throws AssumptionError when the circuit is not well posed.
CphDae build_dae(const Circuit& circuit, const CouplingBlocks& coupling = {});

}  // namespace cph
