#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cph/dae.hpp"
#include "cph/integrator.hpp"
#include "cph/sigma.hpp"

namespace cph {

// Dummy-derivative choice. y_c (from the C-link equations) and y_l (from the
// l-twig equations) are solved algebraically; s_c, s_l remain as ODE states.
struct DdSelection {
  std::vector<int> y_c, s_c;  // capacitor edges
  std::vector<int> y_l, s_l;  // inductor edges
  Eigen::MatrixXd k_c;        // n_C x n_C block of the f_C rows over y_c columns
  Eigen::MatrixXd k_l;        // n_l x n_l block of the f_l rows over y_l columns

  // s = [s_c; s_l]
  std::vector<int> state_edges() const;
};

// Column-pivoted QR on the upper (f_C, f_l) rows of J_C and J_L picks the
// solved columns. Throws InternalError if either K block is singular.
DdSelection select_dummies(const CphDae& dae, const StructuralResult& sr);

// s' = M s + G_w w(t) + G_wd w'(t), plus affine maps from (s, w, w') back to
// the full edge-ordered state x and its derivative. Derivatives of the
// output variables x_v, x_I are not reconstructed and read as zero.
class ExplicitOde {
 public:
  ExplicitOde(CphDae dae, DdSelection selection);

  const CphDae& dae() const { return dae_; }
  const DdSelection& selection() const { return sel_; }
  const std::vector<int>& state_edges() const { return state_edges_; }
  int dimension() const { return static_cast<int>(state_edges_.size()); }

  const Eigen::MatrixXd& m() const { return m_; }
  const Eigen::MatrixXd& g_w() const { return g_w_; }
  const Eigen::MatrixXd& g_wd() const { return g_wd_; }

  Eigen::VectorXd rhs(double t, const Eigen::VectorXd& s) const;
  void reconstruct(double t, const Eigen::VectorXd& s, Eigen::VectorXd& x, Eigen::VectorXd& xdot) const;

  // Consistent s from a full edge-ordered state (picks the s entries).
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;

 private:
  // One evaluation of the index-reduced system for given s, w, w'.
  void solve(const Eigen::VectorXd& s, const Eigen::VectorXd& w, const Eigen::VectorXd& wd, Eigen::VectorXd& x,
             Eigen::VectorXd& xdot) const;

  CphDae dae_;
  DdSelection sel_;
  std::vector<int> state_edges_;
  Eigen::MatrixXd m_, g_w_, g_wd_;
  Eigen::MatrixXd x_s_, x_w_, x_wd_, xd_s_, xd_w_, xd_wd_;
};

// Linear circuits only (the CpH model here is always linear).
ExplicitOde reduce_to_ode(const CphDae& dae, const DdSelection& sel);

struct Trajectory {
  std::vector<double> times;
  std::vector<int> state_edges;
  std::vector<Eigen::VectorXd> s;
  std::vector<Eigen::VectorXd> x;     // full state, edge order
  std::vector<Eigen::VectorXd> xdot;  // zero on output edges
  std::vector<Eigen::VectorXd> v;
  std::vector<Eigen::VectorXd> i;
  std::vector<double> energy;
  std::vector<double> step_times;  // accepted integrator steps, including t0
  std::vector<Eigen::VectorXd> step_s;
};

// Adaptive Dormand-Prince integration with rtol = atol = tol, sampled at
// `sample_times` (t0 and t1 included when `sample_times` is empty: 101 points).
Trajectory integrate(const ExplicitOde& ode, double t0, double t1, const Eigen::VectorXd& s0, double tol,
                     std::vector<double> sample_times = {});

struct PowerBalance {
  double dhdt = 0;        // grad H . x'
  double dissipated = 0;  // sum over resistors of v i
  double supplied = 0;    // power delivered by the sources, -(sum over sources of v i)
  double residual() const { return dhdt + dissipated - supplied; }
  double scale() const;
};

PowerBalance power_balance(const CphDae& dae, double t, const Eigen::VectorXd& x, const Eigen::VectorXd& xdot);

}  // namespace cph
