#include "cph/ddreduce.hpp"

#include <algorithm>
#include <cmath>

#include "cph/error.hpp"

namespace cph {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<int> DdSelection::state_edges() const {
  std::vector<int> out = s_c;
  out.insert(out.end(), s_l.begin(), s_l.end());
  return out;
}

namespace {

// Splits the columns of `upper` (labelled by `edges`) into the rank-revealing
// pivot set (solved) and the rest (states), both kept in `edges` order.
void split_columns(const MatrixXd& upper, const std::vector<int>& edges, std::vector<int>& solved,
                   std::vector<int>& states, MatrixXd& k, const char* block) {
  const Eigen::Index rows = upper.rows();
  std::vector<bool> pick(edges.size(), false);
  if (rows > 0) {
    Eigen::ColPivHouseholderQR<MatrixXd> qr(upper);
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index a = 0; a < rows; ++a) pick[static_cast<std::size_t>(perm(a))] = true;
  }
  std::vector<Eigen::Index> cols;
  for (std::size_t a = 0; a < edges.size(); ++a) {
    if (pick[a]) {
      solved.push_back(edges[a]);
      cols.push_back(static_cast<Eigen::Index>(a));
    } else {
      states.push_back(edges[a]);
    }
  }
  k.resize(rows, rows);
  for (Eigen::Index c = 0; c < rows; ++c) k.col(c) = upper.col(cols[static_cast<std::size_t>(c)]);
  if (rows > 0) {
    Eigen::JacobiSVD<MatrixXd> svd(k);
    const VectorXd& sv = svd.singularValues();
    if (!(sv(rows - 1) > kJacobianSvTolerance * sv(0)))
      throw InternalError(std::string("dummy-derivative block ") + block + " is singular");
  }
}

MatrixXd sub(const MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = m(rows[a], cols[b]);
  return out;
}

MatrixXd rows_of(const MatrixXd& m, const std::vector<int>& rows) {
  MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t a = 0; a < rows.size(); ++a) out.row(static_cast<Eigen::Index>(a)) = m.row(rows[a]);
  return out;
}

VectorXd gather(const VectorXd& v, const std::vector<int>& idx) {
  VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a) out(static_cast<Eigen::Index>(a)) = v(idx[a]);
  return out;
}

void scatter(VectorXd& v, const std::vector<int>& idx, const VectorXd& vals) {
  for (std::size_t a = 0; a < idx.size(); ++a) v(idx[a]) = vals(static_cast<Eigen::Index>(a));
}

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

VectorXd solve_checked(const MatrixXd& a, const VectorXd& b, const char* what) {
  if (a.rows() == 0) return VectorXd(0);
  Eigen::FullPivLU<MatrixXd> lu(a);
  if (!lu.isInvertible()) throw InternalError(std::string("singular ") + what + " solve in dummy-derivative reduction");
  return lu.solve(b);
}

}  // namespace

DdSelection select_dummies(const CphDae& dae, const StructuralResult& sr) {
  const EdgePartition& p = dae.partition();
  const int n_big_c = p.size(LinkGroup::C);
  const int n_l = p.size(TwigGroup::l);
  DdSelection sel;
  split_columns(sr.jacobian.jc.topRows(n_big_c), dae.capacitor_edges(), sel.y_c, sel.s_c, sel.k_c, "K_C");
  split_columns(sr.jacobian.jl.topRows(n_l), dae.inductor_edges(), sel.y_l, sel.s_l, sel.k_l, "K_L");
  return sel;
}

ExplicitOde::ExplicitOde(CphDae dae, DdSelection selection)
    : dae_(std::move(dae)), sel_(std::move(selection)), state_edges_(sel_.state_edges()) {
  const auto n = static_cast<Eigen::Index>(state_edges_.size());
  const auto ns = static_cast<Eigen::Index>(dae_.source_edges().size());
  const Eigen::Index m = dae_.size();
  m_.resize(n, n);
  g_w_.resize(n, ns);
  g_wd_.resize(n, ns);
  x_s_.resize(m, n);
  xd_s_.resize(m, n);
  x_w_.resize(m, ns);
  xd_w_.resize(m, ns);
  x_wd_.resize(m, ns);
  xd_wd_.resize(m, ns);
  VectorXd x, xd;
  // The reduced system is linear in (s, w, w'): probe with unit vectors.
  for (Eigen::Index j = 0; j < n; ++j) {
    solve(VectorXd::Unit(n, j), VectorXd::Zero(ns), VectorXd::Zero(ns), x, xd);
    x_s_.col(j) = x;
    xd_s_.col(j) = xd;
    m_.col(j) = gather(xd, state_edges_);
  }
  for (Eigen::Index j = 0; j < ns; ++j) {
    solve(VectorXd::Zero(n), VectorXd::Unit(ns, j), VectorXd::Zero(ns), x, xd);
    x_w_.col(j) = x;
    xd_w_.col(j) = xd;
    g_w_.col(j) = gather(xd, state_edges_);
    solve(VectorXd::Zero(n), VectorXd::Zero(ns), VectorXd::Unit(ns, j), x, xd);
    x_wd_.col(j) = x;
    xd_wd_.col(j) = xd;
    g_wd_.col(j) = gather(xd, state_edges_);
  }
}

void ExplicitOde::solve(const VectorXd& s, const VectorXd& w, const VectorXd& wd, VectorXd& x, VectorXd& xdot) const {
  const CphDae& d = dae_;
  const EdgePartition& p = d.partition();
  const MatrixXd& e = d.e_matrix();
  const MatrixXd& k = d.k_matrix();
  const MatrixXd& sm = d.s_matrix();
  const std::vector<int>& caps = d.capacitor_edges();
  const std::vector<int>& inds = d.inductor_edges();
  const std::vector<int>& ress = d.resistor_edges();
  const std::vector<int> storage = concat(caps, inds);
  const std::vector<int>& rows_c_link = p[LinkGroup::C];
  const std::vector<int>& rows_l_twig = p[TwigGroup::l];
  const std::vector<int>& rows_c_twig = p[TwigGroup::c];
  const std::vector<int>& rows_l_link = p[LinkGroup::L];

  x = VectorXd::Zero(d.size());
  xdot = VectorXd::Zero(d.size());
  scatter(x, state_edges_, s);

  // Algebraic charges and fluxes: f_C = 0 for y_c, f_l = 0 for y_l.
  auto solve_group = [&](const std::vector<int>& rows, const std::vector<int>& y, const std::vector<int>& st, const char* what) {
    const VectorXd rhs = -(sub(k, rows, st) * gather(x, st) + rows_of(sm, rows) * w);
    scatter(x, y, solve_checked(sub(k, rows, y), rhs, what));
  };
  solve_group(rows_c_link, sel_.y_c, sel_.s_c, "K_C");
  solve_group(rows_l_twig, sel_.y_l, sel_.s_l, "K_L");

  // Resistor voltages from f_r, f_R (matrix J_G).
  {
    const VectorXd rhs = -(sub(k, ress, storage) * gather(x, storage) + rows_of(sm, ress) * w);
    scatter(x, ress, solve_checked(sub(k, ress, ress), rhs, "J_G"));
  }

  // Charge rates: differentiated f_C stacked on f_c (matrix J_C).
  {
    const std::vector<int> rows = concat(rows_c_link, rows_c_twig);
    MatrixXd a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(caps.size()));
    a << sub(k, rows_c_link, caps), sub(e, rows_c_twig, caps);
    VectorXd rhs(a.rows());
    rhs << -(rows_of(sm, rows_c_link) * wd), -(rows_of(k, rows_c_twig) * x + rows_of(sm, rows_c_twig) * w);
    scatter(xdot, caps, solve_checked(a, rhs, "J_C"));
  }
  // Flux rates: differentiated f_l stacked on f_L (matrix J_L).
  {
    const std::vector<int> rows = concat(rows_l_twig, rows_l_link);
    MatrixXd a(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(inds.size()));
    a << sub(k, rows_l_twig, inds), sub(e, rows_l_link, inds);
    VectorXd rhs(a.rows());
    rhs << -(rows_of(sm, rows_l_twig) * wd), -(rows_of(k, rows_l_link) * x + rows_of(sm, rows_l_link) * w);
    scatter(xdot, inds, solve_checked(a, rhs, "J_L"));
  }
  // Resistor voltage rates from the differentiated f_r, f_R.
  {
    const VectorXd rhs = -(sub(k, ress, storage) * gather(xdot, storage) + rows_of(sm, ress) * wd);
    scatter(xdot, ress, solve_checked(sub(k, ress, ress), rhs, "J_G"));
  }
  // Output variables: each output row is x_k + (rest) = 0.
  for (int out : d.layout().output_edges) {
    x(out) = 0.0;
    x(out) = -(e.row(out).dot(xdot) + k.row(out).dot(x) + sm.row(out).dot(w));
  }
}

VectorXd ExplicitOde::rhs(double t, const VectorXd& s) const {
  VectorXd ds = m_ * s;
  if (g_w_.cols() > 0) ds += g_w_ * dae_.sources(t) + g_wd_ * dae_.sources(t, 1);
  return ds;
}

void ExplicitOde::reconstruct(double t, const VectorXd& s, VectorXd& x, VectorXd& xdot) const {
  x = x_s_ * s;
  xdot = xd_s_ * s;
  if (x_w_.cols() > 0) {
    const VectorXd w = dae_.sources(t), wd = dae_.sources(t, 1);
    x += x_w_ * w + x_wd_ * wd;
    xdot += xd_w_ * w + xd_wd_ * wd;
  }
}

VectorXd ExplicitOde::project(const VectorXd& x) const { return gather(x, state_edges_); }

ExplicitOde reduce_to_ode(const CphDae& dae, const DdSelection& sel) { return ExplicitOde(dae, sel); }

Trajectory integrate(const ExplicitOde& ode, double t0, double t1, const VectorXd& s0, double tol,
                     std::vector<double> sample_times) {
  if (s0.size() != ode.dimension())
    throw Error("initial state needs " + std::to_string(ode.dimension()) + " values, got " + std::to_string(s0.size()));
  if (sample_times.empty()) sample_times = uniform_samples(t0, t1, 101);
  OdeOptions opts;
  opts.rtol = tol;
  opts.atol = tol;
  opts.record_steps = true;
  const OdeSolution sol = integrate_dopri5(
      [&](double t, const VectorXd& s, VectorXd& ds) { ds = ode.rhs(t, s); }, t0, t1, s0, sample_times, opts);

  Trajectory tr;
  tr.state_edges = ode.state_edges();
  tr.step_times = sol.step_times;
  tr.step_s = sol.step_states;
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    VectorXd x, xd;
    ode.reconstruct(sol.times[k], sol.states[k], x, xd);
    const PortValues pv = ode.dae().eval_ports(sol.times[k], x, xd);
    tr.times.push_back(sol.times[k]);
    tr.s.push_back(sol.states[k]);
    tr.energy.push_back(ode.dae().hamiltonian(x));
    tr.x.push_back(std::move(x));
    tr.xdot.push_back(std::move(xd));
    tr.v.push_back(pv.v);
    tr.i.push_back(pv.i);
  }
  return tr;
}

double PowerBalance::scale() const { return std::max({std::abs(dhdt), std::abs(dissipated), std::abs(supplied), 1e-300}); }

PowerBalance power_balance(const CphDae& dae, double t, const VectorXd& x, const VectorXd& xdot) {
  PowerBalance pb;
  pb.dhdt = dae.hamiltonian_gradient(x).dot(xdot);
  const PortValues pv = dae.eval_ports(t, x, xdot);
  for (int k = 0; k < dae.size(); ++k) {
    const ElementKind kind = dae.circuit().kind(k);
    if (kind == ElementKind::Resistor) pb.dissipated += pv.v(k) * pv.i(k);
    if (is_source(kind)) pb.supplied -= pv.v(k) * pv.i(k);
  }
  return pb;
}

}  // namespace cph
