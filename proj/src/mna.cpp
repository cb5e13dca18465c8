#include "cph/mna.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <string>

#include "cph/error.hpp"
#include "cph/integrator.hpp"

namespace cph {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

class RationalMatrix {
 public:
  RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols)) {}
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  mpq_class& operator()(int r, int c) { return a_[static_cast<std::size_t>(r * cols_ + c)]; }
  const mpq_class& operator()(int r, int c) const { return a_[static_cast<std::size_t>(r * cols_ + c)]; }

  bool row_is_zero(int r) const {
    for (int c = 0; c < cols_; ++c)
      if (sgn((*this)(r, c)) != 0) return false;
    return true;
  }
  void swap_rows(int r1, int r2) {
    if (r1 == r2) return;
    for (int c = 0; c < cols_; ++c) std::swap((*this)(r1, c), (*this)(r2, c));
  }
  // row[target] -= factor * row[source]
  void axpy_row(int target, int source, const mpq_class& factor) {
    for (int c = 0; c < cols_; ++c)
      if (sgn((*this)(source, c)) != 0) (*this)(target, c) -= factor * (*this)(source, c);
  }
  void scale_row(int r, const mpq_class& factor) {
    for (int c = 0; c < cols_; ++c) (*this)(r, c) *= factor;
  }
  MatrixXd to_double() const {
    MatrixXd out(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) out(r, c) = (*this)(r, c).get_d();
    return out;
  }

 private:
  int rows_, cols_;
  std::vector<mpq_class> a_;
};

mpq_class exact(double x) { return mpq_class(x); }

}  // namespace

MnaSystem::MnaSystem(const Circuit& circuit, const CouplingBlocks& coupling, int ground)
    : circuit_(circuit), ground_(ground) {
  const int n = circuit.node_count();
  if (ground < 1 || ground > n) throw Error("ground node " + std::to_string(ground) + " is not a node of the circuit");
  n_pot_ = n - 1;
  const int m = circuit.edge_count();
  ind_index_.assign(static_cast<std::size_t>(m), -1);
  vsrc_index_.assign(static_cast<std::size_t>(m), -1);
  for (int e = 0; e < m; ++e) {
    switch (circuit.kind(e)) {
      case ElementKind::Capacitor: cap_edges_.push_back(e); break;
      case ElementKind::Inductor:
        ind_index_[static_cast<std::size_t>(e)] = static_cast<int>(ind_edges_.size());
        ind_edges_.push_back(e);
        break;
      case ElementKind::Resistor: res_edges_.push_back(e); break;
      case ElementKind::VoltageSource:
        vsrc_index_[static_cast<std::size_t>(e)] = static_cast<int>(vsrc_edges_.size());
        vsrc_edges_.push_back(e);
        src_edges_.push_back(e);
        break;
      case ElementKind::CurrentSource: src_edges_.push_back(e); break;
    }
  }
  cap_ = group_matrix(circuit, coupling, ElementKind::Capacitor, cap_edges_);
  ind_ = group_matrix(circuit, coupling, ElementKind::Inductor, ind_edges_);
  cond_ = group_matrix(circuit, coupling, ElementKind::Resistor, res_edges_);

  const int n_l = static_cast<int>(ind_edges_.size());
  const int n_v = static_cast<int>(vsrc_edges_.size());
  const int size = n_pot_ + n_l + n_v;
  const int ns = static_cast<int>(src_edges_.size());
  const int orders = size + 2;  // highest source derivative the elimination may need, plus one
  auto fcol = [&](int src, int order) { return src * orders + order; };

  for (int e : src_edges_) {
    std::vector<Waveform> ders{circuit.element(e).waveform()};
    for (int k = 1; k < orders; ++k) ders.push_back(ders.back().derivative());
    derivatives_.push_back(std::move(ders));
  }

  // Reduced incidence rows: +1 at `from`, -1 at `to`, ground column dropped.
  auto pot = [&](int node) { return node == ground ? -1 : (node < ground ? node - 1 : node - 2); };
  std::vector<std::vector<std::pair<int, int>>> brow(static_cast<std::size_t>(m));
  for (int e = 0; e < m; ++e) {
    const Element& el = circuit.element(e);
    if (pot(el.from) >= 0) brow[static_cast<std::size_t>(e)].push_back({pot(el.from), 1});
    if (pot(el.to) >= 0) brow[static_cast<std::size_t>(e)].push_back({pot(el.to), -1});
  }
  auto row_of = [&](int e) -> const std::vector<std::pair<int, int>>& { return brow[static_cast<std::size_t>(e)]; };

  RationalMatrix em(size, size), km(size, size), fm(size, ns * orders);
  // KCL rows.
  auto add_quadratic = [&](RationalMatrix& target, const std::vector<int>& edges, const MatrixXd& w) {
    for (std::size_t a = 0; a < edges.size(); ++a)
      for (std::size_t b = 0; b < edges.size(); ++b) {
        const mpq_class wab = exact(w(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        if (sgn(wab) == 0) continue;
        for (auto [ra, sa] : row_of(edges[a]))
          for (auto [rb, sb] : row_of(edges[b])) target(ra, rb) += wab * (sa * sb);
      }
  };
  add_quadratic(em, cap_edges_, cap_);
  add_quadratic(km, res_edges_, cond_);
  for (int a = 0; a < n_l; ++a)
    for (auto [r, sgn_] : row_of(ind_edges_[static_cast<std::size_t>(a)])) km(r, n_pot_ + a) += sgn_;
  for (int a = 0; a < n_v; ++a)
    for (auto [r, sgn_] : row_of(vsrc_edges_[static_cast<std::size_t>(a)])) km(r, n_pot_ + n_l + a) += sgn_;
  for (int s = 0; s < ns; ++s) {
    const int e = src_edges_[static_cast<std::size_t>(s)];
    if (circuit.kind(e) != ElementKind::CurrentSource) continue;
    for (auto [r, sgn_] : row_of(e)) fm(r, fcol(s, 0)) -= sgn_;
  }
  // Inductor rows.
  for (int a = 0; a < n_l; ++a) {
    const int row = n_pot_ + a;
    for (int b = 0; b < n_l; ++b) em(row, n_pot_ + b) = exact(ind_(a, b));
    for (auto [r, sgn_] : row_of(ind_edges_[static_cast<std::size_t>(a)])) km(row, r) -= sgn_;
  }
  // Voltage-source rows.
  for (int a = 0; a < n_v; ++a) {
    const int row = n_pot_ + n_l + a;
    const int e = vsrc_edges_[static_cast<std::size_t>(a)];
    for (auto [r, sgn_] : row_of(e)) km(row, r) += sgn_;
    for (int s = 0; s < ns; ++s)
      if (src_edges_[static_cast<std::size_t>(s)] == e) fm(row, fcol(s, 0)) = 1;
  }

  // Shuffle: bring E to row echelon form; each zero row of E turns its
  // K row into a constraint, which is differentiated into E.
  std::vector<std::vector<mpq_class>> cons_y, cons_w;
  auto apply_all = [&](auto&& op) {
    op(em);
    op(km);
    op(fm);
  };
  bool done = false;
  for (int iter = 0; iter <= size + 1 && !done; ++iter) {
    int rank = 0;
    for (int col = 0; col < size && rank < size; ++col) {
      int piv = -1;
      for (int r = rank; r < size; ++r)
        if (sgn(em(r, col)) != 0) {
          piv = r;
          break;
        }
      if (piv < 0) continue;
      apply_all([&](RationalMatrix& x) { x.swap_rows(piv, rank); });
      for (int r = rank + 1; r < size; ++r) {
        if (sgn(em(r, col)) == 0) continue;
        const mpq_class factor = em(r, col) / em(rank, col);
        apply_all([&](RationalMatrix& x) { x.axpy_row(r, rank, factor); });
      }
      ++rank;
    }
    if (rank == size) {
      done = true;
      break;
    }
    for (int z = rank; z < size; ++z) {
      if (km.row_is_zero(z)) {
        if (!fm.row_is_zero(z)) throw AssumptionError("MNA system is inconsistent (conflicting source constraints)");
        throw AssumptionError("MNA matrix pencil is singular");
      }
      std::vector<mpq_class> cy(static_cast<std::size_t>(size)), cw(static_cast<std::size_t>(ns * orders));
      for (int c = 0; c < size; ++c) {
        cy[static_cast<std::size_t>(c)] = km(z, c);
        em(z, c) = km(z, c);
        km(z, c) = 0;
      }
      for (int s = 0; s < ns; ++s) {
        if (sgn(fm(z, fcol(s, orders - 1))) != 0) throw InternalError("MNA elimination exceeded the derivative budget");
        for (int k = 0; k < orders; ++k) cw[static_cast<std::size_t>(fcol(s, k))] = fm(z, fcol(s, k));
        for (int k = orders - 1; k > 0; --k) fm(z, fcol(s, k)) = fm(z, fcol(s, k - 1));
        fm(z, fcol(s, 0)) = 0;
      }
      cons_y.push_back(std::move(cy));
      cons_w.push_back(std::move(cw));
    }
  }
  if (!done) throw InternalError("MNA elimination did not terminate");

  // Gauss-Jordan on the (now regular) E: y' = -E^{-1} K y + E^{-1} F W.
  for (int col = 0; col < size; ++col) {
    int piv = -1;
    for (int r = col; r < size; ++r)
      if (sgn(em(r, col)) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) throw InternalError("MNA leading matrix became singular");
    apply_all([&](RationalMatrix& x) { x.swap_rows(piv, col); });
    const mpq_class inv = 1 / em(col, col);
    apply_all([&](RationalMatrix& x) { x.scale_row(col, inv); });
    for (int r = 0; r < size; ++r) {
      if (r == col || sgn(em(r, col)) == 0) continue;
      const mpq_class factor = em(r, col);
      apply_all([&](RationalMatrix& x) { x.axpy_row(r, col, factor); });
    }
  }
  m_ = -km.to_double();
  const MatrixXd fd = fm.to_double();
  for (int k = 0; k < orders; ++k) {
    MatrixXd g(size, ns);
    for (int s = 0; s < ns; ++s) g.col(s) = fd.col(fcol(s, k));
    g_.push_back(std::move(g));
  }
  while (!g_.empty() && g_.back().isZero(0.0)) g_.pop_back();

  const int nc = static_cast<int>(cons_y.size());
  constraint_y_.resize(nc, size);
  for (int r = 0; r < nc; ++r)
    for (int c = 0; c < size; ++c) constraint_y_(r, c) = cons_y[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get_d();
  for (int k = 0; k < orders; ++k) {
    MatrixXd h(nc, ns);
    for (int r = 0; r < nc; ++r)
      for (int s = 0; s < ns; ++s) h(r, s) = cons_w[static_cast<std::size_t>(r)][static_cast<std::size_t>(fcol(s, k))].get_d();
    constraint_w_.push_back(std::move(h));
  }
}

VectorXd MnaSystem::waveforms(double t, int order) const {
  VectorXd w(static_cast<Eigen::Index>(src_edges_.size()));
  for (std::size_t s = 0; s < src_edges_.size(); ++s) w(static_cast<Eigen::Index>(s)) = derivatives_[s][static_cast<std::size_t>(order)](t);
  return w;
}

Eigen::RowVectorXd MnaSystem::branch_row(int edge) const {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n_pot_);
  const Element& el = circuit_.element(edge);
  auto pot = [&](int node) { return node == ground_ ? -1 : (node < ground_ ? node - 1 : node - 2); };
  if (pot(el.from) >= 0) row(pot(el.from)) += 1;
  if (pot(el.to) >= 0) row(pot(el.to)) -= 1;
  return row;
}

VectorXd MnaSystem::rhs(double t, const VectorXd& y) const {
  VectorXd dy = m_ * y;
  for (std::size_t k = 0; k < g_.size(); ++k)
    if (g_[k].cols() > 0) dy += g_[k] * waveforms(t, static_cast<int>(k));
  return dy;
}

VectorXd MnaSystem::initial_state(double t0, const std::vector<int>& state_edges, const VectorXd& values) const {
  if (static_cast<Eigen::Index>(state_edges.size()) != values.size()) throw Error("initial_state: size mismatch");
  const int size = this->size();
  const auto nc = constraint_y_.rows();
  const auto nd = static_cast<Eigen::Index>(state_edges.size());
  MatrixXd a(nc + nd, size);
  VectorXd b(nc + nd);
  a.topRows(nc) = constraint_y_;
  b.head(nc).setZero();
  for (std::size_t k = 0; k < constraint_w_.size(); ++k)
    if (constraint_w_[k].cols() > 0) b.head(nc) += constraint_w_[k] * waveforms(t0, static_cast<int>(k));
  for (Eigen::Index r = 0; r < nd; ++r) {
    const int e = state_edges[static_cast<std::size_t>(r)];
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(size);
    const auto cit = std::find(cap_edges_.begin(), cap_edges_.end(), e);
    if (cit != cap_edges_.end()) {
      const auto a_idx = cit - cap_edges_.begin();
      for (std::size_t c = 0; c < cap_edges_.size(); ++c)
        row.head(n_pot_) += cap_(a_idx, static_cast<Eigen::Index>(c)) * branch_row(cap_edges_[c]);
    } else if (ind_index_[static_cast<std::size_t>(e)] >= 0) {
      row.segment(n_pot_, static_cast<Eigen::Index>(ind_edges_.size())) = ind_.row(ind_index_[static_cast<std::size_t>(e)]);
    } else {
      throw Error("initial_state: edge " + circuit_.element(e).label + " is not a storage element");
    }
    a.row(nc + r) = row;
    b(nc + r) = values(r);
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(a);
  if (qr.rank() < size) throw Error("prescribed values do not determine a unique consistent MNA state");
  const VectorXd y = qr.solve(b);
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if ((a * y - b).cwiseAbs().maxCoeff() > 1e-9 * scale) throw Error("prescribed values are inconsistent with the MNA constraints");
  return y;
}

VectorXd MnaSystem::cph_state(double t, const VectorXd& y) const {
  (void)t;
  const auto p = y.head(n_pot_);
  VectorXd x(circuit_.edge_count());
  VectorXd vc(static_cast<Eigen::Index>(cap_edges_.size()));
  for (std::size_t a = 0; a < cap_edges_.size(); ++a) vc(static_cast<Eigen::Index>(a)) = branch_row(cap_edges_[a]).dot(p);
  const VectorXd q = cap_ * vc;
  const VectorXd il = y.segment(n_pot_, static_cast<Eigen::Index>(ind_edges_.size()));
  const VectorXd phi = ind_ * il;
  for (std::size_t a = 0; a < cap_edges_.size(); ++a) x(cap_edges_[a]) = q(static_cast<Eigen::Index>(a));
  for (std::size_t a = 0; a < ind_edges_.size(); ++a) x(ind_edges_[a]) = phi(static_cast<Eigen::Index>(a));
  for (int e = 0; e < circuit_.edge_count(); ++e) {
    const ElementKind k = circuit_.kind(e);
    if (k == ElementKind::Resistor || k == ElementKind::CurrentSource) x(e) = branch_row(e).dot(p);
    if (k == ElementKind::VoltageSource)
      x(e) = y(n_pot_ + static_cast<Eigen::Index>(ind_edges_.size()) + vsrc_index_[static_cast<std::size_t>(e)]);
  }
  return x;
}

PortValues MnaSystem::ports(double t, const VectorXd& y, const VectorXd& ydot) const {
  const int m = circuit_.edge_count();
  const auto p = y.head(n_pot_);
  const auto pd = ydot.head(n_pot_);
  PortValues pv{VectorXd(m), VectorXd(m)};
  for (int e = 0; e < m; ++e) pv.v(e) = branch_row(e).dot(p);
  VectorXd vcd(static_cast<Eigen::Index>(cap_edges_.size()));
  for (std::size_t a = 0; a < cap_edges_.size(); ++a) vcd(static_cast<Eigen::Index>(a)) = branch_row(cap_edges_[a]).dot(pd);
  const VectorXd ic = cap_ * vcd;
  for (std::size_t a = 0; a < cap_edges_.size(); ++a) pv.i(cap_edges_[a]) = ic(static_cast<Eigen::Index>(a));
  VectorXd vr(static_cast<Eigen::Index>(res_edges_.size()));
  for (std::size_t a = 0; a < res_edges_.size(); ++a) vr(static_cast<Eigen::Index>(a)) = pv.v(res_edges_[a]);
  const VectorXd ir = cond_ * vr;
  for (std::size_t a = 0; a < res_edges_.size(); ++a) pv.i(res_edges_[a]) = ir(static_cast<Eigen::Index>(a));
  const auto nl = static_cast<Eigen::Index>(ind_edges_.size());
  for (std::size_t a = 0; a < ind_edges_.size(); ++a) pv.i(ind_edges_[a]) = y(n_pot_ + static_cast<Eigen::Index>(a));
  for (std::size_t a = 0; a < vsrc_edges_.size(); ++a) pv.i(vsrc_edges_[a]) = y(n_pot_ + nl + static_cast<Eigen::Index>(a));
  const VectorXd w = waveforms(t, 0);
  for (std::size_t s = 0; s < src_edges_.size(); ++s)
    if (circuit_.kind(src_edges_[s]) == ElementKind::CurrentSource) pv.i(src_edges_[s]) = w(static_cast<Eigen::Index>(s));
  return pv;
}

double MnaSystem::energy(const VectorXd& y) const {
  const auto p = y.head(n_pot_);
  VectorXd vc(static_cast<Eigen::Index>(cap_edges_.size()));
  for (std::size_t a = 0; a < cap_edges_.size(); ++a) vc(static_cast<Eigen::Index>(a)) = branch_row(cap_edges_[a]).dot(p);
  const VectorXd il = y.segment(n_pot_, static_cast<Eigen::Index>(ind_edges_.size()));
  return 0.5 * vc.dot(cap_ * vc) + 0.5 * il.dot(ind_ * il);
}

Trajectory mna_oracle(const Circuit& circuit, const CouplingBlocks& coupling, double t0, double t1,
                      const std::vector<int>& state_edges, const VectorXd& values, double tol,
                      const std::vector<double>& sample_times, int ground) {
  const MnaSystem sys(circuit, coupling, ground);
  const VectorXd y0 = sys.initial_state(t0, state_edges, values);
  OdeOptions opts;
  opts.rtol = tol;
  opts.atol = tol;
  opts.record_steps = true;
  const std::vector<double> samples = sample_times.empty() ? uniform_samples(t0, t1, 101) : sample_times;
  const OdeSolution sol = integrate_dopri5([&](double t, const VectorXd& y, VectorXd& dy) { dy = sys.rhs(t, y); }, t0, t1,
                                           y0, samples, opts);
  Trajectory tr;
  tr.state_edges = state_edges;
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    const double t = sol.times[k];
    const VectorXd& y = sol.states[k];
    const VectorXd yd = sys.rhs(t, y);
    const VectorXd x = sys.cph_state(t, y);
    const PortValues pv = sys.ports(t, y, yd);
    VectorXd s(static_cast<Eigen::Index>(state_edges.size()));
    for (std::size_t a = 0; a < state_edges.size(); ++a) s(static_cast<Eigen::Index>(a)) = x(state_edges[a]);
    tr.times.push_back(t);
    tr.s.push_back(s);
    tr.x.push_back(x);
    tr.xdot.push_back(VectorXd::Zero(x.size()));
    tr.v.push_back(pv.v);
    tr.i.push_back(pv.i);
    tr.energy.push_back(sys.energy(y));
  }
  for (std::size_t k = 0; k < sol.step_times.size(); ++k) {
    const VectorXd x = sys.cph_state(sol.step_times[k], sol.step_states[k]);
    VectorXd s(static_cast<Eigen::Index>(state_edges.size()));
    for (std::size_t a = 0; a < state_edges.size(); ++a) s(static_cast<Eigen::Index>(a)) = x(state_edges[a]);
    tr.step_times.push_back(sol.step_times[k]);
    tr.step_s.push_back(s);
  }
  return tr;
}

}  // namespace cph
