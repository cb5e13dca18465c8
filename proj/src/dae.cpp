#include "cph/dae.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "cph/error.hpp"
#include "cph/graph.hpp"

namespace cph {

const char* state_role(ElementKind kind) {
  switch (kind) {
    case ElementKind::Capacitor: return "q";
    case ElementKind::Inductor: return "phi";
    case ElementKind::VoltageSource: return "i";
    case ElementKind::CurrentSource:
    case ElementKind::Resistor: return "v";
  }
  return "?";
}

namespace {

using Eigen::MatrixXd;
using Eigen::MatrixXi;
using Eigen::VectorXd;

std::vector<int> concat(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Generic nonzero pattern of the inverse of a symmetric matrix: full on each
// connected component of its graph.
MatrixXi inverse_pattern(const MatrixXd& m) {
  const Eigen::Index k = m.rows();
  std::vector<int> comp(static_cast<std::size_t>(k), -1);
  int ncomp = 0;
  for (Eigen::Index s = 0; s < k; ++s) {
    if (comp[static_cast<std::size_t>(s)] >= 0) continue;
    std::vector<Eigen::Index> stack{s};
    comp[static_cast<std::size_t>(s)] = ncomp;
    while (!stack.empty()) {
      Eigen::Index u = stack.back();
      stack.pop_back();
      for (Eigen::Index v = 0; v < k; ++v)
        if (m(u, v) != 0.0 && comp[static_cast<std::size_t>(v)] < 0) {
          comp[static_cast<std::size_t>(v)] = ncomp;
          stack.push_back(v);
        }
    }
    ++ncomp;
  }
  MatrixXi out(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) out(i, j) = comp[static_cast<std::size_t>(i)] == comp[static_cast<std::size_t>(j)];
  return out;
}

MatrixXi pattern_of(const MatrixXd& m) { return (m.array() != 0.0).cast<int>(); }

MatrixXi pattern_product(const MatrixXi& a, const MatrixXi& b) { return ((a * b).array() != 0).cast<int>(); }

MatrixXi pattern_union(const MatrixXi& a, const MatrixXi& b) { return ((a + b).array() != 0).cast<int>(); }

// Affine port map v (or i) = X x + D x' + W w, numeric and structural.
struct PortMap {
  MatrixXd x, dx, w;
  MatrixXi x_pat, dx_pat, w_pat;

  PortMap(Eigen::Index m, Eigen::Index ns)
      : x(MatrixXd::Zero(m, m)), dx(MatrixXd::Zero(m, m)), w(MatrixXd::Zero(m, ns)),
        x_pat(MatrixXi::Zero(m, m)), dx_pat(MatrixXi::Zero(m, m)), w_pat(MatrixXi::Zero(m, ns)) {}

  // Rows `edges` of x are `mat` over columns `edges`, with structural pattern `pat`.
  void set_group(const std::vector<int>& edges, const MatrixXd& mat, const MatrixXi& pat) {
    for (std::size_t a = 0; a < edges.size(); ++a)
      for (std::size_t b = 0; b < edges.size(); ++b) {
        x(edges[a], edges[b]) = mat(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        x_pat(edges[a], edges[b]) = pat(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      }
  }
  void set_identity(int edge) {
    x(edge, edge) = 1.0;
    x_pat(edge, edge) = 1;
  }
  void set_derivative(int edge) {
    dx(edge, edge) = 1.0;
    dx_pat(edge, edge) = 1;
  }
  void set_source(int edge, Eigen::Index s) {
    w(edge, s) = 1.0;
    w_pat(edge, s) = 1;
  }
};

}  // namespace

CphDae::CphDae(Circuit circuit, LoopCutsetMatrix f, EdgePartition partition, CouplingBlocks coupling)
    : circuit_(std::move(circuit)), f_(std::move(f)), partition_(std::move(partition)), coupling_(std::move(coupling)) {
  const int m = circuit_.edge_count();
  const EdgePartition& p = partition_;
  using TG = TwigGroup;
  using LG = LinkGroup;

  layout_.partition_order = p.partition_order();
  for (const auto* s : {&p[LG::C], &p[TG::c], &p[TG::l], &p[LG::L], &p[TG::r], &p[LG::R]})
    layout_.sigma_order.insert(layout_.sigma_order.end(), s->begin(), s->end());
  layout_.output_edges = concat(p[TG::v], p[LG::I]);
  if (static_cast<int>(layout_.partition_order.size()) != m) throw InternalError("partition does not cover every edge");

  is_twig_.assign(static_cast<std::size_t>(m), false);
  for (int e : f_.twigs) is_twig_[static_cast<std::size_t>(e)] = true;

  cap_edges_ = concat(p[LG::C], p[TG::c]);
  ind_edges_ = concat(p[TG::l], p[LG::L]);
  res_edges_ = concat(p[TG::r], p[LG::R]);
  for (int k = 0; k < m; ++k)
    if (is_source(circuit_.kind(k))) src_edges_.push_back(k);

  cap_ = group_matrix(circuit_, coupling_, ElementKind::Capacitor, cap_edges_);
  ind_ = group_matrix(circuit_, coupling_, ElementKind::Inductor, ind_edges_);
  cond_ = group_matrix(circuit_, coupling_, ElementKind::Resistor, res_edges_);
  cap_hess_ = cap_.rows() > 0 ? MatrixXd(cap_.llt().solve(MatrixXd::Identity(cap_.rows(), cap_.cols()))) : MatrixXd(0, 0);
  ind_hess_ = ind_.rows() > 0 ? MatrixXd(ind_.llt().solve(MatrixXd::Identity(ind_.rows(), ind_.cols()))) : MatrixXd(0, 0);
  // Exact symmetry for the quadratic form.
  cap_hess_ = (cap_hess_ + cap_hess_.transpose()) / 2;
  ind_hess_ = (ind_hess_ + ind_hess_.transpose()) / 2;

  const auto ns = static_cast<Eigen::Index>(src_edges_.size());
  PortMap v(m, ns), i(m, ns);
  v.set_group(cap_edges_, cap_hess_, inverse_pattern(cap_));
  i.set_group(ind_edges_, ind_hess_, inverse_pattern(ind_));
  i.set_group(res_edges_, cond_, pattern_of(cond_));
  for (int k = 0; k < m; ++k) {
    switch (circuit_.kind(k)) {
      case ElementKind::Capacitor: i.set_derivative(k); break;
      case ElementKind::Inductor: v.set_derivative(k); break;
      case ElementKind::Resistor: v.set_identity(k); break;
      case ElementKind::VoltageSource: i.set_identity(k); break;
      case ElementKind::CurrentSource: v.set_identity(k); break;
    }
  }
  for (Eigen::Index s = 0; s < ns; ++s) {
    int k = src_edges_[static_cast<std::size_t>(s)];
    if (circuit_.kind(k) == ElementKind::VoltageSource) v.set_source(k, s);
    else i.set_source(k, s);
  }

  // Dirac structure: twig rows i_T - F^T i_N, link rows v_N + F v_T.
  MatrixXd di = MatrixXd::Zero(m, m), dv = MatrixXd::Zero(m, m);
  for (std::size_t r = 0; r < f_.links.size(); ++r) {
    int link = f_.links[r];
    dv(link, link) = 1.0;
    for (std::size_t c = 0; c < f_.twigs.size(); ++c) {
      auto val = static_cast<double>(f_.f(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
      if (val == 0.0) continue;
      int twig = f_.twigs[c];
      dv(link, twig) = val;
      di(twig, link) = -val;
    }
  }
  for (int twig : f_.twigs) di(twig, twig) = 1.0;
  const MatrixXi di_pat = pattern_of(di), dv_pat = pattern_of(dv);

  e_ = di * i.dx + dv * v.dx;
  k_ = di * i.x + dv * v.x;
  s_ = di * i.w + dv * v.w;
  e_pat_ = pattern_union(pattern_product(di_pat, i.dx_pat), pattern_product(dv_pat, v.dx_pat));
  k_pat_ = pattern_union(pattern_product(di_pat, i.x_pat), pattern_product(dv_pat, v.x_pat));
}

Eigen::VectorXd CphDae::sources(double t, int derivative) const {
  VectorXd w(static_cast<Eigen::Index>(src_edges_.size()));
  for (std::size_t s = 0; s < src_edges_.size(); ++s) {
    Waveform wf = circuit_.element(src_edges_[s]).waveform();
    for (int d = 0; d < derivative; ++d) wf = wf.derivative();
    w(static_cast<Eigen::Index>(s)) = wf(t);
  }
  return w;
}

PortValues CphDae::eval_ports(double t, const VectorXd& x, const VectorXd& xdot) const {
  const int m = size();
  if (x.size() != m || xdot.size() != m) throw Error("eval_ports: state vectors must have one entry per edge");
  PortValues out{VectorXd::Zero(m), VectorXd::Zero(m)};
  const VectorXd w = sources(t);
  auto gather = [&](const std::vector<int>& edges) {
    VectorXd g(static_cast<Eigen::Index>(edges.size()));
    for (std::size_t a = 0; a < edges.size(); ++a) g(static_cast<Eigen::Index>(a)) = x(edges[a]);
    return g;
  };
  const VectorXd vc = cap_hess_ * gather(cap_edges_);
  const VectorXd il = ind_hess_ * gather(ind_edges_);
  const VectorXd ir = cond_ * gather(res_edges_);
  for (std::size_t a = 0; a < cap_edges_.size(); ++a) out.v(cap_edges_[a]) = vc(static_cast<Eigen::Index>(a));
  for (std::size_t a = 0; a < ind_edges_.size(); ++a) out.i(ind_edges_[a]) = il(static_cast<Eigen::Index>(a));
  for (std::size_t a = 0; a < res_edges_.size(); ++a) out.i(res_edges_[a]) = ir(static_cast<Eigen::Index>(a));
  for (int k = 0; k < m; ++k) {
    switch (circuit_.kind(k)) {
      case ElementKind::Capacitor: out.i(k) = xdot(k); break;
      case ElementKind::Inductor: out.v(k) = xdot(k); break;
      case ElementKind::Resistor: out.v(k) = x(k); break;
      case ElementKind::VoltageSource: out.i(k) = x(k); break;
      case ElementKind::CurrentSource: out.v(k) = x(k); break;
    }
  }
  for (std::size_t s = 0; s < src_edges_.size(); ++s) {
    int k = src_edges_[s];
    if (circuit_.kind(k) == ElementKind::VoltageSource) out.v(k) = w(static_cast<Eigen::Index>(s));
    else out.i(k) = w(static_cast<Eigen::Index>(s));
  }
  return out;
}

Eigen::VectorXd CphDae::residual(double t, const VectorXd& x, const VectorXd& xdot) const {
  if (x.size() != size() || xdot.size() != size()) throw Error("residual: state vectors must have one entry per edge");
  return e_ * xdot + k_ * x + s_ * sources(t);
}

Eigen::VectorXd CphDae::reduced_residual(double t, const VectorXd& xr, const VectorXd& xrdot) const {
  const auto& order = layout_.sigma_order;
  if (xr.size() != static_cast<Eigen::Index>(order.size()) || xrdot.size() != xr.size())
    throw Error("reduced_residual: dimension mismatch");
  VectorXd x = VectorXd::Zero(size()), xd = VectorXd::Zero(size());
  for (std::size_t a = 0; a < order.size(); ++a) {
    x(order[a]) = xr(static_cast<Eigen::Index>(a));
    xd(order[a]) = xrdot(static_cast<Eigen::Index>(a));
  }
  // Output variables only enter their own rows, which are dropped here.
  const VectorXd full = residual(t, x, xd);
  VectorXd out(xr.size());
  for (std::size_t a = 0; a < order.size(); ++a) out(static_cast<Eigen::Index>(a)) = full(order[a]);
  return out;
}

Eigen::MatrixXd CphDae::reduced_jacobian_x() const {
  const auto& order = layout_.sigma_order;
  const auto n = static_cast<Eigen::Index>(order.size());
  MatrixXd j(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) j(a, b) = k_(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]);
  return j;
}

Eigen::MatrixXd CphDae::reduced_jacobian_xdot() const {
  const auto& order = layout_.sigma_order;
  const auto n = static_cast<Eigen::Index>(order.size());
  MatrixXd j(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) j(a, b) = e_(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]);
  return j;
}

Eigen::VectorXd CphDae::output_variables(double t, const VectorXd& x, const VectorXd& xdot) const {
  VectorXd xz = x;
  for (int k : layout_.output_edges) xz(k) = 0.0;
  const VectorXd f = residual(t, xz, xdot);
  // Each output row reads x_k + (rest) = 0 with unit coefficient on x_k.
  VectorXd out(static_cast<Eigen::Index>(layout_.output_edges.size()));
  for (std::size_t a = 0; a < layout_.output_edges.size(); ++a) out(static_cast<Eigen::Index>(a)) = -f(layout_.output_edges[a]);
  return out;
}

double CphDae::hamiltonian(const VectorXd& x) const {
  double h = 0.0;
  VectorXd q(static_cast<Eigen::Index>(cap_edges_.size())), phi(static_cast<Eigen::Index>(ind_edges_.size()));
  for (std::size_t a = 0; a < cap_edges_.size(); ++a) q(static_cast<Eigen::Index>(a)) = x(cap_edges_[a]);
  for (std::size_t a = 0; a < ind_edges_.size(); ++a) phi(static_cast<Eigen::Index>(a)) = x(ind_edges_[a]);
  if (q.size() > 0) h += 0.5 * q.dot(cap_hess_ * q);
  if (phi.size() > 0) h += 0.5 * phi.dot(ind_hess_ * phi);
  return h;
}

Eigen::VectorXd CphDae::hamiltonian_gradient(const VectorXd& x) const {
  VectorXd g = VectorXd::Zero(size());
  VectorXd q(static_cast<Eigen::Index>(cap_edges_.size())), phi(static_cast<Eigen::Index>(ind_edges_.size()));
  for (std::size_t a = 0; a < cap_edges_.size(); ++a) q(static_cast<Eigen::Index>(a)) = x(cap_edges_[a]);
  for (std::size_t a = 0; a < ind_edges_.size(); ++a) phi(static_cast<Eigen::Index>(a)) = x(ind_edges_[a]);
  const VectorXd gq = cap_hess_ * q, gphi = ind_hess_ * phi;
  for (std::size_t a = 0; a < cap_edges_.size(); ++a) g(cap_edges_[a]) = gq(static_cast<Eigen::Index>(a));
  for (std::size_t a = 0; a < ind_edges_.size(); ++a) g(ind_edges_[a]) = gphi(static_cast<Eigen::Index>(a));
  return g;
}

std::string CphDae::state_name(int edge) const {
  std::string label = circuit_.element(edge).label;
  label[0] = static_cast<char>(is_twig_[static_cast<std::size_t>(edge)] ? std::tolower(static_cast<unsigned char>(label[0]))
                                                                        : std::toupper(static_cast<unsigned char>(label[0])));
  return std::string(state_role(circuit_.kind(edge))) + "_" + label;
}

std::string CphDae::equation_name(int edge) const {
  std::string name = state_name(edge);
  return "f" + name.substr(name.find('_'));
}

CphDae build_dae(const Circuit& circuit, const CouplingBlocks& coupling) {
  const IncidenceMatrix a = incidence_matrix(circuit);
  const std::vector<ElementKind> kinds = circuit.kinds();
  const TreeDecomposition td = optimal_tree(a, kinds);
  LoopCutsetMatrix f = compute_f(a, td);
  EdgePartition p = partition_edges(td, kinds);
  BlockF check(f, p, a.labels);
  return CphDae(circuit, std::move(f), std::move(p), coupling);
}

}  // namespace cph
