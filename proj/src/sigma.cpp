#include "cph/sigma.hpp"

#include <algorithm>
#include <random>

#include "cph/assignment.hpp"
#include "cph/error.hpp"

namespace cph {

using Eigen::MatrixXd;
using Eigen::VectorXd;

SignatureMatrix build_sigma(const CphDae& dae, bool include_outputs) {
  SignatureMatrix s;
  s.row_edges = dae.layout().sigma_order;
  if (include_outputs) s.row_edges.insert(s.row_edges.end(), dae.layout().output_edges.begin(), dae.layout().output_edges.end());
  s.col_edges = s.row_edges;
  const auto n = static_cast<Eigen::Index>(s.row_edges.size());
  s.sigma.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int eq = s.row_edges[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < n; ++j) {
      const int var = s.col_edges[static_cast<std::size_t>(j)];
      s.sigma(i, j) = dae.e_pattern()(eq, var) ? 1 : dae.k_pattern()(eq, var) ? 0 : kNegInf;
    }
  }
  for (int e : s.row_edges) s.row_labels.push_back(dae.equation_name(e));
  for (int e : s.col_edges) s.col_labels.push_back(dae.state_name(e));
  return s;
}

Transversal find_hvt(const SignatureMatrix& s) {
  const int n = s.rows();
  // Forbidden cost exceeds any sum of finite costs, so it is used only when unavoidable.
  const std::int64_t forbidden = 4 * static_cast<std::int64_t>(n) + 4;
  std::vector<std::vector<std::int64_t>> cost(static_cast<std::size_t>(n), std::vector<std::int64_t>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s.finite(i, j) ? -s.sigma(i, j) : forbidden;
  Transversal t;
  t.col_of_row = min_cost_assignment(cost);
  for (int i = 0; i < n; ++i) {
    const int j = t.col_of_row[static_cast<std::size_t>(i)];
    if (!s.finite(i, j)) throw SaFailure("structurally ill-posed: signature matrix has no finite transversal");
    t.value += s.sigma(i, j);
  }
  return t;
}

Offsets canonical_offsets(const SignatureMatrix& s, const Transversal& hvt) {
  const int n = s.rows();
  Offsets o{std::vector<int>(static_cast<std::size_t>(n), 0), std::vector<int>(static_cast<std::size_t>(n), 0)};
  for (;;) {
    for (int j = 0; j < n; ++j) {
      int best = 0;
      for (int i = 0; i < n; ++i)
        if (s.finite(i, j)) best = std::max(best, s.sigma(i, j) + o.c[static_cast<std::size_t>(i)]);
      o.d[static_cast<std::size_t>(j)] = best;
    }
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      const int j = hvt.col_of_row[static_cast<std::size_t>(i)];
      const int ci = o.d[static_cast<std::size_t>(j)] - s.sigma(i, j);
      if (ci != o.c[static_cast<std::size_t>(i)]) {
        o.c[static_cast<std::size_t>(i)] = ci;
        changed = true;
      }
    }
    if (!changed) return o;
  }
}

bool offsets_valid(const SignatureMatrix& s, const Offsets& o, const Transversal& hvt) {
  const int n = s.rows();
  for (int i = 0; i < n; ++i) {
    if (o.c[static_cast<std::size_t>(i)] < 0 || o.d[static_cast<std::size_t>(i)] < 0) return false;
    for (int j = 0; j < n; ++j)
      if (s.finite(i, j) && o.d[static_cast<std::size_t>(j)] - o.c[static_cast<std::size_t>(i)] < s.sigma(i, j)) return false;
    const int j = hvt.col_of_row[static_cast<std::size_t>(i)];
    if (o.d[static_cast<std::size_t>(j)] - o.c[static_cast<std::size_t>(i)] != s.sigma(i, j)) return false;
  }
  return true;
}

Offsets block_offsets(const CphDae& dae) {
  const EdgePartition& p = dae.partition();
  Offsets o;
  for (int e : dae.layout().sigma_order) {
    const bool c_row = std::count(p[LinkGroup::C].begin(), p[LinkGroup::C].end(), e) ||
                       std::count(p[TwigGroup::l].begin(), p[TwigGroup::l].end(), e);
    const ElementKind k = dae.circuit().kind(e);
    const bool storage = k == ElementKind::Capacitor || k == ElementKind::Inductor;
    o.c.push_back(c_row ? 1 : 0);
    o.d.push_back(storage ? 1 : 0);
  }
  return o;
}

namespace {

MatrixXd to_double(const IntMatrix& m) { return m.cast<double>(); }

// Closed-form block [[M11 - N^T M21, M12 - N^T M22], [N, I]].
MatrixXd spd_block(const MatrixXd& m, Eigen::Index n1, const MatrixXd& nmat) {
  const Eigen::Index n2 = m.rows() - n1;
  MatrixXd p(m.rows(), m.cols());
  p.topLeftCorner(n1, n1) = m.topLeftCorner(n1, n1) - nmat.transpose() * m.bottomLeftCorner(n2, n1);
  p.topRightCorner(n1, n2) = m.topRightCorner(n1, n2) - nmat.transpose() * m.bottomRightCorner(n2, n2);
  p.bottomLeftCorner(n2, n1) = nmat;
  p.bottomRightCorner(n2, n2) = MatrixXd::Identity(n2, n2);
  return p;
}

double sv_ratio(const MatrixXd& m) {
  if (m.size() == 0) return 1.0;
  Eigen::JacobiSVD<MatrixXd> svd(m);
  const VectorXd& sv = svd.singularValues();
  if (sv(0) == 0.0) return 0.0;
  return sv(sv.size() - 1) / sv(0);
}

double det_of(const MatrixXd& m) { return m.size() == 0 ? 1.0 : m.fullPivLu().determinant(); }

}  // namespace

SystemJacobian system_jacobian(const CphDae& dae, const SignatureMatrix& s, const Offsets& o, double t,
                               const VectorXd& x, const VectorXd& xdot) {
  (void)t;
  if (x.size() != dae.size() || xdot.size() != dae.size()) throw Error("system_jacobian: state vectors must have one entry per edge");
  if (s.row_edges != dae.layout().sigma_order) throw Error("system_jacobian: expects the reduced signature matrix");
  const int n = s.rows();
  const MatrixXd jx = dae.reduced_jacobian_x();
  const MatrixXd jxd = dae.reduced_jacobian_xdot();
  SystemJacobian out;
  out.j = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int k = o.d[static_cast<std::size_t>(j)] - o.c[static_cast<std::size_t>(i)];
      if (k == 0) out.j(i, j) = jx(i, j);
      else if (k == 1) out.j(i, j) = jxd(i, j);
    }

  const EdgePartition& p = dae.partition();
  std::vector<std::string> labels;
  for (const Element& e : dae.circuit().elements()) labels.push_back(e.label);
  const BlockF bf(dae.loop_cutset(), p, labels);
  const MatrixXd f_cc = to_double(bf.block(LinkGroup::C, TwigGroup::c));
  const MatrixXd f_ll = to_double(bf.block(LinkGroup::L, TwigGroup::l));
  const MatrixXd f_rr = to_double(bf.block(LinkGroup::R, TwigGroup::r));

  // J_C = [[C_CC + F_Cc C_cC, C_Cc + F_Cc C_cc], [-F_Cc^T, I]] is the SPD block construction with N = -F_Cc^T.
  out.jc = spd_block(dae.capacitor_hessian(), p.size(LinkGroup::C), -f_cc.transpose());
  out.jl = spd_block(dae.inductor_hessian(), p.size(TwigGroup::l), f_ll);
  out.jg = spd_block(dae.conductance(), p.size(TwigGroup::r), f_rr);

  out.det = det_of(out.j);
  out.det_c = det_of(out.jc);
  out.det_l = det_of(out.jl);
  out.det_g = det_of(out.jg);
  out.sv_ratio = sv_ratio(out.j);
  out.sv_ratio_c = sv_ratio(out.jc);
  out.sv_ratio_l = sv_ratio(out.jl);
  out.sv_ratio_g = sv_ratio(out.jg);
  out.nonsingular = out.sv_ratio > kJacobianSvTolerance;
  if (out.sv_ratio_c <= kJacobianSvTolerance) out.failing_block = "J_C";
  else if (out.sv_ratio_l <= kJacobianSvTolerance) out.failing_block = "J_L";
  else if (out.sv_ratio_g <= kJacobianSvTolerance) out.failing_block = "J_G";
  else if (!out.nonsingular) out.failing_block = "J";
  return out;
}

int classify_index(const EdgePartition& p) {
  const bool a = p.size(LinkGroup::C) == 0 && p.size(TwigGroup::l) == 0;
  const bool b = p.size(TwigGroup::r) == 0 && p.size(LinkGroup::R) == 0;
  return (a ? 0 : 1) + (b ? 0 : 1);
}

int structural_index(const Offsets& o) {
  int idx = o.c.empty() ? 0 : *std::max_element(o.c.begin(), o.c.end());
  if (std::find(o.d.begin(), o.d.end(), 0) != o.d.end()) ++idx;
  return idx;
}

StructuralResult analyze_structure(const CphDae& dae, std::uint64_t seed) {
  StructuralResult r;
  r.sigma = build_sigma(dae);
  r.full_sigma = build_sigma(dae, true);
  r.full_hvt = find_hvt(r.full_sigma);
  r.full_offsets = canonical_offsets(r.full_sigma, r.full_hvt);

  // Output variables occur only in their own equation, so the full HVT
  // restricted to the leading rows stays inside the leading columns.
  const int n = r.sigma.rows();
  r.hvt.col_of_row.assign(r.full_hvt.col_of_row.begin(), r.full_hvt.col_of_row.begin() + n);
  for (int i = 0; i < n; ++i) {
    const int j = r.hvt.col_of_row[static_cast<std::size_t>(i)];
    if (j >= n) throw InternalError("transversal pairs a state equation with an output variable");
    r.hvt.value += r.sigma.sigma(i, j);
  }
  r.offsets.c.assign(r.full_offsets.c.begin(), r.full_offsets.c.begin() + n);
  r.offsets.d.assign(r.full_offsets.d.begin(), r.full_offsets.d.begin() + n);
  r.reduced_offsets = canonical_offsets(r.sigma, find_hvt(r.sigma));
  int sum = 0;
  for (int d : r.full_offsets.d) sum += d;
  for (int c : r.full_offsets.c) sum -= c;
  r.dof = sum;
  r.index = structural_index(r.offsets);
  r.classified_index = classify_index(dae.partition());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  VectorXd x(dae.size()), xdot(dae.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    x(k) = u(rng);
    xdot(k) = u(rng);
  }
  r.jacobian = system_jacobian(dae, r.sigma, r.offsets, u(rng), x, xdot);
  r.sa_amenable = r.jacobian.nonsingular && offsets_valid(r.full_sigma, r.full_offsets, r.full_hvt) &&
                  r.dof == r.full_hvt.value;
  return r;
}

}  // namespace cph
