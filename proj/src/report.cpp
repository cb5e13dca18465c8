#include "cph/report.hpp"

#include <iomanip>

namespace cph {

namespace {

Json labels_json(const Circuit& c, const std::vector<int>& edges) {
  Json out = Json::array();
  for (int e : edges) out.push_back(c.element(e).label);
  return out;
}

Json offsets_json(const Offsets& o) { return Json{{"c", o.c}, {"d", o.d}}; }

std::string sigma_cell(int v) { return v == kNegInf ? "-" : std::to_string(v); }

constexpr std::array<TwigGroup, 4> kTwigGroups{TwigGroup::c, TwigGroup::l, TwigGroup::v, TwigGroup::r};
constexpr std::array<LinkGroup, 4> kLinkGroups{LinkGroup::L, LinkGroup::C, LinkGroup::I, LinkGroup::R};

}  // namespace

Json wellposedness_json(const WellPosednessReport& r) {
  Json w = Json::array();
  for (const Witness& x : r.witnesses) w.push_back(Json{{"kind", x.kind}, {"labels", x.labels}});
  return Json{{"a1", r.a1}, {"a2", r.a2}, {"witnesses", w}};
}

Json tree_json(const CphDae& dae) {
  const Circuit& c = dae.circuit();
  const LoopCutsetMatrix& f = dae.loop_cutset();
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < f.f.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < f.f.cols(); ++j) row.push_back(f.f(i, j));
    rows.push_back(row);
  }
  Json part = Json::object();
  for (TwigGroup g : kTwigGroups) part[group_name(g)] = labels_json(c, dae.partition()[g]);
  for (LinkGroup g : kLinkGroups) part[group_name(g)] = labels_json(c, dae.partition()[g]);
  return Json{{"T", labels_json(c, f.twigs)}, {"N", labels_json(c, f.links)}, {"F", rows}, {"partition", part}};
}

Json sigma_json(const StructuralResult& sr) {
  const SignatureMatrix& s = sr.full_sigma;
  Json rows = Json::array();
  for (int i = 0; i < s.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < s.cols(); ++j) {
      if (s.finite(i, j))
        row.push_back(s.sigma(i, j));
      else
        row.push_back("-inf");
    }
    rows.push_back(row);
  }
  const int n = sr.sigma.rows();
  Offsets outputs;
  outputs.c.assign(sr.full_offsets.c.begin() + n, sr.full_offsets.c.end());
  outputs.d.assign(sr.full_offsets.d.begin() + n, sr.full_offsets.d.end());
  Json hvt = Json::array();
  for (int i = 0; i < s.rows(); ++i) {
    const int j = sr.full_hvt.col_of_row[static_cast<std::size_t>(i)];
    hvt.push_back(Json{{"row", s.row_labels[static_cast<std::size_t>(i)]}, {"col", s.col_labels[static_cast<std::size_t>(j)]}});
  }
  const SystemJacobian& j = sr.jacobian;
  return Json{{"rows", s.row_labels},
              {"cols", s.col_labels},
              {"sigma", rows},
              {"offsets", offsets_json(sr.offsets)},
              {"output_offsets", offsets_json(outputs)},
              {"reduced_offsets", offsets_json(sr.reduced_offsets)},
              {"hvt", hvt},
              {"hvt_value", sr.full_hvt.value},
              {"dof", sr.dof},
              {"index", sr.index},
              {"classified_index", sr.classified_index},
              {"det_J", j.det},
              {"det_JC", j.det_c},
              {"det_JL", j.det_l},
              {"det_JG", j.det_g}};
}

Json analysis_json(const Circuit& circuit, const WellPosednessReport& wp, const CphDae* dae, const StructuralResult* sr) {
  Json out{{"nodes", circuit.node_count()}, {"edges", circuit.edge_count()}, {"well_posedness", wellposedness_json(wp)}};
  if (dae) {
    out["tree"] = tree_json(*dae);
    Json sizes = Json::object();
    for (TwigGroup g : kTwigGroups) sizes[group_name(g)] = dae->partition().size(g);
    for (LinkGroup g : kLinkGroups) sizes[group_name(g)] = dae->partition().size(g);
    out["partition_sizes"] = sizes;
  }
  if (sr) {
    out["structure"] = sigma_json(*sr);
    const SystemJacobian& j = sr->jacobian;
    out["jacobian"] = Json{{"sv_ratio", j.sv_ratio},
                           {"sv_ratio_JC", j.sv_ratio_c},
                           {"sv_ratio_JL", j.sv_ratio_l},
                           {"sv_ratio_JG", j.sv_ratio_g},
                           {"nonsingular", j.nonsingular},
                           {"failing_block", j.failing_block}};
    out["dof"] = sr->dof;
    out["index"] = sr->index;
    out["sa_amenable"] = sr->sa_amenable;
  }
  return out;
}

void print_wellposedness(std::ostream& out, const WellPosednessReport& r) {
  out << "A1 (no V-loop):   " << (r.a1 ? "ok" : "violated") << "\n";
  out << "A2 (no I-cutset): " << (r.a2 ? "ok" : "violated") << "\n";
  for (const Witness& w : r.witnesses) {
    out << "  " << w.kind << ":";
    for (const auto& l : w.labels) out << " " << l;
    out << "\n";
  }
}

void print_tree(std::ostream& out, const CphDae& dae) {
  const Circuit& c = dae.circuit();
  const LoopCutsetMatrix& f = dae.loop_cutset();
  out << "tree:  ";
  for (int e : f.twigs) out << " " << c.element(e).label;
  out << "\ncotree:";
  for (int e : f.links) out << " " << c.element(e).label;
  out << "\nF (rows cotree, columns tree):\n      ";
  for (int e : f.twigs) out << std::setw(6) << c.element(e).label;
  out << "\n";
  for (Eigen::Index i = 0; i < f.f.rows(); ++i) {
    out << std::setw(6) << c.element(f.links[static_cast<std::size_t>(i)]).label;
    for (Eigen::Index j = 0; j < f.f.cols(); ++j) out << std::setw(6) << f.f(i, j);
    out << "\n";
  }
  out << "partition:";
  for (TwigGroup g : kTwigGroups) out << " " << group_name(g) << "=" << dae.partition().size(g);
  for (LinkGroup g : kLinkGroups) out << " " << group_name(g) << "=" << dae.partition().size(g);
  out << "\n";
}

void print_sigma(std::ostream& out, const StructuralResult& sr) {
  const SignatureMatrix& s = sr.full_sigma;
  std::size_t w = 3;
  for (const auto& l : s.col_labels) w = std::max(w, l.size() + 1);
  for (const auto& l : s.row_labels) w = std::max(w, l.size() + 1);
  const int iw = static_cast<int>(w);
  out << std::setw(iw) << "" << " ";
  for (const auto& l : s.col_labels) out << std::setw(iw) << l;
  out << std::setw(5) << "c" << "\n";
  for (int i = 0; i < s.rows(); ++i) {
    out << std::setw(iw) << s.row_labels[static_cast<std::size_t>(i)] << " ";
    for (int j = 0; j < s.cols(); ++j) {
      std::string cell = sigma_cell(s.sigma(i, j));
      if (sr.full_hvt.col_of_row[static_cast<std::size_t>(i)] == j) cell = "[" + cell + "]";
      out << std::setw(iw) << cell;
    }
    out << std::setw(5) << sr.full_offsets.c[static_cast<std::size_t>(i)] << "\n";
  }
  out << std::setw(iw) << "d" << " ";
  for (int d : sr.full_offsets.d) out << std::setw(iw) << d;
  out << "\n";
}

void print_analysis(std::ostream& out, const CphDae& dae, const StructuralResult& sr) {
  print_tree(out, dae);
  out << "\nsignature matrix ([ ] marks the HVT):\n";
  print_sigma(out, sr);
  const SystemJacobian& j = sr.jacobian;
  out << "\nDOF " << sr.dof << ", structural index " << sr.index << ", classifier index " << sr.classified_index << "\n";
  out << "det J = " << j.det << " (J_C " << j.det_c << ", J_L " << j.det_l << ", J_G " << j.det_g << ")\n";
  out << "sv ratio " << j.sv_ratio << "\n";
  out << "SA-amenable: " << (sr.sa_amenable ? "yes" : "no") << "\n";
}

}  // namespace cph
