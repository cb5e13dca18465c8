#include "cph/loopcut.hpp"

#include <algorithm>

#include "cph/error.hpp"

namespace cph {

int LoopCutsetMatrix::at(int link, int twig) const {
  auto r = std::find(links.begin(), links.end(), link);
  auto c = std::find(twigs.begin(), twigs.end(), twig);
  if (r == links.end() || c == twigs.end()) return 0;
  return static_cast<int>(f(r - links.begin(), c - twigs.begin()));
}

LoopCutsetMatrix compute_f(const IncidenceMatrix& a, const TreeDecomposition& td) {
  const Eigen::Index n1 = a.a.cols() - 1;
  const auto nt = static_cast<Eigen::Index>(td.twigs.size());
  const auto nn = static_cast<Eigen::Index>(td.links.size());
  if (nt != n1) throw InternalError("twig count does not match node count");

  IntMatrix at(nt, n1), an(nn, n1);
  for (Eigen::Index r = 0; r < nt; ++r) at.row(r) = a.a.row(td.twigs[static_cast<std::size_t>(r)]).head(n1);
  for (Eigen::Index r = 0; r < nn; ++r) an.row(r) = a.a.row(td.links[static_cast<std::size_t>(r)]).head(n1);

  // F * A_T = -A_N  <=>  A_T^T * F^T = -A_N^T
  IntMatrix ft;
  IntMatrix rhs = -an.transpose();
  if (!exact_solve(at.transpose(), rhs, ft)) throw InternalError("tree rows of the incidence matrix are singular");

  LoopCutsetMatrix out{ft.transpose(), td.links, td.twigs};
  for (Eigen::Index i = 0; i < out.f.rows(); ++i)
    for (Eigen::Index j = 0; j < out.f.cols(); ++j)
      if (out.f(i, j) < -1 || out.f(i, j) > 1) throw InternalError("loop-cutset entry outside {-1,0,1}");
  return out;
}

std::vector<int> EdgePartition::partition_order() const {
  std::vector<int> out;
  for (const auto& s : twig_sets) out.insert(out.end(), s.begin(), s.end());
  for (const auto& s : link_sets) out.insert(out.end(), s.begin(), s.end());
  return out;
}

const char* group_name(TwigGroup g) {
  static const char* names[] = {"c", "l", "v", "r"};
  return names[static_cast<int>(g)];
}

const char* group_name(LinkGroup g) {
  static const char* names[] = {"L", "C", "I", "R"};
  return names[static_cast<int>(g)];
}

EdgePartition partition_edges(const TreeDecomposition& td, const std::vector<ElementKind>& kinds) {
  EdgePartition p;
  for (int e : td.twigs) {
    switch (kinds[static_cast<std::size_t>(e)]) {
      case ElementKind::Capacitor: p.twig_sets[0].push_back(e); break;
      case ElementKind::Inductor: p.twig_sets[1].push_back(e); break;
      case ElementKind::VoltageSource: p.twig_sets[2].push_back(e); break;
      case ElementKind::Resistor: p.twig_sets[3].push_back(e); break;
      case ElementKind::CurrentSource:
        throw AssumptionError("current source on edge " + std::to_string(e + 1) + " lies in the tree");
    }
  }
  for (int e : td.links) {
    switch (kinds[static_cast<std::size_t>(e)]) {
      case ElementKind::Inductor: p.link_sets[0].push_back(e); break;
      case ElementKind::Capacitor: p.link_sets[1].push_back(e); break;
      case ElementKind::CurrentSource: p.link_sets[2].push_back(e); break;
      case ElementKind::Resistor: p.link_sets[3].push_back(e); break;
      case ElementKind::VoltageSource:
        throw AssumptionError("voltage source on edge " + std::to_string(e + 1) + " lies outside the tree");
    }
  }
  return p;
}

BlockF::BlockF(const LoopCutsetMatrix& f, const EdgePartition& p, const std::vector<std::string>& labels) {
  auto row_of = [&](int edge) { return std::find(f.links.begin(), f.links.end(), edge) - f.links.begin(); };
  auto col_of = [&](int edge) { return std::find(f.twigs.begin(), f.twigs.end(), edge) - f.twigs.begin(); };

  for (const auto& s : p.link_sets) row_edges_.insert(row_edges_.end(), s.begin(), s.end());
  for (const auto& s : p.twig_sets) col_edges_.insert(col_edges_.end(), s.begin(), s.end());
  reordered_.resize(static_cast<Eigen::Index>(row_edges_.size()), static_cast<Eigen::Index>(col_edges_.size()));
  for (std::size_t i = 0; i < row_edges_.size(); ++i)
    for (std::size_t j = 0; j < col_edges_.size(); ++j)
      reordered_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f.f(row_of(row_edges_[i]), col_of(col_edges_[j]));

  for (std::size_t rg = 0; rg < 4; ++rg) {
    for (std::size_t cg = 0; cg < 4; ++cg) {
      const auto& rows = p.link_sets[rg];
      const auto& cols = p.twig_sets[cg];
      IntMatrix& b = blocks_[rg][cg];
      b.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
          b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f.f(row_of(rows[i]), col_of(cols[j]));
    }
  }

  const std::pair<LinkGroup, TwigGroup> forbidden[] = {
      {LinkGroup::C, TwigGroup::l}, {LinkGroup::C, TwigGroup::r}, {LinkGroup::R, TwigGroup::l}};
  for (auto [rg, cg] : forbidden) {
    const IntMatrix& b = block(rg, cg);
    for (Eigen::Index i = 0; i < b.rows(); ++i)
      for (Eigen::Index j = 0; j < b.cols(); ++j)
        if (b(i, j) != 0) {
          int link = p[rg][static_cast<std::size_t>(i)];
          int twig = p[cg][static_cast<std::size_t>(j)];
          throw AssumptionError(std::string("tree is not optimal: block ") + group_name(rg) + group_name(cg) +
                                " has F[" + labels[static_cast<std::size_t>(link)] + "," +
                                labels[static_cast<std::size_t>(twig)] + "] = " + std::to_string(b(i, j)));
        }
  }
}

}  // namespace cph
