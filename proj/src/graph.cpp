#include "cph/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "cph/error.hpp"

namespace cph {

int IncidenceMatrix::from(int edge) const {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    if (a(edge, j) == 1) return static_cast<int>(j);
  return -1;
}

int IncidenceMatrix::to(int edge) const {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    if (a(edge, j) == -1) return static_cast<int>(j);
  return -1;
}

IncidenceMatrix incidence_matrix(const Circuit& c) {
  IncidenceMatrix out;
  out.a = IntMatrix::Zero(c.edge_count(), c.node_count());
  for (int k = 0; k < c.edge_count(); ++k) {
    const Element& e = c.element(k);
    out.a(k, e.from - 1) = 1;
    out.a(k, e.to - 1) = -1;
    out.labels.push_back(e.label);
  }
  return out;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) { std::iota(parent_.begin(), parent_.end(), 0); }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[static_cast<std::size_t>(a)] = b;
    return true;
  }

 private:
  std::vector<int> parent_;
};

IntMatrix reduced_rows(const IncidenceMatrix& a, const std::vector<int>& edges) {
  IntMatrix b(static_cast<Eigen::Index>(edges.size()), a.a.cols() - 1);
  for (std::size_t r = 0; r < edges.size(); ++r) b.row(static_cast<Eigen::Index>(r)) = a.a.row(edges[r]).head(a.a.cols() - 1);
  return b;
}

// Edges of the path between two nodes inside a forest given by adjacency lists.
std::vector<int> forest_path(const std::vector<std::vector<std::pair<int, int>>>& adj, int src, int dst) {
  std::vector<int> via(adj.size(), -1), prev(adj.size(), -1);
  std::vector<bool> seen(adj.size(), false);
  std::queue<int> q;
  q.push(src);
  seen[static_cast<std::size_t>(src)] = true;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (auto [v, e] : adj[static_cast<std::size_t>(u)]) {
      if (seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = true;
      via[static_cast<std::size_t>(v)] = e;
      prev[static_cast<std::size_t>(v)] = u;
      q.push(v);
    }
  }
  std::vector<int> path;
  for (int v = dst; v != src && v >= 0; v = prev[static_cast<std::size_t>(v)]) path.push_back(via[static_cast<std::size_t>(v)]);
  return path;
}

}  // namespace

WellPosednessReport check_a1_a2(const IncidenceMatrix& a, const std::vector<ElementKind>& kinds) {
  WellPosednessReport report;
  const int m = a.edges();
  const int n = a.nodes();
  std::vector<int> v_edges, non_i_edges;
  for (int k = 0; k < m; ++k) {
    if (kinds[static_cast<std::size_t>(k)] == ElementKind::VoltageSource) v_edges.push_back(k);
    if (kinds[static_cast<std::size_t>(k)] != ElementKind::CurrentSource) non_i_edges.push_back(k);
  }

  report.a1 = v_edges.empty() || exact_rank(reduced_rows(a, v_edges)) == static_cast<int>(v_edges.size());
  report.a2 = !non_i_edges.empty() && exact_rank(reduced_rows(a, non_i_edges)) == n - 1;

  if (!report.a1) {
    // First V edge closing a cycle among earlier V edges.
    DisjointSets ds(n);
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(n));
    for (int e : v_edges) {
      int u = a.from(e), w = a.to(e);
      if (!ds.unite(u, w)) {
        std::vector<int> loop = forest_path(adj, u, w);
        loop.push_back(e);
        std::sort(loop.begin(), loop.end());
        Witness wit{"V-loop", {}};
        for (int k : loop) wit.labels.push_back(a.labels[static_cast<std::size_t>(k)]);
        report.witnesses.push_back(std::move(wit));
        break;
      }
      adj[static_cast<std::size_t>(u)].push_back({w, e});
      adj[static_cast<std::size_t>(w)].push_back({u, e});
    }
  }
  if (!report.a2) {
    // Component of node 0 under non-I edges; the I edges leaving it form a cutset.
    DisjointSets ds(n);
    for (int e : non_i_edges) ds.unite(a.from(e), a.to(e));
    const int root = ds.find(0);
    Witness wit{"I-cutset", {}};
    for (int k = 0; k < m; ++k) {
      if (kinds[static_cast<std::size_t>(k)] != ElementKind::CurrentSource) continue;
      if ((ds.find(a.from(k)) == root) != (ds.find(a.to(k)) == root)) wit.labels.push_back(a.labels[static_cast<std::size_t>(k)]);
    }
    report.witnesses.push_back(std::move(wit));
  }
  return report;
}

int tree_weight(ElementKind kind) {
  switch (kind) {
    case ElementKind::VoltageSource: return 5;
    case ElementKind::Capacitor: return 4;
    case ElementKind::Resistor: return 3;
    case ElementKind::Inductor: return 2;
    case ElementKind::CurrentSource: return 1;
  }
  return 0;
}

TreeDecomposition optimal_tree(const IncidenceMatrix& a, const std::vector<ElementKind>& kinds) {
  WellPosednessReport wp = check_a1_a2(a, kinds);
  if (!wp.a1) throw AssumptionError("A1 violated: circuit contains a loop of voltage sources");
  if (!wp.a2) throw AssumptionError("A2 violated: circuit contains a cutset of current sources");

  const int m = a.edges();
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return tree_weight(kinds[static_cast<std::size_t>(x)]) > tree_weight(kinds[static_cast<std::size_t>(y)]);
  });
  DisjointSets ds(a.nodes());
  std::vector<int> twigs;
  for (int e : order)
    if (ds.unite(a.from(e), a.to(e))) twigs.push_back(e);
  TreeDecomposition td = make_tree(a, std::move(twigs));

  for (int e : td.links)
    if (kinds[static_cast<std::size_t>(e)] == ElementKind::VoltageSource)
      throw InternalError("voltage source " + a.labels[static_cast<std::size_t>(e)] + " left out of optimal tree");
  for (int e : td.twigs)
    if (kinds[static_cast<std::size_t>(e)] == ElementKind::CurrentSource)
      throw InternalError("current source " + a.labels[static_cast<std::size_t>(e)] + " placed in optimal tree");
  return td;
}

TreeDecomposition make_tree(const IncidenceMatrix& a, std::vector<int> twigs) {
  std::sort(twigs.begin(), twigs.end());
  if (std::adjacent_find(twigs.begin(), twigs.end()) != twigs.end()) throw AssumptionError("repeated twig");
  if (static_cast<int>(twigs.size()) != a.nodes() - 1)
    throw AssumptionError("a spanning tree needs " + std::to_string(a.nodes() - 1) + " twigs");
  for (int e : twigs)
    if (e < 0 || e >= a.edges()) throw AssumptionError("twig index out of range");
  if (exact_rank(reduced_rows(a, twigs)) != a.nodes() - 1) throw AssumptionError("twig set is not a spanning tree");
  TreeDecomposition td;
  td.twigs = std::move(twigs);
  for (int k = 0; k < a.edges(); ++k)
    if (!std::binary_search(td.twigs.begin(), td.twigs.end(), k)) td.links.push_back(k);
  return td;
}

}  // namespace cph
