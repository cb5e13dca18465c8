#include "cph/circgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "cph/error.hpp"
#include "cph/graph.hpp"

namespace cph {

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
    return a;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

double rounded(double x) { return std::round(x * 1e4) / 1e4; }

std::string waveform_text(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.5, 2.0), freq(0.5, 3.0);
  const std::string a = format_real(rounded(amp(rng)));
  const std::string w = format_real(rounded(freq(rng)));
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0: return a + "*sin(" + w + "*t)";
    case 1: return a + "*cos(" + w + "*t)";
    case 2: return "cos(t)";
    default: return a;
  }
}

std::optional<LabeledMatrix> coupled_pair(const std::vector<Element>& elements, ElementKind kind, double p,
                                          std::mt19937_64& rng) {
  std::vector<const Element*> pool;
  for (const Element& e : elements)
    if (e.kind == kind) pool.push_back(&e);
  if (pool.size() < 2 || std::uniform_real_distribution<double>(0, 1)(rng) >= p) return std::nullopt;
  std::shuffle(pool.begin(), pool.end(), rng);
  const double a = kind == ElementKind::Resistor ? 1.0 / pool[0]->value() : pool[0]->value();
  const double c = kind == ElementKind::Resistor ? 1.0 / pool[1]->value() : pool[1]->value();
  const double rho = std::uniform_real_distribution<double>(-0.6, 0.6)(rng);
  LabeledMatrix lm;
  lm.rows = {pool[0]->label, pool[1]->label};
  lm.matrix.resize(2, 2);
  lm.matrix << a, rho * std::sqrt(a * c), rho * std::sqrt(a * c), c;
  return lm;
}

}  // namespace

GeneratedCircuit generate_circuit(const GenConfig& cfg) {
  if (cfg.min_nodes < 2 || cfg.max_nodes < cfg.min_nodes) throw Error("circgen: invalid node range");
  if (cfg.max_edges < cfg.min_edges) throw Error("circgen: invalid edge range");
  if (!(cfg.min_value > 0) || cfg.max_value < cfg.min_value) throw Error("circgen: invalid value range");
  if (std::all_of(cfg.kind_weights.begin(), cfg.kind_weights.end(), [](double w) { return w <= 0; }))
    throw Error("circgen: kind weights are all zero");

  std::mt19937_64 rng(cfg.seed);
  const int n = std::uniform_int_distribution<int>(cfg.min_nodes, cfg.max_nodes)(rng);
  const int m = std::uniform_int_distribution<int>(std::max(cfg.min_edges, n - 1), std::max(cfg.max_edges, n - 1))(rng);

  // Random spanning tree: attach each node (in random order) to an earlier one.
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::pair<int, int>> ends;
  for (int k = 1; k < n; ++k) {
    const int other = order[static_cast<std::size_t>(std::uniform_int_distribution<int>(0, k - 1)(rng))];
    ends.push_back({order[static_cast<std::size_t>(k)], other});
  }
  std::uniform_int_distribution<int> node(1, n);
  while (static_cast<int>(ends.size()) < m) {
    const int a = node(rng), b = node(rng);
    if (a != b) ends.push_back({a, b});
  }
  std::shuffle(ends.begin(), ends.end(), rng);
  for (auto& e : ends)
    if (std::bernoulli_distribution(0.5)(rng)) std::swap(e.first, e.second);

  static constexpr std::array<ElementKind, 5> kinds_by_index{ElementKind::Capacitor, ElementKind::Inductor,
                                                             ElementKind::Resistor, ElementKind::VoltageSource,
                                                             ElementKind::CurrentSource};
  std::discrete_distribution<int> kind_pick(cfg.kind_weights.begin(), cfg.kind_weights.end());
  std::vector<ElementKind> kinds;
  for (int k = 0; k < m; ++k) kinds.push_back(kinds_by_index[static_cast<std::size_t>(kind_pick(rng))]);

  // Passive replacement for a repaired edge; falls back to R if C, L, R all have zero weight.
  auto passive = [&]() {
    const std::array<double, 3> w{cfg.kind_weights[0], cfg.kind_weights[1], cfg.kind_weights[2]};
    if (w[0] <= 0 && w[1] <= 0 && w[2] <= 0) return ElementKind::Resistor;
    return kinds_by_index[static_cast<std::size_t>(std::discrete_distribution<int>(w.begin(), w.end())(rng))];
  };

  std::vector<int> edge_order(static_cast<std::size_t>(m));
  std::iota(edge_order.begin(), edge_order.end(), 0);
  // A1: voltage sources must not close a loop among themselves.
  {
    std::shuffle(edge_order.begin(), edge_order.end(), rng);
    Dsu dsu(n + 1);
    for (int e : edge_order) {
      if (kinds[static_cast<std::size_t>(e)] != ElementKind::VoltageSource) continue;
      if (!dsu.unite(ends[static_cast<std::size_t>(e)].first, ends[static_cast<std::size_t>(e)].second))
        kinds[static_cast<std::size_t>(e)] = passive();
    }
  }
  // A2: non-current-source edges must connect all nodes.
  {
    Dsu dsu(n + 1);
    for (int e = 0; e < m; ++e)
      if (kinds[static_cast<std::size_t>(e)] != ElementKind::CurrentSource)
        dsu.unite(ends[static_cast<std::size_t>(e)].first, ends[static_cast<std::size_t>(e)].second);
    std::shuffle(edge_order.begin(), edge_order.end(), rng);
    for (int e : edge_order) {
      if (kinds[static_cast<std::size_t>(e)] != ElementKind::CurrentSource) continue;
      if (dsu.unite(ends[static_cast<std::size_t>(e)].first, ends[static_cast<std::size_t>(e)].second))
        kinds[static_cast<std::size_t>(e)] = passive();
    }
  }

  std::uniform_real_distribution<double> value(cfg.min_value, cfg.max_value);
  std::vector<Element> elements;
  for (int e = 0; e < m; ++e) {
    Element el;
    el.kind = kinds[static_cast<std::size_t>(e)];
    el.label = std::string(1, kind_letter(el.kind)) + std::to_string(e + 1);
    el.from = ends[static_cast<std::size_t>(e)].first;
    el.to = ends[static_cast<std::size_t>(e)].second;
    if (is_source(el.kind))
      el.param = Waveform::parse(waveform_text(rng));
    else
      el.param = std::max(cfg.min_value, rounded(value(rng)));
    elements.push_back(std::move(el));
  }

  GeneratedCircuit out{Circuit(n, std::move(elements)), {}};
  if (cfg.coupling_probability > 0) {
    out.coupling.capacitance = coupled_pair(out.circuit.elements(), ElementKind::Capacitor, cfg.coupling_probability, rng);
    out.coupling.inductance = coupled_pair(out.circuit.elements(), ElementKind::Inductor, cfg.coupling_probability, rng);
    out.coupling.conductance = coupled_pair(out.circuit.elements(), ElementKind::Resistor, cfg.coupling_probability, rng);
  }
  if (!check_a1_a2(incidence_matrix(out.circuit), out.circuit.kinds()).ok())
    throw InternalError("circgen produced a circuit violating A1/A2 (seed " + std::to_string(cfg.seed) + ")");
  return out;
}

}  // namespace cph
