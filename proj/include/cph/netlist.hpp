#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cph/waveform.hpp"

namespace cph {

enum class ElementKind { Capacitor, Inductor, Resistor, VoltageSource, CurrentSource };

// Netlist letter for a kind: C, L, R, V, I.
char kind_letter(ElementKind kind);
bool is_source(ElementKind kind);

// One circuit edge. Nodes are one-based. `param` holds the element value
// (farads, henries, ohms) for C/L/R and the waveform for V/I.
struct Element {
  std::string label;
  ElementKind kind;
  int from = 0;
  int to = 0;
  std::variant<double, Waveform> param;

  double value() const { return std::get<double>(param); }
  const Waveform& waveform() const { return std::get<Waveform>(param); }
};

bool operator==(const Element& a, const Element& b);

// Connected circuit graph with typed edges. Edge index is the position in
// `elements()` (zero-based here, printed one-based through the label).
class Circuit {
 public:
  // Validates: n >= 2, at least one edge, node ids in 1..n and all used,
  // no self-loops, positive C/L/R, unique labels, connected graph.
  Circuit(int node_count, std::vector<Element> elements);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(elements_.size()); }
  const std::vector<Element>& elements() const { return elements_; }
  const Element& element(int edge) const { return elements_[static_cast<std::size_t>(edge)]; }
  ElementKind kind(int edge) const { return element(edge).kind; }

  // Edge index for a label, or -1.
  int find(std::string_view label) const;

  std::vector<ElementKind> kinds() const;

  friend bool operator==(const Circuit& a, const Circuit& b) {
    return a.node_count_ == b.node_count_ && a.elements_ == b.elements_;
  }

 private:
  int node_count_;
  std::vector<Element> elements_;
};

// Parses `<LABEL> <from> <to> <param>` lines. `#` starts a comment.
Circuit parse_netlist(std::string_view text);
Circuit load_netlist(const std::string& path);

// Netlist text that parses back to an equal Circuit.
std::string serialize(const Circuit& circuit);

}  // namespace cph
