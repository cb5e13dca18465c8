#include "cph/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "cph/error.hpp"

namespace cph {

char kind_letter(ElementKind kind) {
  switch (kind) {
    case ElementKind::Capacitor: return 'C';
    case ElementKind::Inductor: return 'L';
    case ElementKind::Resistor: return 'R';
    case ElementKind::VoltageSource: return 'V';
    case ElementKind::CurrentSource: return 'I';
  }
  return '?';
}

bool is_source(ElementKind kind) {
  return kind == ElementKind::VoltageSource || kind == ElementKind::CurrentSource;
}

bool operator==(const Element& a, const Element& b) {
  if (a.label != b.label || a.kind != b.kind || a.from != b.from || a.to != b.to) return false;
  if (a.param.index() != b.param.index()) return false;
  if (std::holds_alternative<double>(a.param)) return a.value() == b.value();
  return a.waveform() == b.waveform();
}

namespace {

int find_root(std::vector<int>& parent, int x) {
  while (parent[static_cast<std::size_t>(x)] != x) {
    parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    x = parent[static_cast<std::size_t>(x)];
  }
  return x;
}

}  // namespace

Circuit::Circuit(int node_count, std::vector<Element> elements)
    : node_count_(node_count), elements_(std::move(elements)) {
  if (elements_.empty()) throw AssumptionError("circuit has no elements");
  if (node_count_ < 2) throw AssumptionError("circuit needs at least two nodes");
  std::set<std::string> labels;
  std::vector<bool> used(static_cast<std::size_t>(node_count_) + 1, false);
  for (const Element& e : elements_) {
    if (e.from < 1 || e.from > node_count_ || e.to < 1 || e.to > node_count_)
      throw AssumptionError(e.label + ": node id out of range 1.." + std::to_string(node_count_));
    if (e.from == e.to) throw AssumptionError(e.label + ": self-loop edge on node " + std::to_string(e.from));
    if (is_source(e.kind) != std::holds_alternative<Waveform>(e.param))
      throw AssumptionError(e.label + ": parameter type does not match element kind");
    if (!is_source(e.kind) && !(e.value() > 0.0))
      throw AssumptionError(e.label + ": element value must be positive");
    if (!labels.insert(e.label).second) throw AssumptionError("duplicate label " + e.label);
    used[static_cast<std::size_t>(e.from)] = used[static_cast<std::size_t>(e.to)] = true;
  }
  for (int v = 1; v <= node_count_; ++v)
    if (!used[static_cast<std::size_t>(v)]) throw AssumptionError("node " + std::to_string(v) + " has no elements");

  std::vector<int> parent(static_cast<std::size_t>(node_count_) + 1);
  std::iota(parent.begin(), parent.end(), 0);
  for (const Element& e : elements_)
    parent[static_cast<std::size_t>(find_root(parent, e.from))] = find_root(parent, e.to);
  int root = find_root(parent, 1);
  for (int v = 2; v <= node_count_; ++v)
    if (find_root(parent, v) != root) throw AssumptionError("circuit graph is disconnected");
}

int Circuit::find(std::string_view label) const {
  for (std::size_t k = 0; k < elements_.size(); ++k)
    if (elements_[k].label == label) return static_cast<int>(k);
  return -1;
}

std::vector<ElementKind> Circuit::kinds() const {
  std::vector<ElementKind> out;
  out.reserve(elements_.size());
  for (const Element& e : elements_) out.push_back(e.kind);
  return out;
}

namespace {

struct Token {
  std::string_view text;
  int col;  // one-based
};

// Splits the first `count` whitespace-separated tokens; the remainder (trimmed) becomes the last token.
std::vector<Token> split_fields(std::string_view line, int count) {
  std::vector<Token> out;
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
  };
  for (int k = 0; k < count - 1; ++k) {
    skip();
    if (pos >= line.size()) return out;
    std::size_t start = pos;
    while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    out.push_back({line.substr(start, pos - start), static_cast<int>(start) + 1});
  }
  skip();
  if (pos >= line.size()) return out;
  std::size_t end = line.size();
  while (end > pos && std::isspace(static_cast<unsigned char>(line[end - 1]))) --end;
  out.push_back({line.substr(pos, end - pos), static_cast<int>(pos) + 1});
  return out;
}

ElementKind kind_from_label(const Token& tok, int line_no) {
  switch (std::toupper(static_cast<unsigned char>(tok.text.front()))) {
    case 'C': return ElementKind::Capacitor;
    case 'L': return ElementKind::Inductor;
    case 'R': return ElementKind::Resistor;
    case 'V': return ElementKind::VoltageSource;
    case 'I': return ElementKind::CurrentSource;
    default:
      throw ParseError("label '" + std::string(tok.text) + "' must start with C, L, R, V or I", line_no, tok.col);
  }
}

int parse_node(const Token& tok, int line_no) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
  if (ec != std::errc() || ptr != tok.text.data() + tok.text.size() || v < 1)
    throw ParseError("node id must be a positive integer, got '" + std::string(tok.text) + "'", line_no, tok.col);
  return v;
}

}  // namespace

Circuit parse_netlist(std::string_view text) {
  std::vector<Element> elements;
  int max_node = 0;
  int line_no = 0;
  std::set<std::string> labels;
  while (!text.empty()) {
    ++line_no;
    std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto fields = split_fields(line, 4);
    if (fields.empty()) continue;
    if (fields.size() < 4) {
      int col = static_cast<int>(line.size()) + 1;
      throw ParseError("expected '<label> <from> <to> <param>'", line_no, col);
    }
    const Token& label = fields[0];
    for (char ch : label.text)
      if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_')
        throw ParseError("invalid character in label '" + std::string(label.text) + "'", line_no, label.col);
    Element e;
    e.label = std::string(label.text);
    e.kind = kind_from_label(label, line_no);
    e.from = parse_node(fields[1], line_no);
    e.to = parse_node(fields[2], line_no);
    const Token& param = fields[3];
    if (is_source(e.kind)) {
      try {
        e.param = Waveform::parse(param.text);
      } catch (const ParseError& err) {
        throw ParseError(err.what(), line_no, param.col + err.col() - 1);
      }
    } else {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(param.text.data(), param.text.data() + param.text.size(), v);
      if (ec != std::errc() || ptr != param.text.data() + param.text.size())
        throw ParseError("expected a number, got '" + std::string(param.text) + "'", line_no, param.col);
      if (!(v > 0.0))
        throw ParseError(e.label + ": value must be positive", line_no, param.col);
      e.param = v;
    }
    if (e.from == e.to) throw ParseError(e.label + ": self-loop edge", line_no, fields[2].col);
    if (!labels.insert(e.label).second) throw ParseError("duplicate label " + e.label, line_no, label.col);
    max_node = std::max({max_node, e.from, e.to});
    elements.push_back(std::move(e));
  }
  if (elements.empty()) throw ParseError("netlist has no elements");
  return Circuit(max_node, std::move(elements));
}

Circuit load_netlist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_netlist(ss.str());
}

std::string serialize(const Circuit& circuit) {
  std::string out;
  for (const Element& e : circuit.elements()) {
    out += e.label + ' ' + std::to_string(e.from) + ' ' + std::to_string(e.to) + ' ';
    out += is_source(e.kind) ? e.waveform().to_string() : format_real(e.value());
    out += '\n';
  }
  return out;
}

}  // namespace cph
