#include "cph/codegen.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "cph/error.hpp"

namespace cph {

namespace {

const std::set<std::string>& reserved_names() {
  static const std::set<std::string> names = {
      // names used by the generated function itself
      "T", "t", "x", "f", "v", "i", "param", "fcn", "Diff", "sin", "cos",
      // C++ keywords a label could spell (labels start with C, L, R, V or I)
      "case", "catch", "char", "char8_t", "char16_t", "char32_t", "class", "co_await", "co_return", "co_yield",
      "concept", "const", "consteval", "constexpr", "constinit", "const_cast", "continue", "long", "register",
      "reinterpret_cast", "requires", "return", "virtual", "void", "volatile", "if", "inline", "int"};
  return names;
}

std::vector<std::string> identifiers_for(const Circuit& c) {
  std::set<std::string> taken;
  for (const Element& e : c.elements()) taken.insert(e.label);
  std::vector<std::string> ids;
  for (const Element& e : c.elements()) {
    std::string id = e.label;
    if (reserved_names().count(id) || id.find("__") != std::string::npos) {
      for (auto& ch : id)
        if (ch == '_') ch = 'u';
      id += "_";
      while (reserved_names().count(id) || taken.count(id)) id += "_";
      taken.insert(id);
    }
    ids.push_back(id);
  }
  return ids;
}

std::string x_ref(int k) { return "x[" + std::to_string(k) + "]"; }
std::string diff_ref(int k) { return "Diff(x[" + std::to_string(k) + "],1)"; }

}  // namespace

GeneratedSource generate_code(const CphDae& dae, const std::string& circuit_name) {
  if (!dae.coupling().empty()) throw Error("code generation supports scalar elements only (coupling blocks given)");
  const Circuit& c = dae.circuit();
  const int m = c.edge_count();
  GeneratedSource out;
  out.identifiers = identifiers_for(c);

  std::ostringstream s;
  s << "template <typename T>\n";
  s << "void fcn(T t, const T *x, T *f, void *param) {\n";
  s << "  // Function to specify circuit " << circuit_name << " for DAETS\n";
  for (int k = 0; k < m; ++k) {
    const Element& e = c.element(k);
    const std::string& id = out.identifiers[static_cast<std::size_t>(k)];
    if (is_source(e.kind))
      s << "  const auto " << id << " = [](T t) -> T {return " << e.waveform().to_string() << ";};\n";
    else
      s << "  const double " << id << " = " << format_real(e.value()) << ";\n";
  }

  s << "  // Port variables\n";
  s << "  T v[" << m << "], i[" << m << "];\n";
  std::vector<std::string> vs, is;
  for (int k = 0; k < m; ++k) {
    const std::string& id = out.identifiers[static_cast<std::size_t>(k)];
    std::string v, i;
    switch (c.kind(k)) {
      case ElementKind::Resistor: v = x_ref(k); i = x_ref(k) + "/" + id; break;
      case ElementKind::VoltageSource: v = id + "(t)"; i = x_ref(k); break;
      case ElementKind::Capacitor: v = x_ref(k) + "/" + id; i = diff_ref(k); break;
      case ElementKind::Inductor: v = diff_ref(k); i = x_ref(k) + "/" + id; break;
      case ElementKind::CurrentSource: v = x_ref(k); i = id + "(t)"; break;
    }
    vs.push_back("v[" + std::to_string(k) + "] = " + v + ";");
    is.push_back("i[" + std::to_string(k) + "] = " + i + ";");
  }
  std::size_t width = 0;
  for (const auto& v : vs) width = std::max(width, v.size());
  for (int k = 0; k < m; ++k) {
    const std::string& v = vs[static_cast<std::size_t>(k)];
    s << "  " << v << std::string(width + 4 - v.size(), ' ') << is[static_cast<std::size_t>(k)] << "\n";
  }

  const LoopCutsetMatrix& f = dae.loop_cutset();
  auto join = [](const std::vector<int>& edges) {
    std::string r;
    for (std::size_t a = 0; a < edges.size(); ++a) r += (a ? "," : "") + std::to_string(edges[a]);
    return r;
  };
  s << "  // Dirac structure, CpH model, tree={" << join(f.twigs) << "}, cotree={" << join(f.links) << "}\n";
  std::vector<bool> twig(static_cast<std::size_t>(m), false);
  for (int e : f.twigs) twig[static_cast<std::size_t>(e)] = true;
  auto term = [](int coeff, const char* var, int e) {
    return std::string(coeff > 0 ? "+" : "-") + var + "[" + std::to_string(e) + "]";
  };
  for (int k = 0; k < m; ++k) {
    s << "  f[" << k << "] = ";
    if (twig[static_cast<std::size_t>(k)]) {
      // Cutset of twig k: -i_k + sum over links of F[link, k] i_link.
      s << "-i[" << k << "]";
      for (int e = 0; e < m; ++e)
        if (!twig[static_cast<std::size_t>(e)] && f.at(e, k) != 0) s << term(f.at(e, k), "i", e);
    } else {
      // Loop of link k: v_k + sum over twigs of F[k, twig] v_twig.
      s << " v[" << k << "]";
      for (int e = 0; e < m; ++e)
        if (twig[static_cast<std::size_t>(e)] && f.at(k, e) != 0) s << term(f.at(k, e), "v", e);
    }
    s << ";\n";
  }
  s << "}\n";
  out.text = s.str();
  return out;
}

}  // namespace cph
