#include "cph/coupling.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cph/error.hpp"

namespace cph {

namespace {

LabeledMatrix parse_block(const nlohmann::json& j, const char* name) {
  LabeledMatrix out;
  try {
    out.rows = j.at("rows").get<std::vector<std::string>>();
    auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
    const auto k = static_cast<Eigen::Index>(out.rows.size());
    if (static_cast<Eigen::Index>(rows.size()) != k) throw AssumptionError(std::string(name) + ": matrix row count differs from labels");
    out.matrix.resize(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != k)
        throw AssumptionError(std::string(name) + ": matrix is not square");
      for (Eigen::Index c = 0; c < k; ++c) out.matrix(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(name) + ": " + e.what());
  }
  return out;
}

nlohmann::json block_json(const LabeledMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.matrix.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.matrix.cols(); ++c) row.push_back(m.matrix(i, c));
    rows.push_back(row);
  }
  return {{"rows", m.rows}, {"matrix", rows}};
}

}  // namespace

CouplingBlocks parse_coupling(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("coupling config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("coupling config must be a JSON object");
  CouplingBlocks out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "capacitance") out.capacitance = parse_block(it.value(), "capacitance");
    else if (it.key() == "inductance") out.inductance = parse_block(it.value(), "inductance");
    else if (it.key() == "conductance") out.conductance = parse_block(it.value(), "conductance");
    else throw ParseError("coupling config: unknown key '" + it.key() + "'");
  }
  return out;
}

CouplingBlocks load_coupling(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_coupling(ss.str());
}

std::string coupling_to_json(const CouplingBlocks& blocks) {
  nlohmann::json j = nlohmann::json::object();
  if (blocks.capacitance) j["capacitance"] = block_json(*blocks.capacitance);
  if (blocks.inductance) j["inductance"] = block_json(*blocks.inductance);
  if (blocks.conductance) j["conductance"] = block_json(*blocks.conductance);
  return j.dump(2);
}

Eigen::MatrixXd group_matrix(const Circuit& circuit, const CouplingBlocks& blocks, ElementKind kind,
                             const std::vector<int>& edges) {
  const auto k = static_cast<Eigen::Index>(edges.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Element& e = circuit.element(edges[static_cast<std::size_t>(i)]);
    out(i, i) = kind == ElementKind::Resistor ? 1.0 / e.value() : e.value();
  }
  const std::optional<LabeledMatrix>* block = nullptr;
  const char* name = "";
  switch (kind) {
    case ElementKind::Capacitor: block = &blocks.capacitance; name = "capacitance"; break;
    case ElementKind::Inductor: block = &blocks.inductance; name = "inductance"; break;
    case ElementKind::Resistor: block = &blocks.conductance; name = "conductance"; break;
    default: return out;
  }
  if (!block->has_value()) return out;
  const LabeledMatrix& lm = **block;
  if (lm.matrix.rows() != static_cast<Eigen::Index>(lm.rows.size()) || lm.matrix.cols() != lm.matrix.rows())
    throw AssumptionError(std::string(name) + " block dimension mismatch");
  if (lm.matrix.size() > 0 && (lm.matrix - lm.matrix.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw AssumptionError(std::string(name) + " block is not symmetric");

  std::vector<Eigen::Index> pos;
  for (const std::string& label : lm.rows) {
    int edge = circuit.find(label);
    if (edge < 0) throw AssumptionError(std::string(name) + " block names unknown element " + label);
    if (circuit.kind(edge) != kind) throw AssumptionError(std::string(name) + " block names " + label + " of the wrong kind");
    auto it = std::find(edges.begin(), edges.end(), edge);
    pos.push_back(it - edges.begin());
  }
  for (std::size_t a = 0; a < pos.size(); ++a)
    for (std::size_t b = 0; b < pos.size(); ++b)
      out(pos[a], pos[b]) = lm.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));

  if (k > 0 && Eigen::LLT<Eigen::MatrixXd>(out).info() != Eigen::Success)
    throw AssumptionError(std::string(name) + " matrix is not symmetric positive definite");
  return out;
}

}  // namespace cph
