#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cph/netlist.hpp"

namespace cph {

// Symmetric matrix over a list of element labels.
struct LabeledMatrix {
  std::vector<std::string> rows;
  Eigen::MatrixXd matrix;
};

// Optional coupled parameter blocks: capacitance (farads), inductance
// (henries), conductance (siemens). Elements not named keep their
// diagonal netlist value.
struct CouplingBlocks {
  std::optional<LabeledMatrix> capacitance;
  std::optional<LabeledMatrix> inductance;
  std::optional<LabeledMatrix> conductance;

  bool empty() const { return !capacitance && !inductance && !conductance; }
};

// {"capacitance": {"rows": [...], "matrix": [[...]]}, "inductance": ..., "conductance": ...}
CouplingBlocks parse_coupling(std::string_view json_text);
CouplingBlocks load_coupling(const std::string& path);
std::string coupling_to_json(const CouplingBlocks& blocks);

// Parameter matrix over `edges` (all of one kind): diagonal C, L or 1/R from
// the netlist, overridden by the matching coupling block. Throws
// AssumptionError on unknown labels, wrong kinds, size mismatch, asymmetry,
// or a result that is not positive definite.
Eigen::MatrixXd group_matrix(const Circuit& circuit, const CouplingBlocks& blocks, ElementKind kind,
                             const std::vector<int>& edges);

}  // namespace cph
