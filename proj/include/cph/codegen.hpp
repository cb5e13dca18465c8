#pragma once

#include <string>
#include <vector>

#include "cph/dae.hpp"

namespace cph {

struct GeneratedSource {
  std::string text;
  // C++ identifier used for each edge's parameter constant, edge order.
  // Equal to the label unless the label clashes with a reserved name.
  std::vector<std::string> identifiers;
};

// Templated residual function `fcn(t, x, f, param)` for a DAETS-style solver:
// one parameter constant or source lambda per edge, port variables v[], i[]
// in terms of x[] (derivatives as Diff(x[k],1)), then one residual per edge,
// KCL rows for twigs and KVL rows for links. Indices are zero-based edge
// numbers. Throws Error for circuits with coupling blocks.
GeneratedSource generate_code(const CphDae& dae, const std::string& circuit_name);

}  // namespace cph
