#pragma once

#include <ostream>

#include "json.hpp"

#include "cph/dae.hpp"
#include "cph/graph.hpp"
#include "cph/sigma.hpp"

namespace cph {

using Json = nlohmann::ordered_json;

// {a1, a2, witnesses: [{kind, labels}]}
Json wellposedness_json(const WellPosednessReport& r);

// {T: [labels], N: [labels], F: [[...]] (rows N, columns T),
//  partition: {c, l, v, r, L, C, I, R}}
Json tree_json(const CphDae& dae);

// {rows, cols, sigma (with "-inf"), offsets {c, d}, output_offsets,
//  reduced_offsets, hvt, dof, index, classified_index, det_J, det_JC, det_JL, det_JG}
// Rows/columns are the sigma order followed by the output rows/columns.
Json sigma_json(const StructuralResult& sr);

// Everything above plus partition sizes, Jacobian ratios and the SA verdict.
Json analysis_json(const Circuit& circuit, const WellPosednessReport& wp, const CphDae* dae,
                   const StructuralResult* sr);

void print_wellposedness(std::ostream& out, const WellPosednessReport& r);
void print_tree(std::ostream& out, const CphDae& dae);
void print_sigma(std::ostream& out, const StructuralResult& sr);
void print_analysis(std::ostream& out, const CphDae& dae, const StructuralResult& sr);

}  // namespace cph
