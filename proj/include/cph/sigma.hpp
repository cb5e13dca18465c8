#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cph/dae.hpp"

namespace cph {

// Sentinel for "variable does not occur in the equation".
inline constexpr int kNegInf = std::numeric_limits<int>::min() / 4;

// sigma(i, j) = highest derivative order of unknown j in equation i.
struct SignatureMatrix {
  Eigen::MatrixXi sigma;
  std::vector<int> row_edges;  // equation i belongs to this edge
  std::vector<int> col_edges;  // unknown j is the state of this edge
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;

  int rows() const { return static_cast<int>(sigma.rows()); }
  int cols() const { return static_cast<int>(sigma.cols()); }
  bool finite(int i, int j) const { return sigma(i, j) != kNegInf; }
};

// Built from the structural patterns of the assembled DAE. With
// `include_outputs` the v/I rows and columns are appended for display; the
// analysis always uses the reduced square matrix.
SignatureMatrix build_sigma(const CphDae& dae, bool include_outputs = false);

struct Transversal {
  std::vector<int> col_of_row;
  int value = 0;
};

// Highest-value transversal by maximum-weight assignment. Throws SaFailure
// if no transversal avoids -inf entries.
Transversal find_hvt(const SignatureMatrix& s);

struct Offsets {
  std::vector<int> c;  // per equation
  std::vector<int> d;  // per unknown
};

// Fixed point of: d_j = max_i (sigma_ij + c_i); c_i = d_j - sigma_ij on the HVT.
Offsets canonical_offsets(const SignatureMatrix& s, const Transversal& hvt);

// d_j - c_i >= sigma_ij everywhere with equality on `hvt`, all offsets >= 0.
bool offsets_valid(const SignatureMatrix& s, const Offsets& o, const Transversal& hvt);

// Offsets predicted from the block structure: c = 1 on f_C and f_l rows,
// d = 1 on storage columns, 0 elsewhere.
Offsets block_offsets(const CphDae& dae);

struct SystemJacobian {
  Eigen::MatrixXd j;  // rows/columns in sigma order
  // Diagonal blocks from their closed forms (rows f_C,f_c / f_l,f_L / f_r,f_R).
  Eigen::MatrixXd jc, jl, jg;
  double det = 0, det_c = 1, det_l = 1, det_g = 1;
  // Smallest over largest singular value.
  double sv_ratio = 0, sv_ratio_c = 1, sv_ratio_l = 1, sv_ratio_g = 1;
  bool nonsingular = false;
  std::string failing_block;  // "J_C", "J_L", "J_G" or "J" when singular
};

inline constexpr double kJacobianSvTolerance = 1e-10;

// J_ij = d f_i / d x_j^(d_j - c_i), zero where d_j - c_i < 0. The CpH model
// is linear, so the point only fixes dimensions.
SystemJacobian system_jacobian(const CphDae& dae, const SignatureMatrix& s, const Offsets& o, double t,
                               const Eigen::VectorXd& x, const Eigen::VectorXd& xdot);

// 0 if (no C links and no l twigs) and no resistors, 1 if exactly one of the
// two holds, 2 otherwise.
int classify_index(const EdgePartition& p);

// max_i c_i, plus one if some d_j is zero (pass offsets over the sigma-order unknowns).
int structural_index(const Offsets& o);

// The analysis runs on the complete DAE (all m equations and unknowns,
// outputs x_v, x_I included); `sigma`, `hvt` and `offsets` are its
// restriction to the sigma-order rows and columns. The output rows pin the
// derivative order of storage elements whose only coupling is to sources,
// which the reduced matrix alone would miss; `reduced_offsets` keeps the
// canonical offsets of the reduced matrix for comparison.
struct StructuralResult {
  SignatureMatrix sigma;
  Transversal hvt;
  Offsets offsets;
  SignatureMatrix full_sigma;
  Transversal full_hvt;
  Offsets full_offsets;
  Offsets reduced_offsets;
  int dof = 0;
  int index = 0;
  int classified_index = 0;
  SystemJacobian jacobian;
  bool sa_amenable = false;
};

// Full structural analysis. The Jacobian is evaluated at a random state drawn from `seed`.
StructuralResult analyze_structure(const CphDae& dae, std::uint64_t seed = 0);

}  // namespace cph
