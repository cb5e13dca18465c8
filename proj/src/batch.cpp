#include "cph/batch.hpp"

#include <cmath>
#include <exception>

#include "cph/sigma.hpp"

namespace cph {

PropertyRecord check_properties(const GenConfig& cfg) {
  PropertyRecord r;
  r.seed = cfg.seed;
  try {
    const GeneratedCircuit g = generate_circuit(cfg);
    r.nodes = g.circuit.node_count();
    r.edges = g.circuit.edge_count();
    const CphDae dae = build_dae(g.circuit, g.coupling);
    const StructuralResult sr = analyze_structure(dae, cfg.seed);
    const Offsets closed = block_offsets(dae);
    r.analysed = true;
    r.sa_amenable = sr.sa_amenable;
    r.offsets_closed_form = sr.offsets.c == closed.c && sr.offsets.d == closed.d;
    r.index = sr.index;
    r.classified_index = sr.classified_index;
    r.dof = sr.dof;
    const SystemJacobian& j = sr.jacobian;
    r.det_j = j.det;
    r.det_rel_error = j.det == 0 ? INFINITY : std::abs(j.det - j.det_c * j.det_l * j.det_g) / std::abs(j.det);
  } catch (const std::exception& ex) {
    r.error = ex.what();
  }
  return r;
}

std::vector<PropertyRecord> run_batch_serial(const GenConfig& base, std::uint64_t first_seed, int count) {
  std::vector<PropertyRecord> out;
  out.reserve(static_cast<std::size_t>(count));
  GenConfig cfg = base;
  for (int k = 0; k < count; ++k) {
    cfg.seed = first_seed + static_cast<std::uint64_t>(k);
    out.push_back(check_properties(cfg));
  }
  return out;
}

std::vector<PropertyRecord> run_batch_parallel(const GenConfig& base, std::uint64_t first_seed, int count) {
  std::vector<PropertyRecord> out(static_cast<std::size_t>(count > 0 ? count : 0));
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < count; ++k) {
    GenConfig cfg = base;
    cfg.seed = first_seed + static_cast<std::uint64_t>(k);
    out[static_cast<std::size_t>(k)] = check_properties(cfg);
  }
  return out;
}

}  // namespace cph
