#pragma once

#include <array>
#include <cstdint>

#include "cph/coupling.hpp"
#include "cph/netlist.hpp"

namespace cph {

struct GenConfig {
  int min_nodes = 3, max_nodes = 6;
  int min_edges = 4, max_edges = 12;
  // Relative weights for C, L, R, V, I.
  std::array<double, 5> kind_weights{3, 3, 3, 1, 1};
  double min_value = 0.2, max_value = 2.0;
  // Probability of adding a coupled 2x2 block to each of C, L and G when
  // at least two elements of that kind exist.
  double coupling_probability = 0.0;
  std::uint64_t seed = 0;
};

struct GeneratedCircuit {
  Circuit circuit;
  CouplingBlocks coupling;
};

// Random connected circuit satisfying A1 and A2: random spanning tree, then
// chords, then kinds, then repair passes turning V edges that close a
// V-only loop and I edges across an I-only cutset into C, L or R. Values are
// uniform in [min_value, max_value], sources drawn from a small waveform
// gallery. Deterministic in `cfg`. Throws Error on an invalid config.
GeneratedCircuit generate_circuit(const GenConfig& cfg);

}  // namespace cph
