#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cph/circgen.hpp"

namespace cph {

// Outcome of the structural property checks on one generated circuit.
struct PropertyRecord {
  std::uint64_t seed = 0;
  int nodes = 0, edges = 0;
  bool analysed = false;          // pipeline ran without throwing
  bool sa_amenable = false;       // HVT found, offsets valid, J nonsingular
  bool offsets_closed_form = false;
  int index = -1, classified_index = -1, dof = -1;
  double det_j = 0;
  double det_rel_error = 0;  // |det J - det J_C det J_L det J_G| / |det J|
  std::string error;

  bool operator==(const PropertyRecord&) const = default;
};

PropertyRecord check_properties(const GenConfig& cfg);

// Seeds first_seed .. first_seed + count - 1, all other fields from `base`.
// The serial version is the reference for the OpenMP one; results are
// identical and in seed order.
std::vector<PropertyRecord> run_batch_serial(const GenConfig& base, std::uint64_t first_seed, int count);
std::vector<PropertyRecord> run_batch_parallel(const GenConfig& base, std::uint64_t first_seed, int count);

}  // namespace cph
