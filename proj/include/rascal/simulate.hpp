// Rating-scale data generator: ships no licensed response data, yet supports
// end-to-end runs at realistic scale.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rascal/matrix.hpp"

namespace rascal {

struct SimulateSpec {
  int n_persons = 100;
  std::vector<double> deltas;         // item difficulties
  std::vector<double> tau;            // m thresholds; {0} gives dichotomous
  double beta_mean = 0.0;
  double beta_sd = 1.0;
  uint64_t seed = 1;
  int min_category = 1;               // external code floor
  std::vector<std::string> item_ids;       // default Q1..QL
  std::vector<std::string> reverse_items;  // ids emitted with reversed coding
};

// Raw-coded matrix with keys attached (not yet scored). All abilities are
// drawn first, then cells row-major, so the stream layout is part of the
// reproducibility contract. Pass true_beta to capture the generating
// abilities.
ResponseMatrix simulate_matrix(const SimulateSpec& spec, std::vector<double>* true_beta = nullptr);

// person_id,<item_id>,... rows of raw codes; missing cells stay blank.
std::string response_csv(const ResponseMatrix& raw);

// item_id,direction,min,max with direction F or R.
std::string keys_csv(const std::vector<ScoringKey>& keys);

}  // namespace rascal
