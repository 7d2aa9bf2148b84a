#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "mfrc/params.hpp"
#include "mfrc/topology.hpp"

namespace mfrc {

// d × 2n readout acting on q(r) = (r, r²).
using ReadoutMatrix = Eigen::MatrixXd;

struct SeedState {
  OrbitLabel label;
  Eigen::VectorXd state;
};

struct TrainedReservoir {
  AdjacencyMatrix m;
  InputMatrix w_in;
  ReadoutMatrix w_out;
  ReservoirParams params;
  std::vector<SeedState> seed_states;

  const SeedState& seed(OrbitLabel label) const;
};

}  // namespace mfrc
