#pragma once

#include "mfrc/tasks.hpp"

namespace mfrc {

// Scalar hyperparameters of one reservoir. Window times are stored as step
// indices on the tau grid; the *_time() accessors reconstruct them.
struct ReservoirParams {
  int n = 500;
  int d = 2;
  double gamma = 5.0;
  double sigma = 0.2;
  double rho = 1.4;
  double beta = 0.01;
  double tau = 0.01;
  double t_listen = 6.0 * kOrbitPeriod;
  double t_train = 15.0 * kOrbitPeriod;
  double t_predict_end = 27.0 * kOrbitPeriod;

  long listen_step() const { return step_count(0.0, t_listen, tau); }
  long train_step() const { return step_count(0.0, t_train, tau); }
  long predict_end_step() const { return step_count(0.0, t_predict_end, tau); }
};

// Checks the invariants and snaps window times onto the tau grid. Throws
// ConfigError naming the first offending field.
ReservoirParams validated(ReservoirParams p);

}  // namespace mfrc
