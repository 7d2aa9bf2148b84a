#pragma once

// Fixed-step RK4 integration of the listening (driven) and predicting
// (closed-loop) reservoirs:
//
//   listening:   r' = γ [-r + tanh(M r + σ W_in u(t))]
//   predicting:  r' = γ [-r + tanh(M r + σ W_in W_out q(r))]

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>

#include "mfrc/params.hpp"
#include "mfrc/tasks.hpp"
#include "mfrc/topology.hpp"
#include "mfrc/trained.hpp"

namespace mfrc {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ReservoirTrajectory {
  double t0 = 0.0;
  double tau = 0.01;
  RowMatrix states;  // one row per grid time

  long steps() const { return static_cast<long>(states.rows()) - 1; }
  double time(long k) const { return grid_time(t0, k, tau); }
};

struct PredictionTrajectory {
  double t0 = 0.0;
  double tau = 0.01;
  Eigen::Matrix<double, Eigen::Dynamic, 2> values;
  bool diverged = false;

  long steps() const { return static_cast<long>(values.rows()) - 1; }
  double time(long k) const { return grid_time(t0, k, tau); }
};

// dr = f(t, r). Must not alias dr with r.
using VectorField =
    std::function<void(double t, const Eigen::VectorXd& r, Eigen::VectorXd& dr)>;

// Classical four-stage RK4 with reusable stage buffers. Throws DivergenceError
// naming the stage that first produced a non-finite value.
class Rk4 {
 public:
  explicit Rk4(int dim);

  template <class Field>
  void step(Field&& f, double t, double tau, Eigen::VectorXd& state) {
    f(t, state, k1_);
    check(k1_, 1);
    tmp_ = state + (0.5 * tau) * k1_;
    f(t + 0.5 * tau, tmp_, k2_);
    check(k2_, 2);
    tmp_ = state + (0.5 * tau) * k2_;
    f(t + 0.5 * tau, tmp_, k3_);
    check(k3_, 3);
    tmp_ = state + tau * k3_;
    f(t + tau, tmp_, k4_);
    check(k4_, 4);
    state += (tau / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
  }

 private:
  static void check(const Eigen::VectorXd& k, int stage);

  Eigen::VectorXd k1_, k2_, k3_, k4_, tmp_;
};

Eigen::VectorXd rk4_step(const VectorField& f, double t,
                         const Eigen::VectorXd& state, double tau);

// Observer for streaming integrations: (step index, time, state).
using StateObserver =
    std::function<void(long k, double t, const Eigen::VectorXd& r)>;

// Integrates the listening reservoir from r(0) = 0 over [0, t_end] on the
// params.tau grid, calling `observe` for every grid point including t = 0.
// Returns the final state.
Eigen::VectorXd integrate_listening(const AdjacencyMatrix& m,
                                    const InputMatrix& w_in,
                                    const ReservoirParams& params,
                                    const DriveSignal& u, double t_end,
                                    const StateObserver& observe);

// Full listening trajectory over [0, t_train].
ReservoirTrajectory drive_listening(const AdjacencyMatrix& m,
                                    const InputMatrix& w_in,
                                    const ReservoirParams& params,
                                    const DriveSignal& u);

struct PredictionOptions {
  bool record_reservoir = false;
  // Called with each reservoir state on the prediction grid.
  StateObserver observe_reservoir;
};

struct PredictionResult {
  PredictionTrajectory prediction;
  ReservoirTrajectory reservoir;  // empty unless record_reservoir
  Eigen::VectorXd final_state;
};

// Closed-loop prediction from r0 over [t0, t_end]. A non-finite readout or
// state stops the run early with prediction.diverged set; the trajectories are
// truncated at the last finite grid point.
PredictionResult run_prediction(const AdjacencyMatrix& m, const InputMatrix& w_in,
                                const ReadoutMatrix& w_out,
                                const ReservoirParams& params,
                                const Eigen::VectorXd& r0, double t0,
                                double t_end, const PredictionOptions& opts = {});

// Convenience form: prediction over [params.t_train, t_end].
PredictionResult run_prediction(const TrainedReservoir& trained,
                                const Eigen::VectorXd& r0, double t_end,
                                const PredictionOptions& opts = {});

// û = W_out q(r)
Eigen::VectorXd readout(const ReadoutMatrix& w_out, const Eigen::VectorXd& r);

void write_prediction(std::ostream& out, const PredictionTrajectory& traj);
void write_reservoir(std::ostream& out, const ReservoirTrajectory& traj);

}  // namespace mfrc
