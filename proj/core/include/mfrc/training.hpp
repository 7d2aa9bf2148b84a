#pragma once

// Readout training: harvest q(r) = (r, r²) over the training window, blend the
// runs for both attractors, and solve the ridge regression
//
//   W_out = Y Xᵀ (X Xᵀ + β I)⁻¹
//
// through a Cholesky factorisation of the regularised Gram matrix.

#include <Eigen/Dense>

#include <string>

#include "mfrc/dynamics.hpp"
#include "mfrc/params.hpp"
#include "mfrc/tasks.hpp"
#include "mfrc/topology.hpp"
#include "mfrc/trained.hpp"

namespace mfrc {

Eigen::VectorXd apply_q(const Eigen::VectorXd& r);

struct HarvestWindow {
  double t_listen = 0.0;
  double t_train = 0.0;
};

// 2n × K; column k is q(r(t_listen + k τ)).
struct FeatureMatrix {
  Eigen::MatrixXd columns;
  HarvestWindow window;

  Eigen::Index n() const { return columns.rows() / 2; }
  Eigen::Index size() const { return columns.cols(); }
};

// d × K targets u(t) on the same grid as the paired FeatureMatrix.
struct TargetMatrix {
  Eigen::MatrixXd columns;

  Eigen::Index size() const { return columns.cols(); }
};

struct Harvest {
  FeatureMatrix x;
  TargetMatrix y;
};

Harvest harvest(const ReservoirTrajectory& traj, const DriveSignal& signal,
                const HarvestWindow& window);
Harvest harvest(const ReservoirTrajectory& traj, const DriveSignal& signal,
                const ReservoirParams& params);

// Runs the listening reservoir and harvests directly, without materialising
// the full trajectory. The final state r(t_train) is written to final_state.
Harvest harvest_listening(const AdjacencyMatrix& m, const InputMatrix& w_in,
                          const ReservoirParams& params, const DriveSignal& u,
                          Eigen::VectorXd& final_state);

// Column-wise concatenation [x1 | x2], [y1 | y2].
Harvest blend(const FeatureMatrix& x1, const FeatureMatrix& x2,
              const TargetMatrix& y1, const TargetMatrix& y2);

// Sufficient statistics of the regression: X Xᵀ and Y Xᵀ.
struct NormalEquations {
  Eigen::MatrixXd gram;
  Eigen::MatrixXd cross;

  NormalEquations& operator+=(const NormalEquations& other);
};

NormalEquations normal_equations(const FeatureMatrix& x, const TargetMatrix& y);

struct RidgeDiagnostics {
  double relative_residual = 0.0;
  bool used_fallback = false;
};

inline constexpr double kRidgeResidualTolerance = 1e-8;

// Throws Error(Singular) when beta == 0 and X Xᵀ is rank deficient.
ReadoutMatrix solve_ridge(const NormalEquations& eq, double beta,
                          RidgeDiagnostics* diag = nullptr);

ReadoutMatrix ridge_regression(const FeatureMatrix& x, const TargetMatrix& y,
                               double beta, RidgeDiagnostics* diag = nullptr);

// Listens to u1 and u2 from r(0) = 0, blends the two harvests and solves for
// W_out. Seed states are r1(t_train) (label of u1) and r2(t_train).
TrainedReservoir train_multifunctional(const AdjacencyMatrix& m,
                                       const InputMatrix& w_in,
                                       const ReservoirParams& params,
                                       const DriveSignal& u1,
                                       const DriveSignal& u2);

// <prefix>.meta.json, <prefix>.wout.csv, <prefix>.seeds.csv, <prefix>.m.csv,
// <prefix>.m.json and <prefix>.win.csv.
void save_trained(const TrainedReservoir& trained, const std::string& prefix);
TrainedReservoir load_trained(const std::string& prefix);

}  // namespace mfrc
