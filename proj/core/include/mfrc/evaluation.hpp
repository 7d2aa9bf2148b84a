#pragma once

// Classification of closed-loop predictions: roundness and rotation checks
// against the training orbits, multifunctionality verdicts, per-neuron local
// maxima statistics and coarse attractor labels.

#include <Eigen/Dense>

#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mfrc/dynamics.hpp"
#include "mfrc/tasks.hpp"
#include "mfrc/trained.hpp"

namespace mfrc {

enum class Direction { CCW, CW, Undefined };
enum class FailureMode { None, OnlyA, OnlyB, Neither, Diverged };
enum class AttractorKind { FixedPoint, LimitCycle, Torus, Chaotic, ReconstructedCircle };

const char* to_string(Direction d);
const char* to_string(FailureMode f);
const char* to_string(AttractorKind k);

struct OrbitCheck {
  double roundness = 0.0;
  Direction direction = Direction::Undefined;
  bool passed = false;
};

struct MfVerdict {
  OrbitCheck check_a;
  OrbitCheck check_b;
  bool multifunctional = false;
  FailureMode failure_mode = FailureMode::Neither;
};

struct EvaluationOptions {
  double roundness_threshold = 0.25;
  double transient_skip = 2.0 * kOrbitPeriod;
  // Net swept angle separating CCW/CW from Undefined.
  double direction_threshold = std::numbers::pi;
  // Measure roundness about the trajectory centroid instead of the orbit
  // centre (exploratory runs only).
  bool centroid_center = false;
};

double roundness(const PredictionTrajectory& traj, const Eigen::Vector2d& center,
                 double transient_skip);

Direction rotation_direction(const PredictionTrajectory& traj,
                             const Eigen::Vector2d& center, double transient_skip,
                             double threshold = std::numbers::pi);

// Net signed angle swept about `center` after the transient.
double swept_angle(const PredictionTrajectory& traj, const Eigen::Vector2d& center,
                   double transient_skip);

OrbitCheck classify_orbit(const PredictionTrajectory& traj, const OrbitSpec& expected,
                          double transient_skip, const EvaluationOptions& opts = {});
OrbitCheck classify_orbit(const PredictionTrajectory& traj, const OrbitSpec& expected,
                          const EvaluationOptions& opts = {});

MfVerdict combine(const OrbitCheck& a, const OrbitCheck& b, bool diverged);

// Predicts from the A and B seed states over [t_train, t_end] and classifies
// each run against its own orbit.
MfVerdict evaluate_multifunctionality(const TrainedReservoir& trained,
                                      const OrbitSpec& orbit_a,
                                      const OrbitSpec& orbit_b, double t_end,
                                      const EvaluationOptions& opts = {});

// Streaming per-neuron count of distinct local-maximum values. A plateau
// bounded by lower values on both sides counts as one maximum; values are
// quantised to multiples of `value_tolerance` before counting.
class MaximaCounter {
 public:
  MaximaCounter(Eigen::Index n, double value_tolerance = 1e-3);

  void push(const Eigen::Ref<const Eigen::VectorXd>& state);
  std::vector<int> counts() const;

 private:
  double tolerance_;
  std::vector<double> last_;
  std::vector<char> rising_;
  std::vector<std::unordered_set<long long>> seen_;
  bool started_ = false;
};

std::vector<int> unique_local_maxima_counts(const ReservoirTrajectory& traj,
                                            double value_tolerance = 1e-3);

struct ClassifierOptions {
  double fixed_point_diameter = 1e-3;
  double cluster_tolerance = 1e-2;
  int max_limit_cycle_clusters = 12;
  // Box-counting grid sizes (boxes per side) for the return-map slope.
  int coarse_boxes = 4;
  int fine_boxes = 16;
  double chaos_slope = 1.2;
  double min_window_periods = 10.0;
  EvaluationOptions orbit;
};

struct AttractorSummary {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  double roundness = 0.0;
  Direction direction = Direction::Undefined;
  int crossings = 0;
  int clusters = 0;
  double box_slope = 0.0;
  double diameter = 0.0;
  double section_x = 0.0;
  // Sorted cluster centres of the section crossings (y values).
  std::vector<double> section_points;
};

struct AttractorLabel {
  AttractorKind kind = AttractorKind::FixedPoint;
  AttractorSummary summary;
  // For ReconstructedCircle: the orbit it reproduces.
  OrbitLabel circle = OrbitLabel::A;
};

// Poincaré section {x = section_x, ẋ > 0}: y at each upward crossing, linearly
// interpolated between grid points.
std::vector<double> section_crossings(const PredictionTrajectory& traj,
                                      double section_x, double transient_skip);

// Greedy clustering of the sorted values into groups of diameter at most
// `tolerance`; returns the cluster means.
std::vector<double> cluster_values(std::vector<double> values, double tolerance);

// Slope of log N(ε) between the two grid sizes for the return map
// (y_k, y_{k+1}) of the section crossings.
double box_counting_slope(const std::vector<double>& crossings, int coarse_boxes,
                          int fine_boxes);

AttractorLabel classify_attractor(const PredictionTrajectory& pred,
                                  const OrbitSpec& orbit_a, const OrbitSpec& orbit_b,
                                  double transient_skip,
                                  const ClassifierOptions& opts = {});

}  // namespace mfrc
