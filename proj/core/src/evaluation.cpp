#include "mfrc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mfrc/error.hpp"

namespace mfrc {

const char* to_string(Direction d) {
  switch (d) {
    case Direction::CCW: return "CCW";
    case Direction::CW: return "CW";
    case Direction::Undefined: return "Undefined";
  }
  return "?";
}

const char* to_string(FailureMode f) {
  switch (f) {
    case FailureMode::None: return "None";
    case FailureMode::OnlyA: return "OnlyA";
    case FailureMode::OnlyB: return "OnlyB";
    case FailureMode::Neither: return "Neither";
    case FailureMode::Diverged: return "Diverged";
  }
  return "?";
}

const char* to_string(AttractorKind k) {
  switch (k) {
    case AttractorKind::FixedPoint: return "FixedPoint";
    case AttractorKind::LimitCycle: return "LimitCycle";
    case AttractorKind::Torus: return "Torus";
    case AttractorKind::Chaotic: return "Chaotic";
    case AttractorKind::ReconstructedCircle: return "ReconstructedCircle";
  }
  return "?";
}

namespace {

long first_index(const PredictionTrajectory& traj, double transient_skip) {
  const long skip = std::max(0L, std::lround(transient_skip / traj.tau));
  if (traj.values.rows() == 0 || skip > traj.steps()) {
    throw Error(ErrorKind::Range, "no prediction samples remain after the transient skip");
  }
  return skip;
}

Eigen::Vector2d centroid(const PredictionTrajectory& traj, long first) {
  return traj.values.bottomRows(traj.values.rows() - first).colwise().mean().transpose();
}

}  // namespace

double roundness(const PredictionTrajectory& traj, const Eigen::Vector2d& center,
                 double transient_skip) {
  const long first = first_index(traj, transient_skip);
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (long k = first; k <= traj.steps(); ++k) {
    const double d = std::hypot(traj.values(k, 0) - center[0], traj.values(k, 1) - center[1]);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  return hi - lo;
}

double swept_angle(const PredictionTrajectory& traj, const Eigen::Vector2d& center,
                   double transient_skip) {
  const long first = first_index(traj, transient_skip);
  double total = 0.0;
  for (long k = first; k < traj.steps(); ++k) {
    const double ax = traj.values(k, 0) - center[0];
    const double ay = traj.values(k, 1) - center[1];
    const double bx = traj.values(k + 1, 0) - center[0];
    const double by = traj.values(k + 1, 1) - center[1];
    total += std::atan2(ax * by - ay * bx, ax * bx + ay * by);
  }
  return total;
}

Direction rotation_direction(const PredictionTrajectory& traj,
                             const Eigen::Vector2d& center, double transient_skip,
                             double threshold) {
  const double angle = swept_angle(traj, center, transient_skip);
  if (angle > threshold) return Direction::CCW;
  if (angle < -threshold) return Direction::CW;
  return Direction::Undefined;
}

OrbitCheck classify_orbit(const PredictionTrajectory& traj, const OrbitSpec& expected,
                          double transient_skip, const EvaluationOptions& opts) {
  const long first = first_index(traj, transient_skip);
  const Eigen::Vector2d center =
      opts.centroid_center ? centroid(traj, first) : expected.center();
  OrbitCheck check;
  check.roundness = roundness(traj, center, transient_skip);
  check.direction =
      rotation_direction(traj, center, transient_skip, opts.direction_threshold);
  const Direction want = expected.orientation() > 0 ? Direction::CCW : Direction::CW;
  check.passed = check.roundness < opts.roundness_threshold && check.direction == want;
  return check;
}

OrbitCheck classify_orbit(const PredictionTrajectory& traj, const OrbitSpec& expected,
                          const EvaluationOptions& opts) {
  return classify_orbit(traj, expected, opts.transient_skip, opts);
}

MfVerdict combine(const OrbitCheck& a, const OrbitCheck& b, bool diverged) {
  MfVerdict v;
  v.check_a = a;
  v.check_b = b;
  if (diverged) {
    v.check_a.passed = false;
    v.check_b.passed = false;
    v.multifunctional = false;
    v.failure_mode = FailureMode::Diverged;
    return v;
  }
  v.multifunctional = a.passed && b.passed;
  if (v.multifunctional) {
    v.failure_mode = FailureMode::None;
  } else if (a.passed) {
    v.failure_mode = FailureMode::OnlyA;
  } else if (b.passed) {
    v.failure_mode = FailureMode::OnlyB;
  } else {
    v.failure_mode = FailureMode::Neither;
  }
  return v;
}

MfVerdict evaluate_multifunctionality(const TrainedReservoir& trained,
                                      const OrbitSpec& orbit_a,
                                      const OrbitSpec& orbit_b, double t_end,
                                      const EvaluationOptions& opts) {
  auto check = [&](const OrbitSpec& orbit, bool& diverged) {
    const auto run = run_prediction(trained, trained.seed(orbit.label).state, t_end);
    if (run.prediction.diverged) {
      diverged = true;
      return OrbitCheck{std::numeric_limits<double>::infinity(), Direction::Undefined,
                        false};
    }
    return classify_orbit(run.prediction, orbit, opts);
  };
  bool diverged = false;
  const OrbitCheck a = check(orbit_a, diverged);
  const OrbitCheck b = check(orbit_b, diverged);
  return combine(a, b, diverged);
}

// ---------------------------------------------------------------------------
// Local maxima

MaximaCounter::MaximaCounter(Eigen::Index n, double value_tolerance)
    : tolerance_(value_tolerance),
      last_(static_cast<std::size_t>(n), 0.0),
      rising_(static_cast<std::size_t>(n), 0),
      seen_(static_cast<std::size_t>(n)) {
  if (!(value_tolerance > 0.0)) {
    throw Error(ErrorKind::Precondition, "maxima tolerance must be > 0");
  }
}

void MaximaCounter::push(const Eigen::Ref<const Eigen::VectorXd>& state) {
  const std::size_t n = last_.size();
  if (static_cast<std::size_t>(state.size()) != n) {
    throw Error(ErrorKind::Shape, "MaximaCounter: state length mismatch");
  }
  if (!started_) {
    for (std::size_t i = 0; i < n; ++i) last_[i] = state[i];
    started_ = true;
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double v = state[static_cast<Eigen::Index>(i)];
    if (v == last_[i]) continue;  // plateau: wait for the next change
    if (v < last_[i]) {
      if (rising_[i]) seen_[i].insert(std::llround(last_[i] / tolerance_));
      rising_[i] = 0;
    } else {
      rising_[i] = 1;
    }
    last_[i] = v;
  }
}

std::vector<int> MaximaCounter::counts() const {
  std::vector<int> out(seen_.size());
  for (std::size_t i = 0; i < seen_.size(); ++i) {
    out[i] = static_cast<int>(seen_[i].size());
  }
  return out;
}

std::vector<int> unique_local_maxima_counts(const ReservoirTrajectory& traj,
                                            double value_tolerance) {
  MaximaCounter counter(traj.states.cols(), value_tolerance);
  for (Eigen::Index k = 0; k < traj.states.rows(); ++k) {
    counter.push(traj.states.row(k).transpose());
  }
  return counter.counts();
}

// ---------------------------------------------------------------------------
// Attractor labels

std::vector<double> section_crossings(const PredictionTrajectory& traj,
                                      double section_x, double transient_skip) {
  const long first = first_index(traj, transient_skip);
  std::vector<double> ys;
  for (long k = first; k < traj.steps(); ++k) {
    const double x0 = traj.values(k, 0);
    const double x1 = traj.values(k + 1, 0);
    if (x0 < section_x && x1 >= section_x) {
      const double s = (section_x - x0) / (x1 - x0);
      ys.push_back(traj.values(k, 1) + s * (traj.values(k + 1, 1) - traj.values(k, 1)));
    }
  }
  return ys;
}

std::vector<double> cluster_values(std::vector<double> values, double tolerance) {
  std::sort(values.begin(), values.end());
  std::vector<double> centres;
  std::size_t start = 0;
  for (std::size_t i = 1; i <= values.size(); ++i) {
    if (i == values.size() || values[i] - values[start] > tolerance) {
      double sum = 0.0;
      for (std::size_t j = start; j < i; ++j) sum += values[j];
      if (i > start) centres.push_back(sum / static_cast<double>(i - start));
      start = i;
    }
  }
  return centres;
}

double box_counting_slope(const std::vector<double>& crossings, int coarse_boxes,
                          int fine_boxes) {
  if (crossings.size() < 3 || coarse_boxes < 1 || fine_boxes <= coarse_boxes) {
    return 0.0;
  }
  const auto [lo_it, hi_it] = std::minmax_element(crossings.begin(), crossings.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;
  if (span <= 0.0) return 0.0;
  auto occupied = [&](int boxes) {
    std::set<std::pair<int, int>> cells;
    for (std::size_t k = 0; k + 1 < crossings.size(); ++k) {
      const auto cell = [&](double v) {
        return std::min(boxes - 1, static_cast<int>((v - lo) / span * boxes));
      };
      cells.emplace(cell(crossings[k]), cell(crossings[k + 1]));
    }
    return static_cast<double>(cells.size());
  };
  return std::log(occupied(fine_boxes) / occupied(coarse_boxes)) /
         std::log(static_cast<double>(fine_boxes) / coarse_boxes);
}

AttractorLabel classify_attractor(const PredictionTrajectory& pred,
                                  const OrbitSpec& orbit_a, const OrbitSpec& orbit_b,
                                  double transient_skip, const ClassifierOptions& opts) {
  const long first = first_index(pred, transient_skip);
  const double window = static_cast<double>(pred.steps() - first) * pred.tau;
  if (window < opts.min_window_periods * kOrbitPeriod * (1.0 - 1e-9)) {
    throw Error(ErrorKind::Range, "classification window shorter than " +
                                      std::to_string(opts.min_window_periods) +
                                      " periods");
  }

  AttractorLabel label;
  auto& s = label.summary;
  const auto tail = pred.values.bottomRows(pred.values.rows() - first);
  s.mean = tail.colwise().mean().transpose();
  s.diameter = (tail.colwise().maxCoeff() - tail.colwise().minCoeff()).norm();
  s.roundness = roundness(pred, orbit_a.center(), transient_skip);
  s.direction = rotation_direction(pred, orbit_a.center(), transient_skip,
                                   opts.orbit.direction_threshold);

  if (s.diameter < opts.fixed_point_diameter) {
    label.kind = AttractorKind::FixedPoint;
    return label;
  }

  const OrbitCheck ca = classify_orbit(pred, orbit_a, transient_skip, opts.orbit);
  const OrbitCheck cb = classify_orbit(pred, orbit_b, transient_skip, opts.orbit);

  s.section_x = orbit_a.x_cen;
  auto crossings = section_crossings(pred, s.section_x, transient_skip);
  if (crossings.size() < 2) {
    // Orbits that never reach the central section are cut through their own mean.
    s.section_x = s.mean[0];
    crossings = section_crossings(pred, s.section_x, transient_skip);
  }
  s.crossings = static_cast<int>(crossings.size());
  s.section_points = cluster_values(crossings, opts.cluster_tolerance);
  s.clusters = static_cast<int>(s.section_points.size());

  if (ca.passed || cb.passed) {
    label.kind = AttractorKind::ReconstructedCircle;
    label.circle = ca.passed ? orbit_a.label : orbit_b.label;
    return label;
  }

  if (s.clusters >= 1 && s.clusters <= opts.max_limit_cycle_clusters &&
      s.crossings >= 2 * s.clusters) {
    label.kind = AttractorKind::LimitCycle;
    return label;
  }
  if (s.crossings < 2) {
    // Neither settled nor recurrent through any section: treat as a slow
    // drift, which at this resolution is indistinguishable from a fixed point.
    label.kind = AttractorKind::FixedPoint;
    return label;
  }
  s.box_slope = box_counting_slope(crossings, opts.coarse_boxes, opts.fine_boxes);
  label.kind = s.box_slope > opts.chaos_slope ? AttractorKind::Chaotic
                                              : AttractorKind::Torus;
  return label;
}

}  // namespace mfrc
