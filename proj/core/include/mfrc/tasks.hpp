#pragma once

// The "seeing double" drive signals: two circles traversed in opposite
// directions, u(t) = (s_x cos t + x_cen, s_y sin t + y_cen).

#include <Eigen/Dense>

#include <iosfwd>
#include <numbers>
#include <string>

namespace mfrc {

inline constexpr double kOrbitPeriod = 2.0 * std::numbers::pi;

enum class OrbitLabel { A, B };

const char* to_string(OrbitLabel label);

struct OrbitSpec {
  double s_x = 0.0;
  double s_y = 0.0;
  double x_cen = 0.0;
  double y_cen = 0.0;
  OrbitLabel label = OrbitLabel::A;
  double phase = 0.0;

  // +1 for counter-clockwise traversal, -1 for clockwise.
  int orientation() const { return (s_x * s_y > 0.0) ? 1 : -1; }
  Eigen::Vector2d center() const { return {x_cen, y_cen}; }
  Eigen::Vector2d at(double t) const {
    return {s_x * std::cos(t + phase) + x_cen, s_y * std::sin(t + phase) + y_cen};
  }
};

// Label A gives (s, s), counter-clockwise; label B gives (-s, s), clockwise.
OrbitSpec make_orbit(OrbitLabel label, double s, double x_cen = 0.0,
                     double y_cen = 0.0);

// Grid time of step k. Every module derives sample times through this so that
// stored samples and on-the-fly evaluations agree bit for bit.
inline double grid_time(double t0, long k, double tau) {
  return t0 + static_cast<double>(k) * tau;
}

// Number of steps of size tau between t0 and t_end (rounded).
long step_count(double t0, double t_end, double tau);

class DriveSignal {
 public:
  DriveSignal(OrbitSpec spec, double t0, double t_end, double tau);

  const OrbitSpec& spec() const { return spec_; }
  double t0() const { return t0_; }
  double tau() const { return tau_; }
  long steps() const { return static_cast<long>(samples_.rows()) - 1; }
  double t_end() const { return grid_time(t0_, steps(), tau_); }

  // Continuous evaluator used for RK4 half steps.
  Eigen::Vector2d operator()(double t) const { return spec_.at(t); }

  const Eigen::Matrix<double, Eigen::Dynamic, 2>& samples() const {
    return samples_;
  }
  Eigen::Vector2d sample(long k) const { return samples_.row(k).transpose(); }

 private:
  OrbitSpec spec_;
  double t0_;
  double tau_;
  Eigen::Matrix<double, Eigen::Dynamic, 2> samples_;
};

DriveSignal sample_signal(const OrbitSpec& spec, double t0, double t_end,
                          double tau);

// t,x,y at 17 significant digits.
void write_signal(std::ostream& out, const DriveSignal& signal);

}  // namespace mfrc
