#include "mfrc/tasks.hpp"

#include <cmath>
#include <ostream>

#include "mfrc/error.hpp"
#include "mfrc/text.hpp"

namespace mfrc {

const char* to_string(OrbitLabel label) {
  return label == OrbitLabel::A ? "A" : "B";
}

OrbitSpec make_orbit(OrbitLabel label, double s, double x_cen, double y_cen) {
  if (!(s > 0.0)) throw Error(ErrorKind::Precondition, "orbit radius must be > 0");
  OrbitSpec spec;
  spec.s_x = (label == OrbitLabel::A) ? s : -s;
  spec.s_y = s;
  spec.x_cen = x_cen;
  spec.y_cen = y_cen;
  spec.label = label;
  return spec;
}

long step_count(double t0, double t_end, double tau) {
  return std::lround((t_end - t0) / tau);
}

DriveSignal::DriveSignal(OrbitSpec spec, double t0, double t_end, double tau)
    : spec_(spec), t0_(t0), tau_(tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::Precondition, "signal step must be > 0");
  if (!(t_end > t0)) throw Error(ErrorKind::Precondition, "signal needs t_end > t0");
  const long steps = step_count(t0, t_end, tau);
  samples_.resize(steps + 1, 2);
  for (long k = 0; k <= steps; ++k) {
    samples_.row(k) = spec_.at(grid_time(t0, k, tau)).transpose();
  }
}

DriveSignal sample_signal(const OrbitSpec& spec, double t0, double t_end,
                          double tau) {
  return DriveSignal(spec, t0, t_end, tau);
}

void write_signal(std::ostream& out, const DriveSignal& signal) {
  out << "t,x,y\n";
  for (long k = 0; k <= signal.steps(); ++k) {
    out << format_full(grid_time(signal.t0(), k, signal.tau())) << ','
        << format_full(signal.samples()(k, 0)) << ','
        << format_full(signal.samples()(k, 1)) << '\n';
  }
}

}  // namespace mfrc
