#include "mfrc/dynamics.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "mfrc/error.hpp"
#include "mfrc/text.hpp"

namespace mfrc {

Rk4::Rk4(int dim)
    : k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

void Rk4::check(const Eigen::VectorXd& k, int stage) {
  if (!k.allFinite()) {
    throw DivergenceError("non-finite value in RK4 stage " + std::to_string(stage),
                          stage);
  }
}

Eigen::VectorXd rk4_step(const VectorField& f, double t,
                         const Eigen::VectorXd& state, double tau) {
  if (!(tau > 0.0)) throw Error(ErrorKind::Precondition, "rk4_step: tau must be > 0");
  Rk4 rk(static_cast<int>(state.size()));
  Eigen::VectorXd next = state;
  rk.step(f, t, tau, next);
  return next;
}

namespace {

// dr_i = γ (tanh(Σ_j M_ij r_j + σ W_in,i · u) - r_i), one pass over the CSR rows.
inline void reservoir_field(const SparseMatrix& m, const InputMatrix& w_in,
                            const double* u, double gamma, double sigma,
                            const Eigen::VectorXd& r, Eigen::VectorXd& dr) {
  const int n = static_cast<int>(m.rows());
  const int* outer = m.outerIndexPtr();
  const int* inner = m.innerIndexPtr();
  const double* val = m.valuePtr();
  const double* x = r.data();
  double* out = dr.data();
  for (int i = 0; i < n; ++i) {
    double s0 = 0.0;
    double s1 = 0.0;
    const int end = outer[i + 1];
    int j = outer[i];
    for (; j + 1 < end; j += 2) {
      s0 += val[j] * x[inner[j]];
      s1 += val[j + 1] * x[inner[j + 1]];
    }
    if (j < end) s0 += val[j] * x[inner[j]];
    const double pre = (s0 + s1) + sigma * w_in.value(i) * u[w_in.column(i)];
    out[i] = gamma * (std::tanh(pre) - x[i]);
  }
}

struct ListeningField {
  const SparseMatrix& m;
  const InputMatrix& w_in;
  const OrbitSpec& signal;
  double gamma;
  double sigma;

  void operator()(double t, const Eigen::VectorXd& r, Eigen::VectorXd& dr) {
    const Eigen::Vector2d u = signal.at(t);
    reservoir_field(m, w_in, u.data(), gamma, sigma, r, dr);
  }
};

struct PredictingField {
  const SparseMatrix& m;
  const InputMatrix& w_in;
  const Eigen::MatrixXd& w_lin;  // d × n block of W_out acting on r
  const Eigen::MatrixXd& w_sq;   // d × n block acting on r²
  double gamma;
  double sigma;
  Eigen::VectorXd u;
  Eigen::VectorXd sq;

  void operator()(double, const Eigen::VectorXd& r, Eigen::VectorXd& dr) {
    sq = r.cwiseAbs2();
    u.noalias() = w_lin * r;
    u.noalias() += w_sq * sq;
    if (!u.allFinite()) throw DivergenceError("non-finite closed-loop readout", 0);
    reservoir_field(m, w_in, u.data(), gamma, sigma, r, dr);
  }
};

void check_dims(const AdjacencyMatrix& m, const InputMatrix& w_in) {
  if (m.n() != w_in.n()) {
    throw Error(ErrorKind::Shape, "M is " + std::to_string(m.n()) +
                                      " nodes but W_in has " +
                                      std::to_string(w_in.n()) + " rows");
  }
}

}  // namespace

Eigen::VectorXd integrate_listening(const AdjacencyMatrix& m,
                                    const InputMatrix& w_in,
                                    const ReservoirParams& params,
                                    const DriveSignal& u, double t_end,
                                    const StateObserver& observe) {
  check_dims(m, w_in);
  if (w_in.d() != 2) throw Error(ErrorKind::Shape, "seeing-double input is 2-D");
  const long steps = step_count(0.0, t_end, params.tau);
  if (u.t0() != 0.0 || std::abs(u.tau() - params.tau) > 1e-15 * params.tau ||
      u.steps() < steps) {
    throw Error(ErrorKind::Alignment,
                "drive signal grid does not cover [0, " + std::to_string(t_end) +
                    "] at tau=" + std::to_string(params.tau));
  }

  const int n = m.n();
  ListeningField field{m.entries(), w_in, u.spec(), params.gamma, params.sigma};
  Rk4 rk(n);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  if (observe) observe(0, 0.0, r);
  for (long k = 0; k < steps; ++k) {
    rk.step(field, grid_time(0.0, k, params.tau), params.tau, r);
    if (observe) observe(k + 1, grid_time(0.0, k + 1, params.tau), r);
  }
  return r;
}

ReservoirTrajectory drive_listening(const AdjacencyMatrix& m,
                                    const InputMatrix& w_in,
                                    const ReservoirParams& params,
                                    const DriveSignal& u) {
  ReservoirTrajectory traj;
  traj.t0 = 0.0;
  traj.tau = params.tau;
  const long steps = params.train_step();
  traj.states.resize(steps + 1, m.n());
  integrate_listening(m, w_in, params, u, params.t_train,
                      [&](long k, double, const Eigen::VectorXd& r) {
                        traj.states.row(k) = r.transpose();
                      });
  return traj;
}

Eigen::VectorXd readout(const ReadoutMatrix& w_out, const Eigen::VectorXd& r) {
  const Eigen::Index n = r.size();
  if (w_out.cols() != 2 * n) {
    throw Error(ErrorKind::Shape, "W_out must have 2n columns");
  }
  return w_out.leftCols(n) * r + w_out.rightCols(n) * r.cwiseAbs2();
}

PredictionResult run_prediction(const AdjacencyMatrix& m, const InputMatrix& w_in,
                                const ReadoutMatrix& w_out,
                                const ReservoirParams& params,
                                const Eigen::VectorXd& r0, double t0,
                                double t_end, const PredictionOptions& opts) {
  check_dims(m, w_in);
  const int n = m.n();
  if (r0.size() != n) throw Error(ErrorKind::Shape, "r0 must have length n");
  if (w_out.rows() != 2 || w_out.cols() != 2 * n || w_in.d() != 2) {
    throw Error(ErrorKind::Shape, "W_out must be 2 × 2n for a 2-D prediction");
  }
  if (!(t_end > t0)) throw Error(ErrorKind::Precondition, "prediction needs t_end > t0");

  const long steps = step_count(t0, t_end, params.tau);
  const Eigen::MatrixXd w_lin = w_out.leftCols(n);
  const Eigen::MatrixXd w_sq = w_out.rightCols(n);
  PredictingField field{m.entries(), w_in, w_lin, w_sq, params.gamma, params.sigma,
                        Eigen::VectorXd(2), Eigen::VectorXd(n)};

  PredictionResult result;
  auto& pred = result.prediction;
  pred.t0 = t0;
  pred.tau = params.tau;
  pred.values.resize(steps + 1, 2);
  result.reservoir.t0 = t0;
  result.reservoir.tau = params.tau;
  if (opts.record_reservoir) result.reservoir.states.resize(steps + 1, n);

  Eigen::VectorXd r = r0;
  long last = -1;
  auto emit = [&](long k) -> bool {
    Eigen::Vector2d u = w_lin * r + w_sq * r.cwiseAbs2();
    if (!u.allFinite() || !r.allFinite()) return false;
    pred.values.row(k) = u.transpose();
    if (opts.record_reservoir) result.reservoir.states.row(k) = r.transpose();
    if (opts.observe_reservoir) opts.observe_reservoir(k, pred.time(k), r);
    last = k;
    return true;
  };

  Rk4 rk(n);
  bool ok = emit(0);
  Eigen::VectorXd prev = r;
  for (long k = 0; ok && k < steps; ++k) {
    prev = r;
    try {
      rk.step(field, grid_time(t0, k, params.tau), params.tau, r);
    } catch (const DivergenceError&) {
      ok = false;
      break;
    }
    ok = emit(k + 1);
  }
  if (!ok) {
    pred.diverged = true;
    pred.values.conservativeResize(last + 1, 2);
    if (opts.record_reservoir) result.reservoir.states.conservativeResize(last + 1, n);
    r = prev;
  }
  result.final_state = r;
  return result;
}

PredictionResult run_prediction(const TrainedReservoir& trained,
                                const Eigen::VectorXd& r0, double t_end,
                                const PredictionOptions& opts) {
  return run_prediction(trained.m, trained.w_in, trained.w_out, trained.params, r0,
                        trained.params.t_train, t_end, opts);
}

void write_prediction(std::ostream& out, const PredictionTrajectory& traj) {
  out << "t,x,y\n";
  for (long k = 0; k <= traj.steps(); ++k) {
    out << format_full(traj.time(k)) << ',' << format_full(traj.values(k, 0)) << ','
        << format_full(traj.values(k, 1)) << '\n';
  }
}

void write_reservoir(std::ostream& out, const ReservoirTrajectory& traj) {
  out << 't';
  for (Eigen::Index i = 0; i < traj.states.cols(); ++i) out << ",r_" << i;
  out << '\n';
  for (long k = 0; k <= traj.steps(); ++k) {
    out << format_full(traj.time(k));
    for (Eigen::Index i = 0; i < traj.states.cols(); ++i) {
      out << ',' << format_full(traj.states(k, i));
    }
    out << '\n';
  }
}

}  // namespace mfrc
