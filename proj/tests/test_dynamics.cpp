#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "mfrc/dynamics.hpp"
#include "mfrc/error.hpp"
#include "mfrc/evaluation.hpp"
#include "mfrc/experiments.hpp"
#include "mfrc/tasks.hpp"
#include "mfrc/topology.hpp"
#include "mfrc/training.hpp"

namespace {

using namespace mfrc;
constexpr double kPi = std::numbers::pi;

// ---------------------------------------------------------------------------
// tasks

TEST(Orbit, PaperRadii) {
  const auto a = make_orbit(OrbitLabel::A, 5.0);
  const auto b = make_orbit(OrbitLabel::B, 5.0);
  EXPECT_EQ(a.s_x, 5.0);
  EXPECT_EQ(a.s_y, 5.0);
  EXPECT_EQ(b.s_x, -5.0);
  EXPECT_EQ(b.s_y, 5.0);
  EXPECT_EQ(a.orientation(), 1);
  EXPECT_EQ(b.orientation(), -1);
  const auto c = make_orbit(OrbitLabel::A, 1.0, 2.0, 3.0);
  for (double t : {0.0, 0.7, 2.0}) {
    EXPECT_NEAR((c.at(t) - Eigen::Vector2d(2, 3)).norm(), 1.0, 1e-15);
  }
}

TEST(Orbit, SamplePoints) {
  const auto a = make_orbit(OrbitLabel::A, 5.0);
  const auto b = make_orbit(OrbitLabel::B, 5.0);
  EXPECT_EQ(a.at(0.0), Eigen::Vector2d(5, 0));
  EXPECT_NEAR((a.at(kPi / 2) - Eigen::Vector2d(0, 5)).norm(), 0.0, 1e-14);
  EXPECT_EQ(b.at(0.0), Eigen::Vector2d(-5, 0));
}

TEST(Orbit, PeriodicityRadiusAndSignedArea) {
  for (auto label : {OrbitLabel::A, OrbitLabel::B}) {
    const auto o = make_orbit(label, 5.0);
    double area = 0.0;
    const int steps = 20000;
    for (int k = 0; k < steps; ++k) {
      const double t = kOrbitPeriod * k / steps;
      EXPECT_NEAR((o.at(t + kOrbitPeriod) - o.at(t)).norm(), 0.0, 1e-12);
      EXPECT_NEAR(o.at(t).norm(), 5.0, 1e-14);
      const Eigen::Vector2d p = o.at(t), q = o.at(kOrbitPeriod * (k + 1) / steps);
      area += 0.5 * (p.x() * q.y() - p.y() * q.x());
    }
    const double expected = (label == OrbitLabel::A ? 1 : -1) * kPi * 25.0;
    EXPECT_NEAR(area, expected, 1e-5 * std::abs(expected));
  }
}

TEST(DriveSignal, SamplesMatchEvaluatorExactly) {
  const auto s = sample_signal(make_orbit(OrbitLabel::A, 5.0), 0.0, 15 * kOrbitPeriod, 0.01);
  EXPECT_EQ(s.steps(), std::lround(15 * kOrbitPeriod / 0.01));
  for (long k = 0; k <= s.steps(); k += 97) {
    EXPECT_EQ(s.sample(k), s(grid_time(0.0, k, 0.01)));
  }
}

TEST(DriveSignal, Dump) {
  const auto s = sample_signal(make_orbit(OrbitLabel::B, 5.0), 0.0, 0.02, 0.01);
  std::ostringstream os;
  write_signal(os, s);
  EXPECT_EQ(os.str().substr(0, 6), "t,x,y\n");
  EXPECT_NE(os.str().find("0,-5,0"), std::string::npos);
}

// ---------------------------------------------------------------------------
// RK4

TEST(Rk4, ZeroField) {
  Eigen::VectorXd s(2);
  s << 1, 2;
  const auto next = rk4_step([](double, const Eigen::VectorXd&, Eigen::VectorXd& d) { d.setZero(); },
                             0.0, s, 0.01);
  EXPECT_EQ(next, s);
}

TEST(Rk4, ExponentialDecayOneStep) {
  Eigen::VectorXd s(1);
  s << 1.0;
  const auto next =
      rk4_step([](double, const Eigen::VectorXd& r, Eigen::VectorXd& d) { d = -r; }, 0.0, s, 0.01);
  EXPECT_LT(std::abs(next[0] - std::exp(-0.01)), 1e-10);
}

double decay_error(double tau) {
  Rk4 rk(1);
  Eigen::VectorXd s(1);
  s << 1.0;
  const long steps = std::lround(1.0 / tau);
  auto f = [](double, const Eigen::VectorXd& r, Eigen::VectorXd& d) { d = -r; };
  for (long k = 0; k < steps; ++k) rk.step(f, k * tau, tau, s);
  return std::abs(s[0] - std::exp(-1.0));
}

TEST(Rk4, FourthOrderConvergence) {
  const double e1 = decay_error(0.02), e2 = decay_error(0.01), e3 = decay_error(0.005);
  const double p1 = std::log2(e1 / e2), p2 = std::log2(e2 / e3);
  EXPECT_GE(p1, 3.8);
  EXPECT_LE(p1, 4.2);
  EXPECT_GE(p2, 3.8);
  EXPECT_LE(p2, 4.2);
  EXPECT_NEAR(e2 / decay_error(0.005), 16.0, 1.0);
}

TEST(Rk4, DivergenceNamesStage) {
  Eigen::VectorXd s(1);
  s << 1.0;
  int calls = 0;
  auto f = [&](double, const Eigen::VectorXd&, Eigen::VectorXd& d) {
    d.resize(1);
    d[0] = (++calls == 3) ? std::numeric_limits<double>::quiet_NaN() : 1.0;
  };
  Rk4 rk(1);
  try {
    rk.step(f, 0.0, 0.1, s);
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.stage(), 3);
  }
  EXPECT_THROW(rk4_step(f, 0.0, s, 0.0), Error);
}

// ---------------------------------------------------------------------------
// Listening / prediction

struct Small {
  ReservoirParams params;
  AdjacencyMatrix m;
  InputMatrix w_in;
};

Small small_reservoir(double rho, double sigma, int n = 60) {
  ReservoirParams p;
  p.n = n;
  p.rho = rho;
  p.sigma = sigma;
  p.t_listen = 2 * kOrbitPeriod;
  p.t_train = 4 * kOrbitPeriod;
  p.t_predict_end = 6 * kOrbitPeriod;
  p = validated(p);
  auto base = generate_erdos_renyi(n, 0.2, 17);
  return {p, scale_to_spectral_radius(base, rho), generate_input_matrix(n, 2, 18)};
}

TEST(Listening, ZeroInputZeroCouplingStaysAtOrigin) {
  auto s = small_reservoir(0.0, 0.0);
  const auto u = sample_signal(make_orbit(OrbitLabel::A, 5.0), 0.0, s.params.t_train, s.params.tau);
  const auto traj = drive_listening(s.m, s.w_in, s.params, u);
  EXPECT_EQ(traj.states.cwiseAbs().maxCoeff(), 0.0);

  const InputMatrix zero_in(2, std::vector<int>(60, 0), std::vector<double>(60, 0.0));
  s.params.sigma = 0.2;
  const auto traj2 = drive_listening(s.m, zero_in, s.params, u);
  EXPECT_EQ(traj2.states.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Listening, RowCountMatchesGrid) {
  const auto s = small_reservoir(1.2, 0.2);
  const auto u = sample_signal(make_orbit(OrbitLabel::A, 5.0), 0.0, s.params.t_train, s.params.tau);
  const auto traj = drive_listening(s.m, s.w_in, s.params, u);
  EXPECT_EQ(traj.states.rows(), 1 + s.params.train_step());
  EXPECT_EQ(traj.time(traj.steps()), grid_time(0.0, s.params.train_step(), s.params.tau));
}

TEST(Listening, MisalignedSignalRejected) {
  const auto s = small_reservoir(1.2, 0.2);
  const auto short_u =
      sample_signal(make_orbit(OrbitLabel::A, 5.0), 0.0, s.params.t_listen, s.params.tau);
  try {
    drive_listening(s.m, s.w_in, s.params, short_u);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Alignment);
  }
  const auto coarse =
      sample_signal(make_orbit(OrbitLabel::A, 5.0), 0.0, s.params.t_train, 0.02);
  EXPECT_THROW(drive_listening(s.m, s.w_in, s.params, coarse), Error);
}

TEST(Listening, PaperScaleBoundedAndDeterministic) {
  ReservoirParams p;
  const auto m = scale_to_spectral_radius(generate_erdos_renyi(500, 0.05, 314), 1.4);
  const auto w = generate_input_matrix(500, 2, 315);
  const auto u = sample_signal(make_orbit(OrbitLabel::A, 5.0), 0.0, p.t_train, p.tau);
  const auto a = drive_listening(m, w, p, u);
  const auto b = drive_listening(m, w, p, u);
  EXPECT_LT(a.states.cwiseAbs().maxCoeff(), 1.0 + 1e-9);
  EXPECT_TRUE((a.states.array() == b.states.array()).all());
}

TEST(Prediction, ZeroReadoutDecaysToAutonomousFixedPoint) {
  const auto s = small_reservoir(0.5, 0.2);
  const ReadoutMatrix w_out = ReadoutMatrix::Zero(2, 120);
  Eigen::VectorXd r0 = Eigen::VectorXd::Constant(60, 0.3);
  const auto res = run_prediction(s.m, s.w_in, w_out, s.params, r0, 0.0, 20.0);
  EXPECT_EQ(res.prediction.values.cwiseAbs().maxCoeff(), 0.0);
  // ρ < 1: the only fixed point of r' = γ(-r + tanh(Mr)) is the origin.
  EXPECT_LT(res.final_state.cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_FALSE(res.prediction.diverged);
}

TEST(Prediction, GridAndRecordedReservoirAgree) {
  const auto s = small_reservoir(1.2, 0.2);
  const auto u1 = sample_signal(make_orbit(OrbitLabel::A, 5.0), 0.0, s.params.t_train, s.params.tau);
  const auto u2 = sample_signal(make_orbit(OrbitLabel::B, 5.0), 0.0, s.params.t_train, s.params.tau);
  const auto trained = train_multifunctional(s.m, s.w_in, s.params, u1, u2);
  PredictionOptions opts;
  opts.record_reservoir = true;
  const auto res =
      run_prediction(trained, trained.seed(OrbitLabel::A).state, s.params.t_predict_end, opts);
  const long steps = s.params.predict_end_step() - s.params.train_step();
  EXPECT_EQ(res.prediction.values.rows(), steps + 1);
  EXPECT_EQ(res.reservoir.states.rows(), steps + 1);
  for (long k : {0L, steps / 2, steps}) {
    const Eigen::VectorXd r = res.reservoir.states.row(k).transpose();
    EXPECT_LE((readout(trained.w_out, r) - res.prediction.values.row(k).transpose()).norm(),
              1e-12);
  }
  EXPECT_EQ(res.final_state, res.reservoir.states.row(steps).transpose());
}

TEST(Prediction, NonFiniteReadoutTruncates) {
  const auto s = small_reservoir(1.2, 0.2);
  ReadoutMatrix w_out = ReadoutMatrix::Zero(2, 120);
  w_out(0, 0) = std::numeric_limits<double>::infinity();
  const auto res = run_prediction(s.m, s.w_in, w_out, s.params,
                                  Eigen::VectorXd::Constant(60, 0.1), 0.0, 1.0);
  EXPECT_TRUE(res.prediction.diverged);
  EXPECT_TRUE(res.prediction.values.allFinite());
}

TEST(Prediction, SingleCircleTrainingReconstructsCircle) {
  // Seeded fixture: train on C_A alone (u1 = u2) and check the closed loop.
  ReservoirParams p;
  const auto m = scale_to_spectral_radius(generate_erdos_renyi(500, 0.05, matrix_seed(7)), 1.4);
  const auto w = generate_input_matrix(500, 2, input_seed(7));
  const auto u = sample_signal(make_orbit(OrbitLabel::A, 5.0), 0.0, p.t_train, p.tau);
  const auto trained = train_multifunctional(m, w, p, u, u);
  const auto res = run_prediction(trained, trained.seed(OrbitLabel::A).state, p.t_predict_end);
  const auto check = classify_orbit(res.prediction, make_orbit(OrbitLabel::A, 5.0));
  EXPECT_LT(check.roundness, 0.25);
  EXPECT_EQ(check.direction, Direction::CCW);
}

}  // namespace
