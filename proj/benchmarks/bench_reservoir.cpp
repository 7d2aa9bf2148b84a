#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "mfrc/dynamics.hpp"
#include "mfrc/experiments.hpp"
#include "mfrc/random.hpp"
#include "mfrc/tasks.hpp"
#include "mfrc/topology.hpp"
#include "mfrc/training.hpp"

namespace {

using namespace mfrc;

struct Fixture {
  ReservoirParams params;
  AdjacencyMatrix m;
  InputMatrix w_in;

  explicit Fixture(int n)
      : params([n] {
          ReservoirParams p;
          p.n = n;
          return p;
        }()),
        m(scale_to_spectral_radius(generate_erdos_renyi(n, 0.05, 11), 1.4)),
        w_in(generate_input_matrix(n, 2, 12)) {}
};

void BM_ListeningStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Fixture fx(n);
  ReservoirParams p = fx.params;
  p.t_listen = 0.0;
  p.t_train = 100 * p.tau;
  const auto u = sample_signal(make_orbit(OrbitLabel::A, 5.0), 0.0, p.t_train, p.tau);
  for (auto _ : state) {
    auto r = integrate_listening(fx.m, fx.w_in, p, u, p.t_train, {});
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_ListeningStep)->Arg(100)->Arg(500)->Unit(benchmark::kMicrosecond);

void BM_SpectralRadiusDense(benchmark::State& state) {
  const auto m = generate_erdos_renyi(static_cast<int>(state.range(0)), 0.05, 3);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_radius(m.entries()));
}
BENCHMARK(BM_SpectralRadiusDense)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_SpectralRadiusIterative(benchmark::State& state) {
  const auto m = generate_erdos_renyi(static_cast<int>(state.range(0)), 0.05, 3);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_radius_iterative(m.entries()));
}
BENCHMARK(BM_SpectralRadiusIterative)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_NormalEquations(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  Rng rng(5);
  FeatureMatrix x;
  x.columns = Eigen::MatrixXd::NullaryExpr(2 * n, 5655, [&] { return rng.uniform(-1, 1); });
  TargetMatrix y;
  y.columns = Eigen::MatrixXd::NullaryExpr(2, 5655, [&] { return rng.uniform(-5, 5); });
  for (auto _ : state) {
    auto eq = normal_equations(x, y);
    benchmark::DoNotOptimize(eq.gram.data());
  }
}
BENCHMARK(BM_NormalEquations)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_RidgeSolve(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  Rng rng(6);
  FeatureMatrix x;
  x.columns = Eigen::MatrixXd::NullaryExpr(2 * n, 4 * n, [&] { return rng.uniform(-1, 1); });
  TargetMatrix y;
  y.columns = Eigen::MatrixXd::NullaryExpr(2, 4 * n, [&] { return rng.uniform(-5, 5); });
  const auto eq = normal_equations(x, y);
  for (auto _ : state) benchmark::DoNotOptimize(solve_ridge(eq, 0.01).data());
}
BENCHMARK(BM_RidgeSolve)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_Trial(benchmark::State& state) {
  const auto source = TopologySource::erdos_renyi(500, 0.05);
  ReservoirParams params;
  const TaskSetup task;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto rec = run_trial(source, params, task, seed++);
    benchmark::DoNotOptimize(rec.verdict.multifunctional);
  }
}
BENCHMARK(BM_Trial)->Unit(benchmark::kSecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
