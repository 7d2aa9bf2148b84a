#pragma once

// Seeded trial orchestration: single multifunctionality trials, repeated sets,
// (γ, ρ) sweeps, activation heatmaps, ρ-continuation of attractors, and the
// Wilcoxon rank-sum comparison of trial-count distributions.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mfrc/evaluation.hpp"
#include "mfrc/params.hpp"
#include "mfrc/tasks.hpp"
#include "mfrc/topology.hpp"
#include "mfrc/trained.hpp"

namespace mfrc {

enum class Model { ERRC, FFRC };

const char* to_string(Model m);
std::optional<Model> parse_model(const std::string& s);

// Where M comes from: a fresh Erdős–Rényi draw per trial, or a fixed
// (unscaled) connectome matrix shared by every trial.
struct TopologySource {
  Model model = Model::ERRC;
  int n = 500;
  double sparsity = 0.05;
  std::shared_ptr<const AdjacencyMatrix> connectome;

  static TopologySource erdos_renyi(int n, double sparsity);
  static TopologySource fixed(std::shared_ptr<const AdjacencyMatrix> m);
};

struct TaskSetup {
  OrbitSpec orbit_a = make_orbit(OrbitLabel::A, 5.0);
  OrbitSpec orbit_b = make_orbit(OrbitLabel::B, 5.0);
  EvaluationOptions eval;
};

struct TrialRecord {
  long trial_id = 0;
  Model model = Model::ERRC;
  std::uint64_t seed = 0;
  double rho = 0.0;
  double gamma = 0.0;
  MfVerdict verdict;
  double wall_time = 0.0;
  std::string error;  // set when a component threw; verdict is then Diverged
};

// Derived streams: M from derive_seed(seed, "M"), W_in from derive_seed(seed, "Win").
std::uint64_t matrix_seed(std::uint64_t trial_seed);
std::uint64_t input_seed(std::uint64_t trial_seed);

// Stable hash of (base, model, γ, ρ, trial_index).
std::uint64_t trial_seed(std::uint64_t base_seed, Model model, double gamma,
                         double rho, long trial_index);

// Builds the scaled M (per params.rho) and W_in for one seed.
std::pair<AdjacencyMatrix, InputMatrix> build_reservoir(const TopologySource& source,
                                                        double rho,
                                                        std::uint64_t seed);

TrainedReservoir train_for_seed(const TopologySource& source,
                                const ReservoirParams& params, const TaskSetup& task,
                                std::uint64_t seed);

// Never throws for numerical trouble: failures become Diverged verdicts.
TrialRecord run_trial(const TopologySource& source, const ReservoirParams& params,
                      const TaskSetup& task, std::uint64_t seed, long trial_id = 0);

// Runs fn(i) for i in [0, count) on `workers` threads. Results must be written
// to per-index slots; the call returns once every index is done.
void parallel_for(long count, int workers, const std::function<void(long)>& fn);

using ProgressFn = std::function<void(const std::string&)>;

struct RunContext {
  std::uint64_t base_seed = 0;
  int workers = 1;
  ProgressFn progress;
};

struct Exp1Result {
  Model model = Model::ERRC;
  std::vector<int> set_counts;
  std::vector<TrialRecord> trials;

  double mean() const;
};

Exp1Result run_experiment1(const TopologySource& source, const ReservoirParams& params,
                           const TaskSetup& task, int n_sets, int trials_per_set,
                           const RunContext& ctx);

struct SweepCell {
  Model model = Model::ERRC;
  double gamma = 0.0;
  double rho = 0.0;
  int mf_count = 0;
  int trials = 0;
};

// Completed-cell manifest; cells already present are skipped on rerun.
// An empty path disables resumption.
struct SweepOptions {
  std::string manifest_path;
};

std::vector<SweepCell> run_sweep(const TopologySource& source,
                                 const ReservoirParams& params, const TaskSetup& task,
                                 const std::vector<double>& gamma_grid,
                                 const std::vector<double>& rho_grid, int trials,
                                 const RunContext& ctx, const SweepOptions& opts = {});

std::vector<SweepCell> read_sweep_manifest(const std::string& path);

struct ActivationHeatmap {
  Model model = Model::ERRC;
  std::vector<double> rho_grid;
  // counts[case][rho index][neuron]; case 0 = multifunctional seed, 1 = not.
  std::vector<std::vector<std::vector<int>>> counts;
  std::vector<std::uint64_t> seeds;
};

// Per-neuron unique local maxima of the prediction started from the A seed
// state, over [t_train, t_predict_end], for every ρ in the grid.
std::vector<std::vector<int>> activation_counts(const TopologySource& source,
                                                const ReservoirParams& params,
                                                const TaskSetup& task,
                                                std::uint64_t seed,
                                                const std::vector<double>& rho_grid,
                                                double maxima_tolerance,
                                                const RunContext& ctx);

ActivationHeatmap run_activation_experiment(const TopologySource& source,
                                            const ReservoirParams& params,
                                            const TaskSetup& task,
                                            const std::vector<double>& rho_grid,
                                            std::uint64_t mf_seed,
                                            std::uint64_t non_mf_seed,
                                            double maxima_tolerance,
                                            const RunContext& ctx);

struct ContinuationOptions {
  double transient = 20.0 * kOrbitPeriod;
  double window = 20.0 * kOrbitPeriod;
  // Torus/chaos candidates are re-run over this longer window before labelling.
  double extended_window = 150.0 * kOrbitPeriod;
  double merge_tolerance = 0.1;
  int max_branches = 8;
  ClassifierOptions classifier;
};

struct BranchSample {
  double rho = 0.0;
  AttractorLabel label;
  bool diverged = false;
};

struct Branch {
  int id = 0;
  std::vector<BranchSample> samples;
  Eigen::VectorXd state;  // final reservoir state at the last sample
  bool alive = true;
  std::string origin;     // "A", "B" (training seed) at birth
  std::optional<int> merged_into;
};

std::vector<Branch> run_continuation(const TopologySource& source,
                                     const ReservoirParams& params,
                                     const TaskSetup& task, double rho_start,
                                     double rho_end, double delta_rho,
                                     std::uint64_t seed,
                                     const ContinuationOptions& opts,
                                     const RunContext& ctx);

// Two attractor labels describe the same attractor.
bool same_attractor(const AttractorLabel& a, const AttractorLabel& b, double tolerance);

struct RankSumResult {
  double u_statistic = 0.0;
  double z_score = 0.0;
  double p_value = 1.0;
};

// Mann–Whitney U of sample_a with midranks; two-sided normal approximation with
// tie-corrected variance. The continuity correction is off by default, which
// matches the classic Wilcoxon rank-sum z.
RankSumResult rank_sum_test(const std::vector<double>& sample_a,
                            const std::vector<double>& sample_b,
                            bool continuity_correction = false);

// Evenly spaced inclusive grid lo, lo+step, ..., hi (rounded to the step).
std::vector<double> make_grid(double lo, double hi, double step);

// ---------------------------------------------------------------------------
// Result files. Every file starts with "# config_hash=<hex> base_seed=<n>".

struct OutputHeader {
  std::string config_hash;
  std::uint64_t base_seed = 0;
};

void write_header(std::ostream& out, const OutputHeader& h);
void write_trials(std::ostream& out, const std::vector<TrialRecord>& trials);
void write_trial_row(std::ostream& out, const TrialRecord& t);
void write_exp1_counts(std::ostream& out, const std::vector<Exp1Result>& results);
void write_sweep(std::ostream& out, const std::vector<SweepCell>& cells);
void write_activations(std::ostream& out, const ActivationHeatmap& heatmap);
void write_continuation(std::ostream& out, Model model,
                        const std::vector<Branch>& branches);
void write_stats(std::ostream& out, const OutputHeader& h, const RankSumResult& r,
                 const std::vector<double>& a, const std::vector<double>& b);

// model,set_id,mf_count rows (the exp1_counts.csv layout); returns counts for
// `model` when given, else every row.
std::vector<double> read_counts_column(const std::string& path,
                                       std::optional<Model> model = std::nullopt);

}  // namespace mfrc
