#include "mfrc/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "mfrc/dynamics.hpp"
#include "mfrc/error.hpp"
#include "mfrc/random.hpp"
#include "mfrc/text.hpp"
#include "mfrc/training.hpp"

namespace mfrc {

const char* to_string(Model m) { return m == Model::ERRC ? "errc" : "ffrc"; }

std::optional<Model> parse_model(const std::string& s) {
  std::string t;
  for (char c : s) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (t == "errc" || t == "er") return Model::ERRC;
  if (t == "ffrc" || t == "ff") return Model::FFRC;
  return std::nullopt;
}

TopologySource TopologySource::erdos_renyi(int n, double sparsity) {
  TopologySource s;
  s.model = Model::ERRC;
  s.n = n;
  s.sparsity = sparsity;
  return s;
}

TopologySource TopologySource::fixed(std::shared_ptr<const AdjacencyMatrix> m) {
  TopologySource s;
  s.model = Model::FFRC;
  s.n = m->n();
  s.connectome = std::move(m);
  return s;
}

std::uint64_t matrix_seed(std::uint64_t seed) { return derive_seed(seed, "M"); }
std::uint64_t input_seed(std::uint64_t seed) { return derive_seed(seed, "Win"); }

std::uint64_t trial_seed(std::uint64_t base_seed, Model model, double gamma,
                         double rho, long trial_index) {
  std::uint64_t h = splitmix64(base_seed);
  h = hash_combine(h, hash_label(to_string(model)));
  h = hash_combine(h, hash_double(gamma));
  h = hash_combine(h, hash_double(rho));
  h = hash_combine(h, static_cast<std::uint64_t>(trial_index));
  return h;
}

std::pair<AdjacencyMatrix, InputMatrix> build_reservoir(const TopologySource& source,
                                                        double rho,
                                                        std::uint64_t seed) {
  if (source.model == Model::FFRC) {
    if (!source.connectome) {
      throw Error(ErrorKind::Precondition, "FFRC trials need a connectome matrix");
    }
    return {scale_to_spectral_radius(*source.connectome, rho),
            generate_input_matrix(source.connectome->n(), 2, input_seed(seed))};
  }
  const AdjacencyMatrix raw =
      generate_erdos_renyi(source.n, source.sparsity, matrix_seed(seed));
  // A drawn matrix with no cycles cannot be scaled; it behaves as ρ = 0.
  AdjacencyMatrix m = (raw.spectral_radius() == 0.0)
                          ? scale_to_spectral_radius(raw, 0.0)
                          : scale_to_spectral_radius(raw, rho);
  return {std::move(m), generate_input_matrix(source.n, 2, input_seed(seed))};
}

namespace {

std::pair<DriveSignal, DriveSignal> training_signals(const ReservoirParams& p,
                                                     const TaskSetup& task) {
  return {sample_signal(task.orbit_a, 0.0, p.t_train, p.tau),
          sample_signal(task.orbit_b, 0.0, p.t_train, p.tau)};
}

ReservoirParams with_size(ReservoirParams p, int n, double rho) {
  p.n = n;
  p.rho = rho;
  return p;
}

}  // namespace

TrainedReservoir train_for_seed(const TopologySource& source,
                                const ReservoirParams& params, const TaskSetup& task,
                                std::uint64_t seed) {
  auto [m, w_in] = build_reservoir(source, params.rho, seed);
  const ReservoirParams p = with_size(params, m.n(), params.rho);
  const auto [u1, u2] = training_signals(p, task);
  return train_multifunctional(m, w_in, p, u1, u2);
}

TrialRecord run_trial(const TopologySource& source, const ReservoirParams& params,
                      const TaskSetup& task, std::uint64_t seed, long trial_id) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec;
  rec.trial_id = trial_id;
  rec.model = source.model;
  rec.seed = seed;
  rec.rho = params.rho;
  rec.gamma = params.gamma;
  try {
    const TrainedReservoir trained = train_for_seed(source, params, task, seed);
    rec.verdict = evaluate_multifunctionality(trained, task.orbit_a, task.orbit_b,
                                              params.t_predict_end, task.eval);
  } catch (const Error& ex) {
    if (ex.kind() == ErrorKind::Precondition || ex.kind() == ErrorKind::Shape ||
        ex.kind() == ErrorKind::Config) {
      throw;
    }
    rec.error = ex.what();
    rec.verdict = combine(OrbitCheck{}, OrbitCheck{}, /*diverged=*/true);
  }
  rec.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

void parallel_for(long count, int workers, const std::function<void(long)>& fn) {
  if (count <= 0) return;
  workers = std::max(1, std::min<int>(workers, static_cast<int>(count)));
  if (workers == 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (long i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

double Exp1Result::mean() const {
  if (set_counts.empty()) return 0.0;
  return std::accumulate(set_counts.begin(), set_counts.end(), 0.0) /
         static_cast<double>(set_counts.size());
}

Exp1Result run_experiment1(const TopologySource& source, const ReservoirParams& params,
                           const TaskSetup& task, int n_sets, int trials_per_set,
                           const RunContext& ctx) {
  Exp1Result result;
  result.model = source.model;
  if (n_sets <= 0 || trials_per_set <= 0) return result;
  const long total = static_cast<long>(n_sets) * trials_per_set;
  result.trials.resize(total);
  std::atomic<long> done{0};
  std::mutex progress_mutex;
  parallel_for(total, ctx.workers, [&](long i) {
    const std::uint64_t seed =
        trial_seed(ctx.base_seed, source.model, params.gamma, params.rho, i);
    result.trials[i] = run_trial(source, params, task, seed, i);
    const long d = ++done;
    if (ctx.progress && (d % 10 == 0 || d == total)) {
      std::lock_guard lock(progress_mutex);
      ctx.progress(std::string("exp1 ") + to_string(source.model) + ": " +
                   std::to_string(d) + "/" + std::to_string(total) + " trials");
    }
  });
  result.set_counts.assign(n_sets, 0);
  for (long i = 0; i < total; ++i) {
    if (result.trials[i].verdict.multifunctional) ++result.set_counts[i / trials_per_set];
  }
  return result;
}

// ---------------------------------------------------------------------------
// Sweeps

std::vector<SweepCell> read_sweep_manifest(const std::string& path) {
  std::vector<SweepCell> cells;
  std::ifstream in(path);
  if (!in) return cells;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t.rfind("model,", 0) == 0) continue;
    const auto f = split(t, ',');
    if (f.size() != 5) throw Error(ErrorKind::Format, path + ": bad manifest row");
    SweepCell c;
    const auto m = parse_model(f[0]);
    const auto g = parse_double(f[1]);
    const auto r = parse_double(f[2]);
    const auto k = parse_integer(f[3]);
    const auto n = parse_integer(f[4]);
    if (!m || !g || !r || !k || !n) {
      throw Error(ErrorKind::Format, path + ": bad manifest row");
    }
    c.model = *m;
    c.gamma = *g;
    c.rho = *r;
    c.mf_count = static_cast<int>(*k);
    c.trials = static_cast<int>(*n);
    cells.push_back(c);
  }
  return cells;
}

namespace {

void write_sweep_row(std::ostream& out, const SweepCell& c) {
  out << to_string(c.model) << ',' << format_full(c.gamma) << ',' << format_full(c.rho)
      << ',' << c.mf_count << ',' << c.trials << '\n';
}

}  // namespace

std::vector<SweepCell> run_sweep(const TopologySource& source,
                                 const ReservoirParams& params, const TaskSetup& task,
                                 const std::vector<double>& gamma_grid,
                                 const std::vector<double>& rho_grid, int trials,
                                 const RunContext& ctx, const SweepOptions& opts) {
  if (gamma_grid.empty() || rho_grid.empty()) {
    throw Error(ErrorKind::Precondition, "sweep grids must be non-empty");
  }
  std::vector<SweepCell> done;
  if (!opts.manifest_path.empty()) done = read_sweep_manifest(opts.manifest_path);
  auto find_done = [&](double g, double r) -> const SweepCell* {
    for (const auto& c : done) {
      if (c.model == source.model && c.trials == trials &&
          std::abs(c.gamma - g) <= 1e-12 * std::max(1.0, std::abs(g)) &&
          std::abs(c.rho - r) <= 1e-12 * std::max(1.0, std::abs(r))) {
        return &c;
      }
    }
    return nullptr;
  };

  std::ofstream manifest;
  if (!opts.manifest_path.empty()) {
    const bool fresh = done.empty();
    manifest.open(opts.manifest_path, std::ios::app);
    if (!manifest) throw Error(ErrorKind::Format, "cannot open " + opts.manifest_path);
    if (fresh) manifest << "model,gamma,rho,mf_count,trials\n";
  }

  std::vector<SweepCell> cells;
  for (double gamma : gamma_grid) {
    for (double rho : rho_grid) {
      if (const SweepCell* prior = find_done(gamma, rho)) {
        cells.push_back(*prior);
        continue;
      }
      ReservoirParams p = params;
      p.gamma = gamma;
      p.rho = rho;
      std::vector<char> mf(trials, 0);
      parallel_for(trials, ctx.workers, [&](long i) {
        const std::uint64_t seed = trial_seed(ctx.base_seed, source.model, gamma, rho, i);
        mf[i] = run_trial(source, p, task, seed, i).verdict.multifunctional ? 1 : 0;
      });
      SweepCell cell{source.model, gamma, rho,
                     static_cast<int>(std::count(mf.begin(), mf.end(), 1)), trials};
      cells.push_back(cell);
      if (manifest.is_open()) {
        write_sweep_row(manifest, cell);
        manifest.flush();
      }
      if (ctx.progress) {
        ctx.progress(std::string("sweep ") + to_string(source.model) +
                     ": gamma=" + format_short(gamma) + " rho=" + format_short(rho) +
                     " mf=" + std::to_string(cell.mf_count) + "/" +
                     std::to_string(trials));
      }
    }
  }
  return cells;
}

// ---------------------------------------------------------------------------
// Activations

std::vector<std::vector<int>> activation_counts(const TopologySource& source,
                                                const ReservoirParams& params,
                                                const TaskSetup& task,
                                                std::uint64_t seed,
                                                const std::vector<double>& rho_grid,
                                                double maxima_tolerance,
                                                const RunContext& ctx) {
  std::vector<std::vector<int>> counts(rho_grid.size());
  parallel_for(static_cast<long>(rho_grid.size()), ctx.workers, [&](long i) {
    ReservoirParams p = params;
    p.rho = rho_grid[i];
    const TrainedReservoir trained = train_for_seed(source, p, task, seed);
    MaximaCounter counter(trained.m.n(), maxima_tolerance);
    PredictionOptions opts;
    opts.observe_reservoir = [&](long, double, const Eigen::VectorXd& r) {
      counter.push(r);
    };
    run_prediction(trained, trained.seed(task.orbit_a.label).state,
                   trained.params.t_predict_end, opts);
    counts[i] = counter.counts();
    if (ctx.progress) {
      ctx.progress(std::string("activations ") + to_string(source.model) +
                   ": rho=" + format_short(rho_grid[i]));
    }
  });
  return counts;
}

ActivationHeatmap run_activation_experiment(const TopologySource& source,
                                            const ReservoirParams& params,
                                            const TaskSetup& task,
                                            const std::vector<double>& rho_grid,
                                            std::uint64_t mf_seed,
                                            std::uint64_t non_mf_seed,
                                            double maxima_tolerance,
                                            const RunContext& ctx) {
  ActivationHeatmap h;
  h.model = source.model;
  h.rho_grid = rho_grid;
  h.seeds = {mf_seed, non_mf_seed};
  for (std::uint64_t seed : h.seeds) {
    h.counts.push_back(
        activation_counts(source, params, task, seed, rho_grid, maxima_tolerance, ctx));
  }
  return h;
}

// ---------------------------------------------------------------------------
// Continuation

bool same_attractor(const AttractorLabel& a, const AttractorLabel& b, double tolerance) {
  if (a.kind != b.kind) return false;
  if (a.summary.direction != b.summary.direction) return false;
  if ((a.summary.mean - b.summary.mean).norm() > tolerance) return false;
  if (std::abs(a.summary.diameter - b.summary.diameter) > tolerance) return false;
  if (std::abs(a.summary.roundness - b.summary.roundness) > tolerance) return false;
  if (a.kind == AttractorKind::LimitCycle && a.summary.clusters != b.summary.clusters) {
    return false;
  }
  return true;
}

namespace {

struct Candidate {
  int branch = -1;  // continuing branch id, or -1 for a training-seed start
  std::string origin;
  Eigen::VectorXd r0;
  AttractorLabel label;
  Eigen::VectorXd final_state;
  bool diverged = false;
};

void track(Candidate& c, const TrainedReservoir& trained, const TaskSetup& task,
           const ContinuationOptions& opts) {
  const ReservoirParams& p = trained.params;
  auto run = run_prediction(trained.m, trained.w_in, trained.w_out, p, c.r0, 0.0,
                            opts.transient + opts.window);
  if (run.prediction.diverged) {
    c.diverged = true;
    c.label.kind = AttractorKind::Chaotic;
    c.final_state = run.final_state;
    return;
  }
  c.label = classify_attractor(run.prediction, task.orbit_a, task.orbit_b,
                               opts.transient, opts.classifier);
  c.final_state = run.final_state;
  if ((c.label.kind == AttractorKind::Torus || c.label.kind == AttractorKind::Chaotic) &&
      opts.extended_window > opts.window) {
    auto longer = run_prediction(trained.m, trained.w_in, trained.w_out, p,
                                 run.final_state, 0.0, opts.extended_window);
    if (longer.prediction.diverged) {
      c.diverged = true;
      c.label.kind = AttractorKind::Chaotic;
    } else {
      c.label = classify_attractor(longer.prediction, task.orbit_a, task.orbit_b, 0.0,
                                   opts.classifier);
    }
    c.final_state = longer.final_state;
  }
}

}  // namespace

std::vector<Branch> run_continuation(const TopologySource& source,
                                     const ReservoirParams& params,
                                     const TaskSetup& task, double rho_start,
                                     double rho_end, double delta_rho,
                                     std::uint64_t seed,
                                     const ContinuationOptions& opts,
                                     const RunContext& ctx) {
  if (!(delta_rho > 0.0)) throw Error(ErrorKind::Precondition, "delta_rho must be > 0");
  const double dir = rho_end >= rho_start ? 1.0 : -1.0;
  const long steps = std::lround(std::abs(rho_end - rho_start) / delta_rho);

  // Fixed M and W_in across the sweep; only the scaling changes.
  if (source.model == Model::FFRC && !source.connectome) {
    throw Error(ErrorKind::Precondition, "FFRC continuation needs a connectome matrix");
  }
  const AdjacencyMatrix unscaled =
      source.model == Model::FFRC
          ? *source.connectome
          : generate_erdos_renyi(source.n, source.sparsity, matrix_seed(seed));
  const InputMatrix w_in = generate_input_matrix(unscaled.n(), 2, input_seed(seed));

  std::vector<Branch> branches;
  for (long s = 0; s <= steps; ++s) {
    const double rho = rho_start + dir * static_cast<double>(s) * delta_rho;
    AdjacencyMatrix m = unscaled.spectral_radius() == 0.0
                            ? scale_to_spectral_radius(unscaled, 0.0)
                            : scale_to_spectral_radius(unscaled, rho);
    ReservoirParams p = params;
    p.n = m.n();
    p.rho = rho;
    const auto u1 = sample_signal(task.orbit_a, 0.0, p.t_train, p.tau);
    const auto u2 = sample_signal(task.orbit_b, 0.0, p.t_train, p.tau);
    const TrainedReservoir trained = train_multifunctional(m, w_in, p, u1, u2);

    std::vector<Candidate> candidates;
    for (const auto& b : branches) {
      if (b.alive) candidates.push_back(Candidate{b.id, b.origin, b.state, {}, {}, false});
    }
    for (const auto& sd : trained.seed_states) {
      candidates.push_back(Candidate{-1, to_string(sd.label), sd.state, {}, {}, false});
    }
    parallel_for(static_cast<long>(candidates.size()), ctx.workers,
                 [&](long i) { track(candidates[i], trained, task, opts); });

    // Continuing branches claim attractors first, in id order.
    std::vector<std::pair<int, AttractorLabel>> claimed;
    auto claimed_by = [&](const Candidate& c) -> std::optional<int> {
      if (c.diverged) return std::nullopt;
      for (const auto& [id, lab] : claimed) {
        if (same_attractor(lab, c.label, opts.merge_tolerance)) return id;
      }
      return std::nullopt;
    };
    for (auto& c : candidates) {
      if (c.branch < 0) continue;
      Branch& b = branches[c.branch];
      if (auto owner = claimed_by(c)) {
        b.alive = false;
        b.merged_into = *owner;
        continue;
      }
      b.samples.push_back(BranchSample{rho, c.label, c.diverged});
      b.state = c.final_state;
      if (c.diverged) {
        b.alive = false;
      } else {
        claimed.emplace_back(b.id, c.label);
      }
    }
    for (auto& c : candidates) {
      if (c.branch >= 0 || c.diverged) continue;
      if (claimed_by(c)) continue;
      const long live = std::count_if(branches.begin(), branches.end(),
                                      [](const Branch& b) { return b.alive; });
      if (live >= opts.max_branches) break;
      Branch b;
      b.id = static_cast<int>(branches.size());
      b.origin = c.origin;
      b.samples.push_back(BranchSample{rho, c.label, false});
      b.state = c.final_state;
      claimed.emplace_back(b.id, c.label);
      branches.push_back(std::move(b));
    }
    if (ctx.progress) {
      std::ostringstream os;
      os << "continuation " << to_string(source.model) << ": rho=" << format_short(rho);
      for (const auto& b : branches) {
        if (b.alive && !b.samples.empty() && b.samples.back().rho == rho) {
          os << " [" << b.id << ":" << to_string(b.samples.back().label.kind) << "]";
        }
      }
      ctx.progress(os.str());
    }
  }
  return branches;
}

// ---------------------------------------------------------------------------
// Statistics

RankSumResult rank_sum_test(const std::vector<double>& sample_a,
                            const std::vector<double>& sample_b,
                            bool continuity_correction) {
  if (sample_a.empty() || sample_b.empty()) {
    throw Error(ErrorKind::Precondition, "rank-sum test needs two non-empty samples");
  }
  const double na = static_cast<double>(sample_a.size());
  const double nb = static_cast<double>(sample_b.size());
  std::vector<std::pair<double, int>> pooled;
  for (double v : sample_a) pooled.emplace_back(v, 0);
  for (double v : sample_b) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });

  double rank_sum_a = 0.0;
  double tie_term = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j].first == pooled[i].first) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].second == 0) rank_sum_a += midrank;
    }
    i = j;
  }

  RankSumResult r;
  const double n = na + nb;
  r.u_statistic = rank_sum_a - na * (na + 1.0) / 2.0;
  const double mean = na * nb / 2.0;
  const double var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (!(var > 0.0)) {
    r.z_score = 0.0;
    r.p_value = 1.0;
    return r;
  }
  double diff = r.u_statistic - mean;
  if (continuity_correction) {
    diff = diff > 0.0 ? std::max(0.0, diff - 0.5) : std::min(0.0, diff + 0.5);
  }
  r.z_score = diff / std::sqrt(var);
  r.p_value = std::min(1.0, std::erfc(std::abs(r.z_score) / std::sqrt(2.0)));
  return r;
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || hi < lo) {
    throw Error(ErrorKind::Precondition, "grid needs step > 0 and hi >= lo");
  }
  const long count = std::lround((hi - lo) / step);
  std::vector<double> grid;
  for (long k = 0; k <= count; ++k) {
    // Round to 12 decimals so 0.1-style steps print cleanly.
    grid.push_back(std::round((lo + static_cast<double>(k) * step) * 1e12) / 1e12);
  }
  return grid;
}

// ---------------------------------------------------------------------------
// Files

void write_header(std::ostream& out, const OutputHeader& h) {
  out << "# config_hash=" << h.config_hash << " base_seed=" << h.base_seed << '\n';
}

void write_trial_row(std::ostream& out, const TrialRecord& t) {
  const auto& v = t.verdict;
  out << t.trial_id << ',' << t.seed << ',' << to_string(t.model) << ','
      << format_short(t.rho) << ',' << format_short(t.gamma) << ','
      << format_short(v.check_a.roundness) << ',' << to_string(v.check_a.direction) << ','
      << format_short(v.check_b.roundness) << ',' << to_string(v.check_b.direction) << ','
      << (v.multifunctional ? 1 : 0) << ',' << to_string(v.failure_mode) << '\n';
}

void write_trials(std::ostream& out, const std::vector<TrialRecord>& trials) {
  out << "trial_id,seed,model,rho,gamma,roundness_a,dir_a,roundness_b,dir_b,mf,"
         "failure_mode\n";
  for (const auto& t : trials) write_trial_row(out, t);
}

void write_exp1_counts(std::ostream& out, const std::vector<Exp1Result>& results) {
  out << "model,set_id,mf_count\n";
  for (const auto& r : results) {
    for (std::size_t s = 0; s < r.set_counts.size(); ++s) {
      out << to_string(r.model) << ',' << s << ',' << r.set_counts[s] << '\n';
    }
  }
}

void write_sweep(std::ostream& out, const std::vector<SweepCell>& cells) {
  out << "model,gamma,rho,mf_count,trials\n";
  for (const auto& c : cells) write_sweep_row(out, c);
}

void write_activations(std::ostream& out, const ActivationHeatmap& h) {
  out << "model,case,neuron,rho,count\n";
  static const char* kCase[] = {"mf", "non_mf"};
  for (std::size_t c = 0; c < h.counts.size(); ++c) {
    for (std::size_t r = 0; r < h.rho_grid.size(); ++r) {
      for (std::size_t i = 0; i < h.counts[c][r].size(); ++i) {
        out << to_string(h.model) << ',' << kCase[c] << ',' << i << ','
            << format_short(h.rho_grid[r]) << ',' << h.counts[c][r][i] << '\n';
      }
    }
  }
}

void write_continuation(std::ostream& out, Model model,
                        const std::vector<Branch>& branches) {
  out << "model,branch_id,rho,label,roundness,direction,crossings\n";
  for (const auto& b : branches) {
    for (const auto& s : b.samples) {
      out << to_string(model) << ',' << b.id << ',' << format_short(s.rho) << ','
          << (s.diverged ? "Diverged" : to_string(s.label.kind)) << ','
          << format_short(s.label.summary.roundness) << ','
          << to_string(s.label.summary.direction) << ',' << s.label.summary.crossings
          << '\n';
    }
  }
}

void write_stats(std::ostream& out, const OutputHeader& h, const RankSumResult& r,
                 const std::vector<double>& a, const std::vector<double>& b) {
  auto mean = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  };
  nlohmann::ordered_json j;
  j["config_hash"] = h.config_hash;
  j["base_seed"] = h.base_seed;
  j["test"] = "wilcoxon_rank_sum";
  j["n_a"] = a.size();
  j["n_b"] = b.size();
  j["mean_a"] = std::stod(format_short(mean(a)));
  j["mean_b"] = std::stod(format_short(mean(b)));
  j["U"] = std::stod(format_short(r.u_statistic));
  j["z"] = std::stod(format_short(r.z_score));
  j["p"] = std::stod(format_short(r.p_value));
  out << j.dump(2) << '\n';
}

std::vector<double> read_counts_column(const std::string& path,
                                       std::optional<Model> model) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Format, "cannot open " + path);
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t.rfind("model,", 0) == 0) continue;
    const auto f = split(t, ',');
    const auto m = f.size() == 3 ? parse_model(f[0]) : std::nullopt;
    const auto v = f.size() == 3 ? parse_double(f[2]) : std::nullopt;
    if (!m || !v) {
      throw Error(ErrorKind::Format,
                  path + ": expected model,set_id,mf_count on line " +
                      std::to_string(line_no));
    }
    if (!model || *m == *model) values.push_back(*v);
  }
  return values;
}

}  // namespace mfrc
