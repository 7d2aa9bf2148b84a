#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>

#include "mfrc/dynamics.hpp"
#include "mfrc/error.hpp"
#include "mfrc/experiments.hpp"
#include "mfrc/tasks.hpp"
#include "mfrc/text.hpp"
#include "mfrc/topology.hpp"

namespace mfrc::cli {

namespace fs = std::filesystem;

RunConfig resolve_config(const std::string& path,
                         const std::vector<std::string>& overrides) {
  RunConfig cfg;
  if (!path.empty()) {
    cfg = load_config(path);
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("--set expects key=value, got '" + o + "'", 0, "");
    }
    set_field(cfg, trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
  }
  apply_environment(cfg);
  validate(cfg);
  return cfg;
}

int exit_code_for(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    switch (err->kind()) {
      case ErrorKind::Config:
      case ErrorKind::Format:
      case ErrorKind::EmptyNetwork:
        return kExitConfig;
      case ErrorKind::NumericalFailure:
      case ErrorKind::Divergence:
      case ErrorKind::Singular:
      case ErrorKind::Unscalable:
        return kExitNumerical;
      default:
        return kExitFailure;
    }
  }
  return kExitFailure;
}

std::pair<std::uint64_t, std::uint64_t> find_seed_pair(const RunConfig& cfg,
                                                       const TopologySource& source,
                                                       long max_trials, std::ostream& err) {
  std::optional<std::uint64_t> mf, non_mf;
  const auto task = cfg.task();
  for (long i = 0; i < max_trials && (!mf || !non_mf); ++i) {
    const auto seed =
        trial_seed(cfg.base_seed, source.model, cfg.params.gamma, cfg.params.rho, i);
    const auto rec = run_trial(source, cfg.params, task, seed, i);
    if (rec.verdict.multifunctional && !mf) mf = seed;
    if (!rec.verdict.multifunctional && !non_mf) non_mf = seed;
  }
  if (!mf || !non_mf) {
    throw Error(ErrorKind::Precondition,
                "no " + std::string(mf ? "non-multifunctional" : "multifunctional") +
                    " instance within " + std::to_string(max_trials) + " trials");
  }
  err << "found seeds: mf=" << *mf << " non_mf=" << *non_mf << '\n';
  return {*mf, *non_mf};
}

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::string model;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c, bool with_seed) {
  sub->add_option("--config,-c", c.config_path, "Config file (key = value)");
  sub->add_option("--set", c.overrides, "Override a config field, key=value")
      ->allow_extra_args(false);
  sub->add_option("--out,-o", c.out_dir, "Output directory");
  sub->add_option("--model,-m", c.model, "errc or ffrc");
  if (with_seed) sub->add_option("--seed,-s", c.seed, "Seed");
  sub->add_option("--workers,-j", c.workers, "Worker threads");
  sub->add_flag("--quiet,-q", c.quiet, "No progress output");
}

RunConfig config_from(const Common& c) {
  auto overrides = c.overrides;
  if (!c.model.empty()) overrides.push_back("model=" + c.model);
  if (c.workers) overrides.push_back("workers=" + std::to_string(*c.workers));
  auto cfg = resolve_config(c.config_path, overrides);
  if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
  return cfg;
}

fs::path output_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return fs::path(cfg.output_dir) / name;
}

std::ofstream open_output(const fs::path& p) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::Format, "cannot write " + p.string());
  return f;
}

OutputHeader header_for(const RunConfig& cfg) {
  return {config_hash(cfg), cfg.base_seed};
}

RunContext context_for(const RunConfig& cfg, const Common& c, std::ostream& err) {
  RunContext ctx;
  ctx.base_seed = cfg.base_seed;
  ctx.workers = cfg.workers;
  if (!c.quiet) {
    auto mutex = std::make_shared<std::mutex>();
    ctx.progress = [&err, mutex](const std::string& line) {
      std::lock_guard lock(*mutex);
      err << line << '\n' << std::flush;
    };
  }
  return ctx;
}

std::vector<Model> models_for(const Common& c, const RunConfig& cfg, bool both_default) {
  if (c.model.empty() && both_default) return {Model::ERRC, Model::FFRC};
  return {cfg.model};
}

RunConfig with_model(RunConfig cfg, Model m) {
  cfg.model = m;
  return cfg;
}

int cmd_gen_topology(const Common& c, std::ostream& out, std::ostream& err) {
  const auto cfg = config_from(c);
  const std::uint64_t seed = c.seed.value_or(cfg.base_seed);
  const auto source = make_topology_source(cfg);
  const auto [m, w_in] = build_reservoir(source, cfg.params.rho, seed);
  const auto triplets = output_path(cfg, "topology.csv");
  const auto meta = output_path(cfg, "topology.json");
  write_matrix(m, triplets.string(), meta.string());
  {
    auto f = open_output(output_path(cfg, "topology_win.csv"));
    write_header(f, header_for(cfg));
    f << "row,col,weight\n";
    for (int i = 0; i < w_in.n(); ++i) {
      f << i << ',' << w_in.column(i) << ',' << format_full(w_in.value(i)) << '\n';
    }
  }
  out << "n=" << m.n() << " nnz=" << m.entries().nonZeros()
      << " spectral_radius=" << format_short(m.spectral_radius()) << " source="
      << describe(m.provenance()) << '\n';
  if (!c.quiet) err << "wrote " << triplets.string() << '\n';
  return kExitOk;
}

int cmd_trial(const Common& c, bool dump, std::ostream& out, std::ostream& err) {
  const auto cfg = config_from(c);
  const std::uint64_t seed = c.seed.value_or(cfg.base_seed);
  const auto source = make_topology_source(cfg);
  const auto task = cfg.task();
  const auto rec = run_trial(source, cfg.params, task, seed, 0);
  write_trial_row(out, rec);

  const auto path = output_path(cfg, "trials.csv");
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream f(path, std::ios::binary | std::ios::app);
  if (!f) throw Error(ErrorKind::Format, "cannot write " + path.string());
  if (fresh) {
    write_header(f, header_for(cfg));
    write_trials(f, {});
  }
  write_trial_row(f, rec);
  if (!rec.error.empty() && !c.quiet) err << "trial error: " << rec.error << '\n';

  if (dump || cfg.dump_reservoir) {
    const auto trained = train_for_seed(source, cfg.params, task, seed);
    for (const auto label : {OrbitLabel::A, OrbitLabel::B}) {
      PredictionOptions opts;
      opts.record_reservoir = cfg.dump_reservoir;
      const auto res =
          run_prediction(trained, trained.seed(label).state, cfg.params.t_predict_end, opts);
      const std::string tag = std::to_string(seed) + "_" + to_string(label);
      auto pf = open_output(output_path(cfg, "prediction_" + tag + ".csv"));
      write_header(pf, header_for(cfg));
      write_prediction(pf, res.prediction);
      if (cfg.dump_reservoir) {
        auto rf = open_output(output_path(cfg, "reservoir_" + tag + ".csv"));
        write_header(rf, header_for(cfg));
        write_reservoir(rf, res.reservoir);
      }
    }
  }
  return kExitOk;
}

int cmd_exp1(const Common& c, std::ostream& out, std::ostream& err) {
  const auto cfg = config_from(c);
  const auto ctx = context_for(cfg, c, err);
  std::vector<Exp1Result> results;
  for (const auto model : models_for(c, cfg, true)) {
    const auto mcfg = with_model(cfg, model);
    const auto source = make_topology_source(mcfg);
    results.push_back(run_experiment1(source, cfg.params, cfg.task(), cfg.exp1_sets,
                                      cfg.exp1_trials, ctx));
  }
  const auto h = header_for(cfg);
  {
    auto f = open_output(output_path(cfg, "exp1_counts.csv"));
    write_header(f, h);
    write_exp1_counts(f, results);
  }
  {
    auto f = open_output(output_path(cfg, "exp1_trials.csv"));
    write_header(f, h);
    std::vector<TrialRecord> all;
    for (const auto& r : results) all.insert(all.end(), r.trials.begin(), r.trials.end());
    write_trials(f, all);
  }
  for (const auto& r : results) {
    out << to_string(r.model) << " mean_mf_count=" << format_short(r.mean()) << '\n';
  }
  return kExitOk;
}

int cmd_sweep(const Common& c, std::ostream& out, std::ostream& err) {
  const auto cfg = config_from(c);
  const auto ctx = context_for(cfg, c, err);
  const auto gammas = make_grid(cfg.sweep_gamma_min, cfg.sweep_gamma_max, cfg.sweep_gamma_step);
  const auto rhos = make_grid(cfg.sweep_rho_min, cfg.sweep_rho_max, cfg.sweep_rho_step);
  std::vector<SweepCell> cells;
  for (const auto model : models_for(c, cfg, false)) {
    const auto mcfg = with_model(cfg, model);
    const auto source = make_topology_source(mcfg);
    SweepOptions opts;
    opts.manifest_path =
        output_path(cfg, std::string("sweep_manifest_") + to_string(model) + ".csv").string();
    const auto part =
        run_sweep(source, cfg.params, cfg.task(), gammas, rhos, cfg.sweep_trials, ctx, opts);
    cells.insert(cells.end(), part.begin(), part.end());
  }
  auto f = open_output(output_path(cfg, "sweep.csv"));
  write_header(f, header_for(cfg));
  write_sweep(f, cells);
  int total = 0;
  for (const auto& cell : cells) total += cell.mf_count;
  out << "cells=" << cells.size() << " mf_total=" << total << '\n';
  return kExitOk;
}

int cmd_activations(const Common& c, std::optional<std::uint64_t> mf_seed,
                    std::optional<std::uint64_t> non_mf_seed, bool find_seeds,
                    std::ostream& out, std::ostream& err) {
  const auto cfg = config_from(c);
  const auto ctx = context_for(cfg, c, err);
  const auto source = make_topology_source(cfg);
  std::uint64_t mf = mf_seed.value_or(cfg.activation_mf_seed);
  std::uint64_t non_mf = non_mf_seed.value_or(cfg.activation_non_mf_seed);
  if (find_seeds) std::tie(mf, non_mf) = find_seed_pair(cfg, source, 2000, err);
  const auto grid =
      make_grid(cfg.activation_rho_min, cfg.activation_rho_max, cfg.activation_rho_step);
  const auto heatmap = run_activation_experiment(source, cfg.params, cfg.task(), grid, mf,
                                                 non_mf, cfg.maxima_tolerance, ctx);
  auto f = open_output(output_path(cfg, "activations.csv"));
  write_header(f, header_for(cfg));
  write_activations(f, heatmap);
  out << "mf_seed=" << mf << " non_mf_seed=" << non_mf << " rho_points=" << grid.size()
      << '\n';
  return kExitOk;
}

int cmd_continuation(const Common& c, std::ostream& out, std::ostream& err) {
  const auto cfg = config_from(c);
  const auto ctx = context_for(cfg, c, err);
  const auto source = make_topology_source(cfg);
  const std::uint64_t seed = c.seed.value_or(cfg.continuation_seed);
  const auto branches = run_continuation(
      source, cfg.params, cfg.task(), cfg.continuation_rho_start, cfg.continuation_rho_end,
      cfg.continuation_rho_step, seed, cfg.continuation_options(), ctx);
  auto f = open_output(output_path(cfg, "continuation.csv"));
  write_header(f, header_for(cfg));
  write_continuation(f, cfg.model, branches);
  out << "branches=" << branches.size() << '\n';
  return kExitOk;
}

int cmd_stats(const Common& c, std::string a, std::string b, const std::string& a_model,
              const std::string& b_model, std::ostream& out) {
  const auto cfg = config_from(c);
  auto model_filter = [](const std::string& s) -> std::optional<Model> {
    if (s.empty()) return std::nullopt;
    const auto m = parse_model(s);
    if (!m) throw ConfigError("unknown model '" + s + "'", 0, "model");
    return m;
  };
  auto fa = model_filter(a_model);
  auto fb = model_filter(b_model);
  const auto counts = (fs::path(cfg.output_dir) / "exp1_counts.csv").string();
  if (a.empty()) {
    a = counts;
    if (!fa) fa = Model::FFRC;
  }
  if (b.empty()) {
    b = counts;
    if (!fb) fb = Model::ERRC;
  }
  const auto sa = read_counts_column(a, fa);
  const auto sb = read_counts_column(b, fb);
  if (sa.empty() || sb.empty()) {
    throw Error(ErrorKind::Format, "stats needs non-empty samples (a=" +
                                       std::to_string(sa.size()) +
                                       ", b=" + std::to_string(sb.size()) + ")");
  }
  const auto r = rank_sum_test(sa, sb);
  std::ostringstream text;
  write_stats(text, header_for(cfg), r, sa, sb);
  auto f = open_output(output_path(cfg, "stats.json"));
  f << text.str();
  out << text.str();
  return kExitOk;
}

int cmd_dump_signal(const Common& c, const std::string& orbit, std::optional<double> t_end,
                    const std::string& file, std::ostream& out) {
  const auto cfg = config_from(c);
  const auto task = cfg.task();
  OrbitSpec spec;
  if (orbit == "a" || orbit == "A") {
    spec = task.orbit_a;
  } else if (orbit == "b" || orbit == "B") {
    spec = task.orbit_b;
  } else {
    throw ConfigError("--orbit must be a or b", 0, "orbit");
  }
  const auto signal =
      sample_signal(spec, 0.0, t_end.value_or(cfg.params.t_predict_end), cfg.params.tau);
  if (file.empty()) {
    write_signal(out, signal);
  } else {
    auto f = open_output(output_path(cfg, file));
    write_header(f, header_for(cfg));
    write_signal(f, signal);
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multifunctional reservoir computing experiments", "mfrc"};
  app.require_subcommand(1);

  Common common;
  bool dump = false;
  std::optional<std::uint64_t> mf_seed, non_mf_seed;
  bool find_seeds = false;
  std::string a, b, a_model, b_model, orbit = "a", signal_file;
  std::optional<double> t_end;

  auto* gen = app.add_subcommand("gen-topology", "Generate and scale a coupling matrix");
  add_common(gen, common, true);

  auto* trial = app.add_subcommand("trial", "Run one multifunctionality trial");
  add_common(trial, common, true);
  trial->add_flag("--dump", dump, "Write the two predicted trajectories");

  auto* exp1 = app.add_subcommand("exp1", "Repeated sets of trials per model");
  add_common(exp1, common, false);

  auto* sweep = app.add_subcommand("sweep", "(gamma, rho) grid of trial sets");
  add_common(sweep, common, false);

  auto* act = app.add_subcommand("activations", "Per-neuron local maxima heatmaps");
  add_common(act, common, false);
  act->add_option("--mf-seed", mf_seed, "Seed of a multifunctional instance");
  act->add_option("--non-mf-seed", non_mf_seed, "Seed of a non-multifunctional instance");
  act->add_flag("--find-seeds", find_seeds, "Search trial seeds for the pair");

  auto* cont = app.add_subcommand("continuation", "Track attractors across rho");
  add_common(cont, common, true);

  auto* stats = app.add_subcommand("stats", "Rank-sum test on two count files");
  add_common(stats, common, false);
  stats->add_option("--a", a, "Counts file for sample A");
  stats->add_option("--b", b, "Counts file for sample B");
  stats->add_option("--a-model", a_model, "Keep only rows of this model in A");
  stats->add_option("--b-model", b_model, "Keep only rows of this model in B");

  auto* dsig = app.add_subcommand("dump-signal", "Write a sampled training signal");
  add_common(dsig, common, false);
  dsig->add_option("--orbit", orbit, "a or b");
  dsig->add_option("--t-end", t_end, "End time");
  dsig->add_option("--file", signal_file, "File name under the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_gen_topology(common, out, err);
    if (trial->parsed()) return cmd_trial(common, dump, out, err);
    if (exp1->parsed()) return cmd_exp1(common, out, err);
    if (sweep->parsed()) return cmd_sweep(common, out, err);
    if (act->parsed()) {
      return cmd_activations(common, mf_seed, non_mf_seed, find_seeds, out, err);
    }
    if (cont->parsed()) return cmd_continuation(common, out, err);
    if (stats->parsed()) return cmd_stats(common, a, b, a_model, b_model, out);
    if (dsig->parsed()) return cmd_dump_signal(common, orbit, t_end, signal_file, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  err << app.help();
  return kExitConfig;
}

}  // namespace mfrc::cli
