#pragma once

// Run configuration: a flat `key = value` text file. Values are numbers
// (a trailing `T` multiplies by the orbit period 2π), booleans, or strings
// (optionally double-quoted). Unknown keys are rejected.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "mfrc/experiments.hpp"
#include "mfrc/params.hpp"

namespace mfrc {

struct RunConfig {
  ReservoirParams params;

  Model model = Model::ERRC;
  double sparsity = 0.05;
  std::string connectome_path;
  long long synapse_threshold = 50;

  double orbit_radius = 5.0;
  double x_cen = 0.0;
  double y_cen = 0.0;
  double phase_a = 0.0;
  double phase_b = 0.0;
  double transient_skip = 2.0 * kOrbitPeriod;
  double roundness_threshold = 0.25;

  std::uint64_t base_seed = 20230601;
  std::string output_dir = "results";
  int workers = 1;

  int exp1_sets = 50;
  int exp1_trials = 100;

  double sweep_gamma_min = 5.0;
  double sweep_gamma_max = 95.0;
  double sweep_gamma_step = 10.0;
  double sweep_rho_min = 0.0;
  double sweep_rho_max = 2.0;
  double sweep_rho_step = 0.05;
  int sweep_trials = 100;

  double activation_rho_min = 0.0;
  double activation_rho_max = 1.8;
  double activation_rho_step = 0.05;
  std::uint64_t activation_mf_seed = 0;
  std::uint64_t activation_non_mf_seed = 0;
  double maxima_tolerance = 1e-3;

  double continuation_rho_start = 0.0;
  double continuation_rho_end = 2.2;
  double continuation_rho_step = 0.01;
  std::uint64_t continuation_seed = 0;
  double continuation_transient = 20.0 * kOrbitPeriod;
  double continuation_window = 20.0 * kOrbitPeriod;
  double continuation_extended_window = 150.0 * kOrbitPeriod;
  double merge_tolerance = 0.1;

  bool dump_reservoir = false;

  TaskSetup task() const;
  ContinuationOptions continuation_options() const;
};

// Throws ConfigError with the 1-based line number for parse errors and the
// field name for validation errors.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

// Validates and applies grid snapping; called by parse_config.
void validate(RunConfig& cfg);

// Sets one field from its textual value, as in a config line. Does not
// revalidate. `line` is reported in errors (0 for command-line overrides).
void set_field(RunConfig& cfg, const std::string& key, const std::string& raw,
               int line = 0);

// Honours MFRC_OUTPUT_DIR when set.
void apply_environment(RunConfig& cfg);

// ER generator spec for errc; the ingested connectome for ffrc.
TopologySource make_topology_source(const RunConfig& cfg);

// Canonical `key=value` listing of every field, in a fixed order.
std::string canonical_config(const RunConfig& cfg);
// 16-hex-digit FNV-1a hash of canonical_config.
std::string config_hash(const RunConfig& cfg);

}  // namespace mfrc
