#include "mfrc/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "mfrc/error.hpp"
#include "mfrc/random.hpp"
#include "mfrc/text.hpp"

namespace mfrc {

TaskSetup RunConfig::task() const {
  TaskSetup t;
  t.orbit_a = make_orbit(OrbitLabel::A, orbit_radius, x_cen, y_cen);
  t.orbit_b = make_orbit(OrbitLabel::B, orbit_radius, x_cen, y_cen);
  t.orbit_a.phase = phase_a;
  t.orbit_b.phase = phase_b;
  t.eval.transient_skip = transient_skip;
  t.eval.roundness_threshold = roundness_threshold;
  return t;
}

ContinuationOptions RunConfig::continuation_options() const {
  ContinuationOptions o;
  o.transient = continuation_transient;
  o.window = continuation_window;
  o.extended_window = continuation_extended_window;
  o.merge_tolerance = merge_tolerance;
  o.classifier.orbit = task().eval;
  return o;
}

namespace {

struct Field {
  enum class Type { Real, Integer, Seed, Bool, Text, ModelName };
  Type type;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field real(T RunConfig::*member) {
  return {Field::Type::Real,
          [member](RunConfig& c, const std::string& v) { c.*member = std::stod(v); },
          [member](const RunConfig& c) { return format_full(c.*member); }};
}

Field param(double ReservoirParams::*member) {
  return {Field::Type::Real,
          [member](RunConfig& c, const std::string& v) { c.params.*member = std::stod(v); },
          [member](const RunConfig& c) { return format_full(c.params.*member); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    t["n"] = {Field::Type::Integer,
              [](RunConfig& c, const std::string& v) { c.params.n = std::stoi(v); },
              [](const RunConfig& c) { return std::to_string(c.params.n); }};
    t["d"] = {Field::Type::Integer,
              [](RunConfig& c, const std::string& v) { c.params.d = std::stoi(v); },
              [](const RunConfig& c) { return std::to_string(c.params.d); }};
    t["gamma"] = param(&ReservoirParams::gamma);
    t["sigma"] = param(&ReservoirParams::sigma);
    t["rho"] = param(&ReservoirParams::rho);
    t["beta"] = param(&ReservoirParams::beta);
    t["tau"] = param(&ReservoirParams::tau);
    t["t_listen"] = param(&ReservoirParams::t_listen);
    t["t_train"] = param(&ReservoirParams::t_train);
    t["t_predict_end"] = param(&ReservoirParams::t_predict_end);

    t["model"] = {Field::Type::ModelName,
                  [](RunConfig& c, const std::string& v) { c.model = *parse_model(v); },
                  [](const RunConfig& c) { return std::string(to_string(c.model)); }};
    t["sparsity"] = real(&RunConfig::sparsity);
    t["connectome_path"] = {
        Field::Type::Text,
        [](RunConfig& c, const std::string& v) { c.connectome_path = v; },
        [](const RunConfig& c) { return c.connectome_path; }};
    t["synapse_threshold"] = {
        Field::Type::Integer,
        [](RunConfig& c, const std::string& v) { c.synapse_threshold = std::stoll(v); },
        [](const RunConfig& c) { return std::to_string(c.synapse_threshold); }};

    t["orbit_radius"] = real(&RunConfig::orbit_radius);
    t["x_cen"] = real(&RunConfig::x_cen);
    t["y_cen"] = real(&RunConfig::y_cen);
    t["phase_a"] = real(&RunConfig::phase_a);
    t["phase_b"] = real(&RunConfig::phase_b);
    t["transient_skip"] = real(&RunConfig::transient_skip);
    t["roundness_threshold"] = real(&RunConfig::roundness_threshold);

    auto seed = [](std::uint64_t RunConfig::*member) {
      return Field{Field::Type::Seed,
                   [member](RunConfig& c, const std::string& v) {
                     c.*member = std::stoull(v);
                   },
                   [member](const RunConfig& c) { return std::to_string(c.*member); }};
    };
    auto integer = [](int RunConfig::*member) {
      return Field{Field::Type::Integer,
                   [member](RunConfig& c, const std::string& v) { c.*member = std::stoi(v); },
                   [member](const RunConfig& c) { return std::to_string(c.*member); }};
    };
    t["base_seed"] = seed(&RunConfig::base_seed);
    t["output_dir"] = {Field::Type::Text,
                       [](RunConfig& c, const std::string& v) { c.output_dir = v; },
                       [](const RunConfig& c) { return c.output_dir; }};
    t["workers"] = integer(&RunConfig::workers);

    t["exp1_sets"] = integer(&RunConfig::exp1_sets);
    t["exp1_trials"] = integer(&RunConfig::exp1_trials);

    t["sweep_gamma_min"] = real(&RunConfig::sweep_gamma_min);
    t["sweep_gamma_max"] = real(&RunConfig::sweep_gamma_max);
    t["sweep_gamma_step"] = real(&RunConfig::sweep_gamma_step);
    t["sweep_rho_min"] = real(&RunConfig::sweep_rho_min);
    t["sweep_rho_max"] = real(&RunConfig::sweep_rho_max);
    t["sweep_rho_step"] = real(&RunConfig::sweep_rho_step);
    t["sweep_trials"] = integer(&RunConfig::sweep_trials);

    t["activation_rho_min"] = real(&RunConfig::activation_rho_min);
    t["activation_rho_max"] = real(&RunConfig::activation_rho_max);
    t["activation_rho_step"] = real(&RunConfig::activation_rho_step);
    t["activation_mf_seed"] = seed(&RunConfig::activation_mf_seed);
    t["activation_non_mf_seed"] = seed(&RunConfig::activation_non_mf_seed);
    t["maxima_tolerance"] = real(&RunConfig::maxima_tolerance);

    t["continuation_rho_start"] = real(&RunConfig::continuation_rho_start);
    t["continuation_rho_end"] = real(&RunConfig::continuation_rho_end);
    t["continuation_rho_step"] = real(&RunConfig::continuation_rho_step);
    t["continuation_seed"] = seed(&RunConfig::continuation_seed);
    t["continuation_transient"] = real(&RunConfig::continuation_transient);
    t["continuation_window"] = real(&RunConfig::continuation_window);
    t["continuation_extended_window"] = real(&RunConfig::continuation_extended_window);
    t["merge_tolerance"] = real(&RunConfig::merge_tolerance);

    t["dump_reservoir"] = {Field::Type::Bool,
                           [](RunConfig& c, const std::string& v) {
                             c.dump_reservoir = (v == "true");
                           },
                           [](const RunConfig& c) {
                             return std::string(c.dump_reservoir ? "true" : "false");
                           }};
    return t;
  }();
  return table;
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

// Normalises a raw value for `type`, or returns an empty optional.
std::optional<std::string> coerce(Field::Type type, const std::string& raw) {
  switch (type) {
    case Field::Type::Real: {
      std::string v = raw;
      double factor = 1.0;
      if (!v.empty() && (v.back() == 'T')) {
        factor = kOrbitPeriod;
        v.pop_back();
        if (v.empty()) v = "1";
      }
      const auto d = parse_double(v);
      if (!d) return std::nullopt;
      return format_full(*d * factor);
    }
    case Field::Type::Integer: {
      const auto i = parse_integer(raw);
      if (!i) return std::nullopt;
      return std::to_string(*i);
    }
    case Field::Type::Seed: {
      const auto i = parse_integer(raw);
      if (!i || *i < 0) return std::nullopt;
      return std::to_string(*i);
    }
    case Field::Type::Bool:
      if (raw == "true" || raw == "false") return raw;
      return std::nullopt;
    case Field::Type::Text:
      return unquote(raw);
    case Field::Type::ModelName:
      if (!parse_model(unquote(raw))) return std::nullopt;
      return unquote(raw);
  }
  return std::nullopt;
}

const char* type_name(Field::Type t) {
  switch (t) {
    case Field::Type::Real: return "a number";
    case Field::Type::Integer: return "an integer";
    case Field::Type::Seed: return "a non-negative integer";
    case Field::Type::Bool: return "true or false";
    case Field::Type::Text: return "a string";
    case Field::Type::ModelName: return "errc or ffrc";
  }
  return "?";
}

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) throw ConfigError(std::string(field) + ": " + why, 0, field);
}

}  // namespace

void validate(RunConfig& cfg) {
  cfg.params = validated(cfg.params);
  require(cfg.params.d == 2, "d", "the seeing-double task has 2-D input");
  require(cfg.sparsity >= 0.0 && cfg.sparsity <= 1.0, "sparsity", "must lie in [0, 1]");
  require(cfg.synapse_threshold >= 1, "synapse_threshold", "must be >= 1");
  require(cfg.orbit_radius > 0.0, "orbit_radius", "must be > 0");
  require(cfg.transient_skip >= 0.0, "transient_skip", "must be >= 0");
  require(cfg.roundness_threshold > 0.0, "roundness_threshold", "must be > 0");
  require(cfg.workers >= 1, "workers", "must be >= 1");
  require(cfg.exp1_sets >= 0, "exp1_sets", "must be >= 0");
  require(cfg.exp1_trials >= 0, "exp1_trials", "must be >= 0");
  require(cfg.sweep_gamma_step > 0.0, "sweep_gamma_step", "must be > 0");
  require(cfg.sweep_rho_step > 0.0, "sweep_rho_step", "must be > 0");
  require(cfg.sweep_gamma_max >= cfg.sweep_gamma_min, "sweep_gamma_max", "must be >= sweep_gamma_min");
  require(cfg.sweep_rho_max >= cfg.sweep_rho_min, "sweep_rho_max", "must be >= sweep_rho_min");
  require(cfg.sweep_gamma_min > 0.0, "sweep_gamma_min", "must be > 0");
  require(cfg.sweep_rho_min >= 0.0, "sweep_rho_min", "must be >= 0");
  require(cfg.sweep_trials >= 1, "sweep_trials", "must be >= 1");
  require(cfg.activation_rho_step > 0.0, "activation_rho_step", "must be > 0");
  require(cfg.activation_rho_min >= 0.0 && cfg.activation_rho_max >= cfg.activation_rho_min,
          "activation_rho_max", "needs 0 <= activation_rho_min <= activation_rho_max");
  require(cfg.maxima_tolerance > 0.0, "maxima_tolerance", "must be > 0");
  require(cfg.continuation_rho_step > 0.0, "continuation_rho_step", "must be > 0");
  require(cfg.continuation_rho_start >= 0.0 && cfg.continuation_rho_end >= 0.0,
          "continuation_rho_start", "spectral radii must be >= 0");
  require(cfg.continuation_window >= 10.0 * kOrbitPeriod - 1e-9, "continuation_window",
          "must cover at least 10 periods");
  require(cfg.continuation_transient >= 0.0, "continuation_transient", "must be >= 0");
  require(cfg.merge_tolerance > 0.0, "merge_tolerance", "must be > 0");
  const double window = cfg.params.t_predict_end - cfg.params.t_train;
  require(window > cfg.transient_skip, "transient_skip",
          "must be shorter than the prediction window");
}

void set_field(RunConfig& cfg, const std::string& key, const std::string& raw,
               int line) {
  const std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
  const auto it = fields().find(key);
  if (it == fields().end()) {
    throw ConfigError(where + "unknown key '" + key + "'", line, key);
  }
  const auto value = coerce(it->second.type, raw);
  if (!value) {
    throw ConfigError(where + key + " must be " + type_name(it->second.type) + ", got '" +
                          raw + "'",
                      line, key);
  }
  it->second.set(cfg, *value);
}

void apply_environment(RunConfig& cfg) {
  if (const char* dir = std::getenv("MFRC_OUTPUT_DIR"); dir && *dir) cfg.output_dir = dir;
}

TopologySource make_topology_source(const RunConfig& cfg) {
  if (cfg.model == Model::ERRC) {
    return TopologySource::erdos_renyi(cfg.params.n, cfg.sparsity);
  }
  if (cfg.connectome_path.empty()) {
    throw ConfigError("connectome_path: required for model ffrc", 0, "connectome_path");
  }
  const auto edges = read_edge_list_file(cfg.connectome_path);
  auto m = std::make_shared<const AdjacencyMatrix>(
      ingest_connectome(edges, cfg.synapse_threshold, cfg.connectome_path));
  return TopologySource::fixed(std::move(m));
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int line_no = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = line;
    // Strip trailing comments outside of quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] == '"') quoted = !quoted;
      if (t[i] == '#' && !quoted) {
        t.resize(i);
        break;
      }
    }
    t = trim(t);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value",
                        line_no, "");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string raw = trim(t.substr(eq + 1));
    if (seen.count(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key +
                            "' (first on line " + std::to_string(seen[key]) + ")",
                        line_no, key);
    }
    seen[key] = line_no;
    set_field(cfg, key, raw, line_no);
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path, 0, "");
  return parse_config(in);
}

std::string canonical_config(const RunConfig& cfg) {
  std::ostringstream os;
  for (const auto& [key, field] : fields()) {
    // Output location and parallelism do not change results.
    if (key == "output_dir" || key == "workers") continue;
    os << key << '=' << field.get(cfg) << '\n';
  }
  return os.str();
}

std::string config_hash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash_label(canonical_config(cfg))));
  return buf;
}

}  // namespace mfrc
