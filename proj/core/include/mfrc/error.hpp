#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mfrc {

enum class ErrorKind {
  EmptyNetwork,
  Format,
  Unscalable,
  NumericalFailure,
  Divergence,
  Alignment,
  Range,
  Shape,
  Singular,
  Config,
  Precondition,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Iterative estimator gave up; carries the last iterate so callers can inspect it.
class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, double last_estimate,
                   std::vector<double> last_iterate)
      : Error(ErrorKind::NumericalFailure, what),
        last_estimate_(last_estimate),
        last_iterate_(std::move(last_iterate)) {}

  double last_estimate() const noexcept { return last_estimate_; }
  const std::vector<double>& last_iterate() const noexcept {
    return last_iterate_;
  }

 private:
  double last_estimate_;
  std::vector<double> last_iterate_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int stage)
      : Error(ErrorKind::Divergence, what), stage_(stage) {}

  // RK4 stage (1..4) that produced the first non-finite value.
  int stage() const noexcept { return stage_; }

 private:
  int stage_;
};

// Config errors carry the offending line (0 when not line-specific) and field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line, std::string field)
      : Error(ErrorKind::Config, what), line_(line), field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

}  // namespace mfrc
