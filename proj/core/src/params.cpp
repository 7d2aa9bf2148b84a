#include "mfrc/params.hpp"

#include <cmath>

#include "mfrc/error.hpp"

namespace mfrc {

namespace {

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) throw ConfigError(std::string(field) + ": " + why, 0, field);
}

}  // namespace

ReservoirParams validated(ReservoirParams p) {
  require(p.n >= 1, "n", "must be >= 1");
  require(p.d >= 1, "d", "must be >= 1");
  require(std::isfinite(p.tau) && p.tau > 0.0, "tau", "must be > 0");
  require(std::isfinite(p.gamma) && p.gamma > 0.0, "gamma", "must be > 0");
  require(std::isfinite(p.beta) && p.beta >= 0.0, "beta", "must be >= 0");
  require(std::isfinite(p.sigma) && p.sigma >= 0.0, "sigma", "must be >= 0");
  require(std::isfinite(p.rho) && p.rho >= 0.0, "rho", "must be >= 0");
  require(std::isfinite(p.t_listen) && p.t_listen >= 0.0, "t_listen", "must be >= 0");

  p.t_listen = grid_time(0.0, p.listen_step(), p.tau);
  p.t_train = grid_time(0.0, p.train_step(), p.tau);
  p.t_predict_end = grid_time(0.0, p.predict_end_step(), p.tau);

  require(p.t_train > p.t_listen, "t_train", "must exceed t_listen");
  require(p.t_predict_end > p.t_train, "t_predict_end", "must exceed t_train");
  return p;
}

}  // namespace mfrc
