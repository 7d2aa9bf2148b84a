#include "mfrc/training.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "mfrc/error.hpp"
#include "mfrc/text.hpp"

namespace mfrc {

const SeedState& TrainedReservoir::seed(OrbitLabel label) const {
  for (const auto& s : seed_states) {
    if (s.label == label) return s;
  }
  throw Error(ErrorKind::Precondition,
              std::string("no seed state for orbit ") + to_string(label));
}

Eigen::VectorXd apply_q(const Eigen::VectorXd& r) {
  Eigen::VectorXd q(2 * r.size());
  q.head(r.size()) = r;
  q.tail(r.size()) = r.cwiseAbs2();
  return q;
}

Harvest harvest(const ReservoirTrajectory& traj, const DriveSignal& signal,
                const HarvestWindow& window) {
  const double tau = traj.tau;
  const long first = step_count(traj.t0, window.t_listen, tau);
  const long last = step_count(traj.t0, window.t_train, tau);
  if (first < 0 || last < first || last > traj.steps()) {
    throw Error(ErrorKind::Range, "trajectory does not cover the harvest window");
  }
  const long sig_first = step_count(signal.t0(), window.t_listen, tau);
  const long sig_last = step_count(signal.t0(), window.t_train, tau);
  if (std::abs(signal.tau() - tau) > 1e-15 * tau || sig_first < 0 ||
      sig_last > signal.steps()) {
    throw Error(ErrorKind::Range, "signal does not cover the harvest window");
  }
  const Eigen::Index n = traj.states.cols();
  const Eigen::Index cols = last - first + 1;
  Harvest h;
  h.x.window = window;
  h.x.columns.resize(2 * n, cols);
  h.y.columns.resize(2, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const auto r = traj.states.row(first + c).transpose();
    h.x.columns.col(c).head(n) = r;
    h.x.columns.col(c).tail(n) = r.cwiseAbs2();
    h.y.columns.col(c) = signal.sample(sig_first + c);
  }
  return h;
}

Harvest harvest(const ReservoirTrajectory& traj, const DriveSignal& signal,
                const ReservoirParams& params) {
  return harvest(traj, signal, HarvestWindow{params.t_listen, params.t_train});
}

Harvest harvest_listening(const AdjacencyMatrix& m, const InputMatrix& w_in,
                          const ReservoirParams& params, const DriveSignal& u,
                          Eigen::VectorXd& final_state) {
  const long first = params.listen_step();
  const long last = params.train_step();
  const Eigen::Index n = m.n();
  Harvest h;
  h.x.window = HarvestWindow{params.t_listen, params.t_train};
  h.x.columns.resize(2 * n, last - first + 1);
  h.y.columns.resize(2, last - first + 1);
  final_state = integrate_listening(
      m, w_in, params, u, params.t_train,
      [&](long k, double, const Eigen::VectorXd& r) {
        if (k < first) return;
        const Eigen::Index c = k - first;
        h.x.columns.col(c).head(n) = r;
        h.x.columns.col(c).tail(n) = r.cwiseAbs2();
        h.y.columns.col(c) = u.sample(k);
      });
  return h;
}

Harvest blend(const FeatureMatrix& x1, const FeatureMatrix& x2,
              const TargetMatrix& y1, const TargetMatrix& y2) {
  if (x1.size() == 0 || x2.size() == 0) {
    throw Error(ErrorKind::Shape, "cannot blend an empty harvest");
  }
  if (x1.size() != y1.size() || x2.size() != y2.size() ||
      x1.columns.rows() != x2.columns.rows() ||
      y1.columns.rows() != y2.columns.rows()) {
    throw Error(ErrorKind::Shape, "blend: feature/target shapes do not line up");
  }
  Harvest h;
  h.x.window = x1.window;
  h.x.columns.resize(x1.columns.rows(), x1.size() + x2.size());
  h.x.columns << x1.columns, x2.columns;
  h.y.columns.resize(y1.columns.rows(), y1.size() + y2.size());
  h.y.columns << y1.columns, y2.columns;
  return h;
}

NormalEquations& NormalEquations::operator+=(const NormalEquations& other) {
  gram += other.gram;
  cross += other.cross;
  return *this;
}

NormalEquations normal_equations(const FeatureMatrix& x, const TargetMatrix& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::Shape, "feature and target column counts differ");
  }
  const Eigen::Index f = x.columns.rows();
  NormalEquations eq;
  eq.gram = Eigen::MatrixXd::Zero(f, f);
  eq.gram.selfadjointView<Eigen::Lower>().rankUpdate(x.columns);
  eq.gram.triangularView<Eigen::StrictlyUpper>() = eq.gram.transpose();
  eq.cross.noalias() = y.columns * x.columns.transpose();
  return eq;
}

ReadoutMatrix solve_ridge(const NormalEquations& eq, double beta,
                          RidgeDiagnostics* diag) {
  if (!(beta >= 0.0)) throw Error(ErrorKind::Precondition, "beta must be >= 0");
  const Eigen::Index f = eq.gram.rows();
  Eigen::MatrixXd a = eq.gram;
  a.diagonal().array() += beta;
  const Eigen::MatrixXd bt = eq.cross.transpose();

  Eigen::MatrixXd wt;
  bool fallback = false;
  if (beta > 0.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() == Eigen::Success) {
      wt = llt.solve(bt);
    } else {
      fallback = true;
    }
  } else {
    fallback = true;
  }
  if (fallback) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-12);
    if (qr.rank() < f) {
      if (beta == 0.0) {
        throw Error(ErrorKind::Singular,
                    "X Xᵀ is singular; use a positive regularisation beta");
      }
      throw NumericalFailure("regularised Gram matrix is rank deficient", 0.0, {});
    }
    wt = qr.solve(bt);
  }

  ReadoutMatrix w = wt.transpose();
  const double scale = w.norm() * a.norm() + eq.cross.norm();
  const double residual = (w * a - eq.cross).norm();
  const double rel = scale > 0.0 ? residual / scale : 0.0;
  if (diag) {
    diag->relative_residual = rel;
    diag->used_fallback = fallback;
  }
  if (!w.allFinite() || rel > kRidgeResidualTolerance) {
    if (beta == 0.0) {
      throw Error(ErrorKind::Singular,
                  "ridge solve is ill-conditioned at beta = 0; use beta > 0");
    }
    throw NumericalFailure("ridge residual " + format_short(rel) +
                               " exceeds tolerance",
                           rel, {});
  }
  return w;
}

ReadoutMatrix ridge_regression(const FeatureMatrix& x, const TargetMatrix& y,
                               double beta, RidgeDiagnostics* diag) {
  return solve_ridge(normal_equations(x, y), beta, diag);
}

TrainedReservoir train_multifunctional(const AdjacencyMatrix& m,
                                       const InputMatrix& w_in,
                                       const ReservoirParams& params,
                                       const DriveSignal& u1,
                                       const DriveSignal& u2) {
  Eigen::VectorXd r1;
  Eigen::VectorXd r2;
  // Per-run Gram blocks summed afterwards: X Xᵀ of the blend is X1 X1ᵀ + X2 X2ᵀ,
  // and the sum is bitwise symmetric in the two runs.
  NormalEquations eq;
  {
    const Harvest h1 = harvest_listening(m, w_in, params, u1, r1);
    eq = normal_equations(h1.x, h1.y);
  }
  {
    const Harvest h2 = harvest_listening(m, w_in, params, u2, r2);
    eq += normal_equations(h2.x, h2.y);
  }
  ReadoutMatrix w_out = solve_ridge(eq, params.beta);
  return TrainedReservoir{m, w_in, std::move(w_out), params,
                          {SeedState{u1.spec().label, std::move(r1)},
                           SeedState{u2.spec().label, std::move(r2)}}};
}

// ---------------------------------------------------------------------------
// Serialisation

namespace {

void write_dense(const std::string& path, const Eigen::MatrixXd& a) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Format, "cannot write " + path);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) out << ',';
      out << format_full(a(i, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd read_dense(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Format, "cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    for (const auto& f : split(line, ',')) {
      const auto v = parse_double(f);
      if (!v) throw Error(ErrorKind::Format, path + ": bad number '" + f + "'");
      row.push_back(*v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::Format, path + ": ragged rows");
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd a(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) a(i, j) = rows[i][j];
  }
  return a;
}

nlohmann::ordered_json params_json(const ReservoirParams& p) {
  return {{"n", p.n},         {"d", p.d},         {"gamma", p.gamma},
          {"sigma", p.sigma}, {"rho", p.rho},     {"beta", p.beta},
          {"tau", p.tau},     {"t_listen", p.t_listen},
          {"t_train", p.t_train}, {"t_predict_end", p.t_predict_end}};
}

}  // namespace

void save_trained(const TrainedReservoir& trained, const std::string& prefix) {
  nlohmann::ordered_json meta;
  meta["params"] = params_json(trained.params);
  meta["provenance"] = describe(trained.m.provenance());
  meta["spectral_radius"] = trained.m.spectral_radius();
  auto& seeds = meta["seed_labels"] = nlohmann::json::array();
  for (const auto& s : trained.seed_states) seeds.push_back(to_string(s.label));
  {
    std::ofstream out(prefix + ".meta.json");
    if (!out) throw Error(ErrorKind::Format, "cannot write " + prefix + ".meta.json");
    out << meta.dump(2) << '\n';
  }

  write_dense(prefix + ".wout.csv", trained.w_out);
  Eigen::MatrixXd seed_rows(trained.seed_states.size(), trained.m.n());
  for (std::size_t i = 0; i < trained.seed_states.size(); ++i) {
    seed_rows.row(i) = trained.seed_states[i].state.transpose();
  }
  write_dense(prefix + ".seeds.csv", seed_rows);
  write_matrix(trained.m, prefix + ".m.csv", prefix + ".m.json");
  Eigen::MatrixXd win(trained.w_in.n(), 2);
  for (int i = 0; i < trained.w_in.n(); ++i) {
    win(i, 0) = trained.w_in.column(i);
    win(i, 1) = trained.w_in.value(i);
  }
  write_dense(prefix + ".win.csv", win);
}

TrainedReservoir load_trained(const std::string& prefix) {
  std::ifstream in(prefix + ".meta.json");
  if (!in) throw Error(ErrorKind::Format, "cannot open " + prefix + ".meta.json");
  nlohmann::json meta;
  try {
    in >> meta;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Format, prefix + ".meta.json: " + ex.what());
  }
  const auto& pj = meta.at("params");
  ReservoirParams p;
  p.n = pj.at("n");
  p.d = pj.at("d");
  p.gamma = pj.at("gamma");
  p.sigma = pj.at("sigma");
  p.rho = pj.at("rho");
  p.beta = pj.at("beta");
  p.tau = pj.at("tau");
  p.t_listen = pj.at("t_listen");
  p.t_train = pj.at("t_train");
  p.t_predict_end = pj.at("t_predict_end");

  AdjacencyMatrix m = read_matrix(prefix + ".m.csv", prefix + ".m.json");
  const Eigen::MatrixXd win = read_dense(prefix + ".win.csv");
  std::vector<int> cols(win.rows());
  std::vector<double> vals(win.rows());
  for (Eigen::Index i = 0; i < win.rows(); ++i) {
    cols[i] = static_cast<int>(win(i, 0));
    vals[i] = win(i, 1);
  }
  InputMatrix w_in(p.d, std::move(cols), std::move(vals));
  ReadoutMatrix w_out = read_dense(prefix + ".wout.csv");
  const Eigen::MatrixXd seeds = read_dense(prefix + ".seeds.csv");
  const auto& labels = meta.at("seed_labels");
  if (static_cast<Eigen::Index>(labels.size()) != seeds.rows()) {
    throw Error(ErrorKind::Format, "seed label count does not match seed rows");
  }
  std::vector<SeedState> seed_states;
  for (Eigen::Index i = 0; i < seeds.rows(); ++i) {
    seed_states.push_back(SeedState{labels[i] == "A" ? OrbitLabel::A : OrbitLabel::B,
                                    seeds.row(i).transpose()});
  }
  return TrainedReservoir{std::move(m), std::move(w_in), std::move(w_out), p,
                          std::move(seed_states)};
}

}  // namespace mfrc
