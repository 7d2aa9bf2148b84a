#include "mfrc/topology.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "mfrc/error.hpp"
#include "mfrc/random.hpp"
#include "mfrc/text.hpp"

namespace mfrc {

std::string describe(const Provenance& p) {
  return std::visit(
      [](const auto& src) -> std::string {
        using T = std::decay_t<decltype(src)>;
        std::ostringstream os;
        if constexpr (std::is_same_v<T, ErdosRenyiSource>) {
          os << "ErdosRenyi(seed=" << src.seed << ", sparsity=" << src.sparsity
             << ")";
        } else {
          os << "Connectome(" << src.source_id
             << ", threshold=" << src.synapse_threshold << ")";
        }
        return os.str();
      },
      p);
}

AdjacencyMatrix::AdjacencyMatrix(SparseMatrix entries, double spectral_radius,
                                 Provenance provenance,
                                 std::vector<std::string> labels)
    : entries_(std::move(entries)),
      spectral_radius_(spectral_radius),
      provenance_(std::move(provenance)),
      labels_(std::move(labels)) {
  if (entries_.rows() != entries_.cols()) {
    throw Error(ErrorKind::Shape, "adjacency matrix must be square");
  }
  entries_.makeCompressed();
}

InputMatrix::InputMatrix(int d, std::vector<int> columns,
                         std::vector<double> values)
    : d_(d), columns_(std::move(columns)), values_(std::move(values)) {
  if (columns_.size() != values_.size()) {
    throw Error(ErrorKind::Shape, "input matrix column/value length mismatch");
  }
  for (int c : columns_) {
    if (c < 0 || c >= d_) {
      throw Error(ErrorKind::Shape, "input matrix column index out of range");
    }
  }
}

void InputMatrix::apply(const Eigen::Ref<const Eigen::VectorXd>& u,
                        double scale, Eigen::Ref<Eigen::VectorXd> out) const {
  const int rows = n();
  for (int i = 0; i < rows; ++i) {
    out[i] = scale * values_[i] * u[columns_[i]];
  }
}

Eigen::MatrixXd InputMatrix::dense() const {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n(), d_);
  for (int i = 0; i < n(); ++i) w(i, columns_[i]) = values_[i];
  return w;
}

// ---------------------------------------------------------------------------
// Spectral radius

namespace {

double dense_spectral_radius(const SparseMatrix& m) {
  const Eigen::MatrixXd a(m);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(a, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("dense eigensolver did not converge", 0.0, {});
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

constexpr double kKrylovResidual = 1e-8;
// Iterative failures on matrices up to this size fall back to the dense solver.
constexpr int kDenseFallbackLimit = 2000;

struct Krylov2 {
  double modulus = 0.0;
  // ‖A²x + c1 Ax + c0 x‖ / ‖A²x‖: zero once span{x, Ax} is invariant.
  double residual = 1.0;
};

// Largest-modulus eigenvalue of the operator restricted to span{x, Ax} as
// seen through the next iterate A²x.
Krylov2 krylov2_estimate(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& z) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> basis(x.size(), 2);
  basis.col(0) = x;
  basis.col(1) = y;
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, Eigen::Dynamic, 2>> qr(basis);
  qr.setThreshold(1e-9);
  const double nz = std::max(z.norm(), 1e-300);
  if (qr.rank() < 2) {
    const double lambda = x.dot(y) / x.squaredNorm();
    return {std::abs(lambda), (y - lambda * x).norm() / std::max(y.norm(), 1e-300)};
  }
  // z + c1 y + c0 x ≈ 0  ⇒  λ² + c1 λ + c0 = 0
  const Eigen::Vector2d c = qr.solve(-z);
  const double c0 = c[0];
  const double c1 = c[1];
  const double residual = (z + c1 * y + c0 * x).norm() / nz;
  const double disc = c1 * c1 - 4.0 * c0;
  if (disc < 0.0) return {std::sqrt(std::max(c0, 0.0)), residual};
  const double s = std::sqrt(disc);
  return {std::max(std::abs((-c1 + s) / 2.0), std::abs((-c1 - s) / 2.0)), residual};
}

}  // namespace

double spectral_radius_iterative(const SparseMatrix& m,
                                 const SpectralOptions& opts) {
  const int n = static_cast<int>(m.rows());
  if (n < 1) throw Error(ErrorKind::Precondition, "spectral_radius: n must be >= 1");
  if (m.nonZeros() == 0) return 0.0;

  Rng rng(opts.start_seed);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.uniform(-1.0, 1.0);
  x.normalize();

  double previous = -1.0;
  double estimate = 0.0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    Eigen::VectorXd y = m * x;
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;  // x fell into the nullspace: nilpotent part
    Eigen::VectorXd z = m * y;
    const auto k2 = krylov2_estimate(x, y, z);
    estimate = k2.modulus;
    if (previous >= 0.0 && k2.residual <= kKrylovResidual &&
        std::abs(estimate - previous) <= opts.tolerance * std::max(estimate, 1e-300)) {
      return estimate;
    }
    previous = estimate;
    const double nz = z.norm();
    if (nz == 0.0) return 0.0;
    // Advance by two powers; alternate normalisation keeps both parities mixed.
    x = (it % 2 == 0) ? Eigen::VectorXd(z / nz) : Eigen::VectorXd(y / ny);
  }
  throw NumericalFailure("power iteration did not converge within " +
                             std::to_string(opts.max_iterations) + " iterations",
                         estimate, std::vector<double>(x.data(), x.data() + n));
}

double perron_upper_bound(const SparseMatrix& m, int iterations) {
  const int n = static_cast<int>(m.rows());
  if (n == 0 || m.nonZeros() == 0) return 0.0;
  const SparseMatrix a = m.cwiseAbs();
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  double bound = std::numeric_limits<double>::infinity();
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXd y = a * x;
    bound = std::min(bound, (y.array() / x.array()).maxCoeff());
    const double ny = y.maxCoeff();
    if (ny == 0.0) return 0.0;
    x = y / ny;
    x.array() += 1e-12;
  }
  return bound;
}

double spectral_radius(const SparseMatrix& m, const SpectralOptions& opts) {
  const int n = static_cast<int>(m.rows());
  if (n < 1) throw Error(ErrorKind::Precondition, "spectral_radius: n must be >= 1");
  if (m.nonZeros() == 0) return 0.0;
  if (n <= opts.dense_limit) return dense_spectral_radius(m);

  double estimate = 0.0;
  try {
    estimate = spectral_radius_iterative(m, opts);
  } catch (const NumericalFailure&) {
    if (n > kDenseFallbackLimit) throw;
    return dense_spectral_radius(m);
  }
  const double upper = perron_upper_bound(m);
  if (estimate > upper * (1.0 + 1e-6) + 1e-12) {
    throw NumericalFailure("iterative spectral radius exceeds the Perron bound of |M|",
                           estimate, {});
  }
  return estimate;
}

// ---------------------------------------------------------------------------
// Construction

AdjacencyMatrix generate_erdos_renyi(int n, double sparsity, std::uint64_t seed,
                                     const SpectralOptions& opts) {
  if (n <= 0) throw Error(ErrorKind::EmptyNetwork, "Erdős–Rényi network needs n >= 1");
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
    throw Error(ErrorKind::Precondition, "sparsity must lie in [0, 1]");
  }
  Rng rng(seed);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(sparsity * n * n * 1.1) + 16);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (rng.bernoulli(sparsity)) {
        double w = rng.uniform(-1.0, 1.0);
        // A drawn 0.0 would silently drop the edge.
        while (w == 0.0) w = rng.uniform(-1.0, 1.0);
        triplets.emplace_back(i, j, w);
      }
    }
  }
  SparseMatrix entries(n, n);
  entries.setFromTriplets(triplets.begin(), triplets.end());
  const double rho = spectral_radius(entries, opts);
  return AdjacencyMatrix(std::move(entries), rho, ErdosRenyiSource{seed, sparsity});
}

namespace {

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

// Numeric IDs (the usual connectome body IDs) sort numerically, anything else
// lexicographically.
bool label_less(const std::string& a, const std::string& b) {
  if (all_digits(a) && all_digits(b)) {
    auto strip = [](const std::string& s) {
      const auto p = s.find_first_not_of('0');
      return p == std::string::npos ? std::string("0") : s.substr(p);
    };
    const std::string sa = strip(a);
    const std::string sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    return sa < sb;
  }
  return a < b;
}

}  // namespace

AdjacencyMatrix ingest_connectome(const ConnectomeEdgeList& edges,
                                  long long synapse_threshold,
                                  std::string source_id,
                                  const SpectralOptions& opts) {
  if (synapse_threshold < 1) {
    throw Error(ErrorKind::Precondition, "synapse threshold must be positive");
  }
  std::map<std::pair<std::string, std::string>, long long> merged;
  for (const auto& e : edges) {
    if (e.synapse_count < 1) {
      throw Error(ErrorKind::Format, "non-positive synapse count on edge " +
                                         e.pre_id + " -> " + e.post_id);
    }
    merged[{e.pre_id, e.post_id}] += e.synapse_count;
  }
  if (merged.empty()) throw Error(ErrorKind::EmptyNetwork, "edge list is empty");

  std::set<std::string, decltype(&label_less)> nodes(&label_less);
  std::vector<std::pair<std::pair<std::string, std::string>, long long>> kept;
  for (const auto& [key, count] : merged) {
    if (count < synapse_threshold) continue;
    kept.emplace_back(key, count);
    nodes.insert(key.first);
    nodes.insert(key.second);
  }
  if (kept.empty()) {
    throw Error(ErrorKind::EmptyNetwork,
                "no edges survive synapse threshold " + std::to_string(synapse_threshold));
  }

  std::vector<std::string> labels(nodes.begin(), nodes.end());
  std::map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) index[labels[i]] = i;

  long long lo = std::numeric_limits<long long>::max();
  long long hi = std::numeric_limits<long long>::min();
  for (const auto& [key, count] : kept) {
    if (key.first == key.second) continue;  // zeroed below
    lo = std::min(lo, count);
    hi = std::max(hi, count);
  }

  const int n = static_cast<int>(labels.size());
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& [key, count] : kept) {
    const int i = index[key.first];
    const int j = index[key.second];
    if (i == j) continue;
    const double w = (hi == lo) ? 0.0
                                : -1.0 + 2.0 * static_cast<double>(count - lo) /
                                             static_cast<double>(hi - lo);
    // Row = presynaptic neuron, column = postsynaptic neuron.
    triplets.emplace_back(i, j, w);
  }
  SparseMatrix entries(n, n);
  entries.setFromTriplets(triplets.begin(), triplets.end());
  // Keep explicit zeros out of the structure (degenerate min == max map).
  entries.prune(0.0, 0.0);
  const double rho = spectral_radius(entries, opts);
  return AdjacencyMatrix(std::move(entries), rho,
                         ConnectomeSource{std::move(source_id), synapse_threshold},
                         std::move(labels));
}

AdjacencyMatrix scale_to_spectral_radius(const AdjacencyMatrix& m,
                                         double target_rho) {
  if (!(target_rho >= 0.0) || !std::isfinite(target_rho)) {
    throw Error(ErrorKind::Precondition, "target spectral radius must be finite and >= 0");
  }
  if (target_rho == 0.0) {
    SparseMatrix zero(m.n(), m.n());
    return AdjacencyMatrix(std::move(zero), 0.0, m.provenance(), m.labels());
  }
  if (m.spectral_radius() == 0.0) {
    throw Error(ErrorKind::Unscalable,
                "matrix has spectral radius 0 and cannot be scaled to " +
                    std::to_string(target_rho));
  }
  const double factor = target_rho / m.spectral_radius();
  SparseMatrix scaled = m.entries() * factor;
  return AdjacencyMatrix(std::move(scaled), m.spectral_radius() * factor,
                         m.provenance(), m.labels());
}

InputMatrix generate_input_matrix(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1) {
    throw Error(ErrorKind::Precondition, "input matrix needs n >= 1 and d >= 1");
  }
  Rng rng(seed);
  std::vector<int> columns(n);
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) {
    columns[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
    double w = rng.uniform(-1.0, 1.0);
    while (w == 0.0) w = rng.uniform(-1.0, 1.0);
    values[i] = w;
  }
  return InputMatrix(d, std::move(columns), std::move(values));
}

// ---------------------------------------------------------------------------
// Files

ConnectomeEdgeList read_edge_list(std::istream& in) {
  ConnectomeEdgeList edges;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto fields = split(t, ',');
    if (!header_seen) {
      if (fields.size() != 3 || trim(fields[0]) != "pre_id" ||
          trim(fields[1]) != "post_id" || trim(fields[2]) != "synapse_count") {
        throw Error(ErrorKind::Format,
                    "line " + std::to_string(line_no) +
                        ": expected header pre_id,post_id,synapse_count");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      throw Error(ErrorKind::Format, "line " + std::to_string(line_no) +
                                         ": expected 3 comma-separated fields");
    }
    ConnectomeEdge e;
    e.pre_id = trim(fields[0]);
    e.post_id = trim(fields[1]);
    const auto count = parse_integer(trim(fields[2]));
    if (!count || *count < 1 || e.pre_id.empty() || e.post_id.empty()) {
      throw Error(ErrorKind::Format, "line " + std::to_string(line_no) +
                                         ": synapse_count must be a positive integer");
    }
    e.synapse_count = *count;
    edges.push_back(std::move(e));
  }
  if (!header_seen) throw Error(ErrorKind::Format, "edge list has no header");
  return edges;
}

ConnectomeEdgeList read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Format, "cannot open edge list " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const ConnectomeEdgeList& edges) {
  out << "pre_id,post_id,synapse_count\n";
  for (const auto& e : edges) {
    out << e.pre_id << ',' << e.post_id << ',' << e.synapse_count << '\n';
  }
}

void write_matrix(const AdjacencyMatrix& m, const std::string& triplet_path,
                  const std::string& meta_path) {
  std::ofstream out(triplet_path);
  if (!out) throw Error(ErrorKind::Format, "cannot write " + triplet_path);
  out << "row,col,weight\n" << std::setprecision(17);
  const auto& e = m.entries();
  for (int r = 0; r < e.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(e, r); it; ++it) {
      out << it.row() << ',' << it.col() << ',' << it.value() << '\n';
    }
  }

  nlohmann::ordered_json meta;
  meta["n"] = m.n();
  meta["spectral_radius"] = m.spectral_radius();
  std::visit(
      [&](const auto& src) {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, ErdosRenyiSource>) {
          meta["provenance"] = "erdos_renyi";
          meta["seed"] = src.seed;
          meta["sparsity"] = src.sparsity;
        } else {
          meta["provenance"] = "connectome";
          meta["source_id"] = src.source_id;
          meta["synapse_threshold"] = src.synapse_threshold;
        }
      },
      m.provenance());
  if (!m.labels().empty()) meta["labels"] = m.labels();
  std::ofstream mo(meta_path);
  if (!mo) throw Error(ErrorKind::Format, "cannot write " + meta_path);
  mo << std::setprecision(17) << meta.dump(2) << '\n';
}

AdjacencyMatrix read_matrix(const std::string& triplet_path,
                            const std::string& meta_path) {
  std::ifstream mi(meta_path);
  if (!mi) throw Error(ErrorKind::Format, "cannot open " + meta_path);
  nlohmann::json meta;
  try {
    mi >> meta;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::Format, meta_path + ": " + ex.what());
  }
  const int n = meta.at("n").get<int>();
  Provenance prov;
  if (meta.at("provenance") == "erdos_renyi") {
    prov = ErdosRenyiSource{meta.at("seed").get<std::uint64_t>(),
                            meta.at("sparsity").get<double>()};
  } else {
    prov = ConnectomeSource{meta.at("source_id").get<std::string>(),
                            meta.at("synapse_threshold").get<long long>()};
  }
  std::vector<std::string> labels;
  if (meta.contains("labels")) labels = meta["labels"].get<std::vector<std::string>>();

  std::ifstream in(triplet_path);
  if (!in) throw Error(ErrorKind::Format, "cannot open " + triplet_path);
  std::string line;
  std::vector<Eigen::Triplet<double>> triplets;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t == "row,col,weight") continue;
    const auto f = split(t, ',');
    const auto r = f.size() == 3 ? parse_integer(f[0]) : std::nullopt;
    const auto c = f.size() == 3 ? parse_integer(f[1]) : std::nullopt;
    const auto w = f.size() == 3 ? parse_double(f[2]) : std::nullopt;
    if (!r || !c || !w || *r < 0 || *r >= n || *c < 0 || *c >= n) {
      throw Error(ErrorKind::Format,
                  triplet_path + ": bad triplet on line " + std::to_string(line_no));
    }
    triplets.emplace_back(static_cast<int>(*r), static_cast<int>(*c), *w);
  }
  SparseMatrix entries(n, n);
  entries.setFromTriplets(triplets.begin(), triplets.end());
  return AdjacencyMatrix(std::move(entries), meta.at("spectral_radius").get<double>(),
                         std::move(prov), std::move(labels));
}

}  // namespace mfrc
