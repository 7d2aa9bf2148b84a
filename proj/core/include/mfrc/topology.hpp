#pragma once

// Reservoir coupling matrices: Erdős–Rényi generation, connectome ingestion,
// spectral radius estimation and scaling, and the sparse input matrix.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace mfrc {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct ErdosRenyiSource {
  std::uint64_t seed = 0;
  double sparsity = 0.0;
};

struct ConnectomeSource {
  std::string source_id;
  long long synapse_threshold = 0;
};

using Provenance = std::variant<ErdosRenyiSource, ConnectomeSource>;

std::string describe(const Provenance& p);

class AdjacencyMatrix {
 public:
  AdjacencyMatrix(SparseMatrix entries, double spectral_radius,
                  Provenance provenance, std::vector<std::string> labels = {});

  int n() const { return static_cast<int>(entries_.rows()); }
  const SparseMatrix& entries() const { return entries_; }
  double spectral_radius() const { return spectral_radius_; }
  const Provenance& provenance() const { return provenance_; }
  bool is_connectome() const {
    return std::holds_alternative<ConnectomeSource>(provenance_);
  }
  // Original node label for each dense index (connectome matrices only).
  const std::vector<std::string>& labels() const { return labels_; }

  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(entries_); }

 private:
  SparseMatrix entries_;
  double spectral_radius_;
  Provenance provenance_;
  std::vector<std::string> labels_;
};

// Each row of W_in has exactly one nonzero, so it is stored as (column, value)
// per row.
class InputMatrix {
 public:
  InputMatrix(int d, std::vector<int> columns, std::vector<double> values);

  int n() const { return static_cast<int>(columns_.size()); }
  int d() const { return d_; }
  int column(int row) const { return columns_[row]; }
  double value(int row) const { return values_[row]; }

  // out = scale * W_in * u
  void apply(const Eigen::Ref<const Eigen::VectorXd>& u, double scale,
             Eigen::Ref<Eigen::VectorXd> out) const;

  Eigen::MatrixXd dense() const;

 private:
  int d_;
  std::vector<int> columns_;
  std::vector<double> values_;
};

struct ConnectomeEdge {
  std::string pre_id;
  std::string post_id;
  long long synapse_count = 0;
};

using ConnectomeEdgeList = std::vector<ConnectomeEdge>;

struct SpectralOptions {
  int max_iterations = 10000;
  double tolerance = 1e-10;
  // Matrices up to this size are solved densely; larger ones iteratively,
  // falling back to the dense solver when the iteration does not settle.
  int dense_limit = 200;
  std::uint64_t start_seed = 0x5eed;
};

double spectral_radius(const SparseMatrix& m, const SpectralOptions& opts = {});

// Krylov power iteration with two-dimensional eigenvalue extraction, which
// handles dominant complex-conjugate and ±λ pairs. Converged once the estimate
// is stable and span{x, Ax} is numerically invariant. Throws NumericalFailure
// when it has not settled within opts.max_iterations.
double spectral_radius_iterative(const SparseMatrix& m,
                                 const SpectralOptions& opts = {});

// Collatz–Wielandt upper bound on the Perron root of |m|, which bounds the
// spectral radius of m from above.
double perron_upper_bound(const SparseMatrix& m, int iterations = 200);

AdjacencyMatrix generate_erdos_renyi(int n, double sparsity, std::uint64_t seed,
                                     const SpectralOptions& opts = {});

AdjacencyMatrix ingest_connectome(const ConnectomeEdgeList& edges,
                                  long long synapse_threshold,
                                  std::string source_id = "connectome",
                                  const SpectralOptions& opts = {});

AdjacencyMatrix scale_to_spectral_radius(const AdjacencyMatrix& m,
                                         double target_rho);

InputMatrix generate_input_matrix(int n, int d, std::uint64_t seed);

// pre_id,post_id,synapse_count with a header line; '#' lines are comments.
ConnectomeEdgeList read_edge_list(std::istream& in);
ConnectomeEdgeList read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const ConnectomeEdgeList& edges);

// row,col,weight triplets plus a JSON sidecar with n, provenance,
// spectral_radius, seed and (for connectomes) the label map.
void write_matrix(const AdjacencyMatrix& m, const std::string& triplet_path,
                  const std::string& meta_path);
AdjacencyMatrix read_matrix(const std::string& triplet_path,
                            const std::string& meta_path);

}  // namespace mfrc
