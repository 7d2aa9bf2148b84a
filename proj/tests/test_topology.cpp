#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "mfrc/error.hpp"
#include "mfrc/random.hpp"
#include "mfrc/topology.hpp"
#include "oracles.hpp"

namespace {

using namespace mfrc;

SparseMatrix from_dense(const Eigen::MatrixXd& d) { return d.sparseView(); }

AdjacencyMatrix plain(const Eigen::MatrixXd& d) {
  const SparseMatrix s = from_dense(d);
  return AdjacencyMatrix(s, spectral_radius(s), ErdosRenyiSource{0, 1.0});
}

Eigen::MatrixXd random_dense(int n, std::uint64_t seed) {
  Rng rng(seed);
  return Eigen::MatrixXd::NullaryExpr(n, n, [&] { return rng.uniform(-1.0, 1.0); });
}

TEST(ErdosRenyi, ZeroSparsityGivesZeroMatrix) {
  const auto m = generate_erdos_renyi(10, 0.0, 1);
  EXPECT_EQ(m.n(), 10);
  EXPECT_EQ(m.entries().nonZeros(), 0);
  EXPECT_EQ(m.spectral_radius(), 0.0);
}

TEST(ErdosRenyi, FullDensityFillsEveryEntry) {
  const auto m = generate_erdos_renyi(2, 1.0, 7);
  const Eigen::MatrixXd d = m.dense();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      EXPECT_NE(d(i, j), 0.0);
      EXPECT_GE(d(i, j), -1.0);
      EXPECT_LE(d(i, j), 1.0);
    }
  }
}

TEST(ErdosRenyi, NonzeroCountMatchesBinomial) {
  const auto m = generate_erdos_renyi(500, 0.05, 42);
  const double mean = 500.0 * 500.0 * 0.05;
  const double sd = std::sqrt(mean * 0.95);
  EXPECT_NEAR(static_cast<double>(m.entries().nonZeros()), mean, 3.0 * sd);
  EXPECT_LE(m.entries().coeffs().cwiseAbs().maxCoeff(), 1.0);
}

TEST(ErdosRenyi, SameSeedIsBitIdentical) {
  const auto a = generate_erdos_renyi(200, 0.05, 99);
  const auto b = generate_erdos_renyi(200, 0.05, 99);
  ASSERT_EQ(a.entries().nonZeros(), b.entries().nonZeros());
  EXPECT_TRUE((a.dense().array() == b.dense().array()).all());
  EXPECT_EQ(a.spectral_radius(), b.spectral_radius());
  const auto c = generate_erdos_renyi(200, 0.05, 100);
  EXPECT_FALSE(a.dense().isApprox(c.dense()));
}

TEST(ErdosRenyi, EmptyNetworkRejected) {
  try {
    generate_erdos_renyi(0, 0.05, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyNetwork);
  }
}

TEST(ErdosRenyi, RecordedRadiusMatchesOracle) {
  const auto m = generate_erdos_renyi(300, 0.05, 5);
  EXPECT_NEAR(m.spectral_radius(), oracle::spectral_radius(m.dense()),
              1e-8 * m.spectral_radius());
}

TEST(Connectome, ThresholdDropsEdgeAndDegenerateMapGivesZero) {
  const auto m = ingest_connectome({{"a", "b", 100}, {"b", "a", 49}}, 50);
  ASSERT_EQ(m.n(), 2);
  EXPECT_EQ(m.entries().nonZeros(), 0);  // the surviving weight maps to 0
  EXPECT_EQ(m.labels(), (std::vector<std::string>{"a", "b"}));
}

TEST(Connectome, MinMaxMap) {
  const auto m = ingest_connectome({{"a", "b", 50}, {"b", "c", 150}, {"c", "a", 100}}, 50);
  const Eigen::MatrixXd d = m.dense();
  ASSERT_EQ(m.n(), 3);
  // Oracle: w = -1 + 2 (c - min) / (max - min), rows = pre, cols = post.
  auto w = [](double c) { return -1.0 + 2.0 * (c - 50.0) / (150.0 - 50.0); };
  EXPECT_DOUBLE_EQ(d(0, 1), w(50));
  EXPECT_DOUBLE_EQ(d(1, 2), w(150));
  EXPECT_DOUBLE_EQ(d(2, 0), w(100));
  EXPECT_DOUBLE_EQ(d(0, 1), -1.0);
  EXPECT_DOUBLE_EQ(d(1, 2), 1.0);
  EXPECT_DOUBLE_EQ(d(2, 0), 0.0);
}

TEST(Connectome, SelfLoopRemoved) {
  const auto m = ingest_connectome({{"a", "a", 999}}, 50);
  ASSERT_EQ(m.n(), 1);
  EXPECT_EQ(m.dense()(0, 0), 0.0);
}

TEST(Connectome, DuplicatesMergeBeforeThreshold) {
  const auto m = ingest_connectome(
      {{"x", "y", 30}, {"x", "y", 30}, {"y", "z", 200}, {"z", "x", 40}}, 50);
  ASSERT_EQ(m.n(), 3);
  const Eigen::MatrixXd d = m.dense();
  EXPECT_DOUBLE_EQ(d(0, 1), -1.0);  // 60 after merge
  EXPECT_DOUBLE_EQ(d(1, 2), 1.0);
  EXPECT_EQ(d(2, 0), 0.0);  // 40 dropped
}

TEST(Connectome, NumericLabelsSortNumerically) {
  const auto m = ingest_connectome({{"10", "9", 60}, {"9", "100", 80}}, 50);
  EXPECT_EQ(m.labels(), (std::vector<std::string>{"9", "10", "100"}));
}

TEST(Connectome, Errors) {
  try {
    ingest_connectome({{"a", "b", 10}}, 50);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyNetwork);
  }
  try {
    ingest_connectome({{"a", "b", 0}}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Format);
  }
}

TEST(Connectome, ThresholdMonotonicity) {
  ConnectomeEdgeList edges;
  Rng rng(3);
  for (int k = 0; k < 400; ++k) {
    edges.push_back({std::to_string(rng.below(60)), std::to_string(rng.below(60)),
                     1 + static_cast<long long>(rng.below(300))});
  }
  auto edge_set = [&](long long t) {
    const auto m = ingest_connectome(edges, t);
    std::set<std::pair<std::string, std::string>> s;
    const auto& e = m.entries();
    for (int i = 0; i < e.outerSize(); ++i) {
      for (SparseMatrix::InnerIterator it(e, i); it; ++it) {
        s.insert({m.labels()[it.row()], m.labels()[it.col()]});
      }
    }
    // Entries that map to exactly zero are still surviving edges; recover them
    // from the merged input instead of the sparse pattern.
    std::map<std::pair<std::string, std::string>, long long> merged;
    for (const auto& ed : edges) merged[{ed.pre_id, ed.post_id}] += ed.synapse_count;
    for (const auto& [k, c] : merged) {
      if (c >= t && k.first != k.second) s.insert(k);
    }
    return s;
  };
  const auto s1 = edge_set(1), s50 = edge_set(50), s100 = edge_set(100);
  EXPECT_TRUE(std::includes(s1.begin(), s1.end(), s50.begin(), s50.end()));
  EXPECT_TRUE(std::includes(s50.begin(), s50.end(), s100.begin(), s100.end()));
  EXPECT_LT(s100.size(), s1.size());
}

TEST(Connectome, EdgeListRoundTripAndComments) {
  std::istringstream in(
      "# comment\npre_id,post_id,synapse_count\na,b,5\n\n# another\nb,c,7\n");
  const auto edges = read_edge_list(in);
  ASSERT_EQ(edges.size(), 2u);
  EXPECT_EQ(edges[1].post_id, "c");
  EXPECT_EQ(edges[1].synapse_count, 7);
  std::ostringstream out;
  write_edge_list(out, edges);
  std::istringstream back(out.str());
  EXPECT_EQ(read_edge_list(back).size(), 2u);
}

TEST(Connectome, MalformedLineReportsLineNumber) {
  std::istringstream in("pre_id,post_id,synapse_count\na,b,5\na,b\n");
  try {
    read_edge_list(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Format);
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
}

TEST(SpectralRadius, Examples) {
  Eigen::MatrixXd d(2, 2);
  d << -2, 0, 0, 1;
  EXPECT_NEAR(spectral_radius(from_dense(d)), 2.0, 1e-12);
  EXPECT_EQ(spectral_radius(SparseMatrix(4, 4)), 0.0);
  const Eigen::MatrixXd r = random_dense(20, 1);
  EXPECT_NEAR(spectral_radius(from_dense(r)), oracle::spectral_radius(r),
              1e-6 * oracle::spectral_radius(r));
}

TEST(SpectralRadius, IterativeAgreesWithOracle) {
  for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
    const auto m = generate_erdos_renyi(500, 0.05, seed);
    const double expected = oracle::spectral_radius(m.dense());
    EXPECT_NEAR(spectral_radius_iterative(m.entries()), expected, 1e-8 * expected)
        << "seed " << seed;
    EXPECT_NEAR(m.spectral_radius(), expected, 1e-8 * expected) << "seed " << seed;
  }
}

TEST(SpectralRadius, IterativeHandlesComplexAndSignedPairs) {
  // Rotation block: dominant complex pair of modulus 2.
  Eigen::MatrixXd rot = Eigen::MatrixXd::Zero(3, 3);
  rot << 0, -2, 0, 2, 0, 0, 0, 0, 0.5;
  EXPECT_NEAR(spectral_radius_iterative(from_dense(rot)), 2.0, 1e-9);
  // ±3 pair.
  Eigen::MatrixXd pm = Eigen::MatrixXd::Zero(3, 3);
  pm << 3, 0, 0, 0, -3, 0, 0, 0, 1;
  EXPECT_NEAR(spectral_radius_iterative(from_dense(pm)), 3.0, 1e-9);
}

TEST(SpectralRadius, NonConvergenceCarriesLastIterate) {
  SpectralOptions opts;
  opts.max_iterations = 2;
  const auto m = generate_erdos_renyi(300, 0.05, 8);
  try {
    spectral_radius_iterative(m.entries(), opts);
    FAIL();
  } catch (const NumericalFailure& e) {
    EXPECT_EQ(e.last_iterate().size(), 300u);
    EXPECT_GT(e.last_estimate(), 0.0);
  }
}

TEST(SpectralRadius, PerronBoundDominates) {
  const auto m = generate_erdos_renyi(400, 0.05, 12);
  EXPECT_GE(perron_upper_bound(m.entries()) * (1 + 1e-9), m.spectral_radius());
}

TEST(Scaling, Examples) {
  const auto id = plain(Eigen::MatrixXd::Identity(2, 2));
  const auto s = scale_to_spectral_radius(id, 1.4);
  EXPECT_TRUE(s.dense().isApprox(1.4 * Eigen::MatrixXd::Identity(2, 2), 1e-15));
  EXPECT_DOUBLE_EQ(s.spectral_radius(), 1.4);

  const auto zero = scale_to_spectral_radius(plain(random_dense(4, 2)), 0.0);
  EXPECT_EQ(zero.entries().nonZeros(), 0);
  EXPECT_EQ(zero.spectral_radius(), 0.0);

  const auto r5 = scale_to_spectral_radius(plain(random_dense(5, 3)), 1.5);
  EXPECT_NEAR(oracle::spectral_radius(r5.dense()), 1.5, 1.5e-6);
}

TEST(Scaling, UnscalableMatrix) {
  Eigen::MatrixXd nil = Eigen::MatrixXd::Zero(2, 2);
  nil(0, 1) = 1.0;  // nilpotent
  try {
    scale_to_spectral_radius(plain(nil), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Unscalable);
  }
}

TEST(Scaling, TwiceEqualsOnce) {
  const auto m = generate_erdos_renyi(300, 0.05, 21);
  const auto once = scale_to_spectral_radius(m, 1.3);
  const auto twice = scale_to_spectral_radius(once, 1.3);
  EXPECT_LE((once.dense() - twice.dense()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(InputMatrix, StructuralContract) {
  for (auto [n, d, seed] : {std::tuple{4, 2, 0}, std::tuple{1, 1, 5}}) {
    const auto w = generate_input_matrix(n, d, seed);
    const Eigen::MatrixXd dense = w.dense();
    ASSERT_EQ(dense.rows(), n);
    ASSERT_EQ(dense.cols(), d);
    for (int i = 0; i < n; ++i) {
      int nonzero = 0;
      for (int j = 0; j < d; ++j) {
        if (dense(i, j) != 0.0) ++nonzero;
        EXPECT_LE(std::abs(dense(i, j)), 1.0);
      }
      EXPECT_EQ(nonzero, 1);
    }
  }
}

TEST(InputMatrix, ColumnBalance) {
  const auto w = generate_input_matrix(500, 2, 9);
  int first = 0;
  for (int i = 0; i < 500; ++i) first += w.column(i) == 0;
  EXPECT_NEAR(first, 250.0, 3.0 * std::sqrt(500 * 0.25));
}

TEST(MatrixFiles, RoundTrip) {
  const auto dir = std::filesystem::temp_directory_path() / "mfrc_topology_rt";
  std::filesystem::create_directories(dir);
  const auto m = ingest_connectome({{"5", "7", 60}, {"7", "9", 100}, {"9", "5", 120}}, 50);
  const auto scaled = scale_to_spectral_radius(m, 1.2);
  write_matrix(scaled, (dir / "m.csv").string(), (dir / "m.json").string());
  const auto back = read_matrix((dir / "m.csv").string(), (dir / "m.json").string());
  EXPECT_TRUE((back.dense().array() == scaled.dense().array()).all());
  EXPECT_EQ(back.spectral_radius(), scaled.spectral_radius());
  EXPECT_EQ(back.labels(), scaled.labels());
  EXPECT_TRUE(back.is_connectome());
}

}  // namespace
