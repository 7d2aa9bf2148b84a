// Writes the synthetic connectome edge list used for FFRC runs. The graph has
// 426 neurons that keep at least one edge at threshold 50, hub-dominated
// in-degrees, heavy-tailed synapse counts, plus sub-threshold edges, extra
// neurons that only have weak edges, self-loops and split duplicate lines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mfrc/random.hpp"
#include "mfrc/topology.hpp"

namespace {

constexpr int kCore = 426;
constexpr int kWeakOnly = 40;
constexpr long long kThreshold = 50;
constexpr std::uint64_t kSeed = 0x1a7e4a1ULL;

// Pareto-distributed count >= lo with tail index alpha.
long long pareto(mfrc::Rng& rng, double lo, double alpha, long long cap) {
  const double u = 1.0 - rng.uniform01();
  return std::min<long long>(cap, static_cast<long long>(lo * std::pow(u, -1.0 / alpha)));
}

std::string body_id(int i) { return std::to_string(5813000000LL + 7919LL * i); }

}  // namespace

int main(int argc, char** argv) {
  const std::string path = argc > 1 ? argv[1] : "lh_fixture_edges.csv";
  mfrc::Rng rng(kSeed);

  // Hub attractiveness per neuron: a few neurons receive most strong input.
  std::vector<double> pull(kCore);
  double total_pull = 0.0;
  for (auto& p : pull) {
    p = std::pow(1.0 - rng.uniform01(), -1.0 / 1.3);
    total_pull += p;
  }
  auto pick_target = [&]() {
    double x = rng.uniform01() * total_pull;
    for (int j = 0; j < kCore; ++j) {
      x -= pull[j];
      if (x < 0.0) return j;
    }
    return kCore - 1;
  };

  std::map<std::pair<int, int>, long long> strong;
  for (int i = 0; i < kCore; ++i) {
    // Guarantee every core neuron survives thresholding.
    const int ring = (i + 1) % kCore;
    strong[{i, ring}] = kThreshold + pareto(rng, 1.0, 1.1, 600);
    const int extra = static_cast<int>(rng.below(9));
    for (int k = 0; k < extra; ++k) {
      const int j = pick_target();
      if (j == i) continue;
      strong[{i, j}] = pareto(rng, static_cast<double>(kThreshold), 1.6, 1500);
    }
  }

  mfrc::ConnectomeEdgeList edges;
  for (const auto& [key, count] : strong) {
    const auto [i, j] = key;
    if (rng.bernoulli(0.08) && count >= 2 * kThreshold) {
      // Split into two lines whose parts sit below threshold only after merge.
      const long long part = count / 2;
      edges.push_back({body_id(i), body_id(j), part});
      edges.push_back({body_id(i), body_id(j), count - part});
    } else {
      edges.push_back({body_id(i), body_id(j), count});
    }
  }

  // Two duplicates that only cross the threshold once merged.
  edges.push_back({body_id(3), body_id(200), 30});
  edges.push_back({body_id(3), body_id(200), 30});

  // Sub-threshold edges among core neurons.
  for (int k = 0; k < 3 * kCore; ++k) {
    const int i = static_cast<int>(rng.below(kCore));
    const int j = static_cast<int>(rng.below(kCore));
    if (i == j || strong.count({i, j})) continue;
    edges.push_back({body_id(i), body_id(j), 1 + static_cast<long long>(rng.below(kThreshold - 1))});
  }

  // Self-loops, some strong enough to survive the threshold.
  for (int k = 0; k < 25; ++k) {
    const int i = static_cast<int>(rng.below(kCore));
    edges.push_back({body_id(i), body_id(i), 10 + static_cast<long long>(rng.below(200))});
  }

  // Neurons connected only through weak edges; dropped at threshold 50.
  for (int w = 0; w < kWeakOnly; ++w) {
    const int id = kCore + w;
    const int partner = static_cast<int>(rng.below(kCore));
    edges.push_back({body_id(id), body_id(partner), 1 + static_cast<long long>(rng.below(kThreshold - 1))});
    edges.push_back({body_id(partner), body_id(id), 1 + static_cast<long long>(rng.below(kThreshold - 1))});
  }

  std::ofstream out(path);
  if (!out) {
    std::cerr << "cannot write " << path << '\n';
    return 1;
  }
  out << "# synthetic lateral-horn-like connectome fixture (deterministic, seed "
      << kSeed << ")\n";
  mfrc::write_edge_list(out, edges);
  std::cerr << "wrote " << edges.size() << " edge lines to " << path << '\n';
  return 0;
}
