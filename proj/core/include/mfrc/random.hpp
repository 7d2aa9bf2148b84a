#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mfrc {

// All randomness in the library flows through these helpers. std::mt19937_64
// output is fixed by the standard; the std:: distributions are not, so the
// mapping to doubles and indices is done here.

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a over the bytes of `label`.
std::uint64_t hash_label(std::string_view label);

// Stable combination of a seed with a labelled stream name.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v);
std::uint64_t hash_double(double v);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi].
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mfrc
