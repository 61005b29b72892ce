#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace simconf {

// splitmix64 finalizer; used to derive independent seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Deterministic random source. std::mt19937_64 output is fully specified by
// the standard and every variate below is drawn with an explicitly coded
// algorithm, so sequences are reproducible across platforms and compilers
// (unlike std::uniform_int_distribution / std::shuffle).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform double in (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }

  // Unbiased integer in [0, bound) via rejection sampling. bound > 0.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }

  // Standard normal via Box-Muller (no cached spare; two uniforms per call).
  double normal();

  // Gamma(shape, 1) via Marsaglia-Tsang; shape > 0.
  double gamma(double shape);

  // Beta(a, b) via two gamma draws; result clamped to [0, 1].
  double beta(double a, double b);

  // In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // Child generator for stream `stream`, independent of how many draws this
  // generator has made (derivation uses only the construction seed).
  Rng derive(std::uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace simconf
