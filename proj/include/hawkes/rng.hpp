#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hawkes {

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(mix_seed(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 1));
}

// Seedable, splittable generator. mt19937_64 output is fixed by the standard,
// and the variates below are computed by hand, so streams are portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix_seed(seed)) {}

  // Independent child stream, e.g. one per simulated sequence.
  Rng split(std::uint64_t stream) const { return Rng(derive_seed(seed_, stream)); }

  // Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Exponential waiting time with the given rate (rate > 0).
  double exponential(double rate) { return -std::log(uniform()) / rate; }

  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace hawkes
