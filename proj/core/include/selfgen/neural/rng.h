#ifndef SELFGEN_NEURAL_RNG_H_
#define SELFGEN_NEURAL_RNG_H_

#include <array>
#include <cstddef>
#include <cstdint>

namespace selfgen {

// xoshiro256** seeded through SplitMix64 from (seed, stream). Every draw is
// computed with integer arithmetic and explicit transforms, so sequences are
// identical on every platform and standard library.
class RngStream {
 public:
  static constexpr const char* kAlgorithm = "xoshiro256**/splitmix64";

  RngStream(std::uint64_t seed = 0, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t NextU64();
  // Uniform on [0, 1) with 53 bits of precision.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n), unbiased.
  std::uint64_t Below(std::uint64_t n);
  // Standard normal via Box-Muller; the second variate is cached.
  double Normal();
  bool Bernoulli(double p) { return Uniform() < p; }

  // Child stream keyed by `id`; independent of this stream's position.
  RngStream Derive(std::uint64_t id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint64_t, 4> state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t SplitMix64(std::uint64_t x);

// Order-dependent hash of a seed and a list of integers, for deriving
// sub-seeds such as (base seed, size, iteration).
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0);

}  // namespace selfgen

#endif  // SELFGEN_NEURAL_RNG_H_
