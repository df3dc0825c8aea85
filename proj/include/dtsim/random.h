#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace dtsim {

// Seed-splitting scheme: every random stream in the toolchain is seeded with
// derive_seed(root, tags...), which folds each tag into the root through the
// splitmix64 finalizer. Streams with distinct tag tuples are independent.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags);

// Stream tags used with derive_seed.
inline constexpr std::uint64_t kTagTape = 0x74617065;      // "tape"
inline constexpr std::uint64_t kTagTrain = 0x747261696e;   // "train"
inline constexpr std::uint64_t kTagTest = 0x74657374;      // "test"
inline constexpr std::uint64_t kTagGen = 0x67656e;         // "gen"
inline constexpr std::uint64_t kTagFilter = 0x66696c74;    // "filt"
inline constexpr std::uint64_t kTagSites = 0x73697465;     // "site"

// mt19937_64 with platform-independent bounded draws (the std distributions
// are implementation-defined, which would break cross-platform replay).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);
  // Uniform double in [0, 1).
  double unit();
  bool coin() { return (engine_() >> 63) != 0; }
  // Index drawn with probability proportional to weights[i]; weights must
  // not all be zero.
  std::size_t weighted(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

}  // namespace dtsim
