#pragma once

#include <cstdint>

namespace locsvm {

/// SplitMix64 output finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator. Draw i of the stream identified by `key` is a
/// pure function of (key, i), so results do not depend on the platform's
/// standard library or on how many draws other streams consumed.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0)
      : key_(key), counter_(counter) {}

  /// Derive a stream key from a user seed and named stream identifiers.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub = 0);

  [[nodiscard]] CounterRng substream(std::uint64_t id) const;

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller; always consumes exactly two draws.
  double normal();
  /// Uniform integer in [0, n), n > 0.
  std::uint64_t below(std::uint64_t n);

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

/// Named streams used by the experiment harness. Keeping them disjoint makes
/// the regionalization independent of the training data by construction.
enum class Stream : std::uint64_t {
  training = 1,
  regionalization_split = 2,
  kmeans_init = 3,
  evaluation = 4,
  validation = 5,
  test = 6,
  probes = 7,
  kernel_check = 8,
};

}  // namespace locsvm
