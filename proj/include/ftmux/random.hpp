#pragma once

// Counter-based random streams. A stream is identified by a key derived from
// (seed, labels...), and its k-th output is a pure function of (key, k), so
// any sample can be regenerated without replaying earlier ones.

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace ftmux {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds labels into a seed; order-sensitive.
constexpr std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
  std::uint64_t key = mix64(seed ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t label : labels) key = mix64(key ^ mix64(label + 0x9e3779b97f4a7c15ULL));
  return key;
}

/// Stream labels used by the simulator.
enum class StreamLabel : std::uint64_t {
  GridHead = 1,  ///< bins up to and including a row's batch end
  GridTail = 2,  ///< bins after a row's batch end
  BatchSize = 3, ///< per-m sub-seeds of a batch-size scan
};

/// UniformRandomBitGenerator whose k-th draw is mix64(key + k * golden).
class CounterStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterStream(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform double in (0, 1].
  constexpr double uniform_open0() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }
  /// Uniform double in [0, 1).
  constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  constexpr std::uint64_t key() const { return key_; }
  constexpr std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ftmux
