#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace retro {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Counter-based SplitMix64 stream: the i-th output is mix64(key + i * gamma),
/// so a stream is fully described by its key and position. Streams for
/// (seed, trial, voter, ...) paths are split with derive(), which makes
/// results independent of evaluation order.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  /// Key for the stream at `path` below `seed`.
  static CounterRng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double next_unit() noexcept;
  /// Uniform in (0, 1].
  double next_open_unit() noexcept { return 1.0 - next_unit(); }
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Standard normal (Marsaglia polar method).
  double next_normal() noexcept;

  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] std::uint64_t position() const noexcept { return counter_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next_u64(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace retro
