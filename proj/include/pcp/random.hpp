#pragma once

#include <cstdint>
#include <optional>

#include "pcp/matrix.hpp"

namespace pcp {

/// SplitMix64 finalizer: a bijective 64-bit mixing function.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of the `index`-th independent stream derived from `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Counter-based 64-bit generator.
///
/// Draw number i (1-based) of a stream keyed by `seed` is
/// mix64(seed + i * 0x9E3779B97F4A7C15), i.e. SplitMix64 read as a counter
/// mode cipher. Streams are split with `derive_seed`; there is no global
/// state. Normal variates use the Marsaglia polar method and cache the
/// second variate of each accepted pair.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : key_(seed) {}

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept;
  double normal() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_;
};

/// rows x cols matrix of i.i.d. N(0, 1) draws filled row by row.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, CounterRng& rng);

}  // namespace pcp
