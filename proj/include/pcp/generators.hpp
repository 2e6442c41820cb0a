#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "pcp/matrix.hpp"

namespace pcp {

enum class GeneratorKind { LowRankPlusNoise, Clustered, PowerLaw };

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::LowRankPlusNoise;
  std::size_t n = 0;
  std::size_t d = 0;
  /// Planted rank (lowrank-plus-noise) or number of blobs (clustered).
  std::size_t rank = 1;
  /// Additive Gaussian noise level η; within-blob spread for clustered data.
  double noise = 0.0;
  /// Singular value decay exponent for powerlaw.
  double alpha = 1.0;
  /// Scale of blob centers for clustered data.
  double separation = 10.0;
  std::uint64_t seed = 0;

  /// Throws ConfigError on missing or inconsistent fields.
  void validate() const;
};

/// Parses "kind:key=value,..." with kind in {lowrank-plus-noise (alias lowrank),
/// clustered, powerlaw} and keys n, d, rank, k, noise, alpha, sep, seed.
/// `default_seed` applies when no seed key is given.
GeneratorSpec parse_generator_spec(std::string_view text, std::uint64_t default_seed = 0);

/// lowrank-plus-noise: U_r diag(r, r−1, …, 1) V_rᵀ + η·G with Haar factors.
/// clustered: row i is center_{i mod k} + η·g_i, centers ~ separation·N(0, I_d/d).
/// powerlaw: U diag(i^(−α)) Vᵀ with Haar U, V of width min(n, d).
Matrix gen_synthetic(const GeneratorSpec& spec);

}  // namespace pcp
