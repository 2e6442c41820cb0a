#include "pcp/generators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "pcp/error.hpp"
#include "pcp/linalg.hpp"
#include "pcp/random.hpp"

namespace pcp {

void GeneratorSpec::validate() const {
  if (n == 0 || d == 0) throw ConfigError("generator: n and d must be positive");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("generator: noise must be >= 0");
  switch (kind) {
    case GeneratorKind::LowRankPlusNoise:
      if (rank < 1 || rank > std::min(n, d)) {
        throw ConfigError("generator: rank must lie in [1, min(n, d)]");
      }
      break;
    case GeneratorKind::Clustered:
      if (rank < 1 || rank > n) throw ConfigError("generator: cluster count must lie in [1, n]");
      if (!(separation >= 0.0)) throw ConfigError("generator: separation must be >= 0");
      break;
    case GeneratorKind::PowerLaw:
      if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("generator: alpha must be > 0");
      break;
  }
}

namespace {

double parse_number(std::string_view key, std::string_view value) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size()) {
    throw ConfigError("generator: bad value for '" + std::string(key) + "'");
  }
  return v;
}

std::size_t parse_count(std::string_view key, std::string_view value) {
  const double v = parse_number(key, value);
  if (v < 0 || v != std::floor(v)) {
    throw ConfigError("generator: '" + std::string(key) + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

GeneratorSpec parse_generator_spec(std::string_view text, std::uint64_t default_seed) {
  GeneratorSpec spec;
  spec.seed = default_seed;
  const auto colon = text.find(':');
  const std::string_view kind = text.substr(0, colon);
  if (kind == "lowrank-plus-noise" || kind == "lowrank") {
    spec.kind = GeneratorKind::LowRankPlusNoise;
  } else if (kind == "clustered") {
    spec.kind = GeneratorKind::Clustered;
    spec.noise = 1.0;
    spec.rank = 2;
  } else if (kind == "powerlaw") {
    spec.kind = GeneratorKind::PowerLaw;
  } else {
    throw ConfigError("generator: unknown kind '" + std::string(kind) + "'");
  }
  std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("generator: expected key=value, got '" + std::string(item) + "'");
    }
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "n") spec.n = parse_count(key, value);
    else if (key == "d") spec.d = parse_count(key, value);
    else if (key == "rank" || key == "k" || key == "k_true") spec.rank = parse_count(key, value);
    else if (key == "noise" || key == "eta") spec.noise = parse_number(key, value);
    else if (key == "alpha") spec.alpha = parse_number(key, value);
    else if (key == "sep" || key == "separation") spec.separation = parse_number(key, value);
    else if (key == "seed") spec.seed = parse_count(key, value);
    else throw ConfigError("generator: unknown key '" + std::string(key) + "'");
  }
  spec.validate();
  return spec;
}

Matrix gen_synthetic(const GeneratorSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  const std::size_t d = spec.d;
  Matrix a(n, d);
  switch (spec.kind) {
    case GeneratorKind::LowRankPlusNoise:
    case GeneratorKind::PowerLaw: {
      const std::size_t r = spec.kind == GeneratorKind::PowerLaw ? std::min(n, d) : spec.rank;
      const Matrix u = haar_subspace(n, r, derive_seed(spec.seed, 0)).basis;
      const Matrix v = haar_subspace(d, r, derive_seed(spec.seed, 1)).basis;
      Matrix us = u;
      for (std::size_t j = 0; j < r; ++j) {
        const double s = spec.kind == GeneratorKind::PowerLaw
                             ? std::pow(static_cast<double>(j + 1), -spec.alpha)
                             : static_cast<double>(r - j);
        for (std::size_t i = 0; i < n; ++i) us(i, j) *= s;
      }
      a = matmul_nt(us, v);
      break;
    }
    case GeneratorKind::Clustered: {
      CounterRng centers_rng(derive_seed(spec.seed, 0));
      Matrix centers = gaussian_matrix(spec.rank, d, centers_rng);
      const double scale = spec.separation / std::sqrt(static_cast<double>(d));
      for (double& x : centers.data()) x *= scale;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) a(i, j) = centers(i % spec.rank, j);
      break;
    }
  }
  if (spec.noise > 0.0) {
    CounterRng noise_rng(derive_seed(spec.seed, 2));
    for (double& x : a.data()) x += spec.noise * noise_rng.normal();
  }
  return a;
}

}  // namespace pcp
