#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace upbwit {

std::uint64_t splitmix64(std::uint64_t x);

// FNV-1a, stable across platforms; used to derive per-item seeds.
std::uint64_t stable_hash(std::string_view text);

/// Seedable, splittable pseudo-random generator.
///
/// Every stochastic routine takes an Rng explicitly. The full generator
/// state, including the cached half of the Gaussian pair, serializes to a
/// string so that interrupted runs resume bit-identically.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  std::uint64_t next_u64() { return engine_(); }

  // Independent child stream. Advances this generator by one draw.
  Rng split();

  std::string serialize() const;
  static Rng deserialize(const std::string& text);

  bool operator==(const Rng& other) const;

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace upbwit
