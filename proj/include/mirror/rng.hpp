#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

// Deterministic random numbers with explicitly specified algorithms.
//
// The standard <random> engines are portable but the *distributions* are
// implementation-defined, so normal/uniform draws differ across standard
// libraries. Everything here is pinned down to the bit so that models,
// predictions and reports reproduce exactly on any conforming compiler:
// xoshiro256** for the stream, splitmix64 for seeding, Box-Muller for
// normals, 53-bit mantissa scaling for uniforms.

namespace mirror {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derive an independent stream key from a base seed plus a purpose tag and
/// optional indices/ids. FNV-1a over the parts keeps unrelated streams
/// (per-sample, per-round, per-side) decorrelated and order-independent.
inline std::uint64_t derive_key(std::uint64_t seed, std::string_view tag,
                                std::uint64_t index = 0,
                                std::string_view id = {}) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_byte = [&h](unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(seed >> (8 * i)));
  for (char c : tag) mix_byte(static_cast<unsigned char>(c));
  mix_byte(0x1f);  // separator so ("ab","c") != ("a","bc")
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(index >> (8 * i)));
  for (char c : id) mix_byte(static_cast<unsigned char>(c));
  return h;
}

/// xoshiro256** generator with Box-Muller normals.
class Rng {
 public:
  explicit Rng(std::uint64_t key) {
    std::uint64_t sm = key;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53 random mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; one value per call, cached pair-wise.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    // Guard log(0); smallest representable draw keeps the tail finite.
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mirror
