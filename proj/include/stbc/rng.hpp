#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <cstdint>
#include <random>

namespace stbc {

/// (master_seed, stream_index) names one independent random stream. Monte
/// Carlo trial t always draws from stream t, whatever thread runs it.
struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// xoshiro256** (Blackman & Vigna), state filled from a splitmix64 sequence.
/// One engine is built per trial, so construction has to be cheap; seeding
/// std::mt19937_64 costs more than most trials.
class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256StarStar(std::uint64_t seed) {
    for (auto& w : s_) {
      w = splitmix64(seed);
      seed += 0x9E3779B97F4A7C15ULL;
    }
  }

  static Xoshiro256StarStar from_state(const std::array<std::uint64_t, 4>& state) {
    Xoshiro256StarStar e(0);
    std::copy(state.begin(), state.end(), e.s_);
    return e;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const std::uint64_t out = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return out;
  }

  friend bool operator==(const Xoshiro256StarStar&, const Xoshiro256StarStar&) = default;

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

using Engine = Xoshiro256StarStar;

/// Mixes a tag into a seed, e.g. to give each experiment row its own master seed.
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(splitmix64(seed) ^ splitmix64(tag + 0x632BE59BD9B4E019ULL));
}

inline Engine make_engine(RngSpec spec) { return Engine(derive_seed(spec.master_seed, spec.stream_index)); }

/// Circular complex Gaussian, zero mean, unit variance (each part variance 1/2).
class ComplexGaussian {
 public:
  template <class Urbg>
  std::complex<double> operator()(Urbg& gen) {
    const double re = normal_(gen);
    const double im = normal_(gen);
    return {re, im};
  }

 private:
  std::normal_distribution<double> normal_{0.0, 0.70710678118654752440};
};

}  // namespace stbc
