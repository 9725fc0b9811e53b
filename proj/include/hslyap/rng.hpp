#ifndef HSLYAP_RNG_HPP
#define HSLYAP_RNG_HPP

#include <cstdint>
#include <random>

namespace hslyap {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seeded stream with deterministic splitting. Each split is an independent
// stream owned by exactly one worker; splitting the same (seed, id) twice
// yields the same stream.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), id_(stream_id),
        engine_(splitmix64(seed ^ splitmix64(stream_id + 0x51ab5137ULL))) {}

  RngStream split(std::uint64_t child_id) const {
    return RngStream(seed_, splitmix64(id_ * 0x2545f4914f6cdd1dULL + child_id + 1));
  }

  std::mt19937_64& engine() { return engine_; }

  double uniform01() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  double normal() {
    return std::normal_distribution<double>(0.0, 1.0)(engine_);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return id_; }

 private:
  std::uint64_t seed_, id_;
  std::mt19937_64 engine_;
};

// Disorder distribution: mean 0, variance 1, compact support (the truncated
// Gaussian is cut at 4 sigma and rescaled to unit variance).
enum class Disorder { UniformSqrt3, BinaryPM1, TruncatedGauss };

inline const char* disorder_name(Disorder d) {
  switch (d) {
    case Disorder::UniformSqrt3: return "uniform";
    case Disorder::BinaryPM1: return "binary";
    case Disorder::TruncatedGauss: return "gauss";
  }
  return "?";
}

inline double draw_disorder(Disorder d, RngStream& rng) {
  switch (d) {
    case Disorder::UniformSqrt3: {
      constexpr double s3 = 1.7320508075688772;
      return s3 * (2.0 * rng.uniform01() - 1.0);
    }
    case Disorder::BinaryPM1:
      return rng.uniform01() < 0.5 ? -1.0 : 1.0;
    case Disorder::TruncatedGauss: {
      // var of N(0,1) truncated to [-4,4]: 1 - 8 phi(4)/(2 Phi(4)-1)
      constexpr double rescale = 1.0005357681102652;  // 1/sqrt(var)
      double x;
      do { x = rng.normal(); } while (std::abs(x) > 4.0);
      return rescale * x;
    }
  }
  return 0.0;
}

}  // namespace hslyap

#endif
