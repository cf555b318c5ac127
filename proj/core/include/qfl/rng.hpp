#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace qfl {

// splitmix64 finalizer, used for seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Value-type handle for a deterministic RNG stream. A child stream depends
// only on the parent seed and the tags, never on how much the parent has
// consumed, so work can be partitioned across threads without changing any
// draw.
struct RngSeed {
  std::uint64_t value = 0;

  RngSeed child(std::uint64_t a) const { return RngSeed{splitmix64(value ^ splitmix64(a))}; }
  RngSeed child(std::uint64_t a, std::uint64_t b) const { return child(a).child(b); }
  RngSeed child(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    return child(a).child(b).child(c);
  }
};

// mt19937_64 with hand-rolled distributions. std:: distribution objects are
// implementation-defined, which would break bit-for-bit reproducibility of
// experiment outputs across toolchains.
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.value) {}
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Uniform integer in [0, n), n > 0.
  std::uint64_t uniform_int(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Gamma(shape alpha, scale 1), Marsaglia-Tsang.
  double gamma(double alpha);

  // Symmetric Dirichlet over n components.
  std::vector<double> dirichlet(double alpha, std::size_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace qfl
