#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sgner {

/// Derives an independent seed for a named consumer ("init", "shuffle",
/// "synth", ...) so that adding draws in one stream never shifts another.
std::uint64_t stream_seed(std::uint64_t base_seed, std::string_view stream);

/// mt19937_64 with distribution code written out explicitly, so that draws
/// are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t base_seed, std::string_view stream)
      : engine_(stream_seed(base_seed, stream)) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi] (inclusive).
  int uniform_int(int lo, int hi);
  double normal(double mean, double stddev);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sgner
