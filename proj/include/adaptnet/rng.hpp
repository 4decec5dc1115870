#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>

namespace adaptnet {

// Seeded random stream. The engine is std::mt19937_64; the distributions are
// implemented here so draws are identical across standard library vendors.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unbiased integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  double exponential(double rate);

  /// Independent stream derived from this stream's seed and `stream_id`.
  /// Does not consume draws from *this.
  Rng substream(std::uint64_t stream_id) const;

  std::uint64_t seed() const noexcept { return seed_; }

  std::string save_state() const;
  void load_state(const std::string& state);

  friend bool operator==(const Rng& a, const Rng& b) {
    return a.engine_ == b.engine_ && a.has_spare_ == b.has_spare_ && a.spare_ == b.spare_;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// splitmix64 finalizer; used to derive seeds from (seed, index) pairs.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace adaptnet
