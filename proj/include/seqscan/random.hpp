#pragma once

#include <cstdint>
#include <random>

namespace seqscan {

/// Seeded pseudo-random stream owned by a single episode.
///
/// Substreams are addressed by (master seed, stream index) and mixed through
/// splitmix64, so episode i draws the same numbers no matter which thread
/// runs it or in what order.
class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed) : engine_(mix(seed)) {}
  RandomStream(std::uint64_t master_seed, std::uint64_t stream_index)
      : engine_(mix(master_seed ^ mix(stream_index + 0x632be59bd9b4e019ULL))) {}

  /// Uniform draw in [0, 1).
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  engine_type& engine() { return engine_; }

  static std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  engine_type engine_;
};

}  // namespace seqscan
