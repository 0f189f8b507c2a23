#pragma once

#include <cstdint>
#include <span>

namespace wrmc {

/// SplitMix64 generator with cheap independent streams.
///
/// The state advances by a fixed odd constant and every output is a hash of
/// the counter, so a stream is a pure function of (master seed, stream id).
/// Replication r of a benchmark uses stream(r); workers never share state.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : state_(seed) {}

  /// Stream derived from (master, stream_id); distinct ids give
  /// statistically independent sequences.
  static SplitRng stream(std::uint64_t master, std::uint64_t stream_id) {
    return SplitRng(mix(master + kGamma * (stream_id + 1)));
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

/// Inverse-CDF draw over weights in storage order. Deterministic across
/// platforms: first index whose cumulative weight exceeds u wins; if u lands
/// past the accumulated total (weights summing just under 1), the last
/// positive-weight index is returned.
inline std::size_t sample_discrete(std::span<const double> weights, double u) {
  double cum = 0.0;
  std::size_t last_positive = 0;
  bool seen = false;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) {
      last_positive = i;
      seen = true;
    }
    cum += weights[i];
    if (u < cum && weights[i] > 0.0) return i;
  }
  return seen ? last_positive : 0;
}

}  // namespace wrmc
