#ifndef QKDPNS_RANDOM_HPP
#define QKDPNS_RANDOM_HPP

#include <cstdint>
#include <limits>

namespace qkdpns {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator, but callers
/// should prefer uniform() since std distributions are not reproducible
/// across standard library implementations.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Independent stream for item `index` of a run seeded with `seed`. The
/// stream depends only on (seed, index), never on scheduling.
inline SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(SplitMix64::mix(seed ^ SplitMix64::mix(index + 0x632BE59BD9B4E019ULL)));
}

}  // namespace qkdpns

#endif  // QKDPNS_RANDOM_HPP
