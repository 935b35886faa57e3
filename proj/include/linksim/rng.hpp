#ifndef LINKSIM_RNG_HPP
#define LINKSIM_RNG_HPP

#include <cstdint>
#include <span>
#include <stdexcept>

namespace linksim {

// Named stream ids. Keeping arrivals, channel and compression on separate
// streams means a policy change never perturbs the sampled environment.
enum class StreamId : std::uint64_t {
  kArrivals = 0,
  kChannel = 1,
  kCompression = 2,
};

// Deterministic counter-based generator (splitmix64 over a derived state).
// Same (master seed, stream id) always yields the same sequence, bit for bit,
// independent of platform or standard-library version.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, StreamId stream)
      : state_(mix(master_seed ^ (0x9E3779B97F4A7C15ULL *
                                  (static_cast<std::uint64_t>(stream) + 1)))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Draws an index according to `probs` (assumed nonnegative, summing to ~1).
  std::size_t categorical(std::span<const double> probs) {
    const double u = uniform01();
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      cum += probs[i];
      if (u < cum) return i;
    }
    return probs.empty() ? throw std::invalid_argument("empty distribution")
                         : probs.size() - 1;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace linksim

#endif  // LINKSIM_RNG_HPP
