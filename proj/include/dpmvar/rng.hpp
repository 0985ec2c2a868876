#pragma once

#include <cstdint>
#include <limits>

namespace dpmvar {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

// xoshiro256** keyed by (seed, stream). Satisfies UniformRandomBitGenerator,
// so it plugs into <random>/Boost.Random distributions. Handles are cheap to
// construct; derive one per parallel unit instead of sharing.
class RngHandle {
 public:
  using result_type = std::uint64_t;

  RngHandle() : RngHandle(0, 0) {}
  RngHandle(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
    std::uint64_t x = hash_combine(seed, stream);
    for (auto& s : state_) {
      x = splitmix64(x);
      s = x;
    }
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
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

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  // Independent child stream; the parent's sequence is not advanced.
  RngHandle substream(std::uint64_t tag) const { return RngHandle(seed_, hash_combine(stream_, tag)); }
  RngHandle substream(std::uint64_t tag1, std::uint64_t tag2) const {
    return RngHandle(seed_, hash_combine(hash_combine(stream_, tag1), tag2));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t state_[4];
};

}  // namespace dpmvar
