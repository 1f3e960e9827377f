#pragma once

#include <cstdint>

namespace dynspec {

// Finalizer of the splitmix64 generator; a bijective 64-bit scramble.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Counter-based splittable generator: the i-th draw is mix64(seed + i*gamma),
// so streams are cheap to fork and independent of consumption order.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Derived stream, decorrelated from this one and from other indices.
    SplitMix64 split(std::uint64_t index) const {
        return SplitMix64(mix64(state_ ^ mix64(index + 0x632be59bd9b4e019ull)));
    }

  private:
    std::uint64_t state_;
};

// Stream for one shard of a seeded ensemble.
inline SplitMix64 shard_stream(std::uint64_t seed, std::uint64_t shard) {
    return SplitMix64(mix64(seed + 0x9e3779b97f4a7c15ull) ^ mix64(shard + 0x632be59bd9b4e019ull));
}

}  // namespace dynspec
