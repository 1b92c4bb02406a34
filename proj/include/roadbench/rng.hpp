#pragma once

#include <cstdint>

namespace roadbench {

// splitmix64 (Steele/Lea/Flood): used only to scramble user seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// xorshift64* (Vigna): shifts 12/25/27, multiplier 0x2545F4914F6CDD1D.
// The state is one splitmix64 scramble of the seed so seed 0 is usable;
// this exact construction is the cross-language reproducibility contract
// for query-set generation (documented in the README).
class Xorshift64Star {
  public:
    explicit Xorshift64Star(std::uint64_t seed) : s_(splitmix64(seed)) {
        if (s_ == 0) s_ = 0x9E3779B97F4A7C15ULL;
    }

    std::uint64_t next() {
        s_ ^= s_ >> 12;
        s_ ^= s_ << 25;
        s_ ^= s_ >> 27;
        return s_ * 0x2545F4914F6CDD1DULL;
    }

    // Plain modulo reduction, kept for cross-language reproducibility.
    std::uint64_t next_below(std::uint64_t n) { return n ? next() % n : 0; }

  private:
    std::uint64_t s_;
};

// Independent deterministic substream for (seed, salt); used for per-source
// sampling so parallel generation stays byte-identical.
inline Xorshift64Star substream(std::uint64_t seed, std::uint64_t salt) {
    return Xorshift64Star(seed ^ splitmix64(salt + 0x5851F42D4C957F2DULL));
}

}  // namespace roadbench
