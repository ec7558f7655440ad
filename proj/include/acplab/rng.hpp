#pragma once

#include <cstdint>
#include <random>

namespace acplab {

// Deterministic random source for the whole pipeline.  Every stochastic
// component receives an Rng forked from the master seed with fixed stream
// ids, so results never depend on thread count or evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 significant bits.
  double next_unit() { return (engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound).  Lemire multiply-shift; the bias for any
  // bound that fits in 64 bits is below 2^-64 and irrelevant here.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<__uint128_t>(engine_()) * bound) >> 64);
  }

  // Inclusive integer range.
  std::int64_t next_range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    next_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool next_bit() { return (engine_() >> 63) != 0; }

  std::uint8_t next_byte() { return static_cast<std::uint8_t>(engine_() >> 56); }

  std::mt19937_64& engine() { return engine_; }

  // Derives an independent child stream.  Mixing is splitmix64, applied to
  // the parent seed and each id in turn; the same (seed, ids...) always
  // yields the same child regardless of how much the parent has been used.
  template <class... Ids>
  Rng fork(Ids... ids) const {
    std::uint64_t s = seed_;
    ((s = mix(s + 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(ids))), ...);
    return Rng(mix(s + 0x9E3779B97F4A7C15ULL));
  }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace acplab
