#pragma once

#include <cstdint>

namespace pca {

// Counter-based stream: output i of stream s is a pure function of
// (seed, s, i), so replicas can be assigned to threads in any order
// without changing results.
inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix64(seed + kGolden) ^ mix64(kGolden * (stream + 1))) {}

    std::uint64_t next_u64() { return mix64(key_ + kGolden * ++counter_); }

    // uniform in [0,1) with 53 random bits
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t counter() const { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Direct keyed access used by the lattice stepper: the draw for site i at
// step t is addressed by counter t*n_sites+i, independent of evaluation order.
inline double unit_at(std::uint64_t key, std::uint64_t counter) {
    return static_cast<double>(mix64(key + kGolden * (counter + 1)) >> 11) * 0x1.0p-53;
}

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
    return mix64(seed + kGolden) ^ mix64(kGolden * (stream + 1));
}

}  // namespace pca
