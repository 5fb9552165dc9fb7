#pragma once

// Counter-based random streams. A stream is a 64-bit key; draw i is a pure
// function of (key, i), so any realization can be regenerated in isolation.

#include <cstdint>
#include <vector>

namespace mbl {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Key for one (size, disorder strength, realization) cell of a sweep.
std::uint64_t realization_key(std::uint64_t master_seed, int sites, double disorder_strength, std::uint64_t index);

// Key for an auxiliary stream (bootstrap resample b, etc.).
std::uint64_t derive_key(std::uint64_t parent, std::uint64_t label);

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }
    double uniform();  // [0, 1), 53 random bits
    double gaussian(); // standard normal (Box-Muller, one value per call)

    std::uint64_t key() const { return key_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// L independent draws uniform on [-h, h).
std::vector<double> sample_fields(double disorder_strength, int sites, std::uint64_t key);

} // namespace mbl
