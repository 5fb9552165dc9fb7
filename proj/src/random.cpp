#include "mbl/random.hpp"

#include "mbl/errors.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace mbl {

std::uint64_t derive_key(std::uint64_t parent, std::uint64_t label) {
    return mix64(parent ^ mix64(label + 0x9e3779b97f4a7c15ULL));
}

std::uint64_t realization_key(std::uint64_t master_seed, int sites, double disorder_strength, std::uint64_t index) {
    const double h = disorder_strength == 0.0 ? 0.0 : disorder_strength; // fold -0.0
    std::uint64_t key = mix64(master_seed + 0x632be59bd9b4e019ULL);
    key               = derive_key(key, static_cast<std::uint64_t>(sites));
    key               = derive_key(key, std::bit_cast<std::uint64_t>(h));
    return derive_key(key, index);
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::gaussian() {
    double u1 = uniform();
    while(u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> sample_fields(double disorder_strength, int sites, std::uint64_t key) {
    if(!(disorder_strength >= 0.0) || !std::isfinite(disorder_strength))
        throw DomainError("disorder strength must be finite and non-negative");
    if(sites < 0) throw DomainError("negative site count");
    std::vector<double> out(static_cast<std::size_t>(sites), 0.0);
    if(disorder_strength == 0.0) return out;
    CounterRng rng(key);
    for(auto &h : out) h = disorder_strength * (2.0 * rng.uniform() - 1.0);
    return out;
}

} // namespace mbl
