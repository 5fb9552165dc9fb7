#include "mbl/spin_basis.hpp"

#include "mbl/errors.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace mbl {

std::uint64_t binomial(int n, int k) {
    if(k < 0 || k > n) return 0;
    k                    = std::min(k, n - k);
    std::uint64_t result = 1;
    for(int i = 1; i <= k; ++i) result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return result;
}

SectorBasis::SectorBasis(int sites, int popcount) : sites_(sites), popcount_(popcount) {
    if(sites < 0 || sites > max_sites)
        throw DomainError("site count " + std::to_string(sites) + " outside [0, " + std::to_string(max_sites) + "]");
    if(popcount < 0 || popcount > sites)
        throw DomainError("sector popcount " + std::to_string(popcount) + " outside [0, " + std::to_string(sites) + "]");

    states_.reserve(binomial(sites, popcount));
    if(popcount == 0) {
        states_.push_back(0);
    } else {
        // Gosper's hack walks fixed-popcount masks in increasing order.
        BasisState       mask = (BasisState{1} << popcount) - 1;
        const BasisState end  = BasisState{1} << sites;
        while(mask < end) {
            states_.push_back(mask);
            const BasisState low  = mask & (~mask + 1);
            const BasisState ripple = mask + low;
            mask                  = (((ripple ^ mask) >> 2) / low) | ripple;
        }
    }

    rank_table_.resize(static_cast<std::size_t>(sites + 1) * static_cast<std::size_t>(popcount + 1));
    for(int p = 0; p <= sites; ++p)
        for(int r = 0; r <= popcount; ++r)
            rank_table_[static_cast<std::size_t>(p) * static_cast<std::size_t>(popcount + 1) + static_cast<std::size_t>(r)] =
                binomial(p, r);
}

std::optional<std::size_t> SectorBasis::index_of(BasisState state) const {
    if(sites_ < 64 && (state >> sites_) != 0) return std::nullopt;
    if(std::popcount(state) != popcount_) return std::nullopt;
    // Combinatorial number system: rank = sum_i binomial(position_i, i + 1).
    std::uint64_t rank = 0;
    int           i    = 0;
    while(state != 0) {
        const int pos = std::countr_zero(state);
        rank += rank_table_[static_cast<std::size_t>(pos) * static_cast<std::size_t>(popcount_ + 1) +
                            static_cast<std::size_t>(i + 1)];
        state &= state - 1;
        ++i;
    }
    return static_cast<std::size_t>(rank);
}

SectorBasis enumerate_sector(int sites, int popcount) { return SectorBasis(sites, popcount); }

std::shared_ptr<const SectorBasis> make_sector(int sites, int popcount) {
    return std::make_shared<const SectorBasis>(sites, popcount);
}

} // namespace mbl
