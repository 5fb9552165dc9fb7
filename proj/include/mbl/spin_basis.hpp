#pragma once

// Computational basis of a spin-1/2 chain and its total-magnetization sectors.
//
// A basis state is a bitmask: bit (j - 1) holds the label m_j of site j, so site 1
// is the least significant bit. m = 0 is spin up (S^z = +1/2), m = 1 spin down.
// Sectors are labelled by the popcount of the mask, i.e. the number of down spins.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace mbl {

using BasisState = std::uint64_t;

inline constexpr int max_sites = 32;

std::uint64_t binomial(int n, int k);

class SectorBasis {
  public:
    SectorBasis(int sites, int popcount);

    int sites() const { return sites_; }
    int popcount() const { return popcount_; }
    int up_spins() const { return sites_ - popcount_; }
    std::size_t size() const { return states_.size(); }

    std::span<const BasisState> states() const { return states_; }
    BasisState state(std::size_t index) const { return states_[index]; }

    // Position of `state` in this sector; nullopt when the mask has the wrong popcount.
    std::optional<std::size_t> index_of(BasisState state) const;

  private:
    int                     sites_;
    int                     popcount_;
    std::vector<BasisState> states_;
    // rank_table_[p * (popcount + 1) + r] = binomial(p, r) for the combinatorial ranking.
    std::vector<std::uint64_t> rank_table_;
};

// All masks of `sites` bits with the given popcount, ascending.
SectorBasis enumerate_sector(int sites, int popcount);

std::shared_ptr<const SectorBasis> make_sector(int sites, int popcount);

} // namespace mbl
