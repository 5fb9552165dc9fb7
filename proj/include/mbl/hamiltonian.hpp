#pragma once

// Disordered Heisenberg chains and their Hamiltonians, block-diagonal in total S^z.

#include "mbl/spin_basis.hpp"

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace mbl {

enum class Topology { ring, open };

// One physical instance: site count, message length, exchange energy and the
// on-site field of every site. Validated on construction and immutable after.
class DisorderedChainSpec {
  public:
    // Ring: sites >= 3 and 1 <= message_sites < sites. Open: sites >= 1, message_sites ignored.
    DisorderedChainSpec(int sites, int message_sites, std::vector<double> fields, Topology topology,
                        double exchange = 1.0, std::optional<double> disorder_strength = std::nullopt);

    static DisorderedChainSpec ring(int sites, int message_sites, std::vector<double> fields);
    static DisorderedChainSpec open(std::vector<double> fields);

    int sites() const { return sites_; }
    int message_sites() const { return message_sites_; }
    int environment_sites() const { return sites_ - message_sites_; }
    double exchange() const { return exchange_; }
    const std::vector<double> &fields() const { return fields_; }
    Topology topology() const { return topology_; }
    std::optional<double> disorder_strength() const { return disorder_strength_; }

    // The open chain on sites l+1..L carrying this instance's environment fields.
    DisorderedChainSpec environment_chain() const;

  private:
    int                   sites_;
    int                   message_sites_;
    double                exchange_;
    std::vector<double>   fields_;
    Topology              topology_;
    std::optional<double> disorder_strength_;
};

// Nearest-neighbour bonds as 0-based site pairs. The ring is the union of the
// message segment, the environment segment and the two coupling bonds (l, l+1), (1, L).
std::vector<std::pair<int, int>> bonds(const DisorderedChainSpec &spec);

class BlockedHamiltonian {
  public:
    struct Block {
        std::shared_ptr<const SectorBasis> basis;
        Eigen::MatrixXd                    matrix; // real symmetric
    };

    BlockedHamiltonian(DisorderedChainSpec spec, std::map<int, Block> blocks);

    const DisorderedChainSpec &spec() const { return spec_; }
    int sites() const { return spec_.sites(); }

    bool has_sector(int popcount) const { return blocks_.contains(popcount); }
    const Block &block(int popcount) const;
    std::vector<int> sectors() const;

    // Reassembles the full 2^n x 2^n matrix (small n only; used for checks).
    Eigen::MatrixXd to_dense() const;

  private:
    DisorderedChainSpec  spec_;
    std::map<int, Block> blocks_;
};

// Builds every sector.
BlockedHamiltonian build_hamiltonian(const DisorderedChainSpec &spec);
// Builds only the listed sectors (popcount labels).
BlockedHamiltonian build_hamiltonian(const DisorderedChainSpec &spec, const std::vector<int> &sectors);

Eigen::MatrixXd build_sector_block(const DisorderedChainSpec &spec, const SectorBasis &basis);

} // namespace mbl
