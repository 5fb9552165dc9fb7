#include "mbl/hamiltonian.hpp"

#include "mbl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

namespace mbl {

DisorderedChainSpec::DisorderedChainSpec(int sites, int message_sites, std::vector<double> fields, Topology topology,
                                         double exchange, std::optional<double> disorder_strength)
    : sites_(sites), message_sites_(message_sites), exchange_(exchange), fields_(std::move(fields)),
      topology_(topology), disorder_strength_(disorder_strength) {
    if(sites < 1 || sites > max_sites) throw DomainError("chain length " + std::to_string(sites) + " out of range");
    if(topology == Topology::ring) {
        if(sites < 3) throw DomainError("ring topology needs at least 3 sites, got " + std::to_string(sites));
        if(message_sites < 1 || message_sites >= sites)
            throw DomainError("message length must satisfy 1 <= l < L (l=" + std::to_string(message_sites) +
                              ", L=" + std::to_string(sites) + ")");
    } else {
        message_sites_ = 0;
    }
    if(static_cast<int>(fields_.size()) != sites)
        throw DomainError("expected " + std::to_string(sites) + " fields, got " + std::to_string(fields_.size()));
    for(double h : fields_)
        if(!std::isfinite(h)) throw DomainError("field values must be finite");
    if(!std::isfinite(exchange_)) throw DomainError("exchange must be finite");
    if(disorder_strength_) {
        if(*disorder_strength_ < 0.0) throw DomainError("disorder strength must be non-negative");
        for(double h : fields_)
            if(std::abs(h) > *disorder_strength_)
                throw DomainError("field " + std::to_string(h) + " exceeds disorder strength " +
                                  std::to_string(*disorder_strength_));
    }
}

DisorderedChainSpec DisorderedChainSpec::ring(int sites, int message_sites, std::vector<double> fields) {
    return {sites, message_sites, std::move(fields), Topology::ring};
}

DisorderedChainSpec DisorderedChainSpec::open(std::vector<double> fields) {
    const int n = static_cast<int>(fields.size());
    return {n, 0, std::move(fields), Topology::open};
}

DisorderedChainSpec DisorderedChainSpec::environment_chain() const {
    if(topology_ != Topology::ring) throw DomainError("environment chain is only defined for a ring instance");
    std::vector<double> env(fields_.begin() + message_sites_, fields_.end());
    return {environment_sites(), 0, std::move(env), Topology::open, exchange_, disorder_strength_};
}

std::vector<std::pair<int, int>> bonds(const DisorderedChainSpec &spec) {
    const int                        n = spec.sites();
    std::vector<std::pair<int, int>> out;
    if(spec.topology() == Topology::open) {
        for(int j = 0; j + 1 < n; ++j) out.emplace_back(j, j + 1);
        return out;
    }
    const int l = spec.message_sites();
    for(int j = 0; j + 1 < l; ++j) out.emplace_back(j, j + 1); // H_s
    for(int j = l; j + 1 < n; ++j) out.emplace_back(j, j + 1); // H_e
    out.emplace_back(l - 1, l);                                // H_se: (l, l+1)
    out.emplace_back(0, n - 1);                                // H_se: (1, L)

    std::set<std::pair<int, int>> seen;
    for(auto [a, b] : out)
        if(!seen.emplace(std::min(a, b), std::max(a, b)).second) throw DomainError("ring bond counted twice");
    return out;
}

Eigen::MatrixXd build_sector_block(const DisorderedChainSpec &spec, const SectorBasis &basis) {
    if(basis.sites() != spec.sites()) throw DomainError("sector basis does not match chain length");
    const auto   bond_list = bonds(spec);
    const auto  &fields    = spec.fields();
    const double J         = spec.exchange();
    const auto   dim       = static_cast<Eigen::Index>(basis.size());

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for(Eigen::Index col = 0; col < dim; ++col) {
        const BasisState s    = basis.state(static_cast<std::size_t>(col));
        double           diag = 0.0;
        for(std::size_t j = 0; j < fields.size(); ++j) diag += fields[j] * (((s >> j) & 1U) ? -0.5 : 0.5);
        for(auto [a, b] : bond_list) {
            const bool differ = (((s >> a) ^ (s >> b)) & 1U) != 0;
            if(!differ) {
                diag += 0.25;
                continue;
            }
            diag -= 0.25;
            // S+S- + S-S+ flips an anti-aligned pair and never leaves the sector.
            const BasisState flipped = s ^ ((BasisState{1} << a) | (BasisState{1} << b));
            const auto       row     = basis.index_of(flipped);
            if(!row) throw ComputationError("hopping term left its magnetization sector");
            h(static_cast<Eigen::Index>(*row), col) += 0.5 * J;
        }
        h(col, col) += J * diag;
    }
    return h;
}

BlockedHamiltonian::BlockedHamiltonian(DisorderedChainSpec spec, std::map<int, Block> blocks)
    : spec_(std::move(spec)), blocks_(std::move(blocks)) {}

const BlockedHamiltonian::Block &BlockedHamiltonian::block(int popcount) const {
    auto it = blocks_.find(popcount);
    if(it == blocks_.end()) throw DomainError("Hamiltonian has no block for sector " + std::to_string(popcount));
    return it->second;
}

std::vector<int> BlockedHamiltonian::sectors() const {
    std::vector<int> out;
    for(const auto &[p, _] : blocks_) out.push_back(p);
    return out;
}

Eigen::MatrixXd BlockedHamiltonian::to_dense() const {
    const int n = sites();
    if(n > 14) throw DomainError("dense reconstruction limited to 14 sites");
    const Eigen::Index full = Eigen::Index{1} << n;
    Eigen::MatrixXd    out  = Eigen::MatrixXd::Zero(full, full);
    for(const auto &[_, blk] : blocks_) {
        const auto states = blk.basis->states();
        for(std::size_t c = 0; c < states.size(); ++c)
            for(std::size_t r = 0; r < states.size(); ++r)
                out(static_cast<Eigen::Index>(states[r]), static_cast<Eigen::Index>(states[c])) =
                    blk.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    return out;
}

BlockedHamiltonian build_hamiltonian(const DisorderedChainSpec &spec) {
    std::vector<int> all(static_cast<std::size_t>(spec.sites() + 1));
    for(int p = 0; p <= spec.sites(); ++p) all[static_cast<std::size_t>(p)] = p;
    return build_hamiltonian(spec, all);
}

BlockedHamiltonian build_hamiltonian(const DisorderedChainSpec &spec, const std::vector<int> &sectors) {
    std::map<int, BlockedHamiltonian::Block> blocks;
    for(int p : sectors) {
        if(blocks.contains(p)) continue;
        auto basis = make_sector(spec.sites(), p);
        auto mat   = build_sector_block(spec, *basis);
        blocks.emplace(p, BlockedHamiltonian::Block{std::move(basis), std::move(mat)});
    }
    return {spec, std::move(blocks)};
}

} // namespace mbl
