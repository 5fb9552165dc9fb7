#include "mbl/state.hpp"

#include "mbl/errors.hpp"

#include <bit>
#include <string>

namespace mbl {

PureStateVector::PureStateVector(int sites, std::shared_ptr<const SectorBasis> basis, Eigen::VectorXcd amplitudes)
    : sites_(sites), basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {}

PureStateVector PureStateVector::full(int sites, Eigen::VectorXcd amplitudes) {
    if(sites < 0 || sites > 30) throw DomainError("full-space state limited to 30 sites");
    if(amplitudes.size() != (Eigen::Index{1} << sites))
        throw DomainError("full-space state of " + std::to_string(sites) + " sites needs 2^" + std::to_string(sites) +
                          " amplitudes, got " + std::to_string(amplitudes.size()));
    return {sites, nullptr, std::move(amplitudes)};
}

PureStateVector PureStateVector::in_sector(std::shared_ptr<const SectorBasis> basis, Eigen::VectorXcd amplitudes) {
    if(!basis) throw DomainError("sector state needs a basis");
    if(amplitudes.size() != static_cast<Eigen::Index>(basis->size()))
        throw DomainError("sector state size " + std::to_string(amplitudes.size()) + " does not match basis size " +
                          std::to_string(basis->size()));
    const int sites = basis->sites();
    return {sites, std::move(basis), std::move(amplitudes)};
}

PureStateVector PureStateVector::basis_state(int sites, BasisState bits) {
    auto basis = make_sector(sites, std::popcount(bits));
    auto index = basis->index_of(bits);
    if(!index) throw DomainError("basis mask does not fit in " + std::to_string(sites) + " sites");
    Eigen::VectorXcd amps                              = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
    amps(static_cast<Eigen::Index>(*index)) = 1.0;
    return in_sector(std::move(basis), std::move(amps));
}

int PureStateVector::sector() const {
    if(!basis_) throw DomainError("full-space state has no single sector label");
    return basis_->popcount();
}

const SectorBasis &PureStateVector::basis() const {
    if(!basis_) throw DomainError("full-space state has no sector basis");
    return *basis_;
}

Eigen::VectorXcd PureStateVector::to_full() const {
    if(!basis_) return amplitudes_;
    if(sites_ > 30) throw DomainError("full-space expansion limited to 30 sites");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Eigen::Index{1} << sites_);
    for(Eigen::Index i = 0; i < amplitudes_.size(); ++i) out(static_cast<Eigen::Index>(state_at(i))) = amplitudes_(i);
    return out;
}

} // namespace mbl
