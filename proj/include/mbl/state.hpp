#pragma once

#include "mbl/spin_basis.hpp"

#include <Eigen/Dense>

#include <memory>

namespace mbl {

// Amplitudes over either the full 2^n basis or a single S^z sector.
class PureStateVector {
  public:
    static PureStateVector full(int sites, Eigen::VectorXcd amplitudes);
    static PureStateVector in_sector(std::shared_ptr<const SectorBasis> basis, Eigen::VectorXcd amplitudes);
    // Product state |m_1 ... m_n> stored in its sector.
    static PureStateVector basis_state(int sites, BasisState bits);

    int sites() const { return sites_; }
    bool is_sector() const { return basis_ != nullptr; }
    int sector() const; // popcount label; throws for full-space states
    const SectorBasis &basis() const;
    std::shared_ptr<const SectorBasis> basis_ptr() const { return basis_; }

    const Eigen::VectorXcd &amplitudes() const { return amplitudes_; }
    Eigen::Index size() const { return amplitudes_.size(); }
    double norm() const { return amplitudes_.norm(); }

    // Basis mask of the i-th amplitude.
    BasisState state_at(Eigen::Index i) const {
        return basis_ ? basis_->state(static_cast<std::size_t>(i)) : static_cast<BasisState>(i);
    }

    Eigen::VectorXcd to_full() const;

  private:
    PureStateVector(int sites, std::shared_ptr<const SectorBasis> basis, Eigen::VectorXcd amplitudes);

    int                                sites_;
    std::shared_ptr<const SectorBasis> basis_;
    Eigen::VectorXcd                   amplitudes_;
};

} // namespace mbl
