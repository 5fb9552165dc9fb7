#pragma once

// Exact unitary evolution from per-sector eigendecompositions.

#include "mbl/hamiltonian.hpp"
#include "mbl/state.hpp"

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

namespace mbl {

struct SectorSpectrum {
    std::shared_ptr<const SectorBasis> basis;
    Eigen::VectorXd                    energies; // ascending
    Eigen::MatrixXd                    vectors;  // orthonormal columns
};

class SpectralDecomposition {
  public:
    SpectralDecomposition(int sites, std::map<int, SectorSpectrum> sectors);

    int sites() const { return sites_; }
    bool has_sector(int popcount) const { return sectors_.contains(popcount); }
    const SectorSpectrum &sector(int popcount) const;
    std::vector<int> sectors() const;

    // max over sectors of |V diag(E) V^T - H| / |H| (Frobenius).
    double reconstruction_error(const BlockedHamiltonian &hamiltonian) const;
    // max over sectors of |V^T V - 1| (max-abs entry).
    double orthonormality_error() const;

  private:
    int                           sites_;
    std::map<int, SectorSpectrum> sectors_;
};

// Throws ComputationError naming the sector if the eigensolver fails.
SectorSpectrum diagonalize(const BlockedHamiltonian::Block &block);

SpectralDecomposition decompose(const BlockedHamiltonian &hamiltonian);
SpectralDecomposition decompose(const BlockedHamiltonian &hamiltonian, const std::vector<int> &sectors);

// V exp(-i E t) V^T psi0. Full-space states are split across sectors and reassembled.
PureStateVector evolve(const PureStateVector &psi0, const SpectralDecomposition &decomp, double t);

// Receives the propagated amplitudes of initial state `state` at time index `time`.
using PropagationSink = std::function<void(std::size_t time, std::size_t state, const double *re, const double *im)>;

// Propagates every column of `initial` (in sector basis order) to every time.
// Sinks are called in increasing time order; within a time, in state order.
void propagate_batch(const SectorSpectrum &spectrum, const Eigen::MatrixXcd &initial, std::span<const double> times,
                     const PropagationSink &sink);

} // namespace mbl
