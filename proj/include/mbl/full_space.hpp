#pragma once

// Dense 2^L reference path: no sector blocking, no SIMD kernels. Small L only;
// kept as the oracle the blocked pipeline is checked against.

#include "mbl/hamiltonian.hpp"
#include "mbl/holevo.hpp"
#include "mbl/state.hpp"

#include <Eigen/Dense>

#include <span>

namespace mbl::full_space {

inline constexpr int max_sites = 12;

// Sum of J S_i.S_j over bonds plus J h_j S^z_j, assembled from single-site Pauli matrices.
Eigen::MatrixXcd hamiltonian(const DisorderedChainSpec &spec);

// Index-loop partial trace keeping the low `message_sites` bits.
Eigen::MatrixXcd partial_trace(const Eigen::VectorXcd &psi, int sites, int message_sites);

HolevoTrace holevo_rate_trace(const DisorderedChainSpec &spec, const PureStateVector &environment,
                              const MessageEnsemble &ensemble, std::span<const double> times);

} // namespace mbl::full_space
