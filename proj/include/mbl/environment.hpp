#pragma once

#include "mbl/evolution.hpp"
#include "mbl/hamiltonian.hpp"
#include "mbl/state.hpp"

#include <string>
#include <string_view>

namespace mbl {

enum class EnvironmentKind { neel, evolved_neel, mid_spectrum_eigenstate };

std::string_view to_string(EnvironmentKind kind);      // "neel" | "evolved" | "eigenstate"
EnvironmentKind parse_environment(std::string_view text); // throws DomainError

// |0,1,0,1,...> on n sites: spin up on the first site, then alternating.
PureStateVector neel_state(int sites);

// exp(-i H_e t) |Neel>, H_e an open chain.
PureStateVector evolved_neel_state(const BlockedHamiltonian &environment_hamiltonian, double t_neel);

struct MidSpectrumState {
    PureStateVector state;
    double          energy;
};

// Eigenstate at index floor(d/2) of the pooled, ascending spectrum of H_e.
// Degenerate energies are ordered by fewer up spins first, then in-sector index.
MidSpectrumState mid_spectrum_eigenstate(const BlockedHamiltonian &environment_hamiltonian);

} // namespace mbl
