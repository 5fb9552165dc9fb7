#include "mbl/environment.hpp"

#include "mbl/errors.hpp"

#include <algorithm>
#include <string>
#include <tuple>
#include <vector>

namespace mbl {

std::string_view to_string(EnvironmentKind kind) {
    switch(kind) {
        case EnvironmentKind::neel: return "neel";
        case EnvironmentKind::evolved_neel: return "evolved";
        case EnvironmentKind::mid_spectrum_eigenstate: return "eigenstate";
    }
    return "unknown";
}

EnvironmentKind parse_environment(std::string_view text) {
    if(text == "neel") return EnvironmentKind::neel;
    if(text == "evolved" || text == "evolved_neel") return EnvironmentKind::evolved_neel;
    if(text == "eigenstate" || text == "mid_spectrum_eigenstate") return EnvironmentKind::mid_spectrum_eigenstate;
    throw DomainError("unknown environment '" + std::string(text) + "' (expected neel, evolved or eigenstate)");
}

PureStateVector neel_state(int sites) {
    if(sites < 1) throw DomainError("Neel state needs at least one site");
    BasisState bits = 0;
    for(int j = 1; j < sites; j += 2) bits |= BasisState{1} << j;
    return PureStateVector::basis_state(sites, bits);
}

PureStateVector evolved_neel_state(const BlockedHamiltonian &environment_hamiltonian, double t_neel) {
    if(environment_hamiltonian.spec().topology() != Topology::open)
        throw DomainError("environment Hamiltonian must be an open chain");
    const auto neel   = neel_state(environment_hamiltonian.sites());
    const auto decomp = decompose(environment_hamiltonian, {neel.sector()});
    auto       out    = evolve(neel, decomp, t_neel);
    // Renormalize away rounding drift.
    return PureStateVector::in_sector(out.basis_ptr(), out.amplitudes() / out.norm());
}

MidSpectrumState mid_spectrum_eigenstate(const BlockedHamiltonian &environment_hamiltonian) {
    if(environment_hamiltonian.spec().topology() != Topology::open)
        throw DomainError("environment Hamiltonian must be an open chain");
    const int n = environment_hamiltonian.sites();
    if(static_cast<int>(environment_hamiltonian.sectors().size()) != n + 1)
        throw DomainError("mid-spectrum selection needs every sector of H_e");

    const auto decomp = decompose(environment_hamiltonian);

    struct Level {
        double      energy;
        int         up_spins;
        std::size_t index;
        int         sector;
    };
    std::vector<Level> levels;
    levels.reserve(std::size_t{1} << n);
    for(int p : decomp.sectors()) {
        const auto &s = decomp.sector(p);
        for(Eigen::Index i = 0; i < s.energies.size(); ++i)
            levels.push_back({s.energies(i), n - p, static_cast<std::size_t>(i), p});
    }
    std::sort(levels.begin(), levels.end(), [](const Level &a, const Level &b) {
        return std::tie(a.energy, a.up_spins, a.index) < std::tie(b.energy, b.up_spins, b.index);
    });
    const Level &median = levels[levels.size() / 2];
    const auto  &s      = decomp.sector(median.sector);
    Eigen::VectorXcd amps = s.vectors.col(static_cast<Eigen::Index>(median.index)).cast<std::complex<double>>();
    return {PureStateVector::in_sector(s.basis, std::move(amps)), median.energy};
}

} // namespace mbl
