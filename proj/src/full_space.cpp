#include "mbl/full_space.hpp"

#include "mbl/errors.hpp"

#include <array>
#include <complex>
#include <string>

namespace mbl::full_space {

namespace {

using cd    = std::complex<double>;
using Local = std::array<std::array<cd, 2>, 2>; // [bra][ket], index 0 = up

constexpr cd    i_unit{0.0, 1.0};
const Local     sx{{{cd{0}, cd{0.5}}, {cd{0.5}, cd{0}}}};
const Local     sy{{{cd{0}, -0.5 * i_unit}, {0.5 * i_unit, cd{0}}}};
const Local     sz{{{cd{0.5}, cd{0}}, {cd{0}, cd{-0.5}}}};

// Adds coeff * A_i B_j (i != j) to H.
void add_two_site(Eigen::MatrixXcd &h, int sites, int i, int j, const Local &a, const Local &b, cd coeff) {
    const Eigen::Index dim = Eigen::Index{1} << sites;
    for(Eigen::Index ket = 0; ket < dim; ++ket) {
        const int ki = static_cast<int>((ket >> i) & 1);
        const int kj = static_cast<int>((ket >> j) & 1);
        for(int bi = 0; bi < 2; ++bi)
            for(int bj = 0; bj < 2; ++bj) {
                const cd amp = a[bi][ki] * b[bj][kj];
                if(amp == cd{}) continue;
                Eigen::Index bra = ket;
                bra              = (bra & ~(Eigen::Index{1} << i)) | (Eigen::Index{bi} << i);
                bra              = (bra & ~(Eigen::Index{1} << j)) | (Eigen::Index{bj} << j);
                h(bra, ket) += coeff * amp;
            }
    }
}

void add_one_site(Eigen::MatrixXcd &h, int sites, int i, const Local &a, cd coeff) {
    const Eigen::Index dim = Eigen::Index{1} << sites;
    for(Eigen::Index ket = 0; ket < dim; ++ket) {
        const int ki = static_cast<int>((ket >> i) & 1);
        for(int bi = 0; bi < 2; ++bi) {
            const cd amp = a[bi][ki];
            if(amp == cd{}) continue;
            const Eigen::Index bra = (ket & ~(Eigen::Index{1} << i)) | (Eigen::Index{bi} << i);
            h(bra, ket) += coeff * amp;
        }
    }
}

} // namespace

Eigen::MatrixXcd hamiltonian(const DisorderedChainSpec &spec) {
    const int n = spec.sites();
    if(n > max_sites) throw DomainError("full-space path limited to " + std::to_string(max_sites) + " sites");
    const Eigen::Index dim = Eigen::Index{1} << n;
    const cd           J   = spec.exchange();
    Eigen::MatrixXcd   h   = Eigen::MatrixXcd::Zero(dim, dim);
    for(auto [i, j] : bonds(spec)) {
        add_two_site(h, n, i, j, sx, sx, J);
        add_two_site(h, n, i, j, sy, sy, J);
        add_two_site(h, n, i, j, sz, sz, J);
    }
    for(int i = 0; i < n; ++i) add_one_site(h, n, i, sz, J * spec.fields()[static_cast<std::size_t>(i)]);
    return h;
}

Eigen::MatrixXcd partial_trace(const Eigen::VectorXcd &psi, int sites, int message_sites) {
    if(psi.size() != (Eigen::Index{1} << sites)) throw DomainError("state size does not match 2^sites");
    const Eigen::Index ds  = Eigen::Index{1} << message_sites;
    const Eigen::Index de  = Eigen::Index{1} << (sites - message_sites);
    Eigen::MatrixXcd   rho = Eigen::MatrixXcd::Zero(ds, ds);
    for(Eigen::Index a = 0; a < ds; ++a)
        for(Eigen::Index b = 0; b < ds; ++b) {
            cd acc{};
            for(Eigen::Index e = 0; e < de; ++e) acc += psi(a + e * ds) * std::conj(psi(b + e * ds));
            rho(a, b) = acc;
        }
    return rho;
}

HolevoTrace holevo_rate_trace(const DisorderedChainSpec &spec, const PureStateVector &environment,
                              const MessageEnsemble &ensemble, std::span<const double> times) {
    const int L = spec.sites();
    const int l = ensemble.message_sites();
    if(l != spec.message_sites() || l >= L) throw DomainError("message length must match the chain and leave l < L");
    if(environment.sites() != L - l) throw DomainError("environment size mismatch");

    const Eigen::MatrixXcd                          h = hamiltonian(spec);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if(es.info() != Eigen::Success) throw ComputationError("dense eigensolver failed");
    const Eigen::MatrixXcd &V = es.eigenvectors();
    const Eigen::VectorXd  &E = es.eigenvalues();

    const Eigen::VectorXcd env = environment.to_full();
    const Eigen::Index     ds  = Eigen::Index{1} << l;
    const std::size_t      M   = ensemble.size();

    std::vector<Eigen::VectorXcd> coeffs(M);
    for(std::size_t k = 0; k < M; ++k) {
        Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(h.rows());
        for(Eigen::Index e = 0; e < env.size(); ++e)
            psi0(static_cast<Eigen::Index>(ensemble.message(k)) + e * ds) = env(e);
        coeffs[k] = V.adjoint() * psi0;
    }

    HolevoTrace trace;
    for(double t : times) {
        Eigen::VectorXcd phase(E.size());
        for(Eigen::Index n = 0; n < E.size(); ++n) phase(n) = std::exp(cd{0.0, -E(n) * t});
        std::vector<DensityMatrix> reduced;
        reduced.reserve(M);
        for(std::size_t k = 0; k < M; ++k) {
            const Eigen::VectorXcd psi = V * phase.cwiseProduct(coeffs[k]);
            reduced.emplace_back(partial_trace(psi, L, l));
        }
        const double c = holevo_quantity(reduced, ensemble.probabilities());
        trace.samples.push_back({t, c, c / static_cast<double>(l)});
    }
    return trace;
}

} // namespace mbl::full_space
