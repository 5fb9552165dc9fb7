#include "mbl/holevo.hpp"

#include "mbl/errors.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace mbl {

double entropy_from_eigenvalues(const Eigen::VectorXd &eigenvalues) {
    double s = 0.0;
    for(Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        const double lambda = eigenvalues(i);
        if(lambda < -entropy_negative_tolerance)
            throw DomainError("negative eigenvalue " + std::to_string(lambda) + ": not a density matrix");
        if(lambda <= entropy_eigenvalue_floor) continue;
        s -= lambda * std::log2(lambda);
    }
    return std::max(s, 0.0);
}

double von_neumann_entropy(const DensityMatrix &rho) {
    if(rho.dim() == 0) throw DomainError("entropy of an empty matrix");
    if(std::abs(rho.trace() - 1.0) > 1e-10)
        throw DomainError("entropy expects unit trace, got " + std::to_string(rho.trace()));
    if(rho.dim() == 1) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix(), Eigen::EigenvaluesOnly);
    if(es.info() != Eigen::Success) throw ComputationError("Hermitian eigensolver failed on a density matrix");
    return entropy_from_eigenvalues(es.eigenvalues());
}

MessageEnsemble MessageEnsemble::uniform(int message_sites) {
    if(message_sites < 1 || message_sites > 16) throw DomainError("message length must be in [1, 16]");
    const std::size_t m = std::size_t{1} << message_sites;
    return {message_sites, std::vector<double>(m, 1.0 / static_cast<double>(m))};
}

MessageEnsemble::MessageEnsemble(int message_sites, std::vector<double> probabilities)
    : message_sites_(message_sites), probabilities_(std::move(probabilities)) {
    if(message_sites < 1 || message_sites > 16) throw DomainError("message length must be in [1, 16]");
    if(probabilities_.size() != (std::size_t{1} << message_sites))
        throw DomainError("ensemble needs 2^l probabilities");
    for(double p : probabilities_)
        if(!(p >= 0.0)) throw DomainError("probabilities must be non-negative");
    const double total = std::accumulate(probabilities_.begin(), probabilities_.end(), 0.0);
    if(std::abs(total - 1.0) > 1e-12) throw DomainError("probabilities must sum to 1");
}

double holevo_quantity(std::span<const DensityMatrix> states, std::span<const double> probabilities) {
    if(states.empty()) throw DomainError("empty ensemble");
    if(states.size() != probabilities.size()) throw DomainError("one probability per state required");
    const double total = std::accumulate(probabilities.begin(), probabilities.end(), 0.0);
    if(std::abs(total - 1.0) > 1e-9) throw DomainError("probabilities must sum to 1");

    const auto       dim     = states.front().dim();
    Eigen::MatrixXcd average = Eigen::MatrixXcd::Zero(dim, dim);
    double           mixed   = 0.0;
    for(std::size_t k = 0; k < states.size(); ++k) {
        if(states[k].dim() != dim) throw DomainError("ensemble members differ in dimension");
        if(probabilities[k] == 0.0) continue;
        average += probabilities[k] * states[k].matrix();
        mixed += probabilities[k] * von_neumann_entropy(states[k]);
    }
    const double c = von_neumann_entropy(DensityMatrix(std::move(average))) - mixed;
    return c < 0.0 ? 0.0 : c;
}

std::vector<double> HolevoTrace::times() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for(const auto &s : samples) out.push_back(s.time);
    return out;
}

std::vector<double> HolevoTrace::rates() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for(const auto &s : samples) out.push_back(s.rate);
    return out;
}

std::vector<int> message_sectors(int message_sites, int environment_popcount) {
    std::vector<int> out;
    for(int q = 0; q <= message_sites; ++q) out.push_back(environment_popcount + q);
    return out;
}

namespace {

// Single sector label of an environment state; full-space inputs are accepted when
// their support lies in one sector.
std::pair<std::shared_ptr<const SectorBasis>, Eigen::VectorXcd> sector_form(const PureStateVector &env) {
    if(env.is_sector()) return {env.basis_ptr(), env.amplitudes()};
    int sector = -1;
    for(Eigen::Index i = 0; i < env.size(); ++i) {
        if(env.amplitudes()(i) == std::complex<double>{}) continue;
        const int p = std::popcount(static_cast<BasisState>(i));
        if(sector >= 0 && p != sector) throw DomainError("environment state spans several magnetization sectors");
        sector = p;
    }
    if(sector < 0) throw DomainError("environment state is zero");
    auto             basis = make_sector(env.sites(), sector);
    Eigen::VectorXcd amps(static_cast<Eigen::Index>(basis->size()));
    for(std::size_t i = 0; i < basis->size(); ++i)
        amps(static_cast<Eigen::Index>(i)) = env.amplitudes()(static_cast<Eigen::Index>(basis->state(i)));
    return {basis, amps};
}

} // namespace

HolevoTrace holevo_rate_trace(const DisorderedChainSpec &spec, const SpectralDecomposition &decomp,
                              const PureStateVector &environment, const MessageEnsemble &ensemble,
                              std::span<const double> times) {
    const int L = spec.sites();
    const int l = ensemble.message_sites();
    if(l != spec.message_sites())
        throw DomainError("ensemble length " + std::to_string(l) + " differs from chain message length " +
                          std::to_string(spec.message_sites()));
    if(l >= L) throw DomainError("message must leave at least one environment site (l < L)");
    if(environment.sites() != L - l)
        throw DomainError("environment has " + std::to_string(environment.sites()) + " sites, expected " +
                          std::to_string(L - l));
    if(decomp.sites() != L) throw DomainError("decomposition built for a different chain length");
    if(std::abs(environment.norm() - 1.0) > 1e-10) throw DomainError("environment state is not normalized");
    for(std::size_t i = 0; i < times.size(); ++i) {
        if(!(times[i] >= 0.0) || !std::isfinite(times[i])) throw DomainError("times must be finite and non-negative");
        if(i > 0 && !(times[i] > times[i - 1])) throw DomainError("time grid must be strictly ascending");
    }

    const auto [env_basis, env_amps] = sector_form(environment);
    const std::size_t M              = ensemble.size();
    const std::size_t T              = times.size();
    const auto        probs          = ensemble.probabilities();

    // Messages grouped by the joint sector they start in.
    std::map<int, std::vector<std::size_t>> groups;
    for(std::size_t k = 0; k < M; ++k)
        groups[std::popcount(ensemble.message(k)) + env_basis->popcount()].push_back(k);

    const auto                    dim = static_cast<Eigen::Index>(std::size_t{1} << l);
    std::vector<Eigen::MatrixXcd> average(T, Eigen::MatrixXcd::Zero(dim, dim));
    std::vector<double>           mixed(T, 0.0);
    ReductionWorkspace            ws;
    for(const auto &[sector, members] : groups) {
        const auto &spectrum = decomp.sector(sector);
        const auto &basis    = *spectrum.basis;

        Eigen::MatrixXcd initial = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(basis.size()),
                                                          static_cast<Eigen::Index>(members.size()));
        for(std::size_t j = 0; j < members.size(); ++j) {
            const BasisState m = ensemble.message(members[j]);
            for(std::size_t e = 0; e < env_basis->size(); ++e) {
                const BasisState joint = m | (env_basis->state(e) << l);
                const auto       idx   = basis.index_of(joint);
                if(!idx) throw ComputationError("message state fell outside its magnetization sector");
                initial(static_cast<Eigen::Index>(*idx), static_cast<Eigen::Index>(j)) =
                    env_amps(static_cast<Eigen::Index>(e));
            }
        }

        const ReductionMap map(basis, l);
        propagate_batch(spectrum, initial, times,
                        [&](std::size_t t, std::size_t j, const double *re, const double *im) {
                            const double p = probs[members[j]];
                            if(p == 0.0) return;
                            const auto rho = map.reduce(re, im, ws);
                            average[t] += p * rho.matrix();
                            mixed[t] += p * von_neumann_entropy(rho);
                        });
    }

    HolevoTrace trace;
    trace.samples.reserve(T);
    for(std::size_t t = 0; t < T; ++t) {
        double c = von_neumann_entropy(DensityMatrix(std::move(average[t]))) - mixed[t];
        if(c < 0.0) c = 0.0;
        trace.samples.push_back({times[t], c, c / static_cast<double>(l)});
    }
    return trace;
}

} // namespace mbl
