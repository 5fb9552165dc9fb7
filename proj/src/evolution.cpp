#include "mbl/evolution.hpp"

#include "mbl/errors.hpp"
#include "mbl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <string>

#if defined(MBL_HAVE_LAPACKE)
#include <lapacke.h>
#endif

#if defined(MBL_HAVE_OPENBLAS)
extern "C" void openblas_set_num_threads(int num_threads);
#endif

namespace mbl {

namespace {

// Keeps the propagation scratch matrix below ~32 MB.
constexpr std::size_t propagation_budget = std::size_t{4} << 20;

void pin_blas_threads() {
#if defined(MBL_HAVE_OPENBLAS)
    static std::once_flag once;
    std::call_once(once, [] { openblas_set_num_threads(1); });
#endif
}

} // namespace

SpectralDecomposition::SpectralDecomposition(int sites, std::map<int, SectorSpectrum> sectors)
    : sites_(sites), sectors_(std::move(sectors)) {}

const SectorSpectrum &SpectralDecomposition::sector(int popcount) const {
    auto it = sectors_.find(popcount);
    if(it == sectors_.end())
        throw DomainError("spectral decomposition has no sector with popcount " + std::to_string(popcount));
    return it->second;
}

std::vector<int> SpectralDecomposition::sectors() const {
    std::vector<int> out;
    for(const auto &[p, _] : sectors_) out.push_back(p);
    return out;
}

double SpectralDecomposition::reconstruction_error(const BlockedHamiltonian &hamiltonian) const {
    double worst = 0.0;
    for(const auto &[p, s] : sectors_) {
        const auto           &h     = hamiltonian.block(p).matrix;
        const Eigen::MatrixXd recon = s.vectors * s.energies.asDiagonal() * s.vectors.transpose();
        const double          scale = std::max(h.norm(), 1e-300);
        worst                       = std::max(worst, (recon - h).norm() / scale);
    }
    return worst;
}

double SpectralDecomposition::orthonormality_error() const {
    double worst = 0.0;
    for(const auto &[_, s] : sectors_) {
        const Eigen::MatrixXd gram = s.vectors.transpose() * s.vectors;
        worst = std::max(worst, (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff());
    }
    return worst;
}

SectorSpectrum diagonalize(const BlockedHamiltonian::Block &block) {
    const auto label = block.basis->popcount();
    const auto n     = block.matrix.rows();
    SectorSpectrum out{block.basis, Eigen::VectorXd(n), block.matrix};
#if defined(MBL_HAVE_LAPACKE)
    pin_blas_threads();
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), out.vectors.data(),
                                           static_cast<lapack_int>(n), out.energies.data());
    if(info != 0)
        throw ComputationError("eigensolver failed in sector " + std::to_string(label) + " (info " +
                               std::to_string(info) + ")");
#else
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block.matrix);
    if(es.info() != Eigen::Success) throw ComputationError("eigensolver failed in sector " + std::to_string(label));
    out.energies = es.eigenvalues();
    out.vectors  = es.eigenvectors();
#endif
    return out;
}

SpectralDecomposition decompose(const BlockedHamiltonian &hamiltonian) {
    return decompose(hamiltonian, hamiltonian.sectors());
}

SpectralDecomposition decompose(const BlockedHamiltonian &hamiltonian, const std::vector<int> &sectors) {
    std::map<int, SectorSpectrum> out;
    for(int p : sectors) {
        if(out.contains(p)) continue;
        out.emplace(p, diagonalize(hamiltonian.block(p)));
    }
    return {hamiltonian.sites(), std::move(out)};
}

void propagate_batch(const SectorSpectrum &spectrum, const Eigen::MatrixXcd &initial, std::span<const double> times,
                     const PropagationSink &sink) {
    const auto        d     = static_cast<std::size_t>(spectrum.vectors.rows());
    const std::size_t count = static_cast<std::size_t>(initial.cols());
    if(static_cast<std::size_t>(initial.rows()) != d)
        throw DomainError("initial states have " + std::to_string(initial.rows()) + " rows, sector has " +
                          std::to_string(d));
    if(count == 0 || times.empty()) return;
    const auto   &kt = kernels::active();
    const double *V  = spectrum.vectors.data();

    // Coefficients in the eigenbasis: C = V^T X0, stored as [re_0 im_0 re_1 im_1 ...].
    std::vector<double> x0(d * 2 * count);
    for(std::size_t j = 0; j < count; ++j)
        for(std::size_t i = 0; i < d; ++i) {
            const auto amp          = initial(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            x0[i + (2 * j) * d]     = amp.real();
            x0[i + (2 * j + 1) * d] = amp.imag();
        }
    std::vector<double> coeff(d * 2 * count);
    kt.gemm_tn(d, 2 * count, d, V, d, x0.data(), d, coeff.data(), d);

    const std::size_t chunk = std::clamp<std::size_t>(propagation_budget / std::max<std::size_t>(d * 2 * count, 1), 1,
                                                      times.size());
    std::vector<double> rotated(d * 2 * count * chunk);
    std::vector<double> psi(rotated.size());
    std::vector<double> cos_t(d), sin_t(d);

    for(std::size_t t0 = 0; t0 < times.size(); t0 += chunk) {
        const std::size_t tc = std::min(chunk, times.size() - t0);
        for(std::size_t tau = 0; tau < tc; ++tau) {
            const double t = times[t0 + tau];
            for(std::size_t n = 0; n < d; ++n) {
                const double phase = spectrum.energies(static_cast<Eigen::Index>(n)) * t;
                cos_t[n]           = std::cos(phase);
                sin_t[n]           = std::sin(phase);
            }
            for(std::size_t j = 0; j < count; ++j) {
                const std::size_t col = 2 * (tau * count + j);
                kt.rotate_phases(d, cos_t.data(), sin_t.data(), coeff.data() + (2 * j) * d,
                                 coeff.data() + (2 * j + 1) * d, rotated.data() + col * d,
                                 rotated.data() + (col + 1) * d);
            }
        }
        kt.gemm_nn(d, 2 * count * tc, d, V, d, rotated.data(), d, psi.data(), d);
        for(std::size_t tau = 0; tau < tc; ++tau)
            for(std::size_t j = 0; j < count; ++j) {
                const std::size_t col = 2 * (tau * count + j);
                sink(t0 + tau, j, psi.data() + col * d, psi.data() + (col + 1) * d);
            }
    }
}

namespace {

Eigen::VectorXcd evolve_sector(const SectorSpectrum &spectrum, const Eigen::VectorXcd &amps, double t) {
    Eigen::VectorXcd out(amps.size());
    const double     times[] = {t};
    propagate_batch(spectrum, amps, times, [&](std::size_t, std::size_t, const double *re, const double *im) {
        for(Eigen::Index i = 0; i < out.size(); ++i) out(i) = {re[i], im[i]};
    });
    return out;
}

} // namespace

PureStateVector evolve(const PureStateVector &psi0, const SpectralDecomposition &decomp, double t) {
    if(psi0.sites() != decomp.sites())
        throw DomainError("state has " + std::to_string(psi0.sites()) + " sites, decomposition " +
                          std::to_string(decomp.sites()));
    if(!(t >= 0.0) || !std::isfinite(t)) throw DomainError("evolution time must be finite and non-negative");

    if(psi0.is_sector()) {
        const auto &spectrum = decomp.sector(psi0.sector());
        if(spectrum.basis->size() != static_cast<std::size_t>(psi0.size()))
            throw DomainError("state and decomposition disagree on sector dimension");
        return PureStateVector::in_sector(psi0.basis_ptr(), evolve_sector(spectrum, psi0.amplitudes(), t));
    }

    // Full-space input: evolve each sector component separately.
    const auto      &full = psi0.amplitudes();
    Eigen::VectorXcd out  = Eigen::VectorXcd::Zero(full.size());
    for(int p = 0; p <= psi0.sites(); ++p) {
        const SectorBasis probe(psi0.sites(), p);
        Eigen::VectorXcd  part(static_cast<Eigen::Index>(probe.size()));
        bool              any = false;
        for(std::size_t i = 0; i < probe.size(); ++i) {
            part(static_cast<Eigen::Index>(i)) = full(static_cast<Eigen::Index>(probe.state(i)));
            any = any || part(static_cast<Eigen::Index>(i)) != std::complex<double>{};
        }
        if(!any) continue;
        const auto       evolved = evolve_sector(decomp.sector(p), part, t);
        for(std::size_t i = 0; i < probe.size(); ++i)
            out(static_cast<Eigen::Index>(probe.state(i))) = evolved(static_cast<Eigen::Index>(i));
    }
    return PureStateVector::full(psi0.sites(), std::move(out));
}

} // namespace mbl
