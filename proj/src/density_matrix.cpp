#include "mbl/density_matrix.hpp"

#include "mbl/errors.hpp"
#include "mbl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

namespace mbl {

DensityMatrix::DensityMatrix(Eigen::MatrixXcd elements) : elements_(std::move(elements)) {
    if(elements_.rows() != elements_.cols()) throw DomainError("density matrix must be square");
}

double DensityMatrix::purity() const { return (elements_ * elements_).trace().real(); }

double DensityMatrix::hermiticity_error() const {
    if(elements_.size() == 0) return 0.0;
    return (elements_ - elements_.adjoint()).cwiseAbs().maxCoeff();
}

void DensityMatrix::validate(double tolerance) const {
    if(dim() == 0) throw DomainError("empty density matrix");
    if(hermiticity_error() > tolerance) throw DomainError("density matrix is not Hermitian");
    if(std::abs(trace() - 1.0) > tolerance)
        throw DomainError("density matrix trace " + std::to_string(trace()) + " differs from 1");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(elements_, Eigen::EigenvaluesOnly);
    if(es.eigenvalues().minCoeff() < -tolerance) throw DomainError("density matrix has a negative eigenvalue");
}

ReductionMap::ReductionMap(const SectorBasis &basis, int message_sites) : message_sites_(message_sites) {
    if(message_sites < 0 || message_sites > basis.sites())
        throw DomainError("message length " + std::to_string(message_sites) + " incompatible with " +
                          std::to_string(basis.sites()) + " sites");
    rows_                 = std::size_t{1} << message_sites;
    const BasisState mask = (BasisState{1} << message_sites) - 1;

    std::unordered_map<BasisState, std::uint32_t> env_column;
    row_of_.reserve(basis.size());
    col_of_.reserve(basis.size());
    for(BasisState s : basis.states()) {
        const BasisState env = s >> message_sites;
        auto [it, inserted]  = env_column.try_emplace(env, static_cast<std::uint32_t>(env_column.size()));
        row_of_.push_back(static_cast<std::uint32_t>(s & mask));
        col_of_.push_back(it->second);
    }
    cols_ = env_column.size();
}

ReductionMap ReductionMap::full_space(int sites, int message_sites) {
    if(sites < 1 || sites > 30) throw DomainError("full-space reduction limited to 30 sites");
    if(message_sites < 0 || message_sites > sites) throw DomainError("message length exceeds chain length");
    ReductionMap map;
    map.message_sites_    = message_sites;
    map.rows_             = std::size_t{1} << message_sites;
    map.cols_             = std::size_t{1} << (sites - message_sites);
    const std::size_t dim = std::size_t{1} << sites;
    map.row_of_.resize(dim);
    map.col_of_.resize(dim);
    for(std::size_t s = 0; s < dim; ++s) {
        map.row_of_[s] = static_cast<std::uint32_t>(s & (map.rows_ - 1));
        map.col_of_[s] = static_cast<std::uint32_t>(s >> message_sites);
    }
    return map;
}

DensityMatrix ReductionMap::reduce(const double *re, const double *im, ReductionWorkspace &ws) const {
    const std::size_t cells = rows_ * cols_;
    ws.p_re.assign(cells, 0.0);
    ws.p_im.assign(cells, 0.0);
    ws.out_re.resize(rows_ * rows_);
    ws.out_im.resize(rows_ * rows_);
    for(std::size_t i = 0; i < row_of_.size(); ++i) {
        const std::size_t at = row_of_[i] * cols_ + col_of_[i];
        ws.p_re[at]          = re[i];
        ws.p_im[at]          = im[i];
    }
    kernels::active().gram_hermitian(rows_, cols_, ws.p_re.data(), ws.p_im.data(), cols_, ws.out_re.data(),
                                     ws.out_im.data());
    const auto       n = static_cast<Eigen::Index>(rows_);
    Eigen::MatrixXcd rho(n, n);
    for(Eigen::Index c = 0; c < n; ++c)
        for(Eigen::Index r = 0; r < n; ++r) {
            const auto at = static_cast<std::size_t>(r + c * n);
            rho(r, c)     = {ws.out_re[at], ws.out_im[at]};
        }
    return DensityMatrix(std::move(rho));
}

DensityMatrix partial_trace_environment(const PureStateVector &state, int message_sites) {
    if(message_sites < 1 || message_sites > state.sites())
        throw DomainError("cannot keep " + std::to_string(message_sites) + " sites of a " +
                          std::to_string(state.sites()) + "-site state");
    if(std::abs(state.norm() - 1.0) > 1e-10) throw DomainError("partial trace expects a normalized state");

    const ReductionMap map = state.is_sector() ? ReductionMap(state.basis(), message_sites)
                                               : ReductionMap::full_space(state.sites(), message_sites);
    const auto        &amps = state.amplitudes();
    std::vector<double> re(static_cast<std::size_t>(amps.size()));
    std::vector<double> im(re.size());
    for(Eigen::Index i = 0; i < amps.size(); ++i) {
        re[static_cast<std::size_t>(i)] = amps(i).real();
        im[static_cast<std::size_t>(i)] = amps(i).imag();
    }
    ReductionWorkspace ws;
    return map.reduce(re.data(), im.data(), ws);
}

} // namespace mbl
