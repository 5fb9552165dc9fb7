#pragma once

#include "mbl/spin_basis.hpp"
#include "mbl/state.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace mbl {

class DensityMatrix {
  public:
    DensityMatrix() = default;
    explicit DensityMatrix(Eigen::MatrixXcd elements);

    Eigen::Index dim() const { return elements_.rows(); }
    const Eigen::MatrixXcd &matrix() const { return elements_; }

    double trace() const { return elements_.trace().real(); }
    double purity() const;
    double hermiticity_error() const; // max |rho - rho^dagger|

    // Throws DomainError unless Hermitian, unit trace and PSD within `tolerance`.
    void validate(double tolerance = 1e-10) const;

  private:
    Eigen::MatrixXcd elements_;
};

// Scratch buffers for ReductionMap::reduce; one per worker.
struct ReductionWorkspace {
    std::vector<double> p_re, p_im, out_re, out_im;
};

// Precomputed split of a basis into message bits (sites 1..l, the low bits) and
// environment bits, so the reduced state is a Gram matrix rho = P P^dagger with
// P[a][e] = psi(a + 2^l e).
class ReductionMap {
  public:
    ReductionMap(const SectorBasis &basis, int message_sites);
    static ReductionMap full_space(int sites, int message_sites);

    int message_sites() const { return message_sites_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return row_of_.size(); }

    // Amplitudes given as split real/imaginary arrays in basis order.
    DensityMatrix reduce(const double *re, const double *im, ReductionWorkspace &ws) const;

  private:
    ReductionMap() = default;

    int                        message_sites_ = 0;
    std::size_t                rows_          = 0;
    std::size_t                cols_          = 0;
    std::vector<std::uint32_t> row_of_;
    std::vector<std::uint32_t> col_of_;
};

// rho_s = Tr_e |psi><psi| with sites 1..l kept.
DensityMatrix partial_trace_environment(const PureStateVector &state, int message_sites);

} // namespace mbl
