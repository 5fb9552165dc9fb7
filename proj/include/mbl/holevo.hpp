#pragma once

// Entropies and the Holevo quantity of the message ensemble after the local map
// rho^(k) -> Tr_e[ U (rho^(k) (x) |e><e|) U^dagger ].

#include "mbl/density_matrix.hpp"
#include "mbl/evolution.hpp"
#include "mbl/hamiltonian.hpp"
#include "mbl/state.hpp"

#include <span>
#include <vector>

namespace mbl {

// Eigenvalues at or below this contribute nothing to an entropy (0 log 0 = 0).
inline constexpr double entropy_eigenvalue_floor = 1e-12;
// Eigenvalues below this mean the input is not a density matrix.
inline constexpr double entropy_negative_tolerance = 1e-8;

// S(rho) = -Tr rho log2 rho, in bits.
double von_neumann_entropy(const DensityMatrix &rho);
double entropy_from_eigenvalues(const Eigen::VectorXd &eigenvalues);

// All 2^l computational-basis products |m_1..m_l>; message k has mask k.
class MessageEnsemble {
  public:
    static MessageEnsemble uniform(int message_sites);
    MessageEnsemble(int message_sites, std::vector<double> probabilities);

    int message_sites() const { return message_sites_; }
    std::size_t size() const { return probabilities_.size(); }
    BasisState message(std::size_t k) const { return static_cast<BasisState>(k); }
    const std::vector<double> &probabilities() const { return probabilities_; }

  private:
    int                 message_sites_;
    std::vector<double> probabilities_;
};

// S(sum_k p_k rho_k) - sum_k p_k S(rho_k), clipped at 0. The average is summed in k order.
double holevo_quantity(std::span<const DensityMatrix> states, std::span<const double> probabilities);

struct HolevoSample {
    double time;
    double holevo; // C in bits
    double rate;   // R = C / l
};

struct HolevoTrace {
    std::vector<HolevoSample> samples;

    std::vector<double> times() const;
    std::vector<double> rates() const;
};

// Sector-blocked pipeline. `environment` lives on the L - l environment sites and must
// occupy one sector; `decomp` must contain every joint sector the messages reach.
HolevoTrace holevo_rate_trace(const DisorderedChainSpec &spec, const SpectralDecomposition &decomp,
                              const PureStateVector &environment, const MessageEnsemble &ensemble,
                              std::span<const double> times);

// Joint sectors reached by the ensemble on top of an environment in sector `environment_popcount`.
std::vector<int> message_sectors(int message_sites, int environment_popcount);

} // namespace mbl
