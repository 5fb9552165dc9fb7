#include "doctest.h"

#include "oracles.hpp"

#include "mbl/density_matrix.hpp"
#include "mbl/errors.hpp"
#include "mbl/hamiltonian.hpp"
#include "mbl/spin_basis.hpp"
#include "mbl/state.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

using namespace mbl;
using cd = std::complex<double>;

TEST_CASE("sector enumeration examples") {
    const auto s21 = enumerate_sector(2, 1);
    REQUIRE(s21.size() == 2);
    CHECK(s21.state(0) == 0b01);
    CHECK(s21.state(1) == 0b10);
    CHECK(s21.up_spins() == 1);

    const auto s30 = enumerate_sector(3, 0);
    REQUIRE(s30.size() == 1);
    CHECK(s30.state(0) == 0);

    CHECK(enumerate_sector(12, 6).size() == 924);
    CHECK(binomial(12, 6) == 924);
}

TEST_CASE("sectors partition the basis and index_of inverts enumeration") {
    for(int n = 1; n <= 12; ++n) {
        std::size_t total = 0;
        for(int p = 0; p <= n; ++p) {
            const auto basis = enumerate_sector(n, p);
            total += basis.size();
            CHECK(basis.size() == binomial(n, p));
            for(std::size_t i = 0; i < basis.size(); ++i) {
                CHECK(std::popcount(basis.state(i)) == p);
                if(i) CHECK(basis.state(i) > basis.state(i - 1));
                CHECK(basis.index_of(basis.state(i)) == i);
            }
            if(p > 0) CHECK_FALSE(basis.index_of(0).has_value());
        }
        CHECK(total == (std::size_t{1} << n));
    }
}

TEST_CASE("invalid sectors and specs are rejected") {
    CHECK_THROWS_AS(SectorBasis(3, 4), DomainError);
    CHECK_THROWS_AS(DisorderedChainSpec::ring(2, 1, {0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(DisorderedChainSpec::ring(6, 6, std::vector<double>(6, 0.0)), DomainError);
    CHECK_THROWS_AS(DisorderedChainSpec::ring(6, 0, std::vector<double>(6, 0.0)), DomainError);
    CHECK_THROWS_AS(DisorderedChainSpec::ring(6, 2, std::vector<double>(5, 0.0)), DomainError);
    CHECK_THROWS_AS(DisorderedChainSpec(6, 2, {3.0, 0, 0, 0, 0, 0}, Topology::ring, 1.0, 2.0), DomainError);
}

TEST_CASE("ring bonds are the message segment, environment segment and two couplings") {
    const auto spec = DisorderedChainSpec::ring(6, 2, std::vector<double>(6, 0.0));
    auto       b    = bonds(spec);
    CHECK(b.size() == 6);
    std::vector<std::pair<int, int>> normalized;
    for(auto [i, j] : b) normalized.emplace_back(std::min(i, j), std::max(i, j));
    std::sort(normalized.begin(), normalized.end());
    CHECK(normalized == std::vector<std::pair<int, int>>{{0, 1}, {0, 5}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});

    const auto open = DisorderedChainSpec::open(std::vector<double>(4, 0.0));
    CHECK(bonds(open).size() == 3);
}

TEST_CASE("open two-site chain without field has singlet and triplet energies") {
    const auto H  = build_hamiltonian(DisorderedChainSpec::open({0.0, 0.0}));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.to_dense());
    const Eigen::Vector4d expected(-0.75, 0.25, 0.25, 0.25);
    CHECK((es.eigenvalues() - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("zero-field ring L = 3 is traceless") {
    const auto H = build_hamiltonian(DisorderedChainSpec::ring(3, 1, {0.0, 0.0, 0.0}));
    CHECK(std::abs(H.to_dense().trace()) <= 1e-14);
}

TEST_CASE("blocks match a brute-force dense Hamiltonian") {
    std::mt19937_64 gen(11);
    for(int n : {3, 4, 5, 7, 8}) {
        for(int trial = 0; trial < 3; ++trial) {
            const auto fields = oracle::random_fields(n, 3.0, gen);
            const auto H      = build_hamiltonian(DisorderedChainSpec::ring(n, 1 + trial % (n - 1), fields));
            CHECK((H.to_dense() - oracle::heisenberg(n, fields, true)).cwiseAbs().maxCoeff() <= 1e-12);
            for(int p : H.sectors()) {
                const auto &m = H.block(p).matrix;
                CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
            }
            const auto Ho = build_hamiltonian(DisorderedChainSpec::open(fields));
            CHECK((Ho.to_dense() - oracle::heisenberg(n, fields, false)).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
}

TEST_CASE("pooled block spectra equal the full spectrum") {
    std::mt19937_64 gen(12);
    for(int n = 3; n <= 8; ++n) {
        const auto fields = oracle::random_fields(n, 2.0, gen);
        const auto H      = build_hamiltonian(DisorderedChainSpec::ring(n, 1, fields));
        std::vector<double> pooled;
        for(int p : H.sectors()) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.block(p).matrix);
            pooled.insert(pooled.end(), es.eigenvalues().begin(), es.eigenvalues().end());
        }
        std::sort(pooled.begin(), pooled.end());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(oracle::heisenberg(n, fields, true));
        REQUIRE(pooled.size() == static_cast<std::size_t>(full.eigenvalues().size()));
        double err = 0.0;
        for(std::size_t i = 0; i < pooled.size(); ++i)
            err = std::max(err, std::abs(pooled[i] - full.eigenvalues()(static_cast<Eigen::Index>(i))));
        CHECK(err <= 1e-10);
    }
}

TEST_CASE("partial trace of a product state is the message projector") {
    // |m_1 m_2 | m_3 m_4> = |1 0 | 0 1>, mask 0b1001.
    const auto   psi = PureStateVector::basis_state(4, 0b1001);
    const auto   rho = partial_trace_environment(psi, 2);
    REQUIRE(rho.dim() == 4);
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(4, 4);
    expected(1, 1)            = 1.0;
    CHECK((rho.matrix() - expected).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(rho.purity() == doctest::Approx(1.0));
}

TEST_CASE("partial trace of a Bell pair is maximally mixed") {
    Eigen::VectorXcd amp = Eigen::VectorXcd::Zero(4);
    amp(0b01)            = 1.0 / std::sqrt(2.0);
    amp(0b10)            = 1.0 / std::sqrt(2.0);
    const auto rho       = partial_trace_environment(PureStateVector::full(2, amp), 1);
    CHECK((rho.matrix() - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(rho.purity() == doctest::Approx(0.5));
}

TEST_CASE("partial trace matches the index-loop oracle on random states") {
    std::mt19937_64                  gen(13);
    std::normal_distribution<double> g;
    for(int n = 2; n <= 10; ++n)
        for(int l = 1; l < n; ++l) {
            Eigen::VectorXcd amp(Eigen::Index{1} << n);
            for(auto &a : amp) a = cd(g(gen), g(gen));
            amp.normalize();
            const auto rho = partial_trace_environment(PureStateVector::full(n, amp), l);
            CHECK((rho.matrix() - oracle::partial_trace(amp, n, l)).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK_NOTHROW(rho.validate());

            // Same state stored sector by sector.
            const int        p = n / 2;
            auto             basis = make_sector(n, p);
            Eigen::VectorXcd sec(static_cast<Eigen::Index>(basis->size()));
            for(auto &a : sec) a = cd(g(gen), g(gen));
            sec.normalize();
            const auto psi = PureStateVector::in_sector(basis, sec);
            const auto r2  = partial_trace_environment(psi, l);
            CHECK((r2.matrix() - oracle::partial_trace(psi.to_full(), n, l)).cwiseAbs().maxCoeff() <= 1e-12);
        }
}

TEST_CASE("partial trace rejects bad message lengths and unnormalized states") {
    const auto psi = PureStateVector::basis_state(4, 0b0101);
    CHECK_THROWS_AS(partial_trace_environment(psi, 0), DomainError);
    CHECK_THROWS_AS(partial_trace_environment(psi, 5), DomainError);
    Eigen::VectorXcd amp = Eigen::VectorXcd::Ones(16);
    CHECK_THROWS_AS(partial_trace_environment(PureStateVector::full(4, amp), 2), DomainError);
}
