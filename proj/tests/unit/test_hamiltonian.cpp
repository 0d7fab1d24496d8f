#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "dicke/errors.hpp"
#include "dicke/hamiltonian.hpp"
#include "dicke/observables.hpp"
#include "oracles.hpp"

using namespace dicke;

namespace {

RVector dense_spectrum(const CMatrix& h) {
  return Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST(Hamiltonian, MatchesDenseOracle) {
  for (int n : {1, 2, 3, 5}) {
    const SystemParams p{n, 0.7, 1.3, 6};
    const double lambda = 0.9;
    const CMatrix h = dicke_hamiltonian(p, lambda).to_dense();
    EXPECT_LT((h - oracle::dicke_hamiltonian(n, 0.7, 1.3, 6, lambda)).cwiseAbs().maxCoeff(), 1e-13) << n;
    EXPECT_TRUE(dicke_hamiltonian(p, lambda).hermitian());
  }
}

TEST(Hamiltonian, AffineSplit) {
  const SystemParams p{4, 1.0, 1.0, 8};
  const DickeTerms t = dicke_terms(p);
  const CMatrix h = dicke_hamiltonian(p, 1.7).to_dense();
  EXPECT_LT((h - t.bare.to_dense() - 1.7 * t.coupling.to_dense()).cwiseAbs().maxCoeff(), 1e-14);
  for (Index i = 0; i < p.dim(); ++i) EXPECT_EQ(t.bare_diagonal(i), t.bare.value(i, i).real());
}

TEST(Hamiltonian, CommutesWithParity) {
  const SystemParams p{5, 1.0, 1.0, 10};
  const SparseOperator c = commutator(dicke_hamiltonian(p, 1.3), parity_operator(p));
  EXPECT_LT(max_abs(c), 1e-13);
}

TEST(Hamiltonian, RejectsNegativeCoupling) {
  const SystemParams p{2, 1.0, 1.0, 4};
  EXPECT_THROW(dicke_hamiltonian(p, -0.1), std::invalid_argument);
}

TEST(DisplacedFrame, SameSpectrumAwayFromTruncationEdge) {
  for (double lambda : {0.3, 1.0, 2.0}) {
    const SystemParams p{6, 1.0, 1.0, 60};
    const RVector e1 = dense_spectrum(dicke_hamiltonian(p, lambda).to_dense());
    const RVector e2 = dense_spectrum(displaced_frame_hamiltonian(p, lambda).to_dense());
    for (Index k = 0; k < 20; ++k) EXPECT_NEAR(e1(k), e2(k), 1e-8) << "lambda=" << lambda << " k=" << k;
  }
}

TEST(StrongCoupling, WellsApproximateLowSpectrum) {
  // Deep in the superradiant phase the low levels pair into near-degenerate
  // doublets sitting at the |m_x| = N/2, N/2 - 1, ... well minima.
  const SystemParams p{6, 1.0, 1.0, 80};
  const double lambda = 3.0;
  const RVector e = dense_spectrum(dicke_hamiltonian(p, lambda).to_dense());
  const auto wells = strong_coupling_spectrum(p, lambda);
  ASSERT_EQ(wells.size(), 7u);
  const double deepest = wells.front().well_minimum;
  EXPECT_EQ(wells.front().m_x, -3.0);
  EXPECT_EQ(wells.front().well_minimum, wells.back().well_minimum);
  EXPECT_NEAR(wells.back().well_center, 2.0 * lambda / std::sqrt(6.0) * 3.0, 1e-14);
  // Exact zero-point of the displaced oscillator is 0, so shift the wells by omega / 2.
  EXPECT_NEAR(e(0), deepest - 0.5, 0.05 * std::abs(deepest));
  EXPECT_LT(e(1) - e(0), 1e-6);
  // Next doublet is the first oscillator quantum inside the deepest wells;
  // the m_x = +-2 wells lie far higher.
  EXPECT_NEAR(e(2) - e(0), p.omega, 0.1 * p.omega);
  EXPECT_GT(wells[1].well_minimum - wells[0].well_minimum, 10.0 * p.omega);
}

TEST(CatState, EvenParityAndNorm) {
  const SystemParams p{4, 1.0, 1.0, 50};
  const QuantumState cat = broken_symmetry_state(p, 2.0, kPi / 4, 0.0);
  EXPECT_NEAR(cat.norm(), 1.0, 1e-12);
  const ObservableRecord r = ObservableSet(p).measure(cat);
  EXPECT_NEAR(r.parity, 1.0, 1e-10);
  EXPECT_NEAR(r.entropy, std::log(2.0), 1e-3);
  const QuantumState odd = broken_symmetry_state(p, 2.0, kPi / 4, kPi);
  EXPECT_NEAR(ObservableSet(p).measure(odd).parity, -1.0, 1e-10);
  EXPECT_THROW(broken_symmetry_state(p, 0.4, kPi / 4, 0.0), std::invalid_argument);
}

TEST(CatState, SpinXExtremalIsEigenvector) {
  for (int n : {1, 4, 7}) {
    const CMatrix jx = oracle::collective_spin(n, 'x');
    for (int sign : {-1, 1}) {
      const CVector v = spin_x_extremal_state(n, sign);
      EXPECT_NEAR(v.norm(), 1.0, 1e-13);
      EXPECT_LT((jx * v - sign * 0.5 * n * v).norm(), 1e-12);
    }
  }
}

TEST(CoherentState, PoissonWeightsAndTail) {
  const CVector v = coherent_state(40, Complex(2.0, 1.0));
  EXPECT_NEAR(v.norm(), 1.0, 1e-10);
  const CMatrix a = oracle::annihilation(40);
  EXPECT_LT((a * v - Complex(2.0, 1.0) * v).head(30).norm(), 1e-10);
  EXPECT_THROW(coherent_state(5, Complex(4.0, 0.0)), TruncationError);
  EXPECT_GT(coherent_tail_weight(5, Complex(4.0, 0.0)), 0.1);
}

TEST(GroundState, MatchesDenseDiagonalizationPerSector) {
  const SystemParams p{4, 1.0, 1.0, 30};
  const double lambda = 0.8;
  const CMatrix h = oracle::dicke_hamiltonian(4, 1.0, 1.0, 30, lambda);
  const std::vector<int> signs = parity_signs(p);
  for (ParitySector sector : {ParitySector::even, ParitySector::odd}) {
    std::vector<Index> idx;
    for (Index i = 0; i < p.dim(); ++i)
      if ((signs[i] > 0) == (sector == ParitySector::even)) idx.push_back(i);
    CMatrix block(idx.size(), idx.size());
    for (size_t r = 0; r < idx.size(); ++r)
      for (size_t c = 0; c < idx.size(); ++c) block(r, c) = h(idx[r], idx[c]);
    const RVector e = dense_spectrum(block);
    const GroundStateResult gs = ground_state(p, lambda, sector);
    EXPECT_NEAR(gs.energy_0, e(0), 1e-9);
    EXPECT_NEAR(gs.energy_1, e(1), 1e-9);
    const double parity = ObservableSet(p).measure(gs.state).parity;
    EXPECT_NEAR(parity, sector == ParitySector::even ? 1.0 : -1.0, 1e-12);
  }
}

TEST(GroundState, DecoupledPointIsProductState) {
  const SystemParams p{5, 1.0, 1.0, 10};
  const GroundStateResult gs = ground_state(p, 0.0, ParitySector::full);
  EXPECT_NEAR(gs.energy_0, -2.5, 1e-10);
  EXPECT_NEAR(std::abs(gs.state.amplitudes()(0)), 1.0, 1e-8);
}

TEST(Ramp, CheckpointGrid) {
  const RampSchedule s = make_ramp(std::exp2(-4.0), 2.0, 0.01);
  const auto l = s.checkpoint_lambdas();
  ASSERT_EQ(l.size(), 201u);
  EXPECT_EQ(l.front(), 0.0);
  EXPECT_EQ(l.back(), 2.0);
  EXPECT_NEAR(s.final_time(), 32.0, 1e-12);
  EXPECT_NEAR(s.lambda_at(s.time_at(1.234)), 1.234, 1e-14);
  const RampSchedule odd = make_ramp(1.0, 0.25, 0.1);
  const auto lo = odd.checkpoint_lambdas();
  ASSERT_EQ(lo.size(), 4u);
  EXPECT_EQ(lo.back(), 0.25);
  EXPECT_THROW(make_ramp(0.0, 2.0), std::invalid_argument);
  EXPECT_THROW(make_ramp(1.0, -1.0), std::invalid_argument);
}

TEST(Ramp, CriticalCoupling) {
  EXPECT_DOUBLE_EQ(critical_coupling(SystemParams{3, 1.0, 1.0, 4}), 0.5);
  EXPECT_DOUBLE_EQ(critical_coupling(SystemParams{3, 4.0, 1.0, 4}), 1.0);
}
