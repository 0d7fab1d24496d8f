#include <gtest/gtest.h>

#include "dicke/hilbert.hpp"
#include "dicke/state.hpp"
#include "oracles.hpp"

using namespace dicke;

namespace {

double max_diff(const CMatrix& a, const CMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

class CollectiveSpin : public ::testing::TestWithParam<int> {};

TEST_P(CollectiveSpin, MatchesPauliSumsOnSymmetricSubspace) {
  const int n = GetParam();
  const SpinOperators s = build_collective_spin(n);
  EXPECT_LT(max_diff(s.jx.to_dense(), oracle::collective_spin(n, 'x')), 1e-13);
  EXPECT_LT(max_diff(s.jy.to_dense(), oracle::collective_spin(n, 'y')), 1e-13);
  EXPECT_LT(max_diff(s.jz.to_dense(), oracle::collective_spin(n, 'z')), 1e-13);
}

TEST_P(CollectiveSpin, AngularMomentumAlgebra) {
  const int n = GetParam();
  const SpinOperators s = build_collective_spin(n);
  const CMatrix jx = s.jx.to_dense(), jy = s.jy.to_dense(), jz = s.jz.to_dense();
  EXPECT_LT(max_diff(jx * jy - jy * jx, kI * jz), 1e-12);
  const double j = 0.5 * n;
  const CMatrix casimir = jx * jx + jy * jy + jz * jz;
  EXPECT_LT(max_diff(casimir, j * (j + 1) * CMatrix::Identity(n + 1, n + 1)), 1e-12);
  EXPECT_LT(max_diff(s.jplus.to_dense(), jx + kI * jy), 1e-13);
  EXPECT_LT(max_diff(s.jminus.to_dense(), s.jplus.to_dense().adjoint()), 1e-13);
}

INSTANTIATE_TEST_SUITE_P(SmallN, CollectiveSpin, ::testing::Values(1, 2, 3, 4, 5, 6));

TEST(Boson, LadderOperators) {
  const BosonOperators b = build_boson(6);
  EXPECT_LT(max_diff(b.a.to_dense(), oracle::annihilation(6)), 1e-15);
  const CMatrix comm = (b.a * b.a_dag - b.a_dag * b.a).to_dense();
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(comm(k, k).real(), 1.0, 1e-14);
  EXPECT_NEAR(comm(6, 6).real(), -6.0, 1e-14);
  for (int k = 0; k <= 6; ++k) EXPECT_NEAR(b.n_op.value(k, k).real(), k, 0.0);
}

TEST(Basis, SpinMajorFlatIndex) {
  const SystemParams p{3, 1.0, 1.0, 4};
  EXPECT_EQ(p.dim(), 20);
  const BasisIndex idx = basis_index(p, 1, 2);  // m = 1/2 -> s = 2
  EXPECT_EQ(idx.flat, 2 * 5 + 2);
  const BasisIndex back = basis_index(p, idx.flat);
  EXPECT_EQ(back.twice_m, 1);
  EXPECT_EQ(back.n, 2);
}

TEST(Basis, EmbeddingIsKroneckerProduct) {
  const SystemParams p{2, 1.0, 1.0, 3};
  const SpinOperators s = build_collective_spin(2);
  const BosonOperators b = build_boson(3);
  const CMatrix expect = oracle::kron(oracle::collective_spin(2, 'x'), oracle::annihilation(3));
  EXPECT_LT(max_diff(embed_product(p, s.jx, b.a).to_dense(), expect), 1e-14);
}

TEST(Parity, SignsFollowExcitationCount) {
  const SystemParams p{3, 1.0, 1.0, 4};
  const std::vector<int> signs = parity_signs(p);
  for (Index f = 0; f < p.dim(); ++f) {
    const BasisIndex bi = basis_index(p, f);
    const int s = (bi.twice_m + p.n_qubits) / 2;
    EXPECT_EQ(signs[f], ((s + bi.n) % 2 == 0) ? 1 : -1);
  }
  const SparseOperator pi = parity_operator(p);
  EXPECT_TRUE(pi.hermitian());
  EXPECT_LT(max_diff((pi * pi).to_dense(), CMatrix::Identity(p.dim(), p.dim())), 1e-15);
}

TEST(SparseOperatorContract, RejectsFalseHermitianClaim) {
  std::vector<SparseEntry> e{{0, 1, Complex(1.0, 0.0)}};
  EXPECT_THROW(SparseOperator::from_entries(2, e, true), std::invalid_argument);
  EXPECT_NO_THROW(SparseOperator::from_entries(2, e, false));
  e.push_back({0, 1, Complex(2.0, 0.0)});
  EXPECT_THROW(SparseOperator::from_entries(2, e, false), std::invalid_argument);
}

TEST(SystemParamsValidation, NamesField) {
  SystemParams p{0, 1.0, 1.0, 4};
  try {
    p.validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("n_qubits"), std::string::npos);
  }
  p = {2, -1.0, 1.0, 4};
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(State, FockResizeRoundTrip) {
  const QuantumState psi = QuantumState::pure(3, 4, oracle::random_state(12, 3));
  const QuantumState big = psi.with_fock_dim(7);
  EXPECT_NEAR(big.norm(), 1.0, 1e-14);
  EXPECT_TRUE(big.with_fock_dim(4) == psi);
  EXPECT_NEAR(psi.fidelity_with(psi), 1.0, 1e-14);
  const QuantumState rho = psi.to_density();
  EXPECT_NEAR(rho.norm(), 1.0, 1e-14);
  EXPECT_NEAR(rho.fidelity_with(psi), 1.0, 1e-14);
  EXPECT_TRUE(rho.with_fock_dim(7).with_fock_dim(4) == rho);
}
