#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "dicke/eigensolver.hpp"
#include "dicke/errors.hpp"
#include "dicke/hamiltonian.hpp"
#include "dicke/krylov.hpp"
#include "dicke/propagator.hpp"
#include "oracles.hpp"

using namespace dicke;

namespace {

krylov::LinearMap dense_map(const CMatrix& m) {
  return [&m](const CVector& x, CVector& y) { y.noalias() = m * x; };
}

struct DenseAffine : AffineFlow {
  CMatrix g0, g1;
  bool herm = true;
  void apply(double c0, double c1, const CVector& x, CVector& y) const override {
    y.noalias() = c0 * (g0 * x);
    y.noalias() += c1 * (g1 * x);
  }
  bool hermitian() const override { return herm; }
};

}  // namespace

TEST(Krylov, LanczosMatchesDenseExponential) {
  const CMatrix h = oracle::dicke_hamiltonian(3, 1.0, 1.0, 15, 0.8);
  const CVector v = oracle::random_state(h.rows(), 11);
  for (double tau : {0.01, 0.1, 0.5}) {
    CVector out;
    const auto res = krylov::expv_hermitian(dense_map(h), tau, v, out, {60, 2, 1e-13});
    EXPECT_TRUE(res.converged);
    EXPECT_LT((out - oracle::unitary(h, tau) * v).norm(), 1e-11) << tau;
  }
}

TEST(Krylov, ArnoldiMatchesDenseExponential) {
  const CMatrix h = oracle::dicke_hamiltonian(1, 1.0, 1.0, 3, 0.5);
  const CMatrix l = oracle::liouvillian(h, oracle::kron(CMatrix::Identity(2, 2), oracle::annihilation(3)), 0.2, 0.05);
  const CVector v = oracle::random_state(l.rows(), 5);
  const double tau = 0.3;
  CVector out;
  const auto res = krylov::expv_general(dense_map(l), tau, v, out, {60, 2, 1e-13});
  EXPECT_TRUE(res.converged);
  const CMatrix e = (tau * l).exp();
  EXPECT_LT((out - e * v).norm(), 1e-10);
}

TEST(Krylov, ArnoldiSubstepsMatchDenseExponential) {
  const CMatrix h = oracle::dicke_hamiltonian(1, 1.0, 1.0, 4, 0.8);
  const CMatrix l = oracle::liouvillian(h, oracle::kron(CMatrix::Identity(2, 2), oracle::annihilation(4)), 0.3, 0.1);
  const CVector v = oracle::random_state(l.rows(), 9);
  const double tau = 2.5;
  CVector out;
  krylov::ExpvOptions o{6, 2, 1e-11};
  EXPECT_FALSE(krylov::expv_general(dense_map(l), tau, v, out, o).converged);
  o.max_substeps = 1000;
  const auto res = krylov::expv_general(dense_map(l), tau, v, out, o);
  EXPECT_TRUE(res.converged);
  EXPECT_GT(res.substeps, 0);
  EXPECT_LE(res.dim_used, 6);
  EXPECT_LT((out - (tau * l).exp() * v).norm(), 1e-9);
}

TEST(Krylov, InvariantSubspaceTerminatesEarly) {
  CMatrix h = CMatrix::Zero(10, 10);
  h.diagonal().setLinSpaced(10, 0.0, 9.0);
  CVector v = CVector::Zero(10);
  v(3) = 1.0;
  CVector out;
  const auto res = krylov::expv_hermitian(dense_map(h), 0.7, v, out);
  EXPECT_TRUE(res.converged);
  EXPECT_LE(res.dim_used, 2);
  EXPECT_NEAR(std::abs(out(3) - std::polar(1.0, -0.7 * 3.0)), 0.0, 1e-14);
}

TEST(Magnus, ConstantGeneratorIsExact) {
  DenseAffine f;
  f.g0 = oracle::dicke_hamiltonian(2, 1.0, 1.0, 10, 0.0);
  f.g1 = oracle::dicke_hamiltonian(2, 1.0, 1.0, 10, 1.0) - f.g0;
  MagnusStepper stepper(f, [](double) { return 0.6; }, {1e-10, 40});
  CVector y = oracle::random_state(f.g0.rows(), 2);
  const CVector y0 = y;
  double t = 0.0;
  ASSERT_TRUE(stepper.advance(y, t, 3.0));
  EXPECT_DOUBLE_EQ(t, 3.0);
  EXPECT_LT((y - oracle::unitary(f.g0 + 0.6 * f.g1, 3.0) * y0).norm(), 1e-8);
  EXPECT_NEAR(y.norm(), 1.0, 1e-10);
}

TEST(Magnus, RampMatchesFineDenseProduct) {
  DenseAffine f;
  f.g0 = oracle::dicke_hamiltonian(2, 1.0, 1.0, 12, 0.0);
  f.g1 = oracle::dicke_hamiltonian(2, 1.0, 1.0, 12, 1.0) - f.g0;
  const double ups = 0.5;
  MagnusStepper stepper(f, [ups](double t) { return ups * t; }, {1e-9, 40});
  CVector psi0 = CVector::Zero(f.g0.rows());
  psi0(0) = 1.0;
  CVector y = psi0;
  double t = 0.0;
  stepper.advance(y, t, 2.0);
  const CVector ref = oracle::ramp_evolve(psi0, 2, 1.0, 1.0, 12, ups, 2.0, 4000);
  EXPECT_GT(std::norm(ref.dot(y)), 1.0 - 1e-7);
  EXPECT_GT(stepper.stats().steps, 0);
}

TEST(Magnus, HookCanStopEarly) {
  DenseAffine f;
  f.g0 = CMatrix::Identity(3, 3);
  f.g1 = CMatrix::Zero(3, 3);
  MagnusStepper stepper(f, [](double) { return 0.0; }, {1e-8, 10, 0.1});
  CVector y = CVector::Ones(3).normalized();
  double t = 0.0;
  int calls = 0;
  const bool reached = stepper.advance(y, t, 10.0, [&](double, CVector&) { return ++calls < 3; });
  EXPECT_FALSE(reached);
  EXPECT_EQ(calls, 3);
  EXPECT_LT(t, 10.0);
}

TEST(Eigensolver, LowestPairsOfDenseMatrix) {
  const CMatrix h = oracle::dicke_hamiltonian(4, 1.0, 1.0, 20, 1.1);
  const RVector e = Eigen::SelfAdjointEigenSolver<CMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues();
  const EigenPairs pairs = lowest_eigenpairs(dense_map(h), h.rows(), 3);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(pairs.values(k), e(k), 1e-9);
    EXPECT_LT((h * pairs.vectors.col(k) - pairs.values(k) * pairs.vectors.col(k)).norm(), 1e-9);
  }
}

TEST(Eigensolver, ThrowsWhenBudgetExhausted) {
  const CMatrix h = oracle::dicke_hamiltonian(4, 1.0, 1.0, 20, 1.1);
  EigensolverOptions o;
  o.max_iterations = 5;
  EXPECT_THROW(lowest_eigenpairs(dense_map(h), h.rows(), 2, o), ConvergenceError);
}
