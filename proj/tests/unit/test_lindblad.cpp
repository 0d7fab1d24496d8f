#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "dicke/errors.hpp"
#include "dicke/lindblad.hpp"
#include "oracles.hpp"

using namespace dicke;

namespace {

CMatrix full_a(int n, int n_max) {
  return oracle::kron(CMatrix::Identity(n + 1, n + 1), oracle::annihilation(n_max));
}

// Fourth-order two-point Magnus product for d vec(rho)/dt = L(lambda(t)) vec(rho).
CVector dense_open_ramp(const CVector& v0, int n, int n_max, double ups, double t_end, double gd,
                        double gu, int slices) {
  const CMatrix a = full_a(n, n_max);
  const CMatrix l0 = oracle::liouvillian(oracle::dicke_hamiltonian(n, 1.0, 1.0, n_max, 0.0), a, gd, gu);
  const CMatrix l1 = oracle::liouvillian(oracle::dicke_hamiltonian(n, 1.0, 1.0, n_max, 1.0), a, 0.0, 0.0) -
                     oracle::liouvillian(oracle::dicke_hamiltonian(n, 1.0, 1.0, n_max, 0.0), a, 0.0, 0.0);
  const double h = t_end / slices;
  const double c = std::sqrt(3.0) / 6.0;
  CVector v = v0;
  for (int k = 0; k < slices; ++k) {
    const double t0 = k * h;
    const CMatrix a1 = l0 + ups * (t0 + (0.5 - c) * h) * l1;
    const CMatrix a2 = l0 + ups * (t0 + (0.5 + c) * h) * l1;
    const CMatrix omega = 0.5 * h * (a1 + a2) + (std::sqrt(3.0) / 12.0) * h * h * (a2 * a1 - a1 * a2);
    v = omega.exp() * v;
  }
  return v;
}

PropagationOptions tight() {
  PropagationOptions o;
  o.tol = 1e-10;
  o.auto_extend = false;
  o.tail_threshold = 1.0;
  return o;
}

}  // namespace

TEST(OpenParams, RatesAndTemperature) {
  const OpenSystemParams o{0.05, 0.5};
  EXPECT_DOUBLE_EQ(o.rate_down(), 0.15);
  EXPECT_DOUBLE_EQ(o.rate_up(), 0.05);
  EXPECT_NEAR(o.beta_inv_temp(), std::log(3.0), 1e-14);
  EXPECT_TRUE(std::isinf(OpenSystemParams{0.1, 0.0}.beta_inv_temp()));
  EXPECT_THROW((OpenSystemParams{-1.0, 0.0}.validate()), std::invalid_argument);
}

TEST(LindbladRhs, MatchesDenseLiouvillian) {
  const int n = 2, n_max = 4;
  const SystemParams p{n, 1.0, 1.0, n_max};
  const OpenSystemParams open{0.07, 0.3};
  const Index d = p.dim();
  const CMatrix rho = oracle::random_density(d, 3, 12);
  const CMatrix h = oracle::dicke_hamiltonian(n, 1.0, 1.0, n_max, 0.9);
  const CMatrix gen = oracle::liouvillian(h, full_a(n, n_max), open.rate_down(), open.rate_up());
  const CMatrix expect = oracle::unvec(gen * oracle::vec(rho), d);
  const CMatrix got = lindblad_rhs(QuantumState::density(n + 1, n_max + 1, rho), 0.9, p, open);
  EXPECT_LT((got - expect).cwiseAbs().maxCoeff(), 1e-13);

  const CMatrix gen_d = oracle::liouvillian(CMatrix::Zero(d, d), full_a(n, n_max), open.rate_down(), open.rate_up());
  const CMatrix dis = lindblad_dissipator(QuantumState::density(n + 1, n_max + 1, rho), p, open);
  EXPECT_LT((dis - oracle::unvec(gen_d * oracle::vec(rho), d)).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_NEAR(std::abs(got.trace()), 0.0, 1e-13);
}

TEST(ThermalState, GeometricPopulationsAndStationarity) {
  const SystemParams p{2, 1.0, 1.0, 30};
  const OpenSystemParams open{0.1, 0.4};
  const QuantumState rho = thermal_initial_state(p, open);
  EXPECT_NEAR(rho.norm(), 1.0, 1e-14);
  const CMatrix& m = rho.density_matrix();
  const double ratio = 0.4 / 1.4;
  for (int k = 1; k < 10; ++k) EXPECT_NEAR(m(k, k).real() / m(k - 1, k - 1).real(), ratio, 1e-12);
  EXPECT_EQ(m(p.fock_dim(), p.fock_dim()), 0.0);  // spin starts at m = -N/2
  const CMatrix dis = lindblad_dissipator(rho, p, open);
  EXPECT_LT(dis.topLeftCorner(20, 20).cwiseAbs().maxCoeff(), 1e-10);

  const QuantumState vac = thermal_initial_state(p, OpenSystemParams{0.1, 0.0});
  EXPECT_EQ(vac.density_matrix()(0, 0), 1.0);
  EXPECT_THROW(thermal_initial_state(SystemParams{2, 1.0, 1.0, 5}, OpenSystemParams{0.1, 5.0}),
               TruncationError);
}

TEST(EvolveOpen, ZeroDampingReproducesPureRun) {
  const SystemParams p{3, 1.0, 1.0, 20};
  const RampSchedule s = make_ramp(0.5, 1.5, 0.1);
  const Trajectory pure = evolve_pure(initial_state(p), p, s, tight());
  const Trajectory open = evolve_open(initial_state(p).to_density(), p, s, OpenSystemParams{0.0, 0.0}, tight());
  ASSERT_EQ(pure.records.size(), open.records.size());
  for (size_t k = 0; k < pure.records.size(); ++k) {
    EXPECT_NEAR(open.records[k].negativity, pure.records[k].negativity, 1e-6);
    EXPECT_NEAR(open.records[k].entropy, pure.records[k].entropy, 1e-6);
  }
  EXPECT_GT(open.final_state.fidelity_with(pure.final_state), 1.0 - 1e-7);
}

TEST(EvolveOpen, MatchesDenseSuperoperatorOracle) {
  const int n = 1, n_max = 6;
  const SystemParams p{n, 1.0, 1.0, n_max};
  const OpenSystemParams open{0.1, 0.2};
  const RampSchedule s = make_ramp(0.5, 1.0, 0.25);
  const QuantumState rho0 = thermal_initial_state(p, open, 1e-3);
  const Trajectory traj = evolve_open(rho0, p, s, open, tight());
  const CVector ref = dense_open_ramp(oracle::vec(rho0.density_matrix()), n, n_max, 0.5, s.final_time(),
                                      open.rate_down(), open.rate_up(), 200);
  const CMatrix diff = traj.final_state.density_matrix() - oracle::unvec(ref, p.dim());
  EXPECT_LT(oracle::trace_norm(diff), 1e-6);
}

TEST(EvolveOpen, TraceHermiticityPositivity) {
  const SystemParams p{3, 1.0, 1.0, 24};
  const Trajectory traj =
      evolve_open(thermal_initial_state(p, {0.05, 0.0}), p, make_ramp(0.5, 2.0, 0.25), {0.05, 0.0});
  for (const ObservableRecord& r : traj.records) {
    EXPECT_NEAR(r.norm, 1.0, 1e-6);
    EXPECT_LT(r.hermiticity_defect, 1e-12);
    EXPECT_GT(r.min_eigenvalue, -1e-6);
    EXPECT_FALSE(r.entropy_is_witness);
  }
}

TEST(EvolveOpen, DampingReducesEntanglement) {
  const SystemParams p{3, 1.0, 1.0, 24};
  const RampSchedule s = make_ramp(0.5, 2.0, 0.25);
  double peak_prev = 1e9;
  for (double kappa : {0.0, 0.05, 0.2}) {
    const Trajectory t = evolve_open(thermal_initial_state(p, {kappa, 0.0}), p, s, {kappa, 0.0});
    double peak = 0.0;
    for (const auto& r : t.records) peak = std::max(peak, r.log_negativity);
    EXPECT_LT(peak, peak_prev) << kappa;
    peak_prev = peak;
  }
}
