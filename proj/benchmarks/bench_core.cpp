#include <benchmark/benchmark.h>

#include "dicke/lindblad.hpp"
#include "dicke/krylov.hpp"
#include "dicke/observables.hpp"
#include "dicke/unitary.hpp"
#include "dicke/wigner.hpp"

using namespace dicke;

namespace {

SystemParams params_for(int n) { return SystemParams{n, 1.0, 1.0, default_n_max(n, 1.0, 2.0)}; }

CVector spread_state(const SystemParams& p) {
  CVector v(p.dim());
  for (Index i = 0; i < v.size(); ++i) v(i) = Complex(std::cos(0.3 * i), std::sin(0.7 * i));
  return v.normalized();
}

void BM_HamiltonianMatvec(benchmark::State& state) {
  const SystemParams p = params_for(static_cast<int>(state.range(0)));
  const SparseOperator h = dicke_hamiltonian(p, 1.0);
  const CVector v = spread_state(p);
  CVector out(v.size());
  for (auto _ : state) {
    out.noalias() = h.matrix() * v;
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["dim"] = static_cast<double>(p.dim());
}
BENCHMARK(BM_HamiltonianMatvec)->Arg(9)->Arg(21)->Arg(81);

void BM_LanczosExpv(benchmark::State& state) {
  const SystemParams p = params_for(static_cast<int>(state.range(0)));
  const SparseOperator h = dicke_hamiltonian(p, 1.0);
  const CVector v = spread_state(p);
  CVector out;
  const krylov::LinearMap apply = [&](const CVector& x, CVector& y) { y.noalias() = h.matrix() * x; };
  for (auto _ : state) {
    const auto r = krylov::expv_hermitian(apply, 0.05, v, out);
    benchmark::DoNotOptimize(r.dim_used);
  }
}
BENCHMARK(BM_LanczosExpv)->Arg(9)->Arg(21)->Arg(81)->Unit(benchmark::kMicrosecond);

void BM_PureRamp(benchmark::State& state) {
  const SystemParams p = params_for(static_cast<int>(state.range(0)));
  const RampSchedule s = make_ramp(1.0, 2.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_pure(initial_state(p), p, s).report.steps);
}
BENCHMARK(BM_PureRamp)->Arg(9)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_LindbladRhs(benchmark::State& state) {
  const SystemParams p = params_for(static_cast<int>(state.range(0)));
  const OpenSystemParams open{0.05, 0.0};
  const QuantumState rho = initial_state(p).to_density();
  for (auto _ : state) benchmark::DoNotOptimize(lindblad_rhs(rho, 1.0, p, open).data());
}
BENCHMARK(BM_LindbladRhs)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMicrosecond);

void BM_Negativity(benchmark::State& state) {
  const SystemParams p = params_for(static_cast<int>(state.range(0)));
  const QuantumState psi = QuantumState::pure(p.spin_dim(), p.fock_dim(), spread_state(p));
  const bool schmidt = state.range(1) != 0;
  for (auto _ : state) {
    const NegativityResult r = schmidt ? negativity_from_spectrum(schmidt_spectrum(psi)) : negativity(psi);
    benchmark::DoNotOptimize(r.negativity);
  }
}
BENCHMARK(BM_Negativity)->Args({9, 0})->Args({9, 1})->Args({21, 1})->Unit(benchmark::kMillisecond);

void BM_ThreeJExact(benchmark::State& state) {
  const double j = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wigner_3j_exact(j, j, 2.0 * j - 3.0, 1.0, -2.0, 1.0));
}
BENCHMARK(BM_ThreeJExact)->Arg(5)->Arg(20)->Arg(45);

void BM_ThreeJRange(benchmark::State& state) {
  const double j = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wigner_3j_range(j, j, 1.0, -2.0).values.data());
}
BENCHMARK(BM_ThreeJRange)->Arg(20)->Arg(80)->Arg(200);

void BM_AgarwalWigner(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const MultipoleSet set = multipole_operators(n);
  CMatrix rho = CMatrix::Identity(n + 1, n + 1) / (n + 1.0);
  rho(0, n) = rho(n, 0) = 0.2 / (n + 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(agarwal_wigner(rho, set, 91, 181).values.data());
}
BENCHMARK(BM_AgarwalWigner)->Arg(9)->Arg(21)->Unit(benchmark::kMillisecond);

void BM_FieldWigner(benchmark::State& state) {
  const int n_max = static_cast<int>(state.range(0));
  CMatrix rho = CMatrix::Zero(n_max + 1, n_max + 1);
  for (int k = 0; k <= n_max; ++k) rho(k, k) = 1.0 / (n_max + 1.0);
  FieldWignerOptions o = default_field_window(0.4 * std::sqrt(n_max));
  o.nx = o.np = 101;
  for (auto _ : state) benchmark::DoNotOptimize(field_wigner(rho, o).values.data());
}
BENCHMARK(BM_FieldWigner)->Arg(40)->Arg(120)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
