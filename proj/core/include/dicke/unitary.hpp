#pragma once

// Pure-state propagation under the ramped Dicke Hamiltonian.

#include <vector>

#include "dicke/hamiltonian.hpp"
#include "dicke/observables.hpp"
#include "dicke/propagator.hpp"
#include "dicke/state.hpp"

namespace dicke {

struct PropagationOptions {
  double tol = 1e-8;  // error per unit time
  int krylov_max_dim = 40;
  int krylov_substeps = 1;  // open-system (Arnoldi) only

  double tail_frac = 0.1;         // top fraction of Fock levels watched
  double tail_threshold = 1e-8;   // abort above this weight
  bool auto_extend = true;        // grow n_max instead of aborting
  double extend_threshold = 1e-10;
  double extend_factor = 1.25;
  int max_n_max = 1000;

  MeasureOptions measure;
};

struct SolverReport {
  long steps = 0;
  long rejected_steps = 0;
  double error_estimate = 0.0;
  double max_tail_weight = 0.0;
  int initial_n_max = 0;
  int final_n_max = 0;
  int extensions = 0;
  int max_krylov_dim = 0;
};

struct Trajectory {
  SystemParams params;  // n_max is the final (possibly extended) value
  RampSchedule schedule;
  std::vector<ObservableRecord> records;
  QuantumState final_state = QuantumState::pure(1, 1, CVector::Ones(1));
  SolverReport report;
};

// |m = -N/2> (x) |0>, the lambda = 0 ground state.
QuantumState initial_state(const SystemParams& params);

// Fock cutoff for a ramp to lambda_d: room for the coherent displacement
// beta = lambda_d sqrt(N) / omega plus several standard deviations, so that
// the top tail_frac of levels starts well above the populated range.
int default_n_max(int n_qubits, double omega, double lambda_d, double tail_frac = 0.1);

// Integrates i d|psi>/dt = H(lambda(t)) |psi> from state0 (taken at
// lambda_start) to lambda_d, recording observables at each checkpoint.
Trajectory evolve_pure(const QuantumState& state0, const SystemParams& params,
                       const RampSchedule& schedule, const PropagationOptions& options = {});

// Fixed coupling for a duration; returns the final state.
QuantumState evolve_fixed_coupling(const QuantumState& state0, const SystemParams& params,
                                   double lambda, double duration,
                                   const PropagationOptions& options = {});

double truncation_monitor(const QuantumState& state, double frac);

struct ConvergenceReport {
  double max_entropy_deviation = 0.0;
  double tol = 0.0;
  int n_max = 0;
  int refined_n_max = 0;
  bool passed = false;
  Trajectory reference;
  Trajectory refined;
};

// Repeats the ramp with tol / 10 and n_max * 1.25 and compares S_N at every
// checkpoint; passes when the largest deviation is below `threshold`.
// Auto-extension is disabled in both runs so that the comparison is between
// the two fixed truncations.
ConvergenceReport convergence_check(const SystemParams& params, const RampSchedule& schedule,
                                    const PropagationOptions& options = {},
                                    double threshold = 1e-3);

}  // namespace dicke
