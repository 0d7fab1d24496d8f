#pragma once

// Cavity-loss master equation
//   drho/dt = -i [H(lambda), rho] + 2 kappa (nbar + 1) D(rho; a) + 2 kappa nbar D(rho; a^dag)
// with D(rho; A) = A rho A^dag - {A^dag A, rho} / 2, integrated on the vectorized
// density matrix (D^2 complex numbers for Hilbert dimension D).

#include "dicke/unitary.hpp"

namespace dicke {

struct OpenSystemParams {
  double kappa = 0.0;  // field decay rate, in units of omega
  double nbar = 0.0;   // thermal photon number

  void validate() const;
  // Inverse temperature in units of 1/omega, from exp(-beta omega) = nbar / (nbar + 1);
  // +inf at nbar = 0.
  double beta_inv_temp(double omega = 1.0) const;
  double rate_down() const noexcept { return 2.0 * kappa * (nbar + 1.0); }
  double rate_up() const noexcept { return 2.0 * kappa * nbar; }
};

// |-N/2><-N/2| (x) exp(-beta omega a^dag a) / Z on the truncated Fock space,
// renormalized. Throws TruncationError when the discarded thermal weight
// exceeds max_tail.
QuantumState thermal_initial_state(const SystemParams& params, const OpenSystemParams& open,
                                   double max_tail = 1e-8);

// Right-hand side of the master equation at coupling lambda.
CMatrix lindblad_rhs(const QuantumState& rho, double lambda, const SystemParams& params,
                     const OpenSystemParams& open);

// Dissipative part only (both jump channels).
CMatrix lindblad_dissipator(const QuantumState& rho, const SystemParams& params,
                            const OpenSystemParams& open);

// Density-matrix counterpart of evolve_pure. The matter entropy is recorded
// but flagged as no longer an entanglement witness; negativity is the measure
// of record. Throws PositivityError if the lowest eigenvalue of rho drops
// below -options.measure.positivity_tol at a checkpoint.
Trajectory evolve_open(const QuantumState& rho0, const SystemParams& params,
                       const RampSchedule& schedule, const OpenSystemParams& open,
                       const PropagationOptions& options = {});

}  // namespace dicke
