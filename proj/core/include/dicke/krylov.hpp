#pragma once

// Krylov-subspace action of a matrix exponential on a vector.
//
// expv_hermitian computes exp(-i tau A) v for Hermitian A via Lanczos.
// expv_general computes exp(tau A) v for arbitrary A via Arnoldi.
// Both grow the subspace until the a posteriori error estimate
//   beta0 * tau * h_{m+1,m} * |e_m^T phi_1(tau H_m) e_1|
// drops below `tol` (absolute, in the 2-norm), or `max_dim` is hit.
// expv_general may then split tau into up to `max_substeps` pieces,
// each with its own subspace and a proportional share of `tol`.

#include <functional>

#include "dicke/types.hpp"

namespace dicke::krylov {

using LinearMap = std::function<void(const CVector& x, CVector& y)>;

struct ExpvOptions {
  int max_dim = 40;
  int min_dim = 2;
  double tol = 1e-12;
  int max_substeps = 1;
};

struct ExpvResult {
  bool converged = false;
  int dim_used = 0;
  double error_estimate = 0.0;
  int substeps = 0;
};

ExpvResult expv_hermitian(const LinearMap& apply, double tau, const CVector& v, CVector& out,
                          const ExpvOptions& options = {});

ExpvResult expv_general(const LinearMap& apply, double tau, const CVector& v, CVector& out,
                        const ExpvOptions& options = {});

}  // namespace dicke::krylov
