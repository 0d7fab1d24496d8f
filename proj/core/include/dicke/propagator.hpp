#pragma once

// Adaptive fourth-order commutator-free Magnus integrator for linear systems
// whose generator is affine in the ramped coupling:
//
//   hermitian flow:   i dy/dt = (H0 + lambda(t) H1) y
//   general flow:       dy/dt = (L0 + lambda(t) L1) y
//
// One step is a product of two Krylov exponentials evaluated at the two Gauss
// nodes. The local error is estimated by step doubling (one step of h against
// two of h/2); a step is accepted when that estimate is below tol * h, so the
// accumulated error over a run of length T stays below tol * T.

#include <functional>

#include "dicke/krylov.hpp"
#include "dicke/types.hpp"

namespace dicke {

class AffineFlow {
 public:
  virtual ~AffineFlow() = default;
  // y = (c0 * G0 + c1 * G1) x
  virtual void apply(double c0, double c1, const CVector& x, CVector& y) const = 0;
  // true: exponentials are exp(-i tau G); false: exp(tau G).
  virtual bool hermitian() const = 0;
};

struct StepperOptions {
  double tol = 1e-8;  // local error per unit time
  int krylov_max_dim = 40;
  double h_initial = 0.05;
  double h_min = 1e-10;
  double h_max = 1e300;
  int krylov_substeps = 1;  // Arnoldi only
};

struct StepperStats {
  long steps = 0;
  long rejected_steps = 0;
  double error_estimate = 0.0;  // sum of accepted local error estimates
  int max_krylov_dim = 0;
};

// Called after each accepted step with the new time. Returning false stops
// advance() early (the state is consistent at the returned time).
using StepHook = std::function<bool(double t, CVector& y)>;

class MagnusStepper {
 public:
  MagnusStepper(const AffineFlow& flow, std::function<double(double)> lambda_of_t,
                StepperOptions options);

  // Integrates y from t to t_end. Returns true when t_end was reached, false if
  // the hook asked to stop. Throws ConvergenceError on step underflow.
  bool advance(CVector& y, double& t, double t_end, const StepHook& hook = {});

  const StepperStats& stats() const noexcept { return stats_; }
  double step_size() const noexcept { return h_; }
  void set_step_size(double h) noexcept { h_ = h; }

 private:
  // One CF4 step of size h; returns false if a Krylov expansion failed.
  bool cf4_step(const CVector& y, double t, double h, CVector& out, double krylov_tol);
  bool exponential(double c0, double c1, double tau, const CVector& v, CVector& out,
                   double krylov_tol);

  const AffineFlow& flow_;
  std::function<double(double)> lambda_of_t_;
  StepperOptions options_;
  StepperStats stats_;
  double h_;
};

}  // namespace dicke
