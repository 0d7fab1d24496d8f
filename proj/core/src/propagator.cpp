#include "dicke/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "dicke/errors.hpp"

namespace dicke {

namespace {

const double kSqrt3 = std::sqrt(3.0);
// Gauss nodes and the two exponent weights of the CF4 scheme.
const double kNode1 = 0.5 - kSqrt3 / 6.0;
const double kNode2 = 0.5 + kSqrt3 / 6.0;
const double kEarly = (3.0 - 2.0 * kSqrt3) / 12.0;
const double kLate = (3.0 + 2.0 * kSqrt3) / 12.0;

}  // namespace

MagnusStepper::MagnusStepper(const AffineFlow& flow, std::function<double(double)> lambda_of_t,
                             StepperOptions options)
    : flow_(flow),
      lambda_of_t_(std::move(lambda_of_t)),
      options_(options),
      h_(options.h_initial) {}

bool MagnusStepper::exponential(double c0, double c1, double tau, const CVector& v, CVector& out,
                                double krylov_tol) {
  const krylov::LinearMap apply = [&](const CVector& x, CVector& y) {
    flow_.apply(c0, c1, x, y);
  };
  krylov::ExpvOptions opts;
  opts.max_dim = options_.krylov_max_dim;
  opts.tol = krylov_tol;
  opts.max_substeps = options_.krylov_substeps;
  const auto res = flow_.hermitian() ? krylov::expv_hermitian(apply, tau, v, out, opts)
                                     : krylov::expv_general(apply, tau, v, out, opts);
  stats_.max_krylov_dim = std::max(stats_.max_krylov_dim, res.dim_used);
  return res.converged;
}

bool MagnusStepper::cf4_step(const CVector& y, double t, double h, CVector& out,
                             double krylov_tol) {
  const double l1 = lambda_of_t_(t + kNode1 * h);
  const double l2 = lambda_of_t_(t + kNode2 * h);
  CVector mid;
  // exp(h (a1 G1 + a2 G2)) exp(h (a2 G1 + a1 G2)), rightmost first.
  if (!exponential(kEarly + kLate, kLate * l1 + kEarly * l2, h, y, mid, krylov_tol)) return false;
  return exponential(kEarly + kLate, kEarly * l1 + kLate * l2, h, mid, out, krylov_tol);
}

bool MagnusStepper::advance(CVector& y, double& t, double t_end, const StepHook& hook) {
  CVector full, half, fine;
  const double span = std::max(1.0, std::abs(t_end));
  while (t < t_end) {
    const double remaining = t_end - t;
    // Land exactly on t_end, avoiding a sliver step just before it.
    double h = std::min({h_, options_.h_max, remaining});
    const bool last = h >= remaining * (1.0 - 1e-12) || remaining - h < 1e-3 * h;
    if (last) h = remaining;
    if (h < options_.h_min && remaining > 1e-14 * span) {
      std::ostringstream msg;
      msg << "time step underflow at t=" << t << " (h=" << h << "); the problem is too stiff for "
          << "tol=" << options_.tol;
      throw ConvergenceError(msg.str());
    }

    const double local_tol = options_.tol * h;
    const double krylov_tol = 0.01 * local_tol;
    const bool ok = cf4_step(y, t, h, full, krylov_tol) &&
                    cf4_step(y, t, 0.5 * h, half, krylov_tol) &&
                    cf4_step(half, t + 0.5 * h, 0.5 * h, fine, krylov_tol);
    if (!ok) {
      ++stats_.rejected_steps;
      h_ = 0.5 * h;
      continue;
    }
    // Fourth order: the half-step result carries error ~ diff / (2^4 - 1).
    const double err = (fine - full).norm() / 15.0;
    if (err <= local_tol) {
      y.swap(fine);
      t = last ? t_end : t + h;
      ++stats_.steps;
      stats_.error_estimate += err;
      const double grow = err > 0.0 ? 0.9 * std::pow(local_tol / err, 0.25) : 2.0;
      // A clipped final step says nothing about the natural step size.
      if (!last || h >= h_) h_ = h * std::clamp(grow, 0.2, 2.0);
      if (hook && !hook(t, y)) return t >= t_end;
    } else {
      ++stats_.rejected_steps;
      h_ = h * std::clamp(0.9 * std::pow(local_tol / err, 0.25), 0.2, 0.9);
    }
  }
  return true;
}

}  // namespace dicke
