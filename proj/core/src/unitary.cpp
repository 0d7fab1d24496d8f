#include "dicke/unitary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "dicke/errors.hpp"

namespace dicke {

namespace {

// i dpsi/dt = (H0 + lambda V) psi with H0 diagonal.
class PureFlow final : public AffineFlow {
 public:
  explicit PureFlow(const DickeTerms& terms)
      : diag_(terms.bare_diagonal.cast<Complex>()), coupling_(terms.coupling.matrix()) {}

  void apply(double c0, double c1, const CVector& x, CVector& y) const override {
    y.noalias() = coupling_ * x;
    y.array() = c1 * y.array() + c0 * diag_.array() * x.array();
  }
  bool hermitian() const override { return true; }

 private:
  CVector diag_;
  const SparseMatrix& coupling_;
};

double tail_of(const CVector& psi, int spin_dim, int fock_dim, double frac) {
  const int top = std::max(1, static_cast<int>(std::ceil(frac * fock_dim - 1e-12)));
  double w = 0.0;
  for (int s = 0; s < spin_dim; ++s)
    w += psi.segment(Index(s) * fock_dim + fock_dim - top, top).squaredNorm();
  return w;
}

[[noreturn]] void throw_truncation(double tail, const SystemParams& p, double lambda) {
  std::ostringstream msg;
  msg << "Fock truncation breached at lambda=" << lambda << ": tail weight " << tail
      << " with n_max=" << p.n_max << "; raise n_max";
  throw TruncationError(msg.str(), tail);
}

void check_pure_input(const QuantumState& state, const SystemParams& params) {
  if (!state.is_pure()) throw std::invalid_argument("expected a pure state");
  if (state.spin_dim() != params.spin_dim() || state.fock_dim() != params.fock_dim())
    throw std::invalid_argument("state dimensions do not match the system parameters");
}

void merge_stats(SolverReport& report, const StepperStats& stats) {
  report.steps += stats.steps;
  report.rejected_steps += stats.rejected_steps;
  report.error_estimate += stats.error_estimate;
  report.max_krylov_dim = std::max(report.max_krylov_dim, stats.max_krylov_dim);
}

// Owns everything that depends on n_max, rebuilt when the Fock space grows.
struct PureMachinery {
  PureMachinery(const SystemParams& p, const RampSchedule& schedule,
                const PropagationOptions& options, double h)
      : terms(dicke_terms(p)), flow(terms), observables(p) {
    StepperOptions so;
    so.tol = options.tol;
    so.krylov_max_dim = options.krylov_max_dim;
    so.h_initial = h;
    stepper = std::make_unique<MagnusStepper>(
        flow, [schedule](double t) { return schedule.lambda_at(t); }, so);
  }

  DickeTerms terms;
  PureFlow flow;
  ObservableSet observables;
  std::unique_ptr<MagnusStepper> stepper;
};

int extended_n_max(const SystemParams& p, const PropagationOptions& options) {
  const int grown = static_cast<int>(std::ceil(p.n_max * options.extend_factor));
  return std::min(options.max_n_max, std::max(grown, p.n_max + 1));
}

}  // namespace

QuantumState initial_state(const SystemParams& params) {
  params.validate();
  return product_basis_state(params, -params.n_qubits, 0);
}

int default_n_max(int n_qubits, double omega, double lambda_d, double tail_frac) {
  if (n_qubits < 1 || !(omega > 0.0) || !(lambda_d >= 0.0))
    throw std::invalid_argument("default_n_max: invalid arguments");
  const double beta = lambda_d * std::sqrt(static_cast<double>(n_qubits)) / omega;
  const double populated = beta * beta + 6.0 * beta + 8.0;
  return std::max(8, static_cast<int>(std::ceil(populated / (1.0 - tail_frac))));
}

double truncation_monitor(const QuantumState& state, double frac) {
  return fock_tail_weight(state, frac);
}

Trajectory evolve_pure(const QuantumState& state0, const SystemParams& params,
                       const RampSchedule& schedule, const PropagationOptions& options) {
  params.validate();
  schedule.validate();
  check_pure_input(state0, params);
  if (!(options.tol > 0.0)) throw std::invalid_argument("evolve_pure: tol must be > 0");

  Trajectory traj;
  traj.schedule = schedule;
  traj.report.initial_n_max = params.n_max;

  SystemParams p = params;
  CVector y = state0.amplitudes();
  MeasureOptions measure = options.measure;
  measure.tail_frac = options.tail_frac;

  auto machinery = std::make_unique<PureMachinery>(p, schedule, options, 0.05);
  bool wants_extension = false;
  auto grow = [&]() {
    merge_stats(traj.report, machinery->stepper->stats());
    const double h = machinery->stepper->step_size();
    const int next = extended_n_max(p, options);
    y = QuantumState::pure(p.spin_dim(), p.fock_dim(), y).with_fock_dim(next + 1).amplitudes();
    p = p.with_n_max(next);
    machinery = std::make_unique<PureMachinery>(p, schedule, options, h);
    ++traj.report.extensions;
  };

  // Returns true if the Fock space should grow before continuing.
  auto check_tail = [&](double lambda) {
    const double tail = tail_of(y, p.spin_dim(), p.fock_dim(), options.tail_frac);
    traj.report.max_tail_weight = std::max(traj.report.max_tail_weight, tail);
    const bool can_grow = options.auto_extend && p.n_max < options.max_n_max;
    if (can_grow && tail > options.extend_threshold) return true;
    if (tail > options.tail_threshold) throw_truncation(tail, p, lambda);
    return false;
  };

  while (check_tail(schedule.lambda_start)) grow();

  const StepHook hook = [&](double t, CVector&) {
    wants_extension = check_tail(schedule.lambda_at(t));
    return !wants_extension;
  };

  const std::vector<double> lambdas = schedule.checkpoint_lambdas();
  double t = 0.0;
  for (size_t k = 0; k < lambdas.size(); ++k) {
    const double t_target = k == 0 ? 0.0 : schedule.time_at(lambdas[k]);
    while (t < t_target) {
      wants_extension = false;
      machinery->stepper->advance(y, t, t_target, hook);
      if (wants_extension) grow();
    }
    const QuantumState snapshot = QuantumState::pure(p.spin_dim(), p.fock_dim(), y, t, lambdas[k]);
    traj.records.push_back(machinery->observables.measure(snapshot, measure));
  }

  merge_stats(traj.report, machinery->stepper->stats());
  traj.report.final_n_max = p.n_max;
  traj.params = p;
  traj.final_state = QuantumState::pure(p.spin_dim(), p.fock_dim(), std::move(y),
                                        schedule.final_time(), schedule.lambda_d);
  return traj;
}

QuantumState evolve_fixed_coupling(const QuantumState& state0, const SystemParams& params,
                                   double lambda, double duration,
                                   const PropagationOptions& options) {
  params.validate();
  check_pure_input(state0, params);
  if (!(duration >= 0.0)) throw std::invalid_argument("duration must be >= 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("coupling lambda must be >= 0");

  const DickeTerms terms = dicke_terms(params);
  const PureFlow flow(terms);
  StepperOptions so;
  so.tol = options.tol;
  so.krylov_max_dim = options.krylov_max_dim;
  MagnusStepper stepper(flow, [lambda](double) { return lambda; }, so);

  CVector y = state0.amplitudes();
  double t = 0.0;
  stepper.advance(y, t, duration, [&](double, CVector& v) {
    const double tail = tail_of(v, params.spin_dim(), params.fock_dim(), options.tail_frac);
    if (tail > options.tail_threshold) throw_truncation(tail, params, lambda);
    return true;
  });
  return QuantumState::pure(params.spin_dim(), params.fock_dim(), std::move(y),
                            state0.time() + duration, lambda);
}

ConvergenceReport convergence_check(const SystemParams& params, const RampSchedule& schedule,
                                    const PropagationOptions& options, double threshold) {
  PropagationOptions base = options;
  base.auto_extend = false;
  base.tail_threshold = std::numeric_limits<double>::infinity();

  ConvergenceReport report;
  report.tol = options.tol;
  report.n_max = params.n_max;
  report.reference = evolve_pure(initial_state(params), params, schedule, base);

  PropagationOptions fine = base;
  fine.tol = options.tol / 10.0;
  const SystemParams bigger =
      params.with_n_max(static_cast<int>(std::ceil(1.25 * params.n_max)));
  report.refined_n_max = bigger.n_max;
  report.refined = evolve_pure(initial_state(bigger), bigger, schedule, fine);

  const auto& a = report.reference.records;
  const auto& b = report.refined.records;
  for (size_t k = 0; k < std::min(a.size(), b.size()); ++k)
    report.max_entropy_deviation =
        std::max(report.max_entropy_deviation, std::abs(a[k].entropy - b[k].entropy));
  report.passed = a.size() == b.size() && report.max_entropy_deviation < threshold;
  return report;
}

}  // namespace dicke
