#include "dicke/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "dicke/errors.hpp"

namespace dicke {

namespace {

// Matrix-free Liouvillian on vec(rho) (column-major):
//   G0 rho = -i [H0, rho] + dissipators,  G1 rho = -i [V, rho].
class LiouvilleFlow final : public AffineFlow {
 public:
  LiouvilleFlow(const SystemParams& p, const OpenSystemParams& open, const DickeTerms& terms,
                bool with_hamiltonian = true)
      : dim_(p.dim()),
        spin_dim_(p.spin_dim()),
        fock_dim_(p.fock_dim()),
        down_(open.rate_down()),
        up_(open.rate_up()),
        with_hamiltonian_(with_hamiltonian),
        coupling_(terms.coupling.matrix().real()) {
    f_.resize(dim_);
    for (int s = 0; s < spin_dim_; ++s)
      for (int n = 0; n < fock_dim_; ++n) {
        const Index k = Index(s) * fock_dim_ + n;
        // diag(a^dag a) = n, diag(a a^dag) = n + 1 except 0 on the top level.
        const double loss = down_ * n + up_ * (n + 1 < fock_dim_ ? n + 1.0 : 0.0);
        const double h = with_hamiltonian_ ? terms.bare_diagonal(k) : 0.0;
        f_(k) = Complex(-0.5 * loss, -h);
      }
    ladder_.resize(fock_dim_ - 1);
    for (int n = 0; n + 1 < fock_dim_; ++n) ladder_(n) = std::sqrt(n + 1.0);
  }

  void apply(double c0, double c1, const CVector& x, CVector& y) const override {
    y.resize(dim_ * dim_);
    Eigen::Map<const CMatrix> r(x.data(), dim_, dim_);
    Eigen::Map<CMatrix> out(y.data(), dim_, dim_);
    const Index top = fock_dim_ - 1;
    for (Index l = 0; l < dim_; ++l) {
      out.col(l).array() = c0 * (f_.array() + std::conj(f_(l))) * r.col(l).array();
      const Index n_col = l % fock_dim_;
      if (down_ > 0.0 && n_col < top) {
        // a rho a^dag
        const double w = c0 * down_ * ladder_(n_col);
        for (int s = 0; s < spin_dim_; ++s)
          out.col(l).segment(Index(s) * fock_dim_, top).array() +=
              w * ladder_.array() * r.col(l + 1).segment(Index(s) * fock_dim_ + 1, top).array();
      }
      if (up_ > 0.0 && n_col > 0) {
        // a^dag rho a
        const double w = c0 * up_ * ladder_(n_col - 1);
        for (int s = 0; s < spin_dim_; ++s)
          out.col(l).segment(Index(s) * fock_dim_ + 1, top).array() +=
              w * ladder_.array() * r.col(l - 1).segment(Index(s) * fock_dim_, top).array();
      }
    }
    if (with_hamiltonian_ && c1 != 0.0) {
      const Complex g = Complex(0.0, -c1);
      scratch_.noalias() = coupling_ * r;
      out += g * scratch_;
      scratch_.noalias() = r * coupling_;
      out -= g * scratch_;
    }
  }
  bool hermitian() const override { return false; }

 private:
  Index dim_;
  int spin_dim_, fock_dim_;
  double down_, up_;
  bool with_hamiltonian_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> coupling_;  // V is real
  CVector f_;
  RVector ladder_;
  mutable CMatrix scratch_;
};

void check_density_input(const QuantumState& state, const SystemParams& params) {
  if (state.spin_dim() != params.spin_dim() || state.fock_dim() != params.fock_dim())
    throw std::invalid_argument("state dimensions do not match the system parameters");
}

CVector vectorize(const QuantumState& state) {
  const CMatrix& rho = state.density_matrix();
  return Eigen::Map<const CVector>(rho.data(), rho.size());
}

CMatrix unvectorize(const CVector& y, Index dim) {
  return Eigen::Map<const CMatrix>(y.data(), dim, dim);
}

double diagonal_tail(const CVector& y, Index dim, int spin_dim, int fock_dim, double frac) {
  const int top = std::max(1, static_cast<int>(std::ceil(frac * fock_dim - 1e-12)));
  double w = 0.0;
  for (int s = 0; s < spin_dim; ++s)
    for (int n = fock_dim - top; n < fock_dim; ++n) {
      const Index k = Index(s) * fock_dim + n;
      w += y(k + dim * k).real();
    }
  return w;
}

void hermitize(CVector& y, Index dim) {
  Eigen::Map<CMatrix> r(y.data(), dim, dim);
  for (Index c = 0; c < dim; ++c) {
    r(c, c) = r(c, c).real();
    for (Index k = c + 1; k < dim; ++k) {
      const Complex avg = 0.5 * (r(k, c) + std::conj(r(c, k)));
      r(k, c) = avg;
      r(c, k) = std::conj(avg);
    }
  }
}

void merge_stats(SolverReport& report, const StepperStats& stats) {
  report.steps += stats.steps;
  report.rejected_steps += stats.rejected_steps;
  report.error_estimate += stats.error_estimate;
  report.max_krylov_dim = std::max(report.max_krylov_dim, stats.max_krylov_dim);
}

struct OpenMachinery {
  OpenMachinery(const SystemParams& p, const OpenSystemParams& open, const RampSchedule& schedule,
                const PropagationOptions& options, double h)
      : terms(dicke_terms(p)), flow(p, open, terms), observables(p) {
    StepperOptions so;
    so.tol = options.tol;
    so.krylov_max_dim = options.krylov_max_dim;
    so.krylov_substeps = options.krylov_substeps;
    so.h_initial = h;
    stepper = std::make_unique<MagnusStepper>(
        flow, [schedule](double t) { return schedule.lambda_at(t); }, so);
  }

  DickeTerms terms;
  LiouvilleFlow flow;
  ObservableSet observables;
  std::unique_ptr<MagnusStepper> stepper;
};

}  // namespace

void OpenSystemParams::validate() const {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be >= 0");
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw std::invalid_argument("nbar must be >= 0");
}

double OpenSystemParams::beta_inv_temp(double omega) const {
  if (nbar == 0.0) return std::numeric_limits<double>::infinity();
  return std::log((nbar + 1.0) / nbar) / omega;
}

QuantumState thermal_initial_state(const SystemParams& params, const OpenSystemParams& open,
                                   double max_tail) {
  params.validate();
  open.validate();
  const int fd = params.fock_dim();
  RVector pop = RVector::Zero(fd);
  const double ratio = open.nbar / (open.nbar + 1.0);
  // Untruncated geometric distribution; the discarded weight is ratio^(n_max+1).
  const double tail = std::pow(ratio, fd);
  if (tail > max_tail) {
    std::ostringstream msg;
    msg << "thermal state with nbar=" << open.nbar << " does not fit in n_max=" << params.n_max
        << " (tail weight " << tail << "); raise n_max";
    throw TruncationError(msg.str(), tail);
  }
  double w = 1.0;
  for (int n = 0; n < fd; ++n, w *= ratio) pop(n) = w;
  pop /= pop.sum();
  CMatrix rho = CMatrix::Zero(params.dim(), params.dim());
  for (int n = 0; n < fd; ++n) rho(n, n) = pop(n);  // spin index s = 0 is m = -N/2
  return QuantumState::density(params.spin_dim(), fd, std::move(rho), 0.0, 0.0);
}

CMatrix lindblad_rhs(const QuantumState& rho, double lambda, const SystemParams& params,
                     const OpenSystemParams& open) {
  params.validate();
  open.validate();
  const QuantumState dm = rho.to_density();
  check_density_input(dm, params);
  const DickeTerms terms = dicke_terms(params);
  const LiouvilleFlow flow(params, open, terms);
  CVector out;
  flow.apply(1.0, lambda, vectorize(dm), out);
  return unvectorize(out, params.dim());
}

CMatrix lindblad_dissipator(const QuantumState& rho, const SystemParams& params,
                            const OpenSystemParams& open) {
  params.validate();
  open.validate();
  const QuantumState dm = rho.to_density();
  check_density_input(dm, params);
  const DickeTerms terms = dicke_terms(params);
  const LiouvilleFlow flow(params, open, terms, false);
  CVector out;
  flow.apply(1.0, 0.0, vectorize(dm), out);
  return unvectorize(out, params.dim());
}

Trajectory evolve_open(const QuantumState& rho0, const SystemParams& params,
                       const RampSchedule& schedule, const OpenSystemParams& open,
                       const PropagationOptions& options) {
  params.validate();
  schedule.validate();
  open.validate();
  if (!(options.tol > 0.0)) throw std::invalid_argument("evolve_open: tol must be > 0");
  const QuantumState start = rho0.to_density();
  check_density_input(start, params);

  Trajectory traj;
  traj.schedule = schedule;
  traj.report.initial_n_max = params.n_max;

  SystemParams p = params;
  CVector y = vectorize(start);
  MeasureOptions measure = options.measure;
  measure.tail_frac = options.tail_frac;
  measure.check_positivity = true;

  auto machinery = std::make_unique<OpenMachinery>(p, open, schedule, options, 0.05);
  bool wants_extension = false;
  auto grow = [&]() {
    merge_stats(traj.report, machinery->stepper->stats());
    const double h = machinery->stepper->step_size();
    const int next = std::min(
        options.max_n_max,
        std::max(static_cast<int>(std::ceil(p.n_max * options.extend_factor)), p.n_max + 1));
    const QuantumState grown =
        QuantumState::density(p.spin_dim(), p.fock_dim(), unvectorize(y, p.dim()))
            .with_fock_dim(next + 1);
    p = p.with_n_max(next);
    y = vectorize(grown);
    machinery = std::make_unique<OpenMachinery>(p, open, schedule, options, h);
    ++traj.report.extensions;
  };

  auto check_tail = [&](double lambda) {
    const double tail = diagonal_tail(y, p.dim(), p.spin_dim(), p.fock_dim(), options.tail_frac);
    traj.report.max_tail_weight = std::max(traj.report.max_tail_weight, tail);
    const bool can_grow = options.auto_extend && p.n_max < options.max_n_max;
    if (can_grow && tail > options.extend_threshold) return true;
    if (tail > options.tail_threshold) {
      std::ostringstream msg;
      msg << "Fock truncation breached at lambda=" << lambda << ": tail weight " << tail
          << " with n_max=" << p.n_max << "; raise n_max";
      throw TruncationError(msg.str(), tail);
    }
    return false;
  };

  while (check_tail(schedule.lambda_start)) grow();

  const StepHook hook = [&](double t, CVector& v) {
    hermitize(v, p.dim());
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
    const QuantumState snapshot = QuantumState::density(p.spin_dim(), p.fock_dim(),
                                                        unvectorize(y, p.dim()), t, lambdas[k]);
    ObservableRecord rec = machinery->observables.measure(snapshot, measure);
    if (rec.min_eigenvalue < -measure.positivity_tol) {
      std::ostringstream msg;
      msg << "density matrix lost positivity at lambda=" << lambdas[k]
          << " (lowest eigenvalue " << rec.min_eigenvalue << "); tighten tol";
      throw PositivityError(msg.str());
    }
    traj.records.push_back(std::move(rec));
  }

  merge_stats(traj.report, machinery->stepper->stats());
  traj.report.final_n_max = p.n_max;
  traj.params = p;
  traj.final_state = QuantumState::density(p.spin_dim(), p.fock_dim(), unvectorize(y, p.dim()),
                                           schedule.final_time(), schedule.lambda_d);
  return traj;
}

}  // namespace dicke
