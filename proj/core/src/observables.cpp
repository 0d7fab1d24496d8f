#include "dicke/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace dicke {

namespace {

// Column-major view with one column per spin level: view(n, s) = psi(s, n).
Eigen::Map<const CMatrix> amplitude_matrix(const QuantumState& state) {
  const CVector& psi = state.amplitudes();
  return Eigen::Map<const CMatrix>(psi.data(), state.fock_dim(), state.spin_dim());
}

RVector hermitian_eigenvalues(const CMatrix& m) {
  const CMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

NegativityResult negativity_from_eigenvalues(const RVector& mu) {
  // (||X||_1 - tr X) / 2, i.e. the summed magnitude of negative eigenvalues;
  // equal to (||X||_1 - 1) / 2 for unit-trace states.
  const double trace_norm = mu.cwiseAbs().sum();
  const double trace = mu.sum();
  NegativityResult r;
  r.negativity = std::max(0.0, 0.5 * (trace_norm - trace));
  r.log_negativity = std::log2(2.0 * r.negativity + 1.0);
  return r;
}

}  // namespace

CMatrix reduce_matter(const QuantumState& state) {
  if (state.is_pure()) {
    const auto amp = amplitude_matrix(state);
    return amp.transpose() * amp.conjugate();
  }
  const CMatrix& rho = state.density_matrix();
  const int sd = state.spin_dim();
  const Index fd = state.fock_dim();
  CMatrix out(sd, sd);
  for (int s = 0; s < sd; ++s)
    for (int r = 0; r < sd; ++r) out(s, r) = rho.block(s * fd, r * fd, fd, fd).trace();
  return out;
}

CMatrix reduce_field(const QuantumState& state) {
  if (state.is_pure()) {
    const auto amp = amplitude_matrix(state);
    return amp * amp.adjoint();
  }
  const CMatrix& rho = state.density_matrix();
  const Index fd = state.fock_dim();
  CMatrix out = CMatrix::Zero(fd, fd);
  for (int s = 0; s < state.spin_dim(); ++s) out += rho.block(s * fd, s * fd, fd, fd);
  return out;
}

double entropy_of_spectrum(const RVector& p, LogBase base) {
  double s = 0.0;
  for (Index i = 0; i < p.size(); ++i)
    if (p(i) > kEntropyCutoff) s -= p(i) * std::log(p(i));
  return base == LogBase::base2 ? s / std::log(2.0) : s;
}

double von_neumann_entropy(const CMatrix& rho_sub, LogBase base, double positivity_tol) {
  if (rho_sub.rows() != rho_sub.cols())
    throw std::invalid_argument("von_neumann_entropy: matrix must be square");
  const RVector p = hermitian_eigenvalues(rho_sub);
  if (p.size() > 0 && p.minCoeff() < -positivity_tol) {
    std::ostringstream msg;
    msg << "von_neumann_entropy: matrix is not positive (eigenvalue " << p.minCoeff() << ")";
    throw std::domain_error(msg.str());
  }
  return entropy_of_spectrum(p, base);
}

RVector schmidt_spectrum(const QuantumState& state) {
  const auto amp = amplitude_matrix(state);
  Eigen::JacobiSVD<CMatrix> svd(amp);
  RVector p = svd.singularValues().array().square();
  std::sort(p.data(), p.data() + p.size(), std::greater<>());
  return p;
}

CMatrix partial_transpose_matter(const CMatrix& rho, int spin_dim, int fock_dim) {
  const Index fd = fock_dim;
  if (rho.rows() != spin_dim * fd || rho.cols() != spin_dim * fd)
    throw std::invalid_argument("partial_transpose_matter: dimension mismatch");
  CMatrix out(rho.rows(), rho.cols());
  for (int s = 0; s < spin_dim; ++s)
    for (int r = 0; r < spin_dim; ++r)
      out.block(r * fd, s * fd, fd, fd) = rho.block(s * fd, r * fd, fd, fd);
  return out;
}

NegativityResult negativity(const QuantumState& state) {
  if (!state.is_pure()) {
    const CMatrix pt =
        partial_transpose_matter(state.density_matrix(), state.spin_dim(), state.fock_dim());
    return negativity_from_eigenvalues(hermitian_eigenvalues(pt));
  }
  // rho^T_q = sum_{s,s'} |s'><s| (x) |u_s><u_s'| with u_s = psi(s, .).
  // Writing u_s = sum_k G(k, s) q_k for an orthonormal q from a QR of the
  // field vectors gives <a,b| rho^T_q |c,d> = G(b, c) conj(G(d, a)).
  const auto amp = amplitude_matrix(state);
  const Index sd = amp.cols();
  const Index rank = std::min(amp.rows(), amp.cols());
  Eigen::HouseholderQR<CMatrix> qr(amp);
  const CMatrix g = qr.matrixQR().topRows(rank).triangularView<Eigen::Upper>();
  const Index big = sd * rank;
  CMatrix pt(big, big);
  for (Index a = 0; a < sd; ++a)
    for (Index b = 0; b < rank; ++b)
      for (Index c = 0; c < sd; ++c)
        for (Index d = 0; d < rank; ++d) pt(a * rank + b, c * rank + d) = g(b, c) * std::conj(g(d, a));
  return negativity_from_eigenvalues(hermitian_eigenvalues(pt));
}

NegativityResult negativity_from_spectrum(const RVector& schmidt) {
  double root_sum = 0.0;
  double total = 0.0;
  for (Index i = 0; i < schmidt.size(); ++i) {
    root_sum += std::sqrt(std::max(0.0, schmidt(i)));
    total += schmidt(i);
  }
  NegativityResult r;
  r.negativity = std::max(0.0, 0.5 * (root_sum * root_sum - total));
  r.log_negativity = std::log2(2.0 * r.negativity + 1.0);
  return r;
}

Complex expectation(const SparseOperator& op, const QuantumState& state) {
  if (op.dim() != state.dim()) throw std::invalid_argument("expectation: dimension mismatch");
  Complex value;
  if (state.is_pure()) {
    const CVector& psi = state.amplitudes();
    value = psi.dot(op.matrix() * psi);
  } else {
    // tr(A rho) = sum_ij A_ij rho_ji
    const CMatrix& rho = state.density_matrix();
    value = 0.0;
    for (Index r = 0; r < op.matrix().outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(op.matrix(), r); it; ++it)
        value += it.value() * rho(it.col(), it.row());
  }
  if (op.hermitian()) value.imag(0.0);
  return value;
}

double expectation_real(const SparseOperator& op, const QuantumState& state) {
  return expectation(op, state).real();
}

double fock_tail_weight(const QuantumState& state, double frac) {
  if (!(frac > 0.0 && frac <= 0.5)) throw std::invalid_argument("tail fraction must be in (0, 0.5]");
  const int fd = state.fock_dim();
  const int top = std::max(1, static_cast<int>(std::ceil(frac * fd - 1e-12)));
  const int first = fd - top;
  double w = 0.0;
  for (int s = 0; s < state.spin_dim(); ++s) {
    const Index base = Index(s) * fd;
    if (state.is_pure()) {
      w += state.amplitudes().segment(base + first, top).squaredNorm();
    } else {
      for (int n = first; n < fd; ++n) w += state.density_matrix()(base + n, base + n).real();
    }
  }
  return w;
}

ObservableSet::ObservableSet(const SystemParams& params) : params_(params) {
  params_.validate();
  const auto spin = build_collective_spin(params_.n_qubits);
  const auto boson = build_boson(params_.n_max);
  jx_ = embed_spin(params_, spin.jx);
  jz_ = embed_spin(params_, spin.jz);
  n_op_ = embed_boson(params_, boson.n_op);
  parity_ = parity_signs(params_);
}

ObservableRecord ObservableSet::measure(const QuantumState& state,
                                        const MeasureOptions& options) const {
  if (state.spin_dim() != params_.spin_dim() || state.fock_dim() != params_.fock_dim())
    throw std::invalid_argument("ObservableSet::measure: state does not match system size");
  ObservableRecord rec;
  rec.t = state.time();
  rec.lambda = state.lambda();
  const LogBase base = params_.entropy_log_base;

  rec.entropy = von_neumann_entropy(reduce_matter(state), base, options.positivity_tol);
  rec.jx = expectation_real(jx_, state);
  rec.jz = expectation_real(jz_, state);
  rec.n_photons = expectation_real(n_op_, state);
  rec.tail_weight = fock_tail_weight(state, options.tail_frac);

  double parity = 0.0;
  if (state.is_pure()) {
    const CVector& psi = state.amplitudes();
    for (Index i = 0; i < psi.size(); ++i) parity += parity_[static_cast<size_t>(i)] * std::norm(psi(i));
    rec.norm = psi.norm();
    const RVector p = schmidt_spectrum(state);
    rec.schmidt_spectrum.assign(p.data(), p.data() + p.size());
    rec.field_entropy = entropy_of_spectrum(p, base);
    const NegativityResult neg = options.pure_negativity == NegativityRoute::partial_transpose
                                     ? negativity(state)
                                     : negativity_from_spectrum(p);
    rec.negativity = neg.negativity;
    rec.log_negativity = neg.log_negativity;
    rec.entropy_is_witness = true;
  } else {
    const CMatrix& rho = state.density_matrix();
    for (Index i = 0; i < rho.rows(); ++i) parity += parity_[static_cast<size_t>(i)] * rho(i, i).real();
    rec.norm = rho.trace().real();
    rec.hermiticity_defect = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    rec.field_entropy = von_neumann_entropy(reduce_field(state), base, options.positivity_tol);
    const NegativityResult neg = negativity(state);
    rec.negativity = neg.negativity;
    rec.log_negativity = neg.log_negativity;
    if (options.check_positivity) rec.min_eigenvalue = hermitian_eigenvalues(rho).minCoeff();
    rec.entropy_is_witness = false;
  }
  rec.parity = parity;
  return rec;
}

}  // namespace dicke
