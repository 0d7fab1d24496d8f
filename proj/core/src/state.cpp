#include "dicke/state.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace dicke {

QuantumState::QuantumState(int spin_dim, int fock_dim, std::variant<CVector, CMatrix> data,
                           double t, double lambda)
    : spin_dim_(spin_dim), fock_dim_(fock_dim), data_(std::move(data)), t_(t), lambda_(lambda) {
  if (spin_dim_ < 1 || fock_dim_ < 1) throw std::invalid_argument("QuantumState: empty factor");
}

QuantumState QuantumState::pure(int spin_dim, int fock_dim, CVector amplitudes, double t,
                                double lambda) {
  if (amplitudes.size() != Index(spin_dim) * fock_dim)
    throw std::invalid_argument("QuantumState::pure: amplitude length != spin_dim * fock_dim");
  return QuantumState(spin_dim, fock_dim, std::move(amplitudes), t, lambda);
}

QuantumState QuantumState::density(int spin_dim, int fock_dim, CMatrix rho, double t,
                                   double lambda) {
  const Index d = Index(spin_dim) * fock_dim;
  if (rho.rows() != d || rho.cols() != d)
    throw std::invalid_argument("QuantumState::density: matrix is not (spin_dim*fock_dim)^2");
  return QuantumState(spin_dim, fock_dim, std::move(rho), t, lambda);
}

const CVector& QuantumState::amplitudes() const {
  if (!is_pure()) throw std::logic_error("QuantumState: not a pure state");
  return std::get<CVector>(data_);
}

const CMatrix& QuantumState::density_matrix() const {
  if (is_pure()) throw std::logic_error("QuantumState: not a density matrix");
  return std::get<CMatrix>(data_);
}

CVector& QuantumState::mutable_amplitudes() {
  if (!is_pure()) throw std::logic_error("QuantumState: not a pure state");
  return std::get<CVector>(data_);
}

CMatrix& QuantumState::mutable_density_matrix() {
  if (is_pure()) throw std::logic_error("QuantumState: not a density matrix");
  return std::get<CMatrix>(data_);
}

QuantumState QuantumState::to_density() const {
  if (!is_pure()) return *this;
  const CVector& psi = amplitudes();
  CMatrix rho = psi * psi.adjoint();
  return density(spin_dim_, fock_dim_, std::move(rho), t_, lambda_);
}

QuantumState QuantumState::with_fock_dim(int new_fock_dim) const {
  if (new_fock_dim < 1) throw std::invalid_argument("with_fock_dim: size must be >= 1");
  const int keep = std::min(fock_dim_, new_fock_dim);
  const Index new_dim = Index(spin_dim_) * new_fock_dim;
  if (is_pure()) {
    const CVector& psi = amplitudes();
    CVector out = CVector::Zero(new_dim);
    for (int s = 0; s < spin_dim_; ++s)
      out.segment(Index(s) * new_fock_dim, keep) = psi.segment(Index(s) * fock_dim_, keep);
    return pure(spin_dim_, new_fock_dim, std::move(out), t_, lambda_);
  }
  const CMatrix& rho = density_matrix();
  CMatrix out = CMatrix::Zero(new_dim, new_dim);
  for (int s = 0; s < spin_dim_; ++s)
    for (int r = 0; r < spin_dim_; ++r)
      out.block(Index(s) * new_fock_dim, Index(r) * new_fock_dim, keep, keep) =
          rho.block(Index(s) * fock_dim_, Index(r) * fock_dim_, keep, keep);
  return density(spin_dim_, new_fock_dim, std::move(out), t_, lambda_);
}

double QuantumState::norm() const {
  if (is_pure()) return amplitudes().norm();
  return density_matrix().trace().real();
}

double QuantumState::fidelity_with(const QuantumState& ref) const {
  if (!ref.is_pure()) throw std::invalid_argument("fidelity_with: reference must be pure");
  if (ref.dim() != dim()) throw std::invalid_argument("fidelity_with: dimension mismatch");
  const CVector& phi = ref.amplitudes();
  if (is_pure()) return std::norm(phi.dot(amplitudes()));
  return phi.dot(density_matrix() * phi).real();
}

bool QuantumState::operator==(const QuantumState& other) const {
  if (spin_dim_ != other.spin_dim_ || fock_dim_ != other.fock_dim_ || t_ != other.t_ ||
      lambda_ != other.lambda_ || is_pure() != other.is_pure())
    return false;
  if (is_pure()) return amplitudes() == other.amplitudes();
  return density_matrix() == other.density_matrix();
}

QuantumState product_basis_state(const SystemParams& params, int twice_m, int n) {
  const BasisIndex idx = basis_index(params, twice_m, n);
  CVector psi = CVector::Zero(params.dim());
  psi(idx.flat) = 1.0;
  return QuantumState::pure(params.spin_dim(), params.fock_dim(), std::move(psi));
}

}  // namespace dicke
