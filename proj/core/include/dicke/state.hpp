#pragma once

#include <variant>

#include "dicke/hilbert.hpp"
#include "dicke/types.hpp"

namespace dicke {

enum class StateKind { pure, density };

// Pure amplitude vector or density matrix over the spin (x) Fock product basis,
// tagged with the time and coupling at which it was produced.
class QuantumState {
 public:
  static QuantumState pure(int spin_dim, int fock_dim, CVector amplitudes, double t = 0.0,
                           double lambda = 0.0);
  static QuantumState density(int spin_dim, int fock_dim, CMatrix rho, double t = 0.0,
                              double lambda = 0.0);

  StateKind kind() const noexcept { return is_pure() ? StateKind::pure : StateKind::density; }
  bool is_pure() const noexcept { return std::holds_alternative<CVector>(data_); }

  const CVector& amplitudes() const;
  const CMatrix& density_matrix() const;
  CVector& mutable_amplitudes();
  CMatrix& mutable_density_matrix();

  int spin_dim() const noexcept { return spin_dim_; }
  int fock_dim() const noexcept { return fock_dim_; }
  Index dim() const noexcept { return Index(spin_dim_) * fock_dim_; }

  double time() const noexcept { return t_; }
  double lambda() const noexcept { return lambda_; }
  void set_time(double t, double lambda) noexcept {
    t_ = t;
    lambda_ = lambda;
  }

  // |psi><psi| for pure states, a copy otherwise.
  QuantumState to_density() const;
  // Re-embeds in a Fock space of a different size. Enlarging pads with zeros
  // (exact); shrinking discards the top levels.
  QuantumState with_fock_dim(int new_fock_dim) const;

  // ||psi||_2 for pure states, Re tr(rho) for density matrices.
  double norm() const;

  // Fidelity with a pure reference: |<phi|psi>|^2 or <phi|rho|phi>.
  double fidelity_with(const QuantumState& pure_reference) const;

  bool operator==(const QuantumState& other) const;

 private:
  QuantumState(int spin_dim, int fock_dim, std::variant<CVector, CMatrix> data, double t,
               double lambda);

  int spin_dim_ = 1;
  int fock_dim_ = 1;
  std::variant<CVector, CMatrix> data_;
  double t_ = 0.0;
  double lambda_ = 0.0;
};

// Pure state |m> (x) |n> in the product basis.
QuantumState product_basis_state(const SystemParams& params, int twice_m, int n);

}  // namespace dicke
