#pragma once

// Product basis |j = N/2, m> (x) |n> of the symmetric collective spin and a
// truncated single boson mode, plus the elementary operators on it.
//
// Ordering is spin-major, Fock-minor:
//   flat = (m + N/2) * (n_max + 1) + n
// so a pure state reshaped column-major as (n_max+1) x (N+1) has one column
// per spin level. Tracing out the field is then a product of contiguous blocks.

#include <cstdint>
#include <string>
#include <vector>

#include "dicke/types.hpp"

namespace dicke {

enum class LogBase { natural, base2 };

struct SystemParams {
  int n_qubits = 1;      // N
  double epsilon = 1.0;  // qubit splitting
  double omega = 1.0;    // field frequency
  int n_max = 1;         // highest retained Fock level
  LogBase entropy_log_base = LogBase::natural;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;

  int spin_dim() const noexcept { return n_qubits + 1; }
  int fock_dim() const noexcept { return n_max + 1; }
  Index dim() const noexcept { return Index(spin_dim()) * fock_dim(); }
  double spin_j() const noexcept { return 0.5 * n_qubits; }

  SystemParams with_n_max(int new_n_max) const {
    SystemParams p = *this;
    p.n_max = new_n_max;
    return p;
  }
};

std::string to_string(LogBase base);
LogBase log_base_from_string(const std::string& name);

// m is stored doubled so half-integers stay exact.
struct BasisIndex {
  int twice_m = 0;
  int n = 0;
  Index flat = 0;

  double m() const noexcept { return 0.5 * twice_m; }
};

BasisIndex basis_index(const SystemParams& params, int twice_m, int n);
BasisIndex basis_index(const SystemParams& params, Index flat);

struct SparseEntry {
  Index row = 0;
  Index col = 0;
  Complex value;
};

// Square sparse operator with a Hermiticity contract. Storage is canonical:
// entries are unique, sorted by (row, col), and explicit zeros are pruned.
class SparseOperator {
 public:
  static constexpr double kHermitianTolerance = 1e-14;

  SparseOperator() = default;
  // Throws if `hermitian` is claimed but not satisfied within tolerance.
  SparseOperator(SparseMatrix matrix, bool hermitian);

  // Rejects duplicate (row, col) pairs and out-of-range indices.
  static SparseOperator from_entries(Index dim, const std::vector<SparseEntry>& entries,
                                     bool hermitian);
  static SparseOperator identity(Index dim);
  static SparseOperator diagonal(const RVector& diag);

  Index dim() const noexcept { return matrix_.rows(); }
  bool hermitian() const noexcept { return hermitian_; }
  const SparseMatrix& matrix() const noexcept { return matrix_; }
  Index nonzeros() const noexcept { return matrix_.nonZeros(); }

  std::vector<SparseEntry> entries() const;
  Complex value(Index row, Index col) const;
  CMatrix to_dense() const { return CMatrix(matrix_); }

  CVector apply(const CVector& v) const { return matrix_ * v; }
  SparseOperator adjoint() const;
  Complex trace() const;

  // Largest |H_ij - conj(H_ji)|.
  double hermiticity_defect() const;

  friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(double s, const SparseOperator& a);
  friend SparseOperator operator*(Complex s, const SparseOperator& a);

 private:
  SparseMatrix matrix_;
  bool hermitian_ = false;
};

// [A, B] = AB - BA.
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);
// Max-abs entry norm.
double max_abs(const SparseOperator& op);

struct SpinOperators {
  SparseOperator jx, jy, jz, jplus, jminus;
};

// Angular momentum j = N/2 in the J_z eigenbasis, ordered m = -j .. +j.
SpinOperators build_collective_spin(int n_qubits);

struct BosonOperators {
  SparseOperator a, a_dag, n_op, x, p;
};

// Truncated ladder operators on {|0>, ..., |n_max>}. a_dag|n_max> = 0, so
// [a, a_dag] = 1 fails only on the last level.
BosonOperators build_boson(int n_max);

// spin (x) boson in the product basis of `params`.
SparseOperator embed_product(const SystemParams& params, const SparseOperator& spin,
                             const SparseOperator& boson);
SparseOperator embed_spin(const SystemParams& params, const SparseOperator& spin);
SparseOperator embed_boson(const SystemParams& params, const SparseOperator& boson);

// Pi = exp(i pi (n + m + N/2)), diagonal with entries +-1.
SparseOperator parity_operator(const SystemParams& params);
// Diagonal of Pi as +-1 integers, one per flat index.
std::vector<int> parity_signs(const SystemParams& params);

}  // namespace dicke
