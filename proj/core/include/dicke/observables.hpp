#pragma once

#include <limits>
#include <vector>

#include "dicke/hilbert.hpp"
#include "dicke/state.hpp"

namespace dicke {

// Partial traces. Both return Hermitian, unit-trace (for normalized input)
// matrices: (N+1)^2 for the matter side, (n_max+1)^2 for the field side.
CMatrix reduce_matter(const QuantumState& state);
CMatrix reduce_field(const QuantumState& state);

// Eigenvalues of a reduced density matrix below this are treated as zero.
inline constexpr double kEntropyCutoff = 1e-14;

// -sum p log p over the spectrum of rho_sub. Throws std::domain_error if an
// eigenvalue is below -positivity_tol.
double von_neumann_entropy(const CMatrix& rho_sub, LogBase base = LogBase::natural,
                           double positivity_tol = 1e-8);
double entropy_of_spectrum(const RVector& p, LogBase base = LogBase::natural);

// Squared Schmidt coefficients of a pure state, non-increasing. Computed from
// the singular values of the amplitude matrix psi(m, n).
RVector schmidt_spectrum(const QuantumState& state);

struct NegativityResult {
  double negativity = 0.0;      // (||rho^T_q||_1 - 1) / 2
  double log_negativity = 0.0;  // log2(2 negativity + 1)
};

// rho^{T_q}: transpose of the matter index pair.
CMatrix partial_transpose_matter(const CMatrix& rho, int spin_dim, int fock_dim);

// Negativity from the partial transpose over the matter index. Pure states are
// handled without forming the D x D projector: the partial transpose is
// diagonalized on its support, span{|m>} (x) span{field vectors psi(m, .)}.
NegativityResult negativity(const QuantumState& state);

// Pure-state identity 2 N + 1 = (sum_i sqrt(p_i))^2 on a Schmidt spectrum.
NegativityResult negativity_from_spectrum(const RVector& schmidt);

// <psi|A|psi> or tr(A rho). The imaginary part is dropped for operators
// flagged Hermitian.
Complex expectation(const SparseOperator& op, const QuantumState& state);
double expectation_real(const SparseOperator& op, const QuantumState& state);

// Population of the top ceil(frac * (n_max+1)) Fock levels.
double fock_tail_weight(const QuantumState& state, double frac);

struct ObservableRecord {
  double t = 0.0;
  double lambda = 0.0;
  double entropy = 0.0;  // S_N of the matter subsystem
  double negativity = 0.0;
  double log_negativity = 0.0;
  double parity = 0.0;
  double jx = 0.0;
  double jz = 0.0;
  double n_photons = 0.0;
  std::vector<double> schmidt_spectrum;  // pure runs only
  double tail_weight = 0.0;

  // Diagnostics.
  double field_entropy = 0.0;
  double norm = 1.0;  // ||psi|| or tr(rho)
  double min_eigenvalue = std::numeric_limits<double>::quiet_NaN();  // density runs
  double hermiticity_defect = 0.0;                                    // density runs
  bool entropy_is_witness = true;  // false once the total state is mixed
};

enum class NegativityRoute { partial_transpose, schmidt };

struct MeasureOptions {
  NegativityRoute pure_negativity = NegativityRoute::partial_transpose;
  bool check_positivity = true;  // density only: lowest eigenvalue of rho
  double tail_frac = 0.1;
  double positivity_tol = 1e-6;
};

// Operators needed for a record, built once per system size.
class ObservableSet {
 public:
  explicit ObservableSet(const SystemParams& params);

  const SystemParams& params() const noexcept { return params_; }
  ObservableRecord measure(const QuantumState& state, const MeasureOptions& options = {}) const;

 private:
  SystemParams params_;
  SparseOperator jx_, jz_, n_op_;
  std::vector<int> parity_;
};

}  // namespace dicke
