#pragma once

// Time-dependent Dicke Hamiltonian
//   H(lambda) = eps J_z + omega a^dag a + (2 lambda / sqrt(N)) J_x (a^dag + a)
// with a linear coupling ramp lambda(t) = lambda_start + upsilon t, plus the
// displaced-frame rewriting, the strong-coupling double-well picture and
// ground-state diagnostics.

#include <vector>

#include "dicke/eigensolver.hpp"
#include "dicke/hilbert.hpp"
#include "dicke/state.hpp"

namespace dicke {

// Thermodynamic-limit critical coupling sqrt(omega * eps) / 2. Finite-N
// systems cross over at a slightly shifted value.
double critical_coupling(const SystemParams& params);

// H(lambda) = bare + lambda * coupling. `bare_diagonal` is the diagonal of
// `bare` (eps m + omega n), kept separately for fast application.
struct DickeTerms {
  RVector bare_diagonal;
  SparseOperator bare;
  SparseOperator coupling;
};

DickeTerms dicke_terms(const SystemParams& params);

SparseOperator dicke_hamiltonian(const SystemParams& params, double lambda);

// omega b^dag b - (4 lambda^2 / (omega N)) J_x^2 + eps J_z with
// b = a + (2 lambda / (omega sqrt(N))) J_x, assembled from those operators.
SparseOperator displaced_frame_hamiltonian(const SystemParams& params, double lambda);

struct WellLevel {
  double m_x = 0.0;           // J_x eigenvalue
  double well_minimum = 0.0;  // -(4 lambda^2 / (omega N)) m_x^2 + omega / 2
  double well_center = 0.0;   // (2 lambda / (omega sqrt(N))) m_x; the field sits at <a> = -well_center
};

// One harmonic well per J_x eigenvalue, ordered m_x = -N/2 .. N/2. The J_z
// term is dropped, which is accurate for lambda well above critical.
std::vector<WellLevel> strong_coupling_spectrum(const SystemParams& params, double lambda);

struct CatAnsatz {
  double theta = 0.0;
  double phi = 0.0;
  double beta_amp = 0.0;  // (2 lambda / (omega sqrt(N))) * N/2
};

CatAnsatz cat_ansatz(const SystemParams& params, double lambda, double theta, double phi);

// |m_x = sign * N/2> in the J_z basis. The -N/2 state is defined as
// exp(i pi (J_z + N/2)) |m_x = +N/2>, which fixes its phase so that the
// theta = pi/4, phi = 0 cat below has parity +1.
CVector spin_x_extremal_state(int n_qubits, int sign);

// Truncated coherent state |beta> on {|0>..|n_max>}; throws TruncationError if
// the weight beyond n_max exceeds max_tail.
CVector coherent_state(int n_max, Complex beta, double max_tail = 1e-8);
// Weight of |beta> beyond n_max, summed directly from the Poisson tail.
double coherent_tail_weight(int n_max, Complex beta);

// cos(theta) |m_x=+N/2>|-beta> + e^{i phi} sin(theta) |m_x=-N/2>|+beta>.
QuantumState broken_symmetry_state(const SystemParams& params, double lambda, double theta,
                                   double phi);

enum class ParitySector { even, odd, full };

std::string to_string(ParitySector sector);
ParitySector parity_sector_from_string(const std::string& name);

struct GroundStateResult {
  double energy_0 = 0.0;
  double energy_1 = 0.0;
  double gap = 0.0;  // energy_1 - energy_0 inside `sector`
  QuantumState state = QuantumState::pure(1, 1, CVector::Ones(1));
  ParitySector sector = ParitySector::full;
  int iterations = 0;
};

// Two lowest eigenpairs of H(lambda) restricted to the requested parity
// eigenspace. Throws ConvergenceError if the eigensolver stalls.
GroundStateResult ground_state(const SystemParams& params, double lambda, ParitySector sector,
                               const EigensolverOptions& options = {});

struct RampSchedule {
  double upsilon = 1.0;              // annealing velocity
  double lambda_start = 0.0;
  double lambda_d = 2.0;             // coupling reached at the end of the ramp
  double checkpoint_dlambda = 0.01;  // observable sampling interval in lambda

  // lambda_d == lambda_start is accepted as an empty ramp (single checkpoint).
  void validate() const;

  double lambda_at(double t) const noexcept { return lambda_start + upsilon * t; }
  double time_at(double lambda) const noexcept { return (lambda - lambda_start) / upsilon; }
  double final_time() const noexcept { return (lambda_d - lambda_start) / upsilon; }

  // lambda_start, lambda_start + d, ..., lambda_d (both endpoints included).
  std::vector<double> checkpoint_lambdas() const;
};

// Ramp from 0 to lambda_d; all arguments must be positive.
RampSchedule make_ramp(double upsilon, double lambda_d, double checkpoint_dlambda = 0.01);

}  // namespace dicke
