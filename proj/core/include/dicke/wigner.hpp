#pragma once

// Phase-space pictures of the two subsystems: the field Wigner function as a
// displaced-parity expectation, and the Agarwal-Wigner function of the
// collective spin on the Bloch sphere.

#include <map>
#include <string>
#include <utility>

#include "dicke/hilbert.hpp"
#include "dicke/types.hpp"

namespace dicke {

// Wigner 3j symbol. Arguments are integers or half-integers. Selection-rule
// violations return 0. Exact rational arithmetic is used when every j is
// below 50, the three-term recursion in j1 otherwise.
double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3);
double wigner_3j_exact(double j1, double j2, double j3, double m1, double m2, double m3);
double wigner_3j_recursive(double j1, double j2, double j3, double m1, double m2, double m3);

// All (j1 j2 j3; -m2-m3 m2 m3) for j1 = j1_min .. j2 + j3, by the
// Schulten-Gordon recursion run inward from both ends and matched.
struct Wigner3jRange {
  double j1_min = 0.0;
  RVector values;
  double at(double j1) const;
};
Wigner3jRange wigner_3j_range(double j2, double j3, double m2, double m3);

inline constexpr double kExact3jLimit = 50.0;

// Phase of the multipole operators
//   T_{l,m} = sum_{M,M'} (-1)^{j-X} sqrt(2l+1) (j l j; -M m M') |j M><j M'|
// standard: X = M (orthonormal, T_{l,-m} = (-1)^m T_{l,m}^dag);
// multipole_index: X = m.
enum class MultipolePhase { standard, multipole_index };

std::string to_string(MultipolePhase phase);
MultipolePhase multipole_phase_from_string(const std::string& name);

struct MultipoleSet {
  int n_qubits = 0;
  MultipolePhase phase = MultipolePhase::standard;
  std::map<std::pair<int, int>, SparseOperator> operators;  // (l, m) -> T_{l,m}

  const SparseOperator& at(int l, int m) const;
  size_t size() const noexcept { return operators.size(); }
};

MultipoleSet multipole_operators(int n_qubits, MultipolePhase phase = MultipolePhase::standard);

struct SphericalWignerGrid {
  RVector theta_values;
  RVector phi_values;
  RMatrix values;                  // values(i_theta, i_phi)
  double max_imag_residue = 0.0;   // largest |Im W| before it was dropped
  MultipolePhase phase = MultipolePhase::standard;
};

// W(theta, phi) = sum_{l,m} tr(rho_q T_{l,m}) Y_{l,m}(theta, phi) on a
// uniform grid, theta in [0, pi], phi in [0, 2 pi] (both ends included).
SphericalWignerGrid agarwal_wigner(const CMatrix& rho_q, int n_theta = 181, int n_phi = 361,
                                   MultipolePhase phase = MultipolePhase::standard);
SphericalWignerGrid agarwal_wigner(const CMatrix& rho_q, const MultipoleSet& multipoles,
                                   int n_theta = 181, int n_phi = 361);

struct FieldWignerOptions {
  double x_min = -4.0, x_max = 4.0;
  double p_min = -4.0, p_max = 4.0;
  int nx = 201, np = 201;
  // false: sum_n (-1)^n <n|D^dag rho D|n>, in [-1, 1].
  // true: multiplied by 2/pi, unit integral over d^2 alpha.
  bool unit_integral = false;
};

// Symmetric window [-w, w]^2 with w = max(4, 2 beta_max).
FieldWignerOptions default_field_window(double beta_max);

struct PlanarWignerGrid {
  RVector x_values;
  RVector p_values;
  RMatrix values;  // values(i_x, i_p)
  double max_imag_residue = 0.0;
  std::string convention_note;
};

// Displaced parity at alpha = (x + i p) / sqrt(2), evaluated through the
// Laguerre recursion for <m| D^dag(alpha) Pi D(alpha) |n>. Throws
// std::invalid_argument when the window reaches beyond the phase-space radius
// sqrt(2 n_max + 1) + 3 covered by the truncated Fock space.
PlanarWignerGrid field_wigner(const CMatrix& rho_b, const FieldWignerOptions& options = {});
double field_wigner_at(const CMatrix& rho_b, double x, double p);

}  // namespace dicke
