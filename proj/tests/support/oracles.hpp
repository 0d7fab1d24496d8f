#pragma once

// Dense reference constructions for small systems. Nothing here calls into
// the library beyond its scalar/matrix typedefs.

#include <Eigen/Dense>

#include "dicke/types.hpp"

namespace oracle {

using dicke::CMatrix;
using dicke::Complex;
using dicke::CVector;
using dicke::Index;
using dicke::RVector;

CMatrix kron(const CMatrix& a, const CMatrix& b);

// sum_k sigma_axis^(k) / 2 on the 2^N qubit register; axis in {'x','y','z'}.
CMatrix pauli_sum(int n_qubits, char axis);

// 2^N x (N+1) isometry onto the symmetric subspace; column s holds the
// normalized uniform superposition of bit strings with s qubits up.
CMatrix dicke_isometry(int n_qubits);

// Collective spin component in the Dicke basis, obtained from the Pauli sums.
CMatrix collective_spin(int n_qubits, char axis);

CMatrix annihilation(int n_max);

// eps Jz + omega n + (2 lambda / sqrt N) Jx (a + a^dag), spin-major product basis.
CMatrix dicke_hamiltonian(int n_qubits, double eps, double omega, int n_max, double lambda);

// exp(-i H t) for Hermitian H.
CMatrix unitary(const CMatrix& h, double t);

// Midpoint-rule product of exact exponentials for lambda(t) = upsilon t.
CVector ramp_evolve(const CVector& psi0, int n_qubits, double eps, double omega, int n_max,
                    double upsilon, double t_end, int slices);

// Generator of d vec(rho)/dt for column-major vec, cavity loss with rates
// gamma_down (a) and gamma_up (a^dag).
CMatrix liouvillian(const CMatrix& h, const CMatrix& a, double gamma_down, double gamma_up);

CMatrix unvec(const CVector& v, Index dim);
CVector vec(const CMatrix& m);

CMatrix partial_trace_field(const CMatrix& rho, int spin_dim, int fock_dim);
CMatrix partial_trace_matter(const CMatrix& rho, int spin_dim, int fock_dim);
CMatrix partial_transpose_spin(const CMatrix& rho, int spin_dim, int fock_dim);

double entropy(const CMatrix& rho);
double trace_norm(const CMatrix& m);
// (||rho^T||_1 - 1) / 2 on the full dense matrix.
double negativity(const CMatrix& rho, int spin_dim, int fock_dim);

// Normalized random complex vector / density matrix from a fixed seed.
CVector random_state(Index dim, unsigned seed);
CMatrix random_density(Index dim, int rank, unsigned seed);

}  // namespace oracle
