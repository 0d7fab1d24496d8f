#include "dicke/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dicke/errors.hpp"

namespace dicke {

namespace {

void require_nonnegative_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("coupling lambda must be a finite value >= 0");
}

}  // namespace

double critical_coupling(const SystemParams& params) {
  return 0.5 * std::sqrt(params.omega * params.epsilon);
}

DickeTerms dicke_terms(const SystemParams& params) {
  params.validate();
  const auto spin = build_collective_spin(params.n_qubits);
  const auto boson = build_boson(params.n_max);

  RVector diag(params.dim());
  for (int s = 0; s < params.spin_dim(); ++s)
    for (int n = 0; n < params.fock_dim(); ++n)
      diag(Index(s) * params.fock_dim() + n) =
          params.epsilon * (s - params.spin_j()) + params.omega * n;

  const double g = 2.0 / std::sqrt(static_cast<double>(params.n_qubits));
  SparseOperator coupling(embed_product(params, spin.jx, boson.a + boson.a_dag).matrix() * g, true);
  return {diag, SparseOperator::diagonal(diag), std::move(coupling)};
}

SparseOperator dicke_hamiltonian(const SystemParams& params, double lambda) {
  require_nonnegative_lambda(lambda);
  const DickeTerms terms = dicke_terms(params);
  return terms.bare + lambda * terms.coupling;
}

SparseOperator displaced_frame_hamiltonian(const SystemParams& params, double lambda) {
  require_nonnegative_lambda(lambda);
  params.validate();
  const auto spin = build_collective_spin(params.n_qubits);
  const auto boson = build_boson(params.n_max);
  const double n = params.n_qubits;

  const SparseOperator jx = embed_spin(params, spin.jx);
  const SparseOperator jz = embed_spin(params, spin.jz);
  const SparseOperator a = embed_boson(params, boson.a);
  const double shift = 2.0 * lambda / (params.omega * std::sqrt(n));
  const SparseOperator b = a + shift * jx;
  const SparseOperator bdag_b = b.adjoint() * b;
  const SparseOperator jx2 = jx * jx;

  const SparseOperator h = params.omega * bdag_b +
                           (-4.0 * lambda * lambda / (params.omega * n)) * jx2 +
                           params.epsilon * jz;
  // Products drop the Hermitian flag; restore it after symmetrizing rounding.
  SparseMatrix sym = 0.5 * (h.matrix() + SparseMatrix(h.matrix().adjoint()));
  return SparseOperator(std::move(sym), true);
}

std::vector<WellLevel> strong_coupling_spectrum(const SystemParams& params, double lambda) {
  params.validate();
  if (!(lambda > 0.0)) throw std::invalid_argument("strong_coupling_spectrum: lambda must be > 0");
  const double n = params.n_qubits;
  std::vector<WellLevel> wells;
  wells.reserve(static_cast<size_t>(params.spin_dim()));
  for (int s = 0; s < params.spin_dim(); ++s) {
    const double mx = s - params.spin_j();
    WellLevel w;
    w.m_x = mx;
    w.well_center = 2.0 * lambda / (params.omega * std::sqrt(n)) * mx;
    w.well_minimum = -4.0 * lambda * lambda / (params.omega * n) * mx * mx + 0.5 * params.omega;
    wells.push_back(w);
  }
  return wells;
}

CatAnsatz cat_ansatz(const SystemParams& params, double lambda, double theta, double phi) {
  params.validate();
  const double n = params.n_qubits;
  return {theta, phi, 2.0 * lambda / (params.omega * std::sqrt(n)) * (0.5 * n)};
}

CVector spin_x_extremal_state(int n_qubits, int sign) {
  if (n_qubits < 1) throw std::invalid_argument("spin_x_extremal_state: N must be >= 1");
  if (sign != 1 && sign != -1) throw std::invalid_argument("spin_x_extremal_state: sign is +-1");
  CVector v(n_qubits + 1);
  const double log_norm = -0.5 * n_qubits * std::log(2.0);
  for (int s = 0; s <= n_qubits; ++s) {
    const double log_binom =
        std::lgamma(n_qubits + 1.0) - std::lgamma(s + 1.0) - std::lgamma(n_qubits - s + 1.0);
    const double mag = std::exp(0.5 * log_binom + log_norm);
    v(s) = (sign < 0 && s % 2 == 1) ? -mag : mag;
  }
  return v;
}

double coherent_tail_weight(int n_max, Complex beta) {
  const double mu = std::norm(beta);
  if (mu == 0.0) return 0.0;
  const double log_mu = std::log(mu);
  double tail = 0.0;
  for (long n = n_max + 1;; ++n) {
    const double p = std::exp(-mu + n * log_mu - std::lgamma(n + 1.0));
    tail += p;
    if (n > mu && p < 1e-30 * std::max(tail, 1e-300)) break;
    if (n > n_max + 100000) break;
  }
  return tail;
}

CVector coherent_state(int n_max, Complex beta, double max_tail) {
  if (n_max < 1) throw std::invalid_argument("coherent_state: n_max must be >= 1");
  const double tail = coherent_tail_weight(n_max, beta);
  if (tail > max_tail) {
    std::ostringstream msg;
    msg << "coherent state |beta|=" << std::abs(beta) << " does not fit in n_max=" << n_max
        << " (tail weight " << tail << "); raise n_max";
    throw TruncationError(msg.str(), tail);
  }
  CVector v(n_max + 1);
  const double mu = std::norm(beta);
  if (mu == 0.0) {
    v.setZero();
    v(0) = 1.0;
    return v;
  }
  const double log_abs = std::log(std::abs(beta));
  const double arg = std::arg(beta);
  for (int n = 0; n <= n_max; ++n) {
    const double log_mag = -0.5 * mu + n * log_abs - 0.5 * std::lgamma(n + 1.0);
    v(n) = std::polar(std::exp(log_mag), n * arg);
  }
  return v;
}

QuantumState broken_symmetry_state(const SystemParams& params, double lambda, double theta,
                                   double phi) {
  params.validate();
  if (!(lambda > critical_coupling(params)))
    throw std::invalid_argument("broken_symmetry_state: lambda must exceed the critical coupling");
  const CatAnsatz cat = cat_ansatz(params, lambda, theta, phi);
  const CVector plus_x = spin_x_extremal_state(params.n_qubits, +1);
  const CVector minus_x = spin_x_extremal_state(params.n_qubits, -1);
  const CVector field_minus = coherent_state(params.n_max, Complex(-cat.beta_amp, 0.0));
  const CVector field_plus = coherent_state(params.n_max, Complex(cat.beta_amp, 0.0));

  const Complex c_plus = std::cos(theta);
  const Complex c_minus = std::polar(1.0, phi) * std::sin(theta);
  CVector psi(params.dim());
  for (int s = 0; s < params.spin_dim(); ++s)
    psi.segment(Index(s) * params.fock_dim(), params.fock_dim()) =
        c_plus * plus_x(s) * field_minus + c_minus * minus_x(s) * field_plus;
  psi /= psi.norm();
  return QuantumState::pure(params.spin_dim(), params.fock_dim(), std::move(psi), 0.0, lambda);
}

std::string to_string(ParitySector sector) {
  switch (sector) {
    case ParitySector::even: return "even";
    case ParitySector::odd: return "odd";
    case ParitySector::full: return "full";
  }
  return "full";
}

ParitySector parity_sector_from_string(const std::string& name) {
  if (name == "even") return ParitySector::even;
  if (name == "odd") return ParitySector::odd;
  if (name == "full") return ParitySector::full;
  throw std::invalid_argument("unknown parity sector '" + name + "'");
}

GroundStateResult ground_state(const SystemParams& params, double lambda, ParitySector sector,
                               const EigensolverOptions& options) {
  require_nonnegative_lambda(lambda);
  const DickeTerms terms = dicke_terms(params);
  const SparseOperator h = terms.bare + lambda * terms.coupling;

  std::vector<Index> indices;
  const auto signs = parity_signs(params);
  for (Index i = 0; i < params.dim(); ++i) {
    const int sgn = signs[static_cast<size_t>(i)];
    if (sector == ParitySector::full || (sector == ParitySector::even && sgn > 0) ||
        (sector == ParitySector::odd && sgn < 0))
      indices.push_back(i);
  }
  const Index sub_dim = static_cast<Index>(indices.size());
  if (sub_dim < 2) throw std::invalid_argument("ground_state: sector has fewer than two states");

  // Parity is diagonal, so the sector block is a plain submatrix of H.
  std::vector<Index> position(static_cast<size_t>(params.dim()), -1);
  for (Index k = 0; k < sub_dim; ++k) position[static_cast<size_t>(indices[k])] = k;
  std::vector<Eigen::Triplet<Complex>> triplets;
  for (Index r = 0; r < h.matrix().outerSize(); ++r) {
    if (position[static_cast<size_t>(r)] < 0) continue;
    for (SparseMatrix::InnerIterator it(h.matrix(), r); it; ++it) {
      const Index c = position[static_cast<size_t>(it.col())];
      // H commutes with parity; entries across sectors are exactly zero.
      if (c >= 0)
        triplets.emplace_back(static_cast<int>(position[static_cast<size_t>(r)]),
                              static_cast<int>(c), it.value());
    }
  }
  SparseMatrix block(sub_dim, sub_dim);
  block.setFromTriplets(triplets.begin(), triplets.end());

  const EigenPairs pairs = lowest_eigenpairs(
      [&](const CVector& x, CVector& y) { y.noalias() = block * x; }, sub_dim, 2, options);

  CVector psi = CVector::Zero(params.dim());
  for (Index k = 0; k < sub_dim; ++k) psi(indices[static_cast<size_t>(k)]) = pairs.vectors(k, 0);
  // Fix the global phase: largest component real positive.
  Index arg_max = 0;
  psi.cwiseAbs().maxCoeff(&arg_max);
  psi *= std::polar(1.0, -std::arg(psi(arg_max)));

  GroundStateResult result;
  result.energy_0 = pairs.values(0);
  result.energy_1 = pairs.values(1);
  result.gap = std::max(0.0, pairs.values(1) - pairs.values(0));
  result.state = QuantumState::pure(params.spin_dim(), params.fock_dim(), std::move(psi), 0.0,
                                    lambda);
  result.sector = sector;
  result.iterations = pairs.iterations;
  return result;
}

void RampSchedule::validate() const {
  if (!(upsilon > 0.0) || !std::isfinite(upsilon))
    throw std::invalid_argument("upsilon must be a positive finite number");
  if (!(lambda_start >= 0.0)) throw std::invalid_argument("lambda_start must be >= 0");
  if (!(lambda_d >= lambda_start) || !std::isfinite(lambda_d))
    throw std::invalid_argument("lambda_d must be >= lambda_start");
  if (!(checkpoint_dlambda > 0.0))
    throw std::invalid_argument("checkpoint_dlambda must be > 0");
}

std::vector<double> RampSchedule::checkpoint_lambdas() const {
  validate();
  std::vector<double> out;
  const double span = lambda_d - lambda_start;
  const double steps = span / checkpoint_dlambda;
  const long whole = static_cast<long>(std::floor(steps + 1e-9));
  for (long k = 0; k <= whole; ++k) out.push_back(lambda_start + k * checkpoint_dlambda);
  if (span - whole * checkpoint_dlambda > 1e-9 * std::max(1.0, span))
    out.push_back(lambda_d);
  out.back() = lambda_d;
  if (out.size() >= 2 && out[out.size() - 2] >= lambda_d) out.pop_back();
  return out;
}

RampSchedule make_ramp(double upsilon, double lambda_d, double checkpoint_dlambda) {
  if (!(upsilon > 0.0)) throw std::invalid_argument("make_ramp: upsilon must be > 0");
  if (!(lambda_d > 0.0)) throw std::invalid_argument("make_ramp: lambda_d must be > 0");
  if (!(checkpoint_dlambda > 0.0))
    throw std::invalid_argument("make_ramp: checkpoint_dlambda must be > 0");
  RampSchedule r;
  r.upsilon = upsilon;
  r.lambda_start = 0.0;
  r.lambda_d = lambda_d;
  r.checkpoint_dlambda = checkpoint_dlambda;
  r.validate();
  return r;
}

}  // namespace dicke
