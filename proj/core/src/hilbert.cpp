#include "dicke/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <utility>

namespace dicke {

namespace {

SparseMatrix pruned(SparseMatrix m) {
  m.prune(Complex(0.0, 0.0), 0.0);
  m.makeCompressed();
  return m;
}

}  // namespace

void SystemParams::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("n_qubits must be >= 1");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon))
    throw std::invalid_argument("epsilon must be a positive finite number");
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw std::invalid_argument("omega must be a positive finite number");
}

std::string to_string(LogBase base) { return base == LogBase::natural ? "natural" : "base2"; }

LogBase log_base_from_string(const std::string& name) {
  if (name == "natural" || name == "e") return LogBase::natural;
  if (name == "base2" || name == "2") return LogBase::base2;
  throw std::invalid_argument("unknown entropy log base '" + name + "'");
}

BasisIndex basis_index(const SystemParams& params, int twice_m, int n) {
  const int shifted = twice_m + params.n_qubits;
  if (shifted < 0 || shifted > 2 * params.n_qubits || shifted % 2 != 0)
    throw std::out_of_range("basis_index: m outside [-N/2, N/2]");
  if (n < 0 || n > params.n_max) throw std::out_of_range("basis_index: n outside [0, n_max]");
  return {twice_m, n, Index(shifted / 2) * params.fock_dim() + n};
}

BasisIndex basis_index(const SystemParams& params, Index flat) {
  if (flat < 0 || flat >= params.dim()) throw std::out_of_range("basis_index: flat index");
  const int s = static_cast<int>(flat / params.fock_dim());
  const int n = static_cast<int>(flat % params.fock_dim());
  return {2 * s - params.n_qubits, n, flat};
}

// --- SparseOperator ---------------------------------------------------------

SparseOperator::SparseOperator(SparseMatrix matrix, bool hermitian)
    : matrix_(pruned(std::move(matrix))), hermitian_(hermitian) {
  if (matrix_.rows() != matrix_.cols())
    throw std::invalid_argument("SparseOperator must be square");
  if (hermitian_ && hermiticity_defect() > kHermitianTolerance)
    throw std::invalid_argument("SparseOperator flagged Hermitian but is not");
}

SparseOperator SparseOperator::from_entries(Index dim, const std::vector<SparseEntry>& entries,
                                            bool hermitian) {
  std::set<std::pair<Index, Index>> seen;
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(entries.size());
  for (const auto& e : entries) {
    if (e.row < 0 || e.col < 0 || e.row >= dim || e.col >= dim)
      throw std::out_of_range("SparseOperator entry index out of range");
    if (!seen.emplace(e.row, e.col).second)
      throw std::invalid_argument("SparseOperator duplicate (row, col) entry");
    triplets.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
  }
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseOperator(std::move(m), hermitian);
}

SparseOperator SparseOperator::identity(Index dim) {
  SparseMatrix m(dim, dim);
  m.setIdentity();
  return SparseOperator(std::move(m), true);
}

SparseOperator SparseOperator::diagonal(const RVector& diag) {
  const Index dim = diag.size();
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(dim);
  for (Index i = 0; i < dim; ++i)
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), Complex(diag(i), 0.0));
  SparseMatrix m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseOperator(std::move(m), true);
}

std::vector<SparseEntry> SparseOperator::entries() const {
  std::vector<SparseEntry> out;
  out.reserve(matrix_.nonZeros());
  for (Index r = 0; r < matrix_.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it)
      out.push_back({it.row(), it.col(), it.value()});
  return out;
}

Complex SparseOperator::value(Index row, Index col) const { return matrix_.coeff(row, col); }

SparseOperator SparseOperator::adjoint() const {
  SparseMatrix adj = matrix_.adjoint();
  return SparseOperator(std::move(adj), hermitian_);
}

Complex SparseOperator::trace() const {
  Complex tr = 0.0;
  for (Index i = 0; i < dim(); ++i) tr += matrix_.coeff(i, i);
  return tr;
}

double SparseOperator::hermiticity_defect() const {
  SparseMatrix diff = matrix_ - SparseMatrix(matrix_.adjoint());
  double worst = 0.0;
  for (Index r = 0; r < diff.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(diff, r); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("operator+: dimension mismatch");
  SparseMatrix sum = a.matrix_ + b.matrix_;
  // Entrywise sums of Hermitian matrices stay Hermitian up to rounding.
  SparseOperator out;
  out.matrix_ = pruned(std::move(sum));
  out.hermitian_ = a.hermitian_ && b.hermitian_;
  return out;
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
  return a + (-1.0) * b;
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("operator*: dimension mismatch");
  SparseMatrix prod = (a.matrix_ * b.matrix_).pruned();
  return SparseOperator(std::move(prod), false);
}

SparseOperator operator*(double s, const SparseOperator& a) {
  SparseOperator out;
  out.matrix_ = pruned(s * a.matrix_);
  out.hermitian_ = a.hermitian_;
  return out;
}

SparseOperator operator*(Complex s, const SparseOperator& a) {
  SparseOperator out;
  out.matrix_ = pruned(s * a.matrix_);
  out.hermitian_ = a.hermitian_ && s.imag() == 0.0;
  return out;
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) {
  return a * b - b * a;
}

double max_abs(const SparseOperator& op) {
  double worst = 0.0;
  for (Index r = 0; r < op.matrix().outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(op.matrix(), r); it; ++it)
      worst = std::max(worst, std::abs(it.value()));
  return worst;
}

// --- elementary operators ---------------------------------------------------

SpinOperators build_collective_spin(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("build_collective_spin: N must be >= 1");
  const int dim = n_qubits + 1;
  const double j = 0.5 * n_qubits;

  std::vector<SparseEntry> jz, jp, jm, jx, jy;
  for (int s = 0; s < dim; ++s) {
    const double m = s - j;
    if (m != 0.0) jz.push_back({s, s, Complex(m, 0.0)});
  }
  for (int s = 0; s + 1 < dim; ++s) {
    const double m = s - j;
    const double c = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    jp.push_back({s + 1, s, Complex(c, 0.0)});
    jm.push_back({s, s + 1, Complex(c, 0.0)});
    jx.push_back({s, s + 1, Complex(0.5 * c, 0.0)});
    jx.push_back({s + 1, s, Complex(0.5 * c, 0.0)});
    // J_y = (J+ - J-) / 2i
    jy.push_back({s, s + 1, Complex(0.0, 0.5 * c)});
    jy.push_back({s + 1, s, Complex(0.0, -0.5 * c)});
  }
  return {SparseOperator::from_entries(dim, jx, true), SparseOperator::from_entries(dim, jy, true),
          SparseOperator::from_entries(dim, jz, true), SparseOperator::from_entries(dim, jp, false),
          SparseOperator::from_entries(dim, jm, false)};
}

BosonOperators build_boson(int n_max) {
  if (n_max < 1) throw std::invalid_argument("build_boson: n_max must be >= 1");
  const int dim = n_max + 1;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  std::vector<SparseEntry> a, ad, num, x, p;
  for (int n = 1; n < dim; ++n) {
    const double c = std::sqrt(static_cast<double>(n));
    a.push_back({n - 1, n, Complex(c, 0.0)});
    ad.push_back({n, n - 1, Complex(c, 0.0)});
    num.push_back({n, n, Complex(n, 0.0)});
    x.push_back({n - 1, n, Complex(c * inv_sqrt2, 0.0)});
    x.push_back({n, n - 1, Complex(c * inv_sqrt2, 0.0)});
    // p = i (a_dag - a) / sqrt(2)
    p.push_back({n - 1, n, Complex(0.0, -c * inv_sqrt2)});
    p.push_back({n, n - 1, Complex(0.0, c * inv_sqrt2)});
  }
  return {SparseOperator::from_entries(dim, a, false), SparseOperator::from_entries(dim, ad, false),
          SparseOperator::from_entries(dim, num, true), SparseOperator::from_entries(dim, x, true),
          SparseOperator::from_entries(dim, p, true)};
}

SparseOperator embed_product(const SystemParams& params, const SparseOperator& spin,
                             const SparseOperator& boson) {
  params.validate();
  if (spin.dim() != params.spin_dim())
    throw std::invalid_argument("embed_product: spin operator dimension != N+1");
  if (boson.dim() != params.fock_dim())
    throw std::invalid_argument("embed_product: boson operator dimension != n_max+1");

  const Index fd = params.fock_dim();
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<size_t>(spin.nonzeros() * boson.nonzeros()));
  for (Index r = 0; r < spin.matrix().outerSize(); ++r)
    for (SparseMatrix::InnerIterator s(spin.matrix(), r); s; ++s)
      for (Index q = 0; q < boson.matrix().outerSize(); ++q)
        for (SparseMatrix::InnerIterator b(boson.matrix(), q); b; ++b)
          triplets.emplace_back(static_cast<int>(s.row() * fd + b.row()),
                                static_cast<int>(s.col() * fd + b.col()), s.value() * b.value());
  SparseMatrix m(params.dim(), params.dim());
  m.setFromTriplets(triplets.begin(), triplets.end());
  SparseOperator out(std::move(m), false);
  if (spin.hermitian() && boson.hermitian()) return SparseOperator(out.matrix(), true);
  return out;
}

SparseOperator embed_spin(const SystemParams& params, const SparseOperator& spin) {
  return embed_product(params, spin, SparseOperator::identity(params.fock_dim()));
}

SparseOperator embed_boson(const SystemParams& params, const SparseOperator& boson) {
  return embed_product(params, SparseOperator::identity(params.spin_dim()), boson);
}

std::vector<int> parity_signs(const SystemParams& params) {
  params.validate();
  std::vector<int> signs(static_cast<size_t>(params.dim()));
  for (int s = 0; s < params.spin_dim(); ++s)
    for (int n = 0; n < params.fock_dim(); ++n)
      // m + N/2 = s, so the exponent is n + s.
      signs[static_cast<size_t>(s * params.fock_dim() + n)] = ((n + s) % 2 == 0) ? 1 : -1;
  return signs;
}

SparseOperator parity_operator(const SystemParams& params) {
  const auto signs = parity_signs(params);
  RVector diag(static_cast<Index>(signs.size()));
  for (size_t i = 0; i < signs.size(); ++i) diag(static_cast<Index>(i)) = signs[i];
  return SparseOperator::diagonal(diag);
}

}  // namespace dicke
