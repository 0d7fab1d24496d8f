#include "dicke/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dicke/errors.hpp"

namespace dicke {

namespace {

// Portable uniform in [-1, 1) from raw mt19937_64 output.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

// Orthogonalizes v against the first `cols` columns of basis (twice), and
// returns the remaining norm.
double orthogonalize(const CMatrix& basis, Index cols, CVector& v) {
  for (int pass = 0; pass < 2; ++pass) {
    if (cols == 0) break;
    const CVector coeffs = basis.leftCols(cols).adjoint() * v;
    v.noalias() -= basis.leftCols(cols) * coeffs;
  }
  return v.norm();
}

}  // namespace

EigenPairs lowest_eigenpairs(const krylov::LinearMap& apply, Index dim, int count,
                             const EigensolverOptions& options) {
  if (dim < 1) throw std::invalid_argument("lowest_eigenpairs: empty space");
  if (count < 1 || count > dim) throw std::invalid_argument("lowest_eigenpairs: bad count");

  const Index max_basis = std::min<Index>(std::max(options.max_basis, count + 4), dim);
  const Index keep = std::min<Index>(count + 2, max_basis - 1);

  CMatrix basis(dim, max_basis);
  CMatrix images(dim, max_basis);  // H * basis
  CMatrix projected = CMatrix::Zero(max_basis, max_basis);
  Index size = 0;

  std::mt19937_64 rng(options.seed);
  CVector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = Complex(unit_uniform(rng), unit_uniform(rng));
  v /= v.norm();

  CVector hv(dim);
  int iterations = 0;
  while (true) {
    basis.col(size) = v;
    apply(v, hv);
    images.col(size) = hv;
    projected.block(0, size, size + 1, 1) = basis.leftCols(size + 1).adjoint() * hv;
    projected.block(size, 0, 1, size) = projected.block(0, size, size, 1).adjoint();
    ++size;
    ++iterations;

    const CMatrix sym = 0.5 * (projected.topLeftCorner(size, size) +
                               CMatrix(projected.topLeftCorner(size, size).adjoint()));
    Eigen::SelfAdjointEigenSolver<CMatrix> small(sym);
    const RVector& theta = small.eigenvalues();
    const CMatrix& s = small.eigenvectors();

    const int wanted = static_cast<int>(std::min<Index>(count, size));
    int first_unconverged = -1;
    CVector residual;
    for (int k = 0; k < wanted; ++k) {
      CVector r = images.leftCols(size) * s.col(k) - theta(k) * (basis.leftCols(size) * s.col(k));
      if (r.norm() > options.residual_tol) {
        first_unconverged = k;
        residual = std::move(r);
        break;
      }
    }
    const bool space_exhausted = size == dim;
    if ((first_unconverged < 0 && wanted == count) || space_exhausted) {
      EigenPairs out;
      out.values = theta.head(count);
      out.vectors = basis.leftCols(size) * s.leftCols(count);
      for (int k = 0; k < count; ++k) out.vectors.col(k).normalize();
      out.iterations = iterations;
      return out;
    }
    if (iterations >= options.max_iterations) {
      std::ostringstream msg;
      msg << "eigensolver did not converge after " << iterations
          << " operator applications (residual tol " << options.residual_tol << ")";
      throw ConvergenceError(msg.str());
    }

    if (first_unconverged < 0) {
      // Fewer Ritz pairs than requested so far: extend with the last residual.
      residual = images.col(size - 1) - basis.leftCols(size) *
                                            (basis.leftCols(size).adjoint() * images.col(size - 1));
    }

    if (size == max_basis) {
      const CMatrix ritz = basis.leftCols(size) * s.leftCols(keep);
      const CMatrix ritz_images = images.leftCols(size) * s.leftCols(keep);
      basis.leftCols(keep) = ritz;
      images.leftCols(keep) = ritz_images;
      projected.setZero();
      for (Index k = 0; k < keep; ++k) projected(k, k) = theta(k);
      size = keep;
    }

    v = residual;
    double nrm = orthogonalize(basis, size, v);
    if (nrm < 1e-12) {
      // Residual already in the span; restart the direction randomly.
      for (Index i = 0; i < dim; ++i) v(i) = Complex(unit_uniform(rng), unit_uniform(rng));
      nrm = orthogonalize(basis, size, v);
    }
    v /= nrm;
  }
}

}  // namespace dicke
