#include "dicke/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace dicke::krylov {

namespace {

// phi_1(z) = (e^z - 1) / z with a series near zero.
Complex phi1(Complex z) {
  if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
  return (std::exp(z) - 1.0) / z;
}

}  // namespace

ExpvResult expv_hermitian(const LinearMap& apply, double tau, const CVector& v, CVector& out,
                          const ExpvOptions& options) {
  const Index dim = v.size();
  const double beta0 = v.norm();
  ExpvResult result;
  if (beta0 == 0.0 || tau == 0.0) {
    out = v;
    result.converged = true;
    return result;
  }
  const int max_dim = static_cast<int>(std::min<Index>(options.max_dim, dim));

  std::vector<CVector> basis;
  basis.reserve(static_cast<size_t>(max_dim));
  basis.push_back(v / beta0);
  std::vector<double> alpha, beta;
  CVector w(dim);
  RVector coeffs;

  for (int j = 0; j < max_dim; ++j) {
    apply(basis[static_cast<size_t>(j)], w);
    const double a = basis[static_cast<size_t>(j)].dot(w).real();
    w -= a * basis[static_cast<size_t>(j)];
    if (j > 0) w -= beta.back() * basis[static_cast<size_t>(j - 1)];
    alpha.push_back(a);
    const double b = w.norm();

    const int m = j + 1;
    RVector diag = Eigen::Map<RVector>(alpha.data(), m);
    RVector sub = m > 1 ? RVector(Eigen::Map<RVector>(beta.data(), m - 1)) : RVector();
    Eigen::SelfAdjointEigenSolver<RMatrix> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const RMatrix& q = eig.eigenvectors();
    const RVector& lam = eig.eigenvalues();
    // y = Q exp(-i tau Lambda) Q^T e1 ; phi = Q phi1(-i tau Lambda) Q^T e1
    CVector y = CVector::Zero(m);
    Complex phi_last = 0.0;
    for (int k = 0; k < m; ++k) {
      const Complex z(0.0, -tau * lam(k));
      const double w0 = q(0, k);
      y += (std::exp(z) * w0) * q.col(k).cast<Complex>();
      phi_last += phi1(z) * w0 * q(m - 1, k);
    }
    const bool breakdown = b <= 1e-14 * std::max(1.0, std::abs(a));
    const double err = breakdown ? 0.0 : beta0 * std::abs(tau) * b * std::abs(phi_last);
    result.dim_used = m;
    result.error_estimate = err;
    if ((m >= options.min_dim && err <= options.tol) || breakdown || m == max_dim) {
      result.converged = breakdown || err <= options.tol;
      out.setZero(dim);
      for (int k = 0; k < m; ++k) out += (beta0 * y(k)) * basis[static_cast<size_t>(k)];
      return result;
    }
    beta.push_back(b);
    basis.push_back(w / b);
  }
  return result;  // unreachable
}

ExpvResult expv_general(const LinearMap& apply, double tau, const CVector& v, CVector& out,
                        const ExpvOptions& options) {
  const Index dim = v.size();
  ExpvResult result;
  if (v.norm() == 0.0 || tau == 0.0) {
    out = v;
    result.converged = true;
    return result;
  }
  const int max_dim = static_cast<int>(std::min<Index>(options.max_dim, dim));

  // Reused across calls; the basis dominates memory for Liouvillian vectors.
  thread_local CMatrix basis;
  if (basis.rows() != dim || basis.cols() < max_dim + 1) basis.resize(dim, max_dim + 1);
  CMatrix hess(max_dim + 1, max_dim);
  CVector w(dim);
  out = v;

  // Exact exp of the m x m Hessenberg block over span s, with the error estimate.
  // exp of [[s H, e1], [0, 0]] gives exp(s H) e1 (first column) and phi_1(s H) e1 (last).
  const auto project = [&](int m, double s, double beta0, double b, CVector& coeffs) {
    CMatrix aug = CMatrix::Zero(m + 1, m + 1);
    aug.topLeftCorner(m, m) = s * hess.topLeftCorner(m, m);
    aug(0, m) = 1.0;
    const CMatrix e = aug.exp();
    coeffs = beta0 * e.col(0).head(m);
    return beta0 * std::abs(s) * b * std::abs(e(m - 1, m));
  };

  double remaining = tau;
  double hint = 0.0;
  for (int sub = 0;; ++sub) {
    const double beta0 = out.norm();
    const double budget = options.tol * std::abs(remaining / tau);
    basis.col(0) = out / beta0;
    hess.setZero();
    CVector coeffs;
    for (int j = 0; j < max_dim; ++j) {
      apply(basis.col(j), w);
      // Classical Gram-Schmidt with one conditional reorthogonalization pass.
      const double before = w.norm();
      CVector h = basis.leftCols(j + 1).adjoint() * w;
      w.noalias() -= basis.leftCols(j + 1) * h;
      double b = w.norm();
      if (b < 0.7071 * before) {
        const CVector h2 = basis.leftCols(j + 1).adjoint() * w;
        w.noalias() -= basis.leftCols(j + 1) * h2;
        h += h2;
        b = w.norm();
      }
      hess.col(j).head(j + 1) = h;
      hess(j + 1, j) = b;

      const int m = j + 1;
      const bool breakdown = b <= 1e-14 * std::max(1.0, hess.topLeftCorner(m, m).norm());
      double err = project(m, remaining, beta0, breakdown ? 0.0 : b, coeffs);
      result.dim_used = std::max(result.dim_used, m);
      if ((m >= options.min_dim && err <= budget) || breakdown) {
        out = basis.leftCols(m) * coeffs;
        result.error_estimate += err;
        result.converged = true;
        return result;
      }
      if (m < max_dim) {
        basis.col(j + 1) = w / b;
        continue;
      }
      if (sub + 1 >= options.max_substeps) {
        out = basis.leftCols(m) * coeffs;
        result.error_estimate += err;
        return result;
      }
      // Shrink the span until the local error fits its share of the budget.
      double s = remaining;
      if (hint != 0.0 && std::abs(hint) < std::abs(remaining)) {
        s = hint;
        err = project(m, s, beta0, b, coeffs);
      }
      for (int halving = 0; halving < 60 && err > options.tol * std::abs(s / tau); ++halving) {
        s *= std::min(0.5, 0.9 * std::pow(options.tol * std::abs(s / tau) / err, 1.0 / m));
        err = project(m, s, beta0, b, coeffs);
      }
      const double ratio = err > 0.0 ? 0.9 * std::pow(options.tol * std::abs(s / tau) / err, 1.0 / m) : 2.0;
      hint = s * std::clamp(ratio, 1.0, 2.0);
      out = basis.leftCols(m) * coeffs;
      result.error_estimate += err;
      remaining -= s;
      ++result.substeps;
    }
  }
}

}  // namespace dicke::krylov
