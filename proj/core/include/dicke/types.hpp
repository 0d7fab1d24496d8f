#pragma once

#include <complex>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace dicke {

using Complex = std::complex<double>;
using Index = Eigen::Index;

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

// Row-major so that the canonical (row, col) entry order is the storage order.
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

}  // namespace dicke
