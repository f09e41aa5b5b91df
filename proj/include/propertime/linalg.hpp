#pragma once

#include <span>

#include <Eigen/Dense>

namespace propertime {

struct HermitianEigen {
  Eigen::VectorXd values;     // ascending
  Eigen::MatrixXcd vectors;   // columns, orthonormal
};

// Dense Hermitian eigendecomposition (LAPACK zheevr). Only the
// lower triangle of `a` is read.
HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& a);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace propertime
