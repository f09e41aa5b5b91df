#include "propertime/linalg.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <lapacke.h>

#include "propertime/error.hpp"

namespace propertime {

HermitianEigen hermitian_eigen(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorKind::InvalidArgument, "hermitian_eigen needs a square matrix");
  }
  const auto n = static_cast<lapack_int>(a.rows());
  HermitianEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  if (n == 0) return out;
  // zheevr (MRRR). The divide-and-conquer driver shipped with some OpenBLAS
  // builds returns wrong eigenvectors for n in the hundreds.
  Eigen::MatrixXcd work = a;
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, 'V', 'A', 'L', n, reinterpret_cast<lapack_complex_double*>(work.data()), n,
      0.0, 0.0, 0, 0, 0.0, &found, out.values.data(),
      reinterpret_cast<lapack_complex_double*>(out.vectors.data()), n, support.data());
  if (info != 0 || found != n) {
    throw Error(ErrorKind::InvalidArgument, "zheevr failed with info=" + std::to_string(info));
  }
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorKind::InvalidArgument, "loglog_slope needs two equal-length series of >= 2 points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) {
      throw Error(ErrorKind::InvalidArgument, "loglog_slope needs strictly positive data");
    }
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace propertime
