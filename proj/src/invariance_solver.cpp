#include "propertime/invariance_solver.hpp"

#include <functional>
#include <string>

#include "propertime/error.hpp"

namespace propertime {
namespace {

std::array<Complex4x4, 16> make_hermitian_basis() {
  const GammaBasis g = build_gamma_basis();
  std::array<Complex4x4, 16> out;
  for (int mask = 0; mask < 16; ++mask) {
    Complex4x4 product = Complex4x4::Identity();
    for (int mu = 0; mu < 4; ++mu) {
      if (mask & (1 << mu)) product = product * g.gamma[mu];
    }
    // Products of gamma matrices are either Hermitian or anti-Hermitian.
    if (!is_hermitian(product)) product *= kI;
    out[mask] = product;
  }
  return out;
}

using LinearMap = std::function<Complex4x4(const Complex4x4&)>;

ConstraintSystem rows_from_map(const LinearMap& map, RowTag tag) {
  const auto& basis = hermitian_basis();
  ConstraintSystem sys;
  sys.rows.resize(32, 16);
  for (int k = 0; k < 16; ++k) {
    const Complex4x4 image = map(basis[k]);
    for (int e = 0; e < 16; ++e) {
      const Complex z = image(e / 4, e % 4);
      sys.rows(2 * e, k) = z.real();
      sys.rows(2 * e + 1, k) = z.imag();
    }
  }
  sys.tags.reserve(32);
  for (int e = 0; e < 16; ++e) {
    tag.entry = e;
    tag.imaginary = false;
    sys.tags.push_back(tag);
    tag.imaginary = true;
    sys.tags.push_back(tag);
  }
  return sys;
}

}  // namespace

const std::array<Complex4x4, 16>& hermitian_basis() {
  static const std::array<Complex4x4, 16> basis = make_hermitian_basis();
  return basis;
}

Complex4x4 reconstruct(const HermitianParam& param) {
  const auto& basis = hermitian_basis();
  Complex4x4 m = Complex4x4::Zero();
  for (int k = 0; k < 16; ++k) m += param.coeffs[k] * basis[k];
  return m;
}

HermitianParam decompose(const Complex4x4& hermitian) {
  const auto& basis = hermitian_basis();
  HermitianParam p;
  for (int k = 0; k < 16; ++k) {
    p.coeffs[k] = (basis[k].adjoint() * hermitian).trace().real() / 4.0;
  }
  return p;
}

ConstraintSystem& ConstraintSystem::append(const ConstraintSystem& other) {
  Eigen::MatrixXd stacked(rows.rows() + other.rows.rows(), 16);
  if (rows.rows() > 0) stacked.topRows(rows.rows()) = rows;
  stacked.bottomRows(other.rows.rows()) = other.rows;
  rows = std::move(stacked);
  tags.insert(tags.end(), other.tags.begin(), other.tags.end());
  return *this;
}

Eigen::VectorXd ConstraintSystem::evaluate(const HermitianParam& param) const {
  const Eigen::Map<const Eigen::VectorXd> x(param.coeffs.data(), 16);
  return rows * x;
}

Eigen::VectorXd ConstraintSystem::evaluate(const Complex4x4& hermitian) const {
  return evaluate(decompose(hermitian));
}

ConstraintSystem lorentz_rows(const GammaBasis& basis) {
  ConstraintSystem sys;
  sys.rows.resize(0, 16);
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = mu + 1; nu < 4; ++nu) {
      const Complex4x4 right = basis.gamma[mu] * basis.gamma[nu];
      const Complex4x4 left = basis.gamma[nu].adjoint() * basis.gamma[mu].adjoint();
      const LinearMap map = [&](const Complex4x4& d) -> Complex4x4 { return d * right + left * d; };
      sys.append(rows_from_map(map, RowTag{ConstraintSource::Lorentz, mu, nu}));
    }
  }
  return sys;
}

ConstraintSystem time_reversal_rows(const GammaBasis& basis) {
  const Complex4x4 g13 = basis.gamma[1] * basis.gamma[3];
  const LinearMap map = [&](const Complex4x4& d) -> Complex4x4 {
    return g13 * d.transpose() * g13 + d;
  };
  return rows_from_map(map, RowTag{ConstraintSource::TimeReversal});
}

ConstraintSystem parity_rows(const GammaBasis& basis) {
  const Complex4x4& g0 = basis.gamma[0];
  const LinearMap map = [&](const Complex4x4& d) -> Complex4x4 { return g0 * d * g0 - d; };
  return rows_from_map(map, RowTag{ConstraintSource::Parity});
}

std::vector<HermitianParam> null_space(const ConstraintSystem& system, double relative_threshold) {
  if (system.size() == 0) {
    throw Error(ErrorKind::InvalidArgument, "null_space needs a nonempty constraint system");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system.rows, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double largest = sv.size() > 0 ? sv(0) : 0.0;
  if (!(largest >= 1e-14)) {
    throw Error(ErrorKind::DegenerateSystem, "all constraint rows are numerically zero");
  }
  const double cutoff = relative_threshold * largest;
  std::vector<HermitianParam> kernel;
  for (int k = 0; k < 16; ++k) {
    const bool null_direction = k >= sv.size() || sv(k) < cutoff;
    if (!null_direction) continue;
    HermitianParam p;
    for (int i = 0; i < 16; ++i) p.coeffs[i] = svd.matrixV()(i, k);
    kernel.push_back(p);
  }
  return kernel;
}

RateMatrixDerivation derive_rate_matrix_report(const GammaBasis& basis) {
  RateMatrixDerivation out;
  ConstraintSystem sys = lorentz_rows(basis);
  out.kernel_dims[0] = static_cast<int>(null_space(sys).size());
  sys.append(time_reversal_rows(basis));
  out.kernel_dims[1] = static_cast<int>(null_space(sys).size());
  sys.append(parity_rows(basis));
  const auto kernel = null_space(sys);
  out.kernel_dims[2] = static_cast<int>(kernel.size());
  if (kernel.size() != 1) {
    throw Error(ErrorKind::UnexpectedKernel,
                "expected a one-dimensional kernel, got " + std::to_string(kernel.size()));
  }
  Complex4x4 d = reconstruct(kernel.front());
  const Complex pivot = d(0, 0);
  if (std::abs(pivot) < 1e-8) {
    throw Error(ErrorKind::UnexpectedKernel, "kernel element has a vanishing (0,0) entry");
  }
  d /= pivot;
  out.rate_matrix = d;
  return out;
}

Complex4x4 derive_rate_matrix(const GammaBasis& basis) {
  return derive_rate_matrix_report(basis).rate_matrix;
}

}  // namespace propertime
