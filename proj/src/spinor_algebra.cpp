#include "propertime/spinor_algebra.hpp"

namespace propertime {

Complex2x2 pauli(int j) {
  Complex2x2 s;
  switch (j) {
    case 1: s << 0, 1, 1, 0; break;
    case 2: s << 0, -kI, kI, 0; break;
    case 3: s << 1, 0, 0, -1; break;
    default: s.setIdentity(); break;
  }
  return s;
}

Complex4x4 block_matrix(const Complex2x2& top_left, const Complex2x2& top_right,
                        const Complex2x2& bottom_left, const Complex2x2& bottom_right) {
  Complex4x4 m;
  m.topLeftCorner<2, 2>() = top_left;
  m.topRightCorner<2, 2>() = top_right;
  m.bottomLeftCorner<2, 2>() = bottom_left;
  m.bottomRightCorner<2, 2>() = bottom_right;
  return m;
}

GammaBasis build_gamma_basis() {
  const Complex2x2 id = Complex2x2::Identity();
  const Complex2x2 zero = Complex2x2::Zero();

  GammaBasis b;
  for (int j = 0; j < 3; ++j) b.sigma[j] = pauli(j + 1);

  b.gamma[0] = block_matrix(id, zero, zero, -id);
  for (int j = 0; j < 3; ++j) {
    b.gamma[j + 1] = block_matrix(zero, b.sigma[j], -b.sigma[j], zero);
  }
  b.beta = b.gamma[0];
  for (int j = 0; j < 3; ++j) {
    b.alpha[j] = b.gamma[0] * b.gamma[j + 1];
    b.spin[j] = block_matrix(b.sigma[j], zero, zero, b.sigma[j]);
  }
  return b;
}

double metric(int mu, int nu) {
  if (mu != nu) return 0.0;
  return mu == 0 ? 1.0 : -1.0;
}

Complex4x4 anticommutator(const Complex4x4& a, const Complex4x4& b) { return a * b + b * a; }

Complex4x4 commutator(const Complex4x4& a, const Complex4x4& b) { return a * b - b * a; }

double operator_norm(const Complex4x4& a) {
  Eigen::JacobiSVD<Complex4x4> svd(a);
  return svd.singularValues()(0);
}

double max_abs(const Complex4x4& a) { return a.cwiseAbs().maxCoeff(); }

bool is_hermitian(const Complex4x4& a, double tol) { return max_abs(a - a.adjoint()) <= tol; }

}  // namespace propertime
