#pragma once

// Dense 4x4 complex arithmetic and the Dirac-representation matrices.
//
// Multiplication, addition, adjoint, transpose, conjugation and scaling are
// the Eigen expressions on Complex4x4; this header adds the few derived
// operations the physics modules need (commutators, operator norm, block
// assembly) plus the fixed gamma-matrix set.

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace propertime {

using Complex = std::complex<double>;
using Complex2x2 = Eigen::Matrix<Complex, 2, 2>;
using Complex4x4 = Eigen::Matrix<Complex, 4, 4>;
using Spinor = Eigen::Matrix<Complex, 4, 1>;
using Spin2 = Eigen::Matrix<Complex, 2, 1>;

inline constexpr Complex kI{0.0, 1.0};

// Shared tolerance record. `identity` is used for algebraic identities that
// accumulate rounding through several products, `exact` where the entries
// cancel exactly in floating point.
struct Tolerances {
  double identity = 1e-12;
  double exact = 1e-14;
};
inline constexpr Tolerances kTolerances{};

// Dirac representation: gamma0 = diag(I, -I), gamma^j = [[0, s_j], [-s_j, 0]].
struct GammaBasis {
  std::array<Complex4x4, 4> gamma;
  std::array<Complex4x4, 3> alpha;  // gamma0 gamma^j
  Complex4x4 beta;                  // gamma0
  std::array<Complex2x2, 3> sigma;  // Pauli matrices
  std::array<Complex4x4, 3> spin;   // diag(sigma_j, sigma_j)
};

GammaBasis build_gamma_basis();

// Minkowski metric diag(1, -1, -1, -1).
double metric(int mu, int nu);

Complex2x2 pauli(int j);
Complex4x4 block_matrix(const Complex2x2& top_left, const Complex2x2& top_right,
                        const Complex2x2& bottom_left, const Complex2x2& bottom_right);

Complex4x4 anticommutator(const Complex4x4& a, const Complex4x4& b);
Complex4x4 commutator(const Complex4x4& a, const Complex4x4& b);

// Largest singular value.
double operator_norm(const Complex4x4& a);

// Largest absolute entry; used for entrywise comparisons.
double max_abs(const Complex4x4& a);

bool is_hermitian(const Complex4x4& a, double tol = kTolerances.exact);

}  // namespace propertime
