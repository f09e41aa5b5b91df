#pragma once

// Recovers the Hermitian matrix D whose expectation value integrates to a
// Lorentz-invariant proper time. Every invariance condition on D is a real
// linear map on the 16-dimensional real space of Hermitian 4x4 matrices, so
// the admissible D form the null space of a stacked real constraint matrix.

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "propertime/spinor_algebra.hpp"

namespace propertime {

// Coordinates of a Hermitian matrix in the basis returned by
// hermitian_basis(): the 16 ordered products of gamma matrices, each
// multiplied by i where needed to make it Hermitian. The basis is orthonormal
// under <A, B> = Re tr(A^dagger B) / 4.
struct HermitianParam {
  std::array<double, 16> coeffs{};
};

const std::array<Complex4x4, 16>& hermitian_basis();
Complex4x4 reconstruct(const HermitianParam& param);
HermitianParam decompose(const Complex4x4& hermitian);

enum class ConstraintSource { Lorentz, TimeReversal, Parity };

struct RowTag {
  ConstraintSource source;
  int mu = -1;  // generator indices; -1 for discrete symmetries
  int nu = -1;
  int entry = 0;  // row-major entry index 0..15 of the 4x4 condition matrix
  bool imaginary = false;
};

struct ConstraintSystem {
  Eigen::MatrixXd rows;  // one real linear functional per row, 16 columns
  std::vector<RowTag> tags;

  std::size_t size() const { return tags.size(); }
  ConstraintSystem& append(const ConstraintSystem& other);
  Eigen::VectorXd evaluate(const HermitianParam& param) const;
  Eigen::VectorXd evaluate(const Complex4x4& hermitian) const;
};

// D g^mu g^nu + (g^nu)^dagger (g^mu)^dagger D = 0 for each of the six
// generators mu < nu; real and imaginary parts of all 16 entries.
ConstraintSystem lorentz_rows(const GammaBasis& basis);

// g1 g3 D^T g1 g3 + D = 0.
ConstraintSystem time_reversal_rows(const GammaBasis& basis);

// g0 D g0 - D = 0.
ConstraintSystem parity_rows(const GammaBasis& basis);

inline constexpr double kNullSpaceThreshold = 1e-10;

// Orthonormal basis of the kernel; singular values below
// relative_threshold * (largest) count as zero. Throws DegenerateSystem when
// every row vanishes.
std::vector<HermitianParam> null_space(const ConstraintSystem& system,
                                       double relative_threshold = kNullSpaceThreshold);

struct RateMatrixDerivation {
  std::array<int, 3> kernel_dims{};  // Lorentz, +time reversal, +parity
  Complex4x4 rate_matrix;
};

// Full pipeline. The surviving one-dimensional kernel is scaled so that the
// (0,0) entry is +1, which fixes the proper-time rate of a particle at rest
// to one. Throws UnexpectedKernel if the final kernel is not one-dimensional.
RateMatrixDerivation derive_rate_matrix_report(const GammaBasis& basis);
Complex4x4 derive_rate_matrix(const GammaBasis& basis);

}  // namespace propertime
