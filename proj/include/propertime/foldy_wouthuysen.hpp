#pragma once

// Foldy-Wouthuysen checks on a 2-D periodic lattice with a uniform magnetic
// field along z (symmetric gauge, centred on the box).
//
// Spinor vectors on the lattice are stored component-major: entry c * M + s
// holds Dirac component c at site s, so the first 2M entries are the upper
// (large) two-spinor and the last 2M the lower (small) one. With this layout
// every operator of the form Gamma (x) X is a 4x4 block matrix of M x M
// blocks Gamma_ab X.

#include <array>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "propertime/spinor_algebra.hpp"

namespace propertime {

struct LatticeConfig {
  std::array<int, 2> dims{24, 24};
  std::array<double, 2> length{24.0, 24.0};
  double mass = 1.0;
  double charge = 1.0;     // signed
  double field = 0.0;      // B_z
  double potential = 0.0;  // constant scalar potential phi

  int sites() const { return dims[0] * dims[1]; }
  int dimension() const { return 4 * sites(); }
  double spacing(int axis) const { return length[axis] / dims[axis]; }
  // Coordinate of site index i along axis, measured from the box centre.
  double coordinate(int axis, int i) const { return (i - 0.5 * (dims[axis] - 1)) * spacing(axis); }
  int site(int ix, int iy) const { return iy * dims[0] + ix; }

  // GridTooCoarse below 8 sites per axis; InvalidArgument / NonpositiveMass
  // for the remaining fields. |e phi| must stay below m so the branch sign
  // is that of the field-free Dirac operator.
  void validate() const;
};

using LatticeSpinor = Eigen::VectorXcd;

struct LatticeOperator {
  Eigen::MatrixXcd matrix;
  std::string label;
  bool hermitian = false;
};

// Gamma (x) X for a 4x4 Gamma and an M x M site operator X.
Eigen::MatrixXcd lift(const Complex4x4& gamma, const Eigen::MatrixXcd& site_op);

// Site-space momentum p_axis = -i D_axis, D the periodic 4th-order central
// difference.
Eigen::MatrixXcd site_momentum(const LatticeConfig& cfg, int axis);

// Site-space kinetic momenta pi_j = p_j - e A_j with A = (-B y / 2, B x / 2).
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> site_kinetic(const LatticeConfig& cfg);

// Vector potential at a site.
std::array<double, 2> vector_potential(const LatticeConfig& cfg, int ix, int iy);

struct KineticPair {
  LatticeOperator pi1;
  LatticeOperator pi2;
};

KineticPair build_kinetic(const LatticeConfig& cfg);

// alpha . pi + e phi + m beta.
LatticeOperator build_dirac_hamiltonian(const LatticeConfig& cfg);

// S = beta alpha . pi / 2m.
LatticeOperator fw_generator(const LatticeConfig& cfg);

inline constexpr double kMaxGeneratorRadius = 1.5;
inline constexpr double kUnitarityResidual = 1e-9;

// U = exp(S) by Pade scaling and squaring. Throws InvalidArgument when the
// spectral radius of S exceeds kMaxGeneratorRadius and ExpDiverged when
// ||U^dagger U - I|| exceeds kUnitarityResidual.
LatticeOperator fw_unitary(const LatticeConfig& cfg);

// beta - alpha . pi / m - beta pi^2 / 2m^2 + (e B / 2m^2) beta Sigma_z.
LatticeOperator beta_truncated(const LatticeConfig& cfg);

// Coefficient of beta Sigma_z (x) I in an operator, by trace projection.
double spin_field_coefficient(const LatticeOperator& op, const LatticeConfig& cfg);

// Spectral projector onto positive eigenvalues by dense diagonalisation.
// Throws ZeroEigenvalue if some |eigenvalue| < 1e-8 * mass.
LatticeOperator positive_projector_lattice(const LatticeOperator& hamiltonian, double mass);

struct LatticePacket {
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> momentum{0.0, 0.0};
  double width = 1.0;  // amplitude ~ exp(-|x - c|^2 / (4 width^2))
  Spin2 spin = Spin2(1.0, 0.0);
  bool lower = false;  // seed in the lower components instead
};

// Fast route for the FW quantities. Both exp(S) and the branch projectors
// are functions of the 2M x 2M Hermitian block K = sigma . pi:
//   H^2 = (m^2 + K^2) (+) (m^2 + K^2),
//   exp(S) = [[cos(K/2m), sin(K/2m)], [-sin(K/2m), cos(K/2m)]],
// so one eigendecomposition of K yields both exactly.
class FwLattice {
 public:
  explicit FwLattice(LatticeConfig cfg);

  const LatticeConfig& config() const { return cfg_; }

  // Spectral radius of S.
  double generator_radius() const;

  LatticeSpinor apply_hamiltonian(const LatticeSpinor& psi) const;
  LatticeSpinor apply_unitary(const LatticeSpinor& psi) const;
  LatticeSpinor apply_unitary_adjoint(const LatticeSpinor& psi) const;
  LatticeSpinor project_positive(const LatticeSpinor& psi) const;
  LatticeSpinor apply_beta_truncated(const LatticeSpinor& psi) const;

  // Unprojected Gaussian seed, unit norm.
  LatticeSpinor gaussian(const LatticePacket& packet) const;
  // Positive-energy packet: project_positive(gaussian), renormalised.
  LatticeSpinor positive_packet(const LatticePacket& packet) const;

  // <psi| beta |psi>.
  double exact_rate(const LatticeSpinor& psi) const;
  // <Phi'| 1 - pi^2/2m^2 + (e/2m^2) Sigma . B |Phi'> with Phi' the literal
  // upper half of U psi.
  double rate_pauli_side(const LatticeSpinor& psi) const;
  // ||chi'|| / ||Phi'||.
  double small_component_ratio(const LatticeSpinor& psi) const;
  // |<psi'| alpha . pi / m |psi'>|, psi' = U psi.
  double cross_term(const LatticeSpinor& psi) const;
  // ||(U beta U^dagger - beta_truncated) psi||.
  double beta_expansion_residual(const LatticeSpinor& psi) const;

 private:
  LatticeSpinor rotate(const LatticeSpinor& psi, double sign) const;
  Eigen::VectorXcd apply_block(const Eigen::VectorXcd& x, const Eigen::VectorXd& f) const;
  Eigen::VectorXcd apply_pi_squared(const Eigen::VectorXcd& two_spinor) const;
  Eigen::VectorXcd apply_spin_z(const Eigen::VectorXcd& two_spinor) const;

  LatticeConfig cfg_;
  Eigen::MatrixXcd pi1_, pi2_, pi_sq_;
  Eigen::MatrixXcd pauli_kinetic_;  // sigma . pi, 2M x 2M
  Eigen::VectorXd kin_values_;
  Eigen::MatrixXcd kin_vectors_;
};

// Free-function forms of the FwLattice queries.
double small_component_ratio(const LatticeConfig& cfg, const LatticeSpinor& psi);
double rate_pauli_side(const LatticeConfig& cfg, const LatticeSpinor& psi);

// Family of lattices indexed by vscale s = k0 / m. The reference lattice
// describes s = 1; at scale s every length is divided by s and the field
// multiplied by s^2, so pi scales exactly as s while the packet stays at the
// same position on the same number of sites.
struct ScalingStudy {
  LatticeConfig reference{{24, 24}, {8.0, 8.0}, 1.0, 1.0, 0.2, 0.0};
  double packet_width = 1.0;  // at s = 1
  Spin2 spin = Spin2(1.0, 0.0);

  LatticeConfig lattice_at(double vscale) const;
  LatticePacket packet_at(double vscale) const;
  // InvalidArgument unless the packet sits >= 4 widths inside the box.
  void validate() const;
};

struct ScalingRow {
  double vscale = 0.0;
  double res_beta = 0.0;     // ||(U beta U^dagger - beta_truncated) psi||
  double res_rate = 0.0;     // |<beta> - rate_pauli_side|
  double ratio_small = 0.0;  // ||chi'|| / ||Phi'||
  double cross = 0.0;        // |<alpha . pi / m>| in the FW frame
  double exact_rate = 0.0;
  double pauli_rate = 0.0;
  double generator_radius = 0.0;
};

// vscales must be strictly decreasing and positive. Throws InvalidArgument
// when a scale violates the generator-radius bound.
std::vector<ScalingRow> fw_scaling_study(const ScalingStudy& study, std::span<const double> vscales);

std::vector<std::pair<double, double>> verify_beta_expansion(const ScalingStudy& study,
                                                             std::span<const double> vscales);

}  // namespace propertime
