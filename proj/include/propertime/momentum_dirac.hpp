#pragma once

// Exact free-particle machinery for a single momentum mode (hbar = c = 1).
// The Dirac Hamiltonian at fixed momentum is a 4x4 matrix with H^2 = E^2 I,
// so projectors, the propagator and the Heisenberg-picture rate operator all
// have closed forms and no eigensolver or time stepping is involved.

#include <cmath>

#include <Eigen/Dense>

#include "propertime/spinor_algebra.hpp"

namespace propertime {

struct MomentumMode {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  double mass = 1.0;

  double energy() const { return std::sqrt(p.squaredNorm() + mass * mass); }
};

struct SpectralData {
  double energy = 0.0;
  Complex4x4 hamiltonian;
  Complex4x4 positive;  // (I + H/E) / 2
  Complex4x4 negative;  // (I - H/E) / 2
};

// alpha . p + m beta. Throws NonpositiveMass when m <= 0.
Complex4x4 hamiltonian(const MomentumMode& mode, const GammaBasis& basis);

SpectralData spectral(const MomentumMode& mode, const GammaBasis& basis);

// exp(-iHt) = e^{-iEt} P+ + e^{iEt} P-.
Complex4x4 evolution(const MomentumMode& mode, const GammaBasis& basis, double t);

// The equivalent form e^{-iEt} I + 2i P- sin(Et).
Complex4x4 evolution_closed_form(const MomentumMode& mode, const GammaBasis& basis, double t);

// beta(t) = e^{iHt} beta e^{-iHt}, assembled from its four terms
//   beta - 2i P sin(Et) beta e^{-iEt} + 2i e^{iEt} beta sin(Et) P
//        + 4 P sin(Et) beta sin(Et) P,    with P = P-.
// Each term except beta oscillates at the branch frequency.
Complex4x4 beta_heisenberg(const MomentumMode& mode, const GammaBasis& basis, double t);

struct ProjectorIdentity {
  Complex4x4 lhs;  // P+ beta P+
  Complex4x4 rhs;  // (m/E) P+
};

ProjectorIdentity positive_rate_identity(const MomentumMode& mode, const GammaBasis& basis);

}  // namespace propertime
