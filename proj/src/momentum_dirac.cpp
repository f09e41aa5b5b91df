#include "propertime/momentum_dirac.hpp"

#include <cmath>
#include <string>

#include "propertime/error.hpp"

namespace propertime {

Complex4x4 hamiltonian(const MomentumMode& mode, const GammaBasis& basis) {
  if (!(mode.mass > 0.0)) {
    throw Error(ErrorKind::NonpositiveMass, "mass must be positive, got " + std::to_string(mode.mass));
  }
  Complex4x4 h = mode.mass * basis.beta;
  for (int j = 0; j < 3; ++j) h += mode.p(j) * basis.alpha[j];
  return h;
}

SpectralData spectral(const MomentumMode& mode, const GammaBasis& basis) {
  SpectralData s;
  s.hamiltonian = hamiltonian(mode, basis);
  s.energy = mode.energy();
  const Complex4x4 sign = s.hamiltonian / s.energy;
  s.positive = 0.5 * (Complex4x4::Identity() + sign);
  s.negative = 0.5 * (Complex4x4::Identity() - sign);
  return s;
}

Complex4x4 evolution(const MomentumMode& mode, const GammaBasis& basis, double t) {
  const SpectralData s = spectral(mode, basis);
  const Complex phase = std::polar(1.0, -s.energy * t);
  return phase * s.positive + std::conj(phase) * s.negative;
}

Complex4x4 evolution_closed_form(const MomentumMode& mode, const GammaBasis& basis, double t) {
  const SpectralData s = spectral(mode, basis);
  return std::polar(1.0, -s.energy * t) * Complex4x4::Identity() +
         2.0 * kI * std::sin(s.energy * t) * s.negative;
}

Complex4x4 beta_heisenberg(const MomentumMode& mode, const GammaBasis& basis, double t) {
  const SpectralData s = spectral(mode, basis);
  const Complex4x4& p = s.negative;
  const Complex4x4& beta = basis.beta;
  const double sn = std::sin(s.energy * t);
  const Complex fwd = std::polar(1.0, -s.energy * t);
  const Complex back = std::conj(fwd);

  const Complex4x4 first = -2.0 * kI * sn * fwd * (p * beta);
  const Complex4x4 second = 2.0 * kI * back * sn * (beta * p);
  const Complex4x4 third = 4.0 * sn * sn * (p * beta * p);
  return beta + first + second + third;
}

ProjectorIdentity positive_rate_identity(const MomentumMode& mode, const GammaBasis& basis) {
  const SpectralData s = spectral(mode, basis);
  return {s.positive * basis.beta * s.positive, (mode.mass / s.energy) * s.positive};
}

}  // namespace propertime
