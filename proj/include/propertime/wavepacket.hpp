#pragma once

// Momentum-space spinor wavepackets for the free Dirac particle, their exact
// evolution, the proper-time rate <beta>(t) and its integral tau(t).

#include <array>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "propertime/momentum_dirac.hpp"
#include "propertime/spinor_algebra.hpp"

namespace propertime {

// Uniform grid p_j = -pmax + j * (2 pmax / N) on each axis with N > 1; an
// axis with N == 1 is inactive and sits at p = 0. Quadrature uses plain
// Riemann weights: the product of spacings over active axes.
struct MomentumGrid {
  std::array<int, 3> dims{256, 1, 1};
  std::array<double, 3> pmax{8.0, 0.0, 0.0};
  double mass = 1.0;

  std::size_t size() const;
  bool active(int axis) const { return dims[axis] > 1; }
  double spacing(int axis) const;
  double weight() const;
  Eigen::Vector3d point(std::size_t k) const;
  double max_energy() const;
  // Throws InvalidArgument / NonpositiveMass.
  void validate() const;
};

enum class Branch { Positive, Negative, Mixed };

struct WavepacketSpec {
  Eigen::Vector3d p0 = Eigen::Vector3d::Zero();
  double sigma_p = 0.25;
  Spin2 spin = Spin2(1.0, 0.0);
  Branch branch = Branch::Positive;
  double theta = std::numbers::pi / 4;  // mixing angle for Branch::Mixed
};

class SpinorField {
 public:
  SpinorField(MomentumGrid grid, std::vector<Spinor> amps);

  const MomentumGrid& grid() const { return grid_; }
  const std::vector<Spinor>& amps() const { return amps_; }
  double weight() const { return grid_.weight(); }
  double norm_squared() const;
  SpinorField scaled(Complex factor) const;

 private:
  MomentumGrid grid_;
  std::vector<Spinor> amps_;
};

// Normalized P+ (spin, 0) at one mode. Falls back to the (0, spin) seed if
// the first projection vanishes; throws ZeroProjection if both do.
Spinor positive_branch_spinor(const MomentumMode& mode, const GammaBasis& basis, const Spin2& spin);
// Normalized P- (spin, 0), same fallback. At p = 0 this is (0, spin).
Spinor negative_branch_spinor(const MomentumMode& mode, const GammaBasis& basis, const Spin2& spin);

// Gaussian envelope exp(-|p - p0|^2 / (4 sigma^2)) times the branch spinor,
// normalized to unit norm. Throws GridTooCoarse if an active axis does not
// reach |p0| + 4 sigma or p0 has a component along an inactive axis.
SpinorField build_wavepacket(const WavepacketSpec& spec, const MomentumGrid& grid,
                             const GammaBasis& basis);

// <beta> = sum_k w amp_k^dagger beta amp_k.
double rate(const SpinorField& field, const GammaBasis& basis);

// sum_k w |amp_k|^2 m / E_k; equals rate() on the positive branch.
double classical_rate(const SpinorField& field);

SpinorField evolve(const SpinorField& field, const GammaBasis& basis, double t);

struct RateSeries {
  std::vector<double> times;
  std::vector<double> rate;
  std::vector<double> tau;
  double max_energy = 0.0;  // largest |H| on the grid the series came from
};

// Samples rate(evolve(t)) on nsamples uniform times in [t0, t1] and integrates
// with composite Simpson. Throws BadInterval for t1 < t0 or an even/too small
// sample count.
RateSeries proper_time(const SpinorField& field, const GammaBasis& basis, double t0, double t1,
                       int nsamples);

// Cumulative Simpson integral of uniformly sampled data (odd count >= 3).
std::vector<double> cumulative_simpson(const std::vector<double>& values, double dt);

struct SpectrumBin {
  double frequency;  // angular
  double power;
};

struct ZitterPeak {
  double frequency = 0.0;  // angular
  double amplitude = 0.0;
};

// One-sided DFT of rate(t) - mean. Throws Aliased when there are fewer than
// 64 samples or the sampling rate is not above 4 E_max / pi.
std::vector<SpectrumBin> rate_spectrum(const RateSeries& series);
ZitterPeak zitter_spectrum(const RateSeries& series);

}  // namespace propertime
