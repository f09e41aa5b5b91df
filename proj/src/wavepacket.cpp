#include "propertime/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include <unsupported/Eigen/FFT>

#include "propertime/error.hpp"

namespace propertime {
namespace {

constexpr double kSeedFloor = 1e-8;
constexpr double kImaginaryResidue = 1e-13;

Spinor upper_seed(const Spin2& spin) {
  Spinor s = Spinor::Zero();
  s.head<2>() = spin;
  return s;
}

Spinor lower_seed(const Spin2& spin) {
  Spinor s = Spinor::Zero();
  s.tail<2>() = spin;
  return s;
}

Spinor project_seed(const Complex4x4& projector, const Spin2& spin) {
  Spinor u = projector * upper_seed(spin);
  if (u.norm() < kSeedFloor) u = projector * lower_seed(spin);
  const double n = u.norm();
  if (n < kSeedFloor) throw Error(ErrorKind::ZeroProjection, "both spinor seeds project to zero");
  return u / n;
}

}  // namespace

std::size_t MomentumGrid::size() const {
  return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
         static_cast<std::size_t>(dims[2]);
}

double MomentumGrid::spacing(int axis) const {
  return active(axis) ? 2.0 * pmax[axis] / dims[axis] : 0.0;
}

double MomentumGrid::weight() const {
  double w = 1.0;
  for (int a = 0; a < 3; ++a) {
    if (active(a)) w *= spacing(a);
  }
  return w;
}

Eigen::Vector3d MomentumGrid::point(std::size_t k) const {
  Eigen::Vector3d p = Eigen::Vector3d::Zero();
  std::size_t rest = k;
  for (int a = 2; a >= 0; --a) {
    const std::size_t j = rest % static_cast<std::size_t>(dims[a]);
    rest /= static_cast<std::size_t>(dims[a]);
    if (active(a)) p(a) = -pmax[a] + static_cast<double>(j) * spacing(a);
  }
  return p;
}

double MomentumGrid::max_energy() const {
  double p2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    if (active(a)) p2 += pmax[a] * pmax[a];
  }
  return std::sqrt(p2 + mass * mass);
}

void MomentumGrid::validate() const {
  if (!(mass > 0.0)) throw Error(ErrorKind::NonpositiveMass, "grid mass must be positive");
  for (int a = 0; a < 3; ++a) {
    if (dims[a] < 1) throw Error(ErrorKind::InvalidArgument, "grid dimensions must be >= 1");
    if (active(a) && !(pmax[a] > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "pmax must be positive on active axes");
    }
  }
}

SpinorField::SpinorField(MomentumGrid grid, std::vector<Spinor> amps)
    : grid_(grid), amps_(std::move(amps)) {
  if (amps_.size() != grid_.size()) {
    throw Error(ErrorKind::InvalidArgument, "amplitude count does not match the grid");
  }
}

double SpinorField::norm_squared() const {
  double sum = 0.0;
  for (const Spinor& a : amps_) sum += a.squaredNorm();
  return sum * weight();
}

SpinorField SpinorField::scaled(Complex factor) const {
  std::vector<Spinor> out = amps_;
  for (Spinor& a : out) a *= factor;
  return SpinorField(grid_, std::move(out));
}

Spinor positive_branch_spinor(const MomentumMode& mode, const GammaBasis& basis, const Spin2& spin) {
  return project_seed(spectral(mode, basis).positive, spin);
}

Spinor negative_branch_spinor(const MomentumMode& mode, const GammaBasis& basis, const Spin2& spin) {
  return project_seed(spectral(mode, basis).negative, spin);
}

SpinorField build_wavepacket(const WavepacketSpec& spec, const MomentumGrid& grid,
                             const GammaBasis& basis) {
  grid.validate();
  if (!(spec.sigma_p > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigma_p > 0 required");
  const double spin_norm = spec.spin.norm();
  if (!(spin_norm > 0.0)) throw Error(ErrorKind::InvalidArgument, "spin must be nonzero");
  const Spin2 spin = spec.spin / spin_norm;

  for (int a = 0; a < 3; ++a) {
    if (grid.active(a)) {
      if (grid.pmax[a] < std::abs(spec.p0(a)) + 4.0 * spec.sigma_p) {
        throw Error(ErrorKind::GridTooCoarse,
                    "axis " + std::to_string(a) + " needs pmax >= |p0| + 4 sigma_p");
      }
    } else if (spec.p0(a) != 0.0) {
      throw Error(ErrorKind::GridTooCoarse,
                  "p0 has a component along inactive axis " + std::to_string(a));
    }
  }

  const double c = std::cos(spec.theta);
  const double s = std::sin(spec.theta);
  std::vector<Spinor> amps(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const MomentumMode mode{grid.point(k), grid.mass};
    const double envelope =
        std::exp(-(mode.p - spec.p0).squaredNorm() / (4.0 * spec.sigma_p * spec.sigma_p));
    Spinor w;
    switch (spec.branch) {
      case Branch::Positive: w = positive_branch_spinor(mode, basis, spin); break;
      case Branch::Negative: w = negative_branch_spinor(mode, basis, spin); break;
      case Branch::Mixed:
        w = c * positive_branch_spinor(mode, basis, spin) +
            s * negative_branch_spinor(mode, basis, spin);
        break;
    }
    amps[k] = envelope * w;
  }

  SpinorField field(grid, std::move(amps));
  const double n2 = field.norm_squared();
  if (!(n2 > 0.0)) throw Error(ErrorKind::GridTooCoarse, "wavepacket has zero norm on this grid");
  return field.scaled(1.0 / std::sqrt(n2));
}

double rate(const SpinorField& field, const GammaBasis& basis) {
  Complex sum = 0.0;
  for (const Spinor& a : field.amps()) sum += a.dot(basis.beta * a);
  sum *= field.weight();
  if (std::abs(sum.imag()) > kImaginaryResidue * std::max(1.0, std::abs(sum.real()))) {
    throw Error(ErrorKind::InvalidArgument, "rate has a non-negligible imaginary part");
  }
  return sum.real();
}

double classical_rate(const SpinorField& field) {
  const MomentumGrid& grid = field.grid();
  double sum = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const MomentumMode mode{grid.point(k), grid.mass};
    sum += field.amps()[k].squaredNorm() * grid.mass / mode.energy();
  }
  return sum * field.weight();
}

SpinorField evolve(const SpinorField& field, const GammaBasis& basis, double t) {
  const MomentumGrid& grid = field.grid();
  std::vector<Spinor> out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const MomentumMode mode{grid.point(k), grid.mass};
    out[k] = evolution(mode, basis, t) * field.amps()[k];
  }
  return SpinorField(grid, std::move(out));
}

std::vector<double> cumulative_simpson(const std::vector<double>& values, double dt) {
  const std::size_t n = values.size();
  if (n < 3 || n % 2 == 0) {
    throw Error(ErrorKind::BadInterval, "Simpson integration needs an odd sample count >= 3");
  }
  std::vector<double> tau(n, 0.0);
  for (std::size_t i = 2; i < n; i += 2) {
    const double panel = dt / 3.0 * (values[i - 2] + 4.0 * values[i - 1] + values[i]);
    // Odd node: quadratic through the same three points, integrated over the
    // first half of the panel.
    tau[i - 1] = tau[i - 2] + dt / 12.0 * (5.0 * values[i - 2] + 8.0 * values[i - 1] - values[i]);
    tau[i] = tau[i - 2] + panel;
  }
  return tau;
}

RateSeries proper_time(const SpinorField& field, const GammaBasis& basis, double t0, double t1,
                       int nsamples) {
  if (!(t1 >= t0)) throw Error(ErrorKind::BadInterval, "t1 must not precede t0");
  if (nsamples < 3 || nsamples % 2 == 0) {
    throw Error(ErrorKind::BadInterval, "nsamples must be odd and >= 3");
  }
  RateSeries series;
  series.max_energy = field.grid().max_energy();
  const double dt = (t1 - t0) / (nsamples - 1);
  series.times.resize(nsamples);
  series.rate.resize(nsamples);
  for (int i = 0; i < nsamples; ++i) {
    const double t = (i == nsamples - 1) ? t1 : t0 + i * dt;
    series.times[i] = t;
    series.rate[i] = rate(evolve(field, basis, t), basis);
  }
  series.tau = cumulative_simpson(series.rate, dt);
  return series;
}

std::vector<SpectrumBin> rate_spectrum(const RateSeries& series) {
  const std::size_t n = series.rate.size();
  if (n < 64) throw Error(ErrorKind::Aliased, "spectrum needs at least 64 samples");
  const double dt = series.times.back() - series.times.front();
  const double step = dt / static_cast<double>(n - 1);
  if (!(step > 0.0) || !(1.0 / step > 4.0 * series.max_energy / std::numbers::pi)) {
    throw Error(ErrorKind::Aliased, "sampling rate must exceed 4 E_max / pi");
  }

  double mean = 0.0;
  for (double r : series.rate) mean += r;
  mean /= static_cast<double>(n);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = series.rate[i] - mean;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, centered);

  const double span = step * static_cast<double>(n);
  std::vector<SpectrumBin> bins;
  bins.reserve(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double amplitude = 2.0 * std::abs(spectrum[k]) / static_cast<double>(n);
    bins.push_back({2.0 * std::numbers::pi * static_cast<double>(k) / span, amplitude * amplitude});
  }
  return bins;
}

ZitterPeak zitter_spectrum(const RateSeries& series) {
  const auto bins = rate_spectrum(series);
  ZitterPeak peak;
  double best = -1.0;
  for (std::size_t k = 1; k < bins.size(); ++k) {
    if (bins[k].power > best) {
      best = bins[k].power;
      peak.frequency = bins[k].frequency;
    }
  }
  peak.amplitude = std::sqrt(std::max(best, 0.0));
  return peak;
}

}  // namespace propertime
