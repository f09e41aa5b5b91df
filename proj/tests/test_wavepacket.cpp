#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "propertime/error.hpp"
#include "propertime/linalg.hpp"
#include "propertime/wavepacket.hpp"

using namespace propertime;

namespace {

const GammaBasis g = build_gamma_basis();

MomentumGrid line_grid() { return MomentumGrid{}; }  // 256 points, pmax 8, m 1

WavepacketSpec packet(double p0x, double sigma, Branch branch) {
  WavepacketSpec s;
  s.p0 = Eigen::Vector3d(p0x, 0.0, 0.0);
  s.sigma_p = sigma;
  s.branch = branch;
  return s;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::InvalidArgument;
}

// Continuum average of m/E over the density |g|^2 ~ exp(-(p - p0)^2 / 2 sigma^2),
// by fine trapezoid quadrature.
double continuum_rate(double p0, double sigma) {
  const int n = 200001;
  const double lo = p0 - 12 * sigma;
  const double hi = p0 + 12 * sigma;
  const double h = (hi - lo) / (n - 1);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p = lo + i * h;
    const double w = (i == 0 || i == n - 1 ? 0.5 : 1.0) *
                     std::exp(-(p - p0) * (p - p0) / (2 * sigma * sigma));
    num += w / std::sqrt(1.0 + p * p);
    den += w;
  }
  return num / den;
}

}  // namespace

TEST_CASE("grid geometry") {
  const MomentumGrid grid = line_grid();
  CHECK(grid.size() == 256);
  CHECK(grid.weight() == doctest::Approx(1.0 / 16.0));
  CHECK(grid.point(0)(0) == doctest::Approx(-8.0));
  CHECK(grid.point(128)(0) == 0.0);
  CHECK(grid.point(144)(0) == 1.0);
  CHECK(grid.max_energy() == doctest::Approx(std::sqrt(65.0)));

  MomentumGrid cube{{4, 3, 5}, {1.0, 2.0, 3.0}, 1.0};
  CHECK(cube.size() == 60);
  CHECK(cube.weight() == doctest::Approx(0.5 * (4.0 / 3.0) * 1.2));
  const Eigen::Vector3d last = cube.point(59);
  CHECK(last(0) == doctest::Approx(0.5));
  CHECK(last(1) == doctest::Approx(2.0 / 3.0));
  CHECK(last(2) == doctest::Approx(1.8));
}

TEST_CASE("build_wavepacket") {
  SUBCASE("single rest point is (1,0,0,0)") {
    MomentumGrid one{{1, 1, 1}, {0.0, 0.0, 0.0}, 1.0};
    const SpinorField f = build_wavepacket(packet(0.0, 0.3, Branch::Positive), one, g);
    REQUIRE(f.amps().size() == 1);
    Spinor expected = Spinor::Zero();
    expected(0) = 1.0;
    CHECK((f.amps()[0] - expected).norm() <= 1e-15);
  }
  SUBCASE("normalized on every branch") {
    for (Branch b : {Branch::Positive, Branch::Negative, Branch::Mixed}) {
      const SpinorField f = build_wavepacket(packet(0.7, 0.4, b), line_grid(), g);
      CHECK(std::abs(f.norm_squared() - 1.0) <= 1e-10);
    }
    MomentumGrid cube{{12, 12, 12}, {3.0, 3.0, 3.0}, 1.0};
    WavepacketSpec s;
    s.p0 = Eigen::Vector3d(0.5, -0.25, 0.0);
    s.sigma_p = 0.5;
    s.spin = Spin2(1.0, kI);
    const SpinorField f = build_wavepacket(s, cube, g);
    CHECK(std::abs(f.norm_squared() - 1.0) <= 1e-10);
    CHECK(std::abs(rate(f, g) - classical_rate(f)) <= 1e-11);
  }
  SUBCASE("errors") {
    CHECK(kind_of([] { build_wavepacket(packet(0.0, 0.0, Branch::Positive), line_grid(), g); }) ==
          ErrorKind::InvalidArgument);
    CHECK(kind_of([] { build_wavepacket(packet(6.0, 0.6, Branch::Positive), line_grid(), g); }) ==
          ErrorKind::GridTooCoarse);
    WavepacketSpec off_axis = packet(0.0, 0.3, Branch::Positive);
    off_axis.p0(1) = 0.5;
    CHECK(kind_of([&] { build_wavepacket(off_axis, line_grid(), g); }) == ErrorKind::GridTooCoarse);
  }
}

TEST_CASE("branch spinors") {
  const MomentumMode rest{Eigen::Vector3d::Zero(), 1.0};
  const Spinor u = positive_branch_spinor(rest, g, Spin2(1.0, 0.0));
  const Spinor v = negative_branch_spinor(rest, g, Spin2(1.0, 0.0));
  CHECK(std::abs(u(0) - 1.0) <= 1e-15);
  // The upper seed has no negative-energy part at rest: fallback to the lower seed.
  CHECK(std::abs(v(2) - 1.0) <= 1e-15);

  const MomentumMode moving{Eigen::Vector3d(1.0, 0.0, 0.0), 1.0};
  const SpectralData s = spectral(moving, g);
  const Spinor up = positive_branch_spinor(moving, g, Spin2(1.0, 0.0));
  const Spinor dn = negative_branch_spinor(moving, g, Spin2(1.0, 0.0));
  CHECK((s.positive * up - up).norm() <= 1e-12);
  CHECK((s.negative * dn - dn).norm() <= 1e-12);
  CHECK(std::abs(up.dot(dn)) <= 1e-12);
  // Same-seed construction keeps a nonzero beta cross term away from rest.
  CHECK(std::abs(up.dot(g.beta * dn)) > 0.1);
}

TEST_CASE("rate") {
  MomentumGrid one{{1, 1, 1}, {0.0, 0.0, 0.0}, 1.0};
  CHECK(rate(build_wavepacket(packet(0.0, 0.3, Branch::Positive), one, g), g) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rate(build_wavepacket(packet(0.0, 0.3, Branch::Negative), one, g), g) ==
        doctest::Approx(-1.0).epsilon(1e-15));

  const SpinorField narrow = build_wavepacket(packet(1.0, 0.005, Branch::Positive), line_grid(), g);
  CHECK(std::abs(rate(narrow, g) - 1.0 / std::sqrt(2.0)) <= 1e-12);

  const SpinorField f = build_wavepacket(packet(1.0, 0.4, Branch::Positive), line_grid(), g);
  CHECK(std::abs(rate(f, g) - classical_rate(f)) <= 1e-11);
  const Complex c(1.5, -0.5);
  CHECK(rate(f.scaled(c), g) == doctest::Approx(std::norm(c) * rate(f, g)).epsilon(1e-13));
}

TEST_CASE("narrow-packet limit approaches m/E(p0) at O(sigma^2)") {
  const double target = 1.0 / std::sqrt(2.0);
  std::vector<double> sigmas{0.2, 0.1, 0.05};
  std::vector<double> errors;
  for (double s : sigmas) {
    const SpinorField f = build_wavepacket(packet(1.0, s, Branch::Positive), line_grid(), g);
    errors.push_back(std::abs(rate(f, g) - target));
  }
  CHECK(errors[1] < errors[0]);
  CHECK(errors[2] < errors[1]);
  CHECK(loglog_slope(sigmas, errors) == doctest::Approx(2.0).epsilon(0.15));

  // Well-resolved widths agree with the continuum Gaussian average.
  for (double s : {0.2, 0.1}) {
    const SpinorField f = build_wavepacket(packet(1.0, s, Branch::Positive), line_grid(), g);
    CHECK(std::abs(rate(f, g) - continuum_rate(1.0, s)) <= 1e-9);
  }
}

TEST_CASE("evolve") {
  const SpinorField f = build_wavepacket(packet(0.5, 0.5, Branch::Mixed), line_grid(), g);
  const SpinorField same = evolve(f, g, 0.0);
  for (std::size_t k = 0; k < f.amps().size(); ++k) CHECK((same.amps()[k] - f.amps()[k]).norm() == 0.0);
  for (double t : {0.1, 3.0, -12.0, 250.0}) {
    CHECK(std::abs(evolve(f, g, t).norm_squared() - f.norm_squared()) <= 1e-12);
  }

  const SpinorField pos = build_wavepacket(packet(1.0, 0.25, Branch::Positive), line_grid(), g);
  const double r0 = rate(pos, g);
  for (double t : {0.5, 7.0, 31.0, -4.0}) CHECK(std::abs(rate(evolve(pos, g, t), g) - r0) <= 1e-11);
}

TEST_CASE("proper_time") {
  SUBCASE("constant rate integrates exactly") {
    const SpinorField pos = build_wavepacket(packet(1.0, 0.25, Branch::Positive), line_grid(), g);
    const RateSeries series = proper_time(pos, g, 2.0, 12.0, 101);
    CHECK(series.tau.front() == 0.0);
    CHECK(std::abs(series.tau.back() - rate(pos, g) * 10.0) <= 1e-10);
    double drift = 0.0;
    for (double r : series.rate) drift = std::max(drift, std::abs(r - series.rate.front()));
    CHECK(drift <= 1e-11);
  }
  SUBCASE("zero span") {
    const SpinorField pos = build_wavepacket(packet(0.0, 0.25, Branch::Positive), line_grid(), g);
    const RateSeries series = proper_time(pos, g, 1.0, 1.0, 3);
    for (double v : series.tau) CHECK(v == 0.0);
  }
  SUBCASE("mixed single mode matches the two-branch closed form") {
    const SpinorField f = build_wavepacket(packet(1.0, 0.005, Branch::Mixed), line_grid(), g);
    const MomentumMode mode{Eigen::Vector3d(1.0, 0.0, 0.0), 1.0};
    const SpectralData s = spectral(mode, g);
    const Spinor psi = f.amps()[144] * std::sqrt(f.weight());
    const Spinor a = s.positive * psi;
    const Spinor b = s.negative * psi;
    const double mean = (a.dot(g.beta * a) + b.dot(g.beta * b)).real();
    const Complex cross = a.dot(g.beta * b);
    const double energy = s.energy;
    auto tau = [&](double t) {
      const Complex osc = cross * (std::polar(1.0, 2 * energy * t) - 1.0) / (2.0 * kI * energy);
      return mean * t + 2.0 * osc.real();
    };
    const RateSeries series = proper_time(f, g, 0.0, 20.0, 1001);
    double worst = 0.0;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
      worst = std::max(worst, std::abs(series.tau[i] - tau(series.times[i])));
    }
    CHECK(std::abs(cross) > 0.1);
    CHECK(worst <= 1e-6);
  }
  SUBCASE("errors") {
    const SpinorField pos = build_wavepacket(packet(0.0, 0.25, Branch::Positive), line_grid(), g);
    CHECK(kind_of([&] { proper_time(pos, g, 1.0, 0.0, 11); }) == ErrorKind::BadInterval);
    CHECK(kind_of([&] { proper_time(pos, g, 0.0, 1.0, 10); }) == ErrorKind::BadInterval);
    CHECK(kind_of([&] { proper_time(pos, g, 0.0, 1.0, 1); }) == ErrorKind::BadInterval);
  }
}

TEST_CASE("cumulative Simpson is fourth order") {
  std::vector<double> errs, steps;
  for (int n : {41, 81, 161}) {
    const double dt = 2.0 / (n - 1);
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = std::cos(3.0 * i * dt);
    const auto tau = cumulative_simpson(f, dt);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(tau[i] - std::sin(3.0 * i * dt) / 3.0));
    errs.push_back(worst);
    steps.push_back(dt);
  }
  CHECK(loglog_slope(steps, errs) == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("zitter_spectrum") {
  SUBCASE("positive branch has no oscillation") {
    const SpinorField pos = build_wavepacket(packet(1.0, 0.25, Branch::Positive), line_grid(), g);
    CHECK(zitter_spectrum(proper_time(pos, g, 0.0, 50.0, 1025)).amplitude < 1e-10);
  }
  SUBCASE("mixed single mode at |p| = m peaks at 2 sqrt(2) m") {
    const SpinorField f = build_wavepacket(packet(1.0, 0.005, Branch::Mixed), line_grid(), g);
    const RateSeries series = proper_time(f, g, 0.0, 200.0, 4097);
    const ZitterPeak peak = zitter_spectrum(series);
    const double bin = 2.0 * std::numbers::pi / (200.0 / 4096.0 * 4097.0);
    CHECK(std::abs(peak.frequency - 2.0 * std::sqrt(2.0)) <= bin);
    CHECK(peak.amplitude > 0.1);
  }
  SUBCASE("mixed at rest has no cross term") {
    const SpinorField f = build_wavepacket(packet(0.0, 0.005, Branch::Mixed), line_grid(), g);
    CHECK(zitter_spectrum(proper_time(f, g, 0.0, 50.0, 1025)).amplitude < 1e-10);
  }
  SUBCASE("aliasing guard") {
    const SpinorField f = build_wavepacket(packet(0.0, 0.25, Branch::Mixed), line_grid(), g);
    CHECK(kind_of([&] { zitter_spectrum(proper_time(f, g, 0.0, 50.0, 257)); }) == ErrorKind::Aliased);
    CHECK(kind_of([&] { zitter_spectrum(proper_time(f, g, 0.0, 1.0, 33)); }) == ErrorKind::Aliased);
  }
}
