#include "propertime/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "json.hpp"

#include "propertime/foldy_wouthuysen.hpp"
#include "propertime/invariance_solver.hpp"
#include "propertime/linalg.hpp"
#include "propertime/momentum_dirac.hpp"
#include "propertime/si_estimator.hpp"
#include "propertime/wavepacket.hpp"

namespace propertime {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Suite {
 public:
  explicit Suite(SelftestReport& report) : report_(report) {}

  void at_most(std::string name, double value, double limit) { band(std::move(name), value, 0.0, limit); }
  void band(std::string name, double value, double low, double high) {
    report_.checks.push_back({std::move(name), value, low, high, value >= low && value <= high});
  }

 private:
  SelftestReport& report_;
};

MomentumMode random_mode(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> comp(-3.0, 3.0);
  std::uniform_real_distribution<double> mass(0.2, 2.0);
  return MomentumMode{Eigen::Vector3d(comp(rng), comp(rng), comp(rng)), mass(rng)};
}

void algebra_checks(Suite& suite, const GammaBasis& g) {
  double clifford = 0.0;
  for (int mu = 0; mu < 4; ++mu) {
    for (int nu = 0; nu < 4; ++nu) {
      const Complex4x4 expected = 2.0 * metric(mu, nu) * Complex4x4::Identity();
      clifford = std::max(clifford, max_abs(anticommutator(g.gamma[mu], g.gamma[nu]) - expected));
    }
  }
  suite.at_most("clifford_relation", clifford, kTolerances.identity);

  const RateMatrixDerivation d = derive_rate_matrix_report(g);
  suite.band("kernel_dim_lorentz", d.kernel_dims[0], 2, 2);
  suite.band("kernel_dim_time_reversal", d.kernel_dims[1], 1, 1);
  suite.band("kernel_dim_parity", d.kernel_dims[2], 1, 1);
  suite.at_most("rate_matrix_vs_beta", max_abs(d.rate_matrix - g.beta), 1e-10);
}

void single_mode_checks(Suite& suite, const GammaBasis& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> time(-20.0, 20.0);
  double heisenberg = 0.0, closed = 0.0, projector = 0.0;
  for (int i = 0; i < 100; ++i) {
    const MomentumMode mode = random_mode(rng);
    const double t = time(rng);
    const Complex4x4 u = evolution(mode, g, t);
    heisenberg = std::max(heisenberg, max_abs(beta_heisenberg(mode, g, t) - u.adjoint() * g.beta * u));
    closed = std::max(closed, max_abs(evolution_closed_form(mode, g, t) - u));
    const ProjectorIdentity id = positive_rate_identity(mode, g);
    projector = std::max(projector, max_abs(id.lhs - id.rhs));
  }
  suite.at_most("beta_heisenberg_terms", heisenberg, 1e-11);
  suite.at_most("evolution_closed_form", closed, 1e-12);
  suite.at_most("positive_projector_identity", projector, 1e-12);
}

void wavepacket_checks(Suite& suite, const GammaBasis& g) {
  const MomentumGrid grid;
  WavepacketSpec spec;
  spec.p0 = Eigen::Vector3d(1.0, 0.0, 0.0);
  spec.sigma_p = 0.25;
  const SpinorField pos = build_wavepacket(spec, grid, g);
  const RateSeries series = proper_time(pos, g, 0.0, 20.0, 201);
  double drift = 0.0;
  for (double r : series.rate) drift = std::max(drift, std::abs(r - series.rate.front()));
  suite.at_most("positive_rate_drift", drift, 1e-11);
  suite.at_most("positive_rate_vs_classical", std::abs(rate(pos, g) - classical_rate(pos)), 1e-11);

  const std::vector<double> sigmas{0.2, 0.1, 0.05};
  std::vector<double> errors;
  for (double s : sigmas) {
    spec.sigma_p = s;
    errors.push_back(std::abs(rate(build_wavepacket(spec, grid, g), g) - 1.0 / std::sqrt(2.0)));
  }
  suite.band("narrow_packet_slope", loglog_slope(sigmas, errors), 1.7, 2.3);

  spec.sigma_p = 0.005;
  spec.branch = Branch::Mixed;
  const RateSeries mixed = proper_time(build_wavepacket(spec, grid, g), g, 0.0, 200.0, 4097);
  const ZitterPeak peak = zitter_spectrum(mixed);
  const double bin = 2.0 * std::numbers::pi / (mixed.times.size() * (mixed.times[1] - mixed.times[0]));
  suite.at_most("mixed_peak_offset_bins", std::abs(peak.frequency - 2.0 * std::sqrt(2.0)) / bin, 1.0);
}

void fw_checks(Suite& suite) {
  ScalingStudy study;
  study.reference.dims = {16, 16};
  const std::vector<double> scales{0.4, 0.2, 0.1};
  const std::vector<ScalingRow> rows = fw_scaling_study(study, scales);
  std::vector<double> res_beta, res_rate, ratio;
  for (const ScalingRow& r : rows) {
    res_beta.push_back(r.res_beta);
    res_rate.push_back(r.res_rate);
    ratio.push_back(r.ratio_small);
  }
  suite.band("fw_beta_residual_slope", loglog_slope(scales, res_beta), 2.6, 3.4);
  suite.band("fw_small_component_slope", loglog_slope(scales, ratio), 2.5, 3.5);
  suite.band("fw_rate_difference_slope", loglog_slope(scales, res_rate), 3.4, 4.6);

  LatticeConfig cfg;
  cfg.dims = {8, 8};
  cfg.length = {8.0, 8.0};
  cfg.field = 0.3;
  cfg.charge = -1.0;
  const double expected = cfg.charge * cfg.field / (2.0 * cfg.mass * cfg.mass);
  const double coeff = spin_field_coefficient(beta_truncated(cfg), cfg);
  suite.at_most("spin_field_coefficient_rel", std::abs(coeff / expected - 1.0), 1e-8);
}

void si_checks(Suite& suite) {
  const double shift = si::rate_shift_per_tesla().value;
  const double bohr_over_rest = 9.2740100783e-24 / 8.1871057769e-14;
  suite.at_most("si_shift_rel_error", std::abs(shift / bohr_over_rest - 1.0), 5e-3);
  suite.band("si_shift_over_quoted", shift / si::kQuotedShiftPerTesla, 0.5, 2.0);
  suite.band("si_rest_frequency_log10", std::log10(si::zitter_frequency_si().angular), 20.5, 21.5);
  const si::ShiftRow row = si::magnetar_sweep({1e10}).front();
  suite.band("si_magnetar_flagged", row.expansion_invalid ? 1.0 : 0.0, 1.0, 1.0);
}

}  // namespace

bool SelftestReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const SelftestCheck& c) { return c.passed; });
}

std::string SelftestReport::text() const {
  std::string out = "seed " + std::to_string(seed) + "\n";
  for (const SelftestCheck& c : checks) {
    out += (c.passed ? "PASS " : "FAIL ") + c.name + " value=" + format_double(c.value) + " range=[" +
           format_double(c.low) + ", " + format_double(c.high) + "]\n";
  }
  out += passed() ? "selftest PASS\n" : "selftest FAIL\n";
  return out;
}

std::string SelftestReport::json() const {
  nlohmann::ordered_json doc;
  doc["seed"] = seed;
  doc["passed"] = passed();
  doc["checks"] = nlohmann::ordered_json::array();
  for (const SelftestCheck& c : checks) {
    doc["checks"].push_back(
        {{"name", c.name}, {"value", c.value}, {"low", c.low}, {"high", c.high}, {"passed", c.passed}});
  }
  return doc.dump(2) + "\n";
}

SelftestReport run_selftest(std::uint64_t seed) {
  SelftestReport report;
  report.seed = seed;
  Suite suite(report);
  std::mt19937_64 rng(seed);
  const GammaBasis g = build_gamma_basis();
  algebra_checks(suite, g);
  single_mode_checks(suite, g, rng);
  wavepacket_checks(suite, g);
  fw_checks(suite);
  si_checks(suite);
  return report;
}

}  // namespace propertime
