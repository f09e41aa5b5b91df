#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "propertime/error.hpp"
#include "propertime/invariance_solver.hpp"
#include "propertime/linalg.hpp"
#include "propertime/si_estimator.hpp"

namespace propertime::cli {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kCommands{"derive-d", "free-evolve", "fw-check", "magnetar", "selftest"};

// Value parsers throw std::invalid_argument with a short description; the
// caller adds the line or flag context.
std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument("expects a number, got '" + s + "'");
  }
  return v;
}

long long parse_integer(const std::string& raw) {
  const std::string s = trim(raw);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("expects an integer, got '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& raw) {
  const long long v = parse_integer(raw);
  if (v < -1000000000LL || v > 1000000000LL) throw std::invalid_argument("integer out of range");
  return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(item));
  if (out.empty()) throw std::invalid_argument("expects a comma-separated list of numbers");
  return out;
}

bool parse_bool(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw std::invalid_argument("expects true or false, got '" + s + "'");
}

std::string parse_text(const std::string& raw) {
  std::string s = trim(raw);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  if (s.empty()) throw std::invalid_argument("expects a non-empty value");
  return s;
}

// One to three values; a single value is broadcast.
template <typename T>
std::array<T, 3> parse_triple(const std::string& raw) {
  const std::vector<double> v = parse_list(raw);
  if (v.size() > 3) throw std::invalid_argument("expects at most three values");
  std::array<T, 3> out{};
  for (int a = 0; a < 3; ++a) out[a] = static_cast<T>(v.size() == 1 ? v[0] : (a < static_cast<int>(v.size()) ? v[a] : 0.0));
  return out;
}

std::array<int, 3> parse_dims(const std::string& raw) {
  const std::vector<double> v = parse_list(raw);
  if (v.size() > 3) throw std::invalid_argument("expects at most three sizes");
  std::array<int, 3> out{1, 1, 1};
  for (std::size_t a = 0; a < v.size(); ++a) {
    if (v[a] != std::floor(v[a])) throw std::invalid_argument("sizes must be integers");
    out[a] = static_cast<int>(v[a]);
  }
  return out;
}

std::array<int, 2> parse_dims2(const std::string& raw) {
  const std::vector<double> v = parse_list(raw);
  if (v.size() > 2) throw std::invalid_argument("expects one or two sizes");
  if (v[0] != std::floor(v[0]) || v.back() != std::floor(v.back())) {
    throw std::invalid_argument("sizes must be integers");
  }
  return {static_cast<int>(v[0]), static_cast<int>(v.back())};
}

std::array<double, 2> parse_pair(const std::string& raw) {
  const std::vector<double> v = parse_list(raw);
  if (v.size() > 2) throw std::invalid_argument("expects one or two values");
  return {v[0], v.back()};
}

Spin2 parse_spin(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "up") return Spin2(1.0, 0.0);
  if (s == "down") return Spin2(0.0, 1.0);
  throw std::invalid_argument("expects up or down, got '" + s + "'");
}

Branch parse_branch(const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "positive") return Branch::Positive;
  if (s == "negative") return Branch::Negative;
  if (s == "mixed") return Branch::Mixed;
  throw std::invalid_argument("expects positive, negative or mixed, got '" + s + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&)>;
using Section = std::vector<std::pair<std::string, Setter>>;

// Keys whose command-line form is a bare flag.
bool is_flag_key(const std::string& command, const std::string& key) {
  return (key == "json" && (command == "derive-d" || command == "selftest")) ||
         (key == "log" && command == "magnetar") || (key == "spectrum" && command == "free-evolve");
}

const std::map<std::string, Section>& sections() {
  static const std::map<std::string, Section> table = [] {
    std::map<std::string, Section> t;
    t["derive-d"] = {
        {"json", [](RunConfig& c, const std::string& v) { c.derive.json = parse_bool(v); }},
    };
    t["free-evolve"] = {
        {"mass", [](RunConfig& c, const std::string& v) { c.free_evolve.grid.mass = parse_double(v); }},
        {"dims", [](RunConfig& c, const std::string& v) { c.free_evolve.grid.dims = parse_dims(v); }},
        {"pmax", [](RunConfig& c, const std::string& v) { c.free_evolve.grid.pmax = parse_triple<double>(v); }},
        {"p0",
         [](RunConfig& c, const std::string& v) {
           const std::vector<double> p = parse_list(v);
           if (p.size() > 3) throw std::invalid_argument("expects at most three components");
           c.free_evolve.packet.p0 = Eigen::Vector3d::Zero();
           for (std::size_t a = 0; a < p.size(); ++a) c.free_evolve.packet.p0(a) = p[a];
         }},
        {"sigma_p", [](RunConfig& c, const std::string& v) { c.free_evolve.packet.sigma_p = parse_double(v); }},
        {"spin", [](RunConfig& c, const std::string& v) { c.free_evolve.packet.spin = parse_spin(v); }},
        {"branch", [](RunConfig& c, const std::string& v) { c.free_evolve.packet.branch = parse_branch(v); }},
        {"theta", [](RunConfig& c, const std::string& v) { c.free_evolve.packet.theta = parse_double(v); }},
        {"t0", [](RunConfig& c, const std::string& v) { c.free_evolve.t0 = parse_double(v); }},
        {"t1", [](RunConfig& c, const std::string& v) { c.free_evolve.t1 = parse_double(v); }},
        {"samples", [](RunConfig& c, const std::string& v) { c.free_evolve.samples = parse_int(v); }},
        {"spectrum", [](RunConfig& c, const std::string& v) { c.free_evolve.spectrum = parse_bool(v); }},
        {"output", [](RunConfig& c, const std::string& v) { c.free_evolve.output = parse_text(v); }},
        {"spectrum_output",
         [](RunConfig& c, const std::string& v) { c.free_evolve.spectrum_output = parse_text(v); }},
    };
    t["fw-check"] = {
        {"dims", [](RunConfig& c, const std::string& v) { c.fw_check.study.reference.dims = parse_dims2(v); }},
        {"length", [](RunConfig& c, const std::string& v) { c.fw_check.study.reference.length = parse_pair(v); }},
        {"mass", [](RunConfig& c, const std::string& v) { c.fw_check.study.reference.mass = parse_double(v); }},
        {"charge", [](RunConfig& c, const std::string& v) { c.fw_check.study.reference.charge = parse_double(v); }},
        {"field", [](RunConfig& c, const std::string& v) { c.fw_check.study.reference.field = parse_double(v); }},
        {"potential",
         [](RunConfig& c, const std::string& v) { c.fw_check.study.reference.potential = parse_double(v); }},
        {"packet_width", [](RunConfig& c, const std::string& v) { c.fw_check.study.packet_width = parse_double(v); }},
        {"spin", [](RunConfig& c, const std::string& v) { c.fw_check.study.spin = parse_spin(v); }},
        {"vscales", [](RunConfig& c, const std::string& v) { c.fw_check.vscales = parse_list(v); }},
        {"output", [](RunConfig& c, const std::string& v) { c.fw_check.output = parse_text(v); }},
    };
    t["magnetar"] = {
        {"bmin", [](RunConfig& c, const std::string& v) { c.magnetar.bmin = parse_double(v); }},
        {"bmax", [](RunConfig& c, const std::string& v) { c.magnetar.bmax = parse_double(v); }},
        {"steps", [](RunConfig& c, const std::string& v) { c.magnetar.steps = parse_int(v); }},
        {"log", [](RunConfig& c, const std::string& v) { c.magnetar.log = parse_bool(v); }},
        {"output", [](RunConfig& c, const std::string& v) { c.magnetar.output = parse_text(v); }},
    };
    t["selftest"] = {
        {"seed",
         [](RunConfig& c, const std::string& v) {
           const long long s = parse_integer(v);
           if (s < 0) throw std::invalid_argument("seed must be non-negative");
           c.selftest.seed = static_cast<std::uint64_t>(s);
         }},
        {"json", [](RunConfig& c, const std::string& v) { c.selftest.json = parse_bool(v); }},
        {"output", [](RunConfig& c, const std::string& v) { c.selftest.output = parse_text(v); }},
    };
    return t;
  }();
  return table;
}

const Section& section_for(const std::string& command, const std::string& context) {
  const auto it = sections().find(command);
  if (it == sections().end()) {
    std::string msg = context + ": unknown section '" + command + "'";
    const std::string near = nearest_key(command, kCommands);
    if (!near.empty()) msg += "; did you mean '" + near + "'?";
    throw Error(ErrorKind::ParseError, msg);
  }
  return it->second;
}

[[noreturn]] void invalid(const std::string& precondition) {
  throw Error(ErrorKind::ValidationError, precondition);
}

void require(bool ok, const std::string& precondition) {
  if (!ok) invalid(precondition);
}

// Module-level validators report their own message; surface it as a
// validation failure of the config.
template <typename F>
void module_check(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    invalid(e.what());
  }
}

void validate_free_evolve(const FreeEvolveConfig& c) {
  require(c.grid.mass > 0.0, "mass > 0");
  for (int a = 0; a < 3; ++a) {
    require(c.grid.dims[a] >= 1, "dims >= 1");
    if (c.grid.active(a)) require(c.grid.pmax[a] > 0.0, "pmax > 0 on active axes");
  }
  require(c.grid.size() <= (1u << 22), "dims product <= 4194304");
  require(c.packet.sigma_p > 0.0, "sigma_p > 0");
  for (int a = 0; a < 3; ++a) {
    if (c.grid.active(a)) {
      require(c.grid.pmax[a] >= std::abs(c.packet.p0(a)) + 4.0 * c.packet.sigma_p,
              "pmax >= |p0| + 4 sigma_p on active axes");
    } else {
      require(c.packet.p0(a) == 0.0, "p0 = 0 along axes with one grid point");
    }
  }
  require(c.t1 >= c.t0, "t1 >= t0");
  require(c.samples >= 3 && c.samples % 2 == 1, "samples odd and >= 3");
  if (c.spectrum) {
    require(c.samples >= 64, "samples >= 64 with spectrum");
    require(c.t1 > c.t0, "t1 > t0 with spectrum");
    const double rate = (c.samples - 1) / (c.t1 - c.t0);
    require(rate > 4.0 * c.grid.max_energy() / std::numbers::pi,
            "(samples - 1) / (t1 - t0) > 4 E_max / pi with spectrum");
  }
}

void validate_fw_check(const FwCheckConfig& c) {
  module_check([&] { c.study.validate(); });
  require(c.vscales.size() >= 2, "at least two vscales");
  for (std::size_t i = 0; i < c.vscales.size(); ++i) {
    require(c.vscales[i] > 0.0, "vscales > 0");
    if (i > 0) require(c.vscales[i] < c.vscales[i - 1], "vscales strictly decreasing");
  }
}

void validate_magnetar(const MagnetarConfig& c) {
  require(c.bmin > 0.0, "bmin > 0");
  require(c.bmax >= c.bmin, "bmax >= bmin");
  require(c.steps >= 1, "steps >= 1");
  require(c.steps >= 2 || c.bmax == c.bmin, "steps >= 2 when bmax > bmin");
}

struct Band {
  const char* name;
  double centre;
  double half_width;
};

constexpr Band kBetaBand{"res_beta", 3.0, 0.4};
constexpr Band kRatioBand{"ratio_small", 3.0, 0.5};
constexpr Band kRateBand{"res_rate", 4.0, 0.6};

int run_derive(const DeriveConfig& c, std::ostream& out) {
  const GammaBasis g = build_gamma_basis();
  const RateMatrixDerivation d = derive_rate_matrix_report(g);
  const bool ok = max_abs(d.rate_matrix - g.beta) <= 1e-10;
  if (c.json) {
    nlohmann::ordered_json doc;
    doc["kernel_dims"] = d.kernel_dims;
    nlohmann::ordered_json re = nlohmann::ordered_json::array(), im = nlohmann::ordered_json::array();
    for (int i = 0; i < 4; ++i) {
      std::vector<double> r, m;
      for (int j = 0; j < 4; ++j) {
        r.push_back(d.rate_matrix(i, j).real());
        m.push_back(d.rate_matrix(i, j).imag());
      }
      re.push_back(r);
      im.push_back(m);
    }
    doc["rate_matrix"] = {{"real", re}, {"imag", im}};
    doc["equals_beta"] = ok;
    out << doc.dump(2) << "\n";
  } else {
    out << "kernel dims: " << d.kernel_dims[0] << ", " << d.kernel_dims[1] << ", " << d.kernel_dims[2] << "\n";
    out << "D =\n";
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const Complex z = d.rate_matrix(i, j);
        out << (j ? " " : "  ") << format_number(z.real());
        if (z.imag() != 0.0) out << (z.imag() < 0 ? "" : "+") << format_number(z.imag()) << "i";
      }
      out << "\n";
    }
    out << "derive-d: " << (ok ? "D equals beta" : "D differs from beta") << "\n";
  }
  return ok ? kOk : kNumericFailure;
}

int run_free_evolve(const FreeEvolveConfig& c, std::ostream& out) {
  const GammaBasis g = build_gamma_basis();
  const SpinorField field = build_wavepacket(c.packet, c.grid, g);
  const RateSeries series = proper_time(field, g, c.t0, c.t1, c.samples);

  std::string csv = "t,rate,tau\n";
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    csv += format_number(series.times[i]) + "," + format_number(series.rate[i]) + "," +
           format_number(series.tau[i]) + "\n";
  }
  const std::string path = resolve_output(c.output);
  write_atomic(path, csv);

  double drift = 0.0;
  for (double r : series.rate) drift = std::max(drift, std::abs(r - series.rate.front()));
  const bool stationary = c.packet.branch != Branch::Mixed;
  const bool ok = !stationary || drift <= 1e-11;

  std::string extra;
  if (c.spectrum) {
    std::string spec = "freq,power\n";
    for (const SpectrumBin& b : rate_spectrum(series)) {
      spec += format_number(b.frequency) + "," + format_number(b.power) + "\n";
    }
    const std::string spath = resolve_output(c.spectrum_output);
    write_atomic(spath, spec);
    const ZitterPeak peak = zitter_spectrum(series);
    extra = " peak_freq=" + format_number(peak.frequency) + " peak_amp=" + format_number(peak.amplitude) +
            " spectrum=" + spath;
  }
  out << "free-evolve: " << series.times.size() << " samples tau(t1)=" << format_number(series.tau.back())
      << " drift=" << format_number(drift) << (stationary ? (ok ? " ok" : " DRIFT") : "") << " csv=" << path
      << extra << "\n";
  return ok ? kOk : kNumericFailure;
}

int run_fw_check(const FwCheckConfig& c, std::ostream& out) {
  const std::vector<ScalingRow> rows = fw_scaling_study(c.study, c.vscales);
  std::string csv = "vscale,res_beta,res_rate,ratio_small\n";
  std::vector<double> beta, rate, ratio;
  for (const ScalingRow& r : rows) {
    csv += format_number(r.vscale) + "," + format_number(r.res_beta) + "," + format_number(r.res_rate) + "," +
           format_number(r.ratio_small) + "\n";
    beta.push_back(r.res_beta);
    rate.push_back(r.res_rate);
    ratio.push_back(r.ratio_small);
  }
  const std::string path = resolve_output(c.output);
  write_atomic(path, csv);

  bool ok = true;
  auto report = [&](const Band& band, const std::vector<double>& values) {
    const double slope = loglog_slope(c.vscales, values);
    const bool pass = std::abs(slope - band.centre) <= band.half_width;
    ok = ok && pass;
    out << (pass ? "PASS " : "FAIL ") << band.name << " slope=" << format_number(slope) << " band=["
        << format_number(band.centre - band.half_width) << ", " << format_number(band.centre + band.half_width)
        << "]\n";
  };
  report(kBetaBand, beta);
  report(kRatioBand, ratio);
  report(kRateBand, rate);
  out << "fw-check: " << (ok ? "all slopes in band" : "slope out of band") << " csv=" << path << "\n";
  return ok ? kOk : kNumericFailure;
}

int run_magnetar(const MagnetarConfig& c, std::ostream& out) {
  std::vector<double> fields;
  for (int i = 0; i < c.steps; ++i) {
    const double f = c.steps == 1 ? 0.0 : static_cast<double>(i) / (c.steps - 1);
    if (c.log) {
      const double lo = std::log10(c.bmin), hi = std::log10(c.bmax);
      fields.push_back(c.steps == 1 ? c.bmin : std::pow(10.0, lo + i * (hi - lo) / (c.steps - 1)));
    } else {
      fields.push_back(c.bmin + f * (c.bmax - c.bmin));
    }
  }
  const std::vector<si::ShiftRow> rows = si::magnetar_sweep(fields);
  std::string csv = "B_tesla,shift,flag\n";
  int flagged = 0;
  for (const si::ShiftRow& r : rows) {
    csv += format_number(r.field_tesla) + "," + format_number(r.shift) + "," + (r.expansion_invalid ? "1" : "0") +
           "\n";
    flagged += r.expansion_invalid;
  }
  const std::string path = resolve_output(c.output);
  write_atomic(path, csv);
  out << "magnetar: shift_per_tesla=" << format_number(si::rate_shift_per_tesla().value) << " flagged=" << flagged
      << "/" << rows.size() << " csv=" << path << "\n";
  return kOk;
}

int run_selftest_command(const SelftestConfig& c, std::ostream& out) {
  const SelftestReport report = run_selftest(c.seed);
  const std::string body = c.json ? report.json() : report.text();
  if (!c.output.empty()) write_atomic(resolve_output(c.output), body);
  out << body;
  return report.passed() ? kOk : kNumericFailure;
}

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string nearest_key(const std::string& key, const std::vector<std::string>& candidates) {
  auto distance = [](const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      std::size_t diag = row[0];
      row[0] = i;
      for (std::size_t j = 1; j <= b.size(); ++j) {
        const std::size_t up = row[j];
        row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
        diag = up;
      }
    }
    return row[b.size()];
  };
  std::string best;
  std::size_t best_d = std::max<std::size_t>(2, key.size() / 2) + 1;
  for (const std::string& c : candidates) {
    const std::size_t d = distance(key, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<std::string> section_keys(const std::string& command) {
  std::vector<std::string> keys;
  for (const auto& [name, setter] : section_for(command, "config")) keys.push_back(name);
  return keys;
}

void apply_setting(RunConfig& cfg, const std::string& command, const std::string& key, const std::string& value,
                   const std::string& context) {
  const Section& section = section_for(command, context);
  for (const auto& [name, setter] : section) {
    if (name != key) continue;
    try {
      setter(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw Error(ErrorKind::ParseError, context + ": " + key + " " + e.what());
    }
    return;
  }
  std::string msg = context + ": unknown key '" + key + "' for " + command;
  const std::string near = nearest_key(key, section_keys(command));
  if (!near.empty()) msg += "; did you mean '" + near + "'?";
  throw Error(ErrorKind::ParseError, msg);
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string context = source + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorKind::ParseError, context + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      section_for(section, context);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::ParseError, context + ": expected key = value");
    if (section.empty()) throw Error(ErrorKind::ParseError, context + ": key outside any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    // Other sections are parsed into a scratch copy so typos there still fail.
    RunConfig scratch;
    apply_setting(section == cfg.command ? cfg : scratch, section, key, value, context);
  }
}

void validate(const RunConfig& cfg) {
  if (cfg.command == "free-evolve") validate_free_evolve(cfg.free_evolve);
  else if (cfg.command == "fw-check") validate_fw_check(cfg.fw_check);
  else if (cfg.command == "magnetar") validate_magnetar(cfg.magnetar);
  else if (cfg.command != "derive-d" && cfg.command != "selftest") {
    throw Error(ErrorKind::ValidationError, "unknown subcommand '" + cfg.command + "'");
  }
}

RunConfig parse_args(const std::vector<std::string>& args) {
  CLI::App app{"Proper-time rate of the Dirac particle: derivations and numerical checks", "propertime"};
  app.require_subcommand(1, 1);
  std::map<std::string, std::string> config_paths;
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  for (const std::string& command : kCommands) {
    CLI::App* sub = app.add_subcommand(command);
    sub->add_option("-c,--config", config_paths[command], "INI-style config file");
    for (const std::string& key : section_keys(command)) {
      std::string& slot = values[command][key];
      if (is_flag_key(command, key)) {
        options[command][key] = sub->add_flag_function(
            "--" + key, [&slot](std::int64_t) { slot = "true"; }, "sets " + key + " = true");
      } else {
        options[command][key] = sub->add_option("--" + key, slot);
      }
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (!app.get_subcommands().empty()) {
      const std::string command = app.get_subcommands().front()->get_name();
      for (const std::string& a : args) {
        if (a.rfind("--", 0) != 0) continue;
        const std::string key = a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2);
        const auto keys = section_keys(command);
        if (key == "config" || std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
        msg = "unknown flag '--" + key + "' for " + command;
        const std::string near = nearest_key(key, keys);
        if (!near.empty()) msg += "; did you mean '--" + near + "'?";
        break;
      }
    }
    throw Error(ErrorKind::ParseError, msg);
  }

  RunConfig cfg;
  cfg.command = app.get_subcommands().front()->get_name();
  const std::string& path = config_paths[cfg.command];
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot read config file '" + path + "'");
    std::stringstream text;
    text << in.rdbuf();
    apply_config_text(cfg, text.str(), path);
  }
  for (const std::string& key : section_keys(cfg.command)) {
    if (options[cfg.command][key]->count() > 0) {
      apply_setting(cfg, cfg.command, key, values[cfg.command][key], "--" + key);
    }
  }
  validate(cfg);
  return cfg;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "derive-d") return run_derive(cfg.derive, out);
    if (cfg.command == "free-evolve") return run_free_evolve(cfg.free_evolve, out);
    if (cfg.command == "fw-check") return run_fw_check(cfg.fw_check, out);
    if (cfg.command == "magnetar") return run_magnetar(cfg.magnetar, out);
    if (cfg.command == "selftest") return run_selftest_command(cfg.selftest, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    const bool usage = e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::ValidationError;
    return usage ? kUsageError : kNumericFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericFailure;
  }
  err << "error: unknown subcommand '" << cfg.command << "'\n";
  return kUsageError;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const CLI::CallForHelp&) {
    out << "usage: propertime <";
    for (std::size_t i = 0; i < kCommands.size(); ++i) out << (i ? "|" : "") << kCommands[i];
    out << "> [--config FILE] [--key value ...]\n";
    for (const std::string& command : kCommands) {
      out << "  " << command << ":";
      for (const std::string& key : section_keys(command)) out << " --" << key;
      out << "\n";
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return run(cfg, out, err);
}

std::string resolve_output(const std::string& path) {
  fs::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') p = fs::path(dir) / p;
  }
  return p.string();
}

void write_atomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

}  // namespace propertime::cli
