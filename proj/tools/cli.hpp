#pragma once

// Command-line front end: config parsing, validation, and the five
// subcommands. Kept in a library so tests can drive it without a process.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "propertime/foldy_wouthuysen.hpp"
#include "propertime/selftest.hpp"
#include "propertime/wavepacket.hpp"

namespace propertime::cli {

inline constexpr const char* kOutputDirEnv = "PROPERTIME_OUTPUT_DIR";

enum ExitCode { kOk = 0, kNumericFailure = 1, kUsageError = 2 };

struct DeriveConfig {
  bool json = false;
};

struct FreeEvolveConfig {
  MomentumGrid grid;
  WavepacketSpec packet{Eigen::Vector3d(1.0, 0.0, 0.0)};
  double t0 = 0.0;
  double t1 = 20.0;
  int samples = 401;
  bool spectrum = false;
  std::string output = "free_evolve.csv";
  std::string spectrum_output = "free_evolve_spectrum.csv";
};

struct FwCheckConfig {
  ScalingStudy study;
  std::vector<double> vscales{0.4, 0.2, 0.1, 0.05};
  std::string output = "fw_check.csv";
};

struct MagnetarConfig {
  double bmin = 1e9;
  double bmax = 1e10;
  int steps = 10;
  bool log = false;
  std::string output = "magnetar.csv";
};

struct SelftestConfig {
  std::uint64_t seed = kDefaultSeed;
  bool json = false;
  std::string output;  // empty: stdout only
};

struct RunConfig {
  std::string command;
  DeriveConfig derive;
  FreeEvolveConfig free_evolve;
  FwCheckConfig fw_check;
  MagnetarConfig magnetar;
  SelftestConfig selftest;
};

// Known keys of a subcommand section, in declaration order.
std::vector<std::string> section_keys(const std::string& command);

// Sets one key of `command`'s section from its text form. Throws ParseError
// naming `context` for unknown keys (with the nearest known key) and for
// malformed values.
void apply_setting(RunConfig& cfg, const std::string& command, const std::string& key,
                   const std::string& value, const std::string& context);

// Applies an INI-style text: "[section]" headers and "key = value" lines,
// '#' comments. Every section is checked strictly; only the one named
// cfg.command takes effect.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& source);

// Throws ValidationError naming the first violated precondition.
void validate(const RunConfig& cfg);

// argv without the program name. Flags override the --config file.
// Throws ParseError / ValidationError.
RunConfig parse_args(const std::vector<std::string>& args);

// Runs a validated config. Returns the exit code.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// parse_args + run with exit-code mapping; the body of main().
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Closest candidate by edit distance, or "" when nothing is close.
std::string nearest_key(const std::string& key, const std::vector<std::string>& candidates);

// Relative paths land under $PROPERTIME_OUTPUT_DIR when it is set.
std::string resolve_output(const std::string& path);

// Writes to a sibling temp file and renames it into place.
void write_atomic(const std::string& path, const std::string& contents);

std::string format_number(double v);

}  // namespace propertime::cli
