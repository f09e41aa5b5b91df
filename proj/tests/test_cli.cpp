#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"
#include "json.hpp"
#include "propertime/error.hpp"

using namespace propertime;
using namespace propertime::cli;
namespace fs = std::filesystem;

namespace {

// Scratch output directory, wired through the environment override.
struct OutputDir {
  fs::path path;
  OutputDir() {
    path = fs::temp_directory_path() / ("propertime_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
    ::setenv(kOutputDirEnv, path.c_str(), 1);
  }
  ~OutputDir() {
    ::unsetenv(kOutputDirEnv);
    fs::remove_all(path);
  }
  std::string read(const std::string& name) const {
    std::ifstream in(path / name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  fs::path file(const std::string& name) const { return path / name; }
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = main_entry(args, out, err);
  return {code, out.str(), err.str()};
}

std::string error_of(auto&& fn, ErrorKind expected) {
  try {
    fn();
  } catch (const Error& e) {
    CHECK(e.kind() == expected);
    return e.what();
  }
  FAIL("expected an exception");
  return "";
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("defaults") {
  const RunConfig cfg = parse_args({"free-evolve"});
  CHECK(cfg.command == "free-evolve");
  CHECK(cfg.free_evolve.grid.mass == 1.0);
  CHECK(cfg.free_evolve.grid.dims == std::array<int, 3>{256, 1, 1});
  CHECK(cfg.free_evolve.grid.pmax[0] == 8.0);
  CHECK(cfg.free_evolve.packet.branch == Branch::Positive);
}

TEST_CASE("config text") {
  SUBCASE("applies the active section and checks the others") {
    RunConfig cfg;
    cfg.command = "free-evolve";
    apply_config_text(cfg,
                      "# comment\n[free-evolve]\nsigma_p = 0.125\nbranch = mixed  # trailing\n"
                      "p0 = 0.5, 0, 0\n[magnetar]\nbmin = 5\n",
                      "run.ini");
    CHECK(cfg.free_evolve.packet.sigma_p == 0.125);
    CHECK(cfg.free_evolve.packet.branch == Branch::Mixed);
    CHECK(cfg.free_evolve.packet.p0(0) == 0.5);
    CHECK(cfg.magnetar.bmin == 1e9);

    const std::string msg = error_of(
        [&] { apply_config_text(cfg, "[magnetar]\nbmni = 5\n", "run.ini"); }, ErrorKind::ParseError);
    CHECK(msg.find("run.ini:2") != std::string::npos);
    CHECK(msg.find("'bmin'") != std::string::npos);
  }
  SUBCASE("misspelt key suggests the real one") {
    RunConfig cfg;
    cfg.command = "free-evolve";
    const std::string msg =
        error_of([&] { apply_config_text(cfg, "[free-evolve]\nsigmap = 0.2\n", "a.ini"); }, ErrorKind::ParseError);
    CHECK(msg.find("sigma_p") != std::string::npos);
  }
  SUBCASE("malformed input") {
    RunConfig cfg;
    cfg.command = "magnetar";
    error_of([&] { apply_config_text(cfg, "bmin = 1\n", "x"); }, ErrorKind::ParseError);
    error_of([&] { apply_config_text(cfg, "[magnetr]\n", "x"); }, ErrorKind::ParseError);
    error_of([&] { apply_config_text(cfg, "[magnetar]\nbmin\n", "x"); }, ErrorKind::ParseError);
    const std::string msg =
        error_of([&] { apply_config_text(cfg, "[magnetar]\nsteps = ten\n", "x"); }, ErrorKind::ParseError);
    CHECK(msg.find("steps") != std::string::npos);
  }
}

TEST_CASE("validation names the precondition") {
  OutputDir dir;
  std::ofstream(dir.file("zero.ini")) << "[free-evolve]\nsigma_p = 0\n";
  const std::string msg = error_of([&] { parse_args({"free-evolve", "--config", dir.file("zero.ini").string()}); },
                                   ErrorKind::ValidationError);
  CHECK(msg.find("sigma_p > 0") != std::string::npos);

  error_of([] { parse_args({"free-evolve", "--samples", "400"}); }, ErrorKind::ValidationError);
  error_of([] { parse_args({"free-evolve", "--p0", "7.5"}); }, ErrorKind::ValidationError);
  error_of([] { parse_args({"free-evolve", "--spectrum", "--samples", "65"}); }, ErrorKind::ValidationError);
  error_of([] { parse_args({"magnetar", "--bmin", "-1"}); }, ErrorKind::ValidationError);
  error_of([] { parse_args({"fw-check", "--vscales", "0.1,0.2"}); }, ErrorKind::ValidationError);
  error_of([] { parse_args({"fw-check", "--packet_width", "3"}); }, ErrorKind::ValidationError);
}

TEST_CASE("flags override the config file") {
  OutputDir dir;
  std::ofstream(dir.file("m.ini")) << "[magnetar]\nbmin = 10\nbmax = 1000\nsteps = 3\n";
  const RunConfig cfg = parse_args({"magnetar", "-c", dir.file("m.ini").string(), "--steps", "5", "--log"});
  CHECK(cfg.magnetar.bmin == 10.0);
  CHECK(cfg.magnetar.steps == 5);
  CHECK(cfg.magnetar.log);

  const std::string msg = error_of([] { parse_args({"free-evolve", "--sigmap", "0.1"}); }, ErrorKind::ParseError);
  CHECK(msg.find("--sigma_p") != std::string::npos);
  error_of([] { parse_args({"free-evolve", "--config", "/nonexistent/x.ini"}); }, ErrorKind::ParseError);
}

TEST_CASE("nearest_key") {
  const std::vector<std::string> keys{"sigma_p", "samples", "spectrum", "t0", "t1"};
  CHECK(nearest_key("sigmap", keys) == "sigma_p");
  CHECK(nearest_key("sample", keys) == "samples");
  CHECK(nearest_key("zzzzzzzz", keys).empty());
}

TEST_CASE("derive-d") {
  const Outcome text = invoke({"derive-d"});
  CHECK(text.code == 0);
  CHECK(text.out.find("kernel dims: 2, 1, 1") != std::string::npos);
  CHECK(text.out.find("0 0 -1 0") != std::string::npos);

  const Outcome json = invoke({"derive-d", "--json"});
  CHECK(json.code == 0);
  const auto doc = nlohmann::json::parse(json.out);
  CHECK(doc["kernel_dims"] == nlohmann::json::array({2, 1, 1}));
  CHECK(doc["rate_matrix"]["real"][3][3] == -1.0);
  CHECK(doc["equals_beta"] == true);
}

TEST_CASE("free-evolve") {
  OutputDir dir;
  const Outcome first = invoke({"free-evolve", "--samples", "201", "--t1", "10", "--output", "a.csv"});
  CHECK(first.code == 0);
  const std::string csv = dir.read("a.csv");
  REQUIRE(!csv.empty());
  CHECK(csv.back() == '\n');
  const auto rows = csv_rows(csv);
  CHECK(rows.front() == std::vector<std::string>{"t", "rate", "tau"});
  REQUIRE(rows.size() == 202);
  const double rate0 = std::stod(rows[1][1]);
  double drift = 0.0;
  for (std::size_t i = 1; i < rows.size(); ++i) drift = std::max(drift, std::abs(std::stod(rows[i][1]) - rate0));
  CHECK(drift <= 1e-11);
  CHECK(rows[2][0] == "0.050000000000000003");

  invoke({"free-evolve", "--samples", "201", "--t1", "10", "--output", "b.csv"});
  CHECK(dir.read("b.csv") == csv);
  for (const auto& entry : fs::directory_iterator(dir.path)) {
    CHECK(entry.path().filename().string().find(".tmp.") == std::string::npos);
  }

  const Outcome spec = invoke({"free-evolve", "--branch", "mixed", "--sigma_p", "0.005", "--t1", "200",
                               "--samples", "4097", "--spectrum", "--output", "m.csv", "--spectrum_output", "s.csv"});
  CHECK(spec.code == 0);
  const auto srows = csv_rows(dir.read("s.csv"));
  CHECK(srows.front() == std::vector<std::string>{"freq", "power"});
  double best = 0.0, best_f = 0.0;
  for (std::size_t i = 2; i < srows.size(); ++i) {
    if (std::stod(srows[i][1]) > best) {
      best = std::stod(srows[i][1]);
      best_f = std::stod(srows[i][0]);
    }
  }
  CHECK(std::abs(best_f - 2.0 * std::sqrt(2.0)) < 0.04);
}

TEST_CASE("fw-check exit status follows the slope bands") {
  OutputDir dir;
  const Outcome bad = invoke({"fw-check", "--dims", "8,8", "--vscales", "0.4,0.2", "--field", "2"});
  CHECK(bad.code == 1);
  CHECK(bad.out.find("FAIL") != std::string::npos);
  const auto rows = csv_rows(dir.read("fw_check.csv"));
  CHECK(rows.front() == std::vector<std::string>{"vscale", "res_beta", "res_rate", "ratio_small"});
  CHECK(rows.size() == 3);

  const Outcome good = invoke({"fw-check", "--dims", "16,16", "--vscales", "0.4,0.2,0.1"});
  CHECK(good.code == 0);
  CHECK(good.out.find("FAIL") == std::string::npos);

  // A scale beyond the generator-radius bound is a numeric failure, not a usage error.
  CHECK(invoke({"fw-check", "--dims", "16,16", "--vscales", "3,2"}).code == 1);
}

TEST_CASE("magnetar") {
  OutputDir dir;
  const Outcome o = invoke({"magnetar", "--bmin", "1e6", "--bmax", "1e11", "--steps", "6", "--log"});
  CHECK(o.code == 0);
  const auto rows = csv_rows(dir.read("magnetar.csv"));
  REQUIRE(rows.size() == 7);
  CHECK(rows.front() == std::vector<std::string>{"B_tesla", "shift", "flag"});
  CHECK(rows[5][0] == "10000000000");
  CHECK(std::stod(rows[5][1]) == doctest::Approx(1.1328).epsilon(1e-3));
  CHECK(rows[5][2] == "1");
  CHECK(rows[1][2] == "0");
}

TEST_CASE("selftest and usage errors") {
  const Outcome a = invoke({"selftest", "--json", "--seed", "7"});
  const Outcome b = invoke({"selftest", "--json", "--seed", "7"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto doc = nlohmann::json::parse(a.out);
  CHECK(doc["seed"] == 7);
  CHECK(doc["passed"] == true);

  CHECK(invoke({}).code == 2);
  CHECK(invoke({"evolve"}).code == 2);
  CHECK(invoke({"magnetar", "--steps", "many"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}
