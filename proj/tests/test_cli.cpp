#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "jmech/cli.hpp"
#include "json.hpp"

using namespace jmech;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// A file in the working directory, removed on scope exit.
class ScratchFile {
 public:
  ScratchFile(std::string name, const std::string& text) : path_(std::move(name)) {
    std::ofstream(path_) << text;
  }
  ScratchFile(const ScratchFile&) = delete;
  ScratchFile& operator=(const ScratchFile&) = delete;
  ~ScratchFile() { std::filesystem::remove(path_); }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  return text.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

const char* const kOscillator = "dim = 1\nparam omega = 1\nH = 0.5*(p1^2 + omega^2*q1^2)\n";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"bogus"}).code == kExitUsage);
    CHECK(run({"simulate", "--t-end", "1"}).code == kExitUsage);
    CHECK(run({"--help"}).code == kExitOk);
  }

  TEST_CASE("simulate writes a CSV trajectory") {
    const ScratchFile system("cli_ho.ham", kOscillator);
    const Run r = run({"simulate", "--system", system.path(), "--q0", "1", "--p0", "0", "--t-end", "1", "--dt", "0.1"});
    CHECK(r.code == kExitOk);
    const auto lines = lines_of(r.out);
    REQUIRE(lines.size() == 12);
    CHECK(lines.front() == "t,q1,p1");
    CHECK(lines.back().rfind("1,", 0) == 0);

    const Run single = run({"simulate", "--system", system.path(), "--q0", "1", "--t-end", "0"});
    CHECK(single.code == kExitOk);
    CHECK(lines_of(single.out).size() == 2);

    const Run negative = run({"simulate", "--system", system.path(), "--q0", "0.3", "--p0", "-0.7", "--t-end", "0.5",
                              "--scheme", "leapfrog", "--out", "cli_traj.csv"});
    CHECK(negative.code == kExitOk);
    CHECK(lines_of(read_file("cli_traj.csv")).size() == 502);
    std::filesystem::remove("cli_traj.csv");

    CHECK(run({"simulate", "--system", system.path(), "--t-end", "1", "--dt", "0"}).code == kExitUsage);
    CHECK(run({"simulate", "--system", system.path(), "--t-end", "1", "--scheme", "euler"}).code == kExitUsage);
    CHECK(run({"simulate", "--system", system.path(), "--q0", "1,2", "--t-end", "1"}).code == kExitUsage);
    CHECK(run({"simulate", "--system", "missing.ham", "--t-end", "1"}).code == kExitUsage);
  }

  TEST_CASE("malformed system files report their location") {
    const ScratchFile bad("cli_bad.ham", "dim = 1\nH = p1^2 + /q1\n");
    const Run r = run({"simulate", "--system", bad.path(), "--t-end", "1"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("cli_bad.ham:2:") != std::string::npos);
  }

  TEST_CASE("blow-up exits 3") {
    const ScratchFile cubic("cli_cubic.ham", "dim = 1\nH = 0.5*q1^2*p1\n");
    const Run r = run({"simulate", "--system", cubic.path(), "--q0", "2", "--t-end", "5"});
    CHECK(r.code == kExitNumeric);
    CHECK(r.err.find("last good t") != std::string::npos);
  }

  TEST_CASE("options can come from a config file") {
    const ScratchFile system("cli_cfg.ham", kOscillator);
    const ScratchFile config("cli_run.ini", "system = cli_cfg.ham\nq0 = 1\nt-end = 0.5\ndt = 0.25\n");
    const Run r = run({"simulate", "--config", config.path()});
    CHECK(r.code == kExitOk);
    CHECK(lines_of(r.out).size() == 4);
    // Command-line values win over the file.
    const Run over = run({"simulate", "--config", config.path(), "--dt", "0.5"});
    CHECK(lines_of(over.out).size() == 3);
  }

  TEST_CASE("sweeps write one file per initial point") {
    const ScratchFile system("cli_sweep.ham", kOscillator);
    const ScratchFile points("cli_points.csv", "q1,p1\n1,0\n0,1\n0.5,-0.5\n");
    const Run r = run({"simulate", "--system", system.path(), "--sweep", points.path(), "--t-end", "0.2", "--dt",
                       "0.1", "--out", "cli_sweep_out.csv"});
    CHECK(r.code == kExitOk);
    for (int i = 0; i < 3; ++i) {
      const std::string path = "cli_sweep_out_" + std::to_string(i) + ".csv";
      CHECK(lines_of(read_file(path)).size() == 4);
      std::filesystem::remove(path);
    }
  }

  TEST_CASE("jacobi reports three routes") {
    const ScratchFile system("cli_jac.ham", kOscillator);
    const Run r = run({"jacobi", "--system", system.path(), "--q0", "1", "--p0", "0", "--t-end", "1.5707963267948966",
                       "--n", "200", "--report", "cli_jac.json"});
    CHECK(r.code == kExitOk);
    const auto report = nlohmann::json::parse(read_file("cli_jac.json"));
    CHECK(report.at("max_time_ordered_exp_deviation").get<double>() < 1e-6);
    CHECK_FALSE(report.contains("note"));
    std::filesystem::remove("cli_jac.json");

    const ScratchFile cubic("cli_jac_cubic.ham", "dim = 1\nH = 0.5*q1^2*p1\n");
    const Run c = run({"jacobi", "--system", cubic.path(), "--q0", "0.5", "--p0", "1", "--t-end", "1", "--report",
                       "cli_jac_cubic.json"});
    CHECK(c.code == kExitOk);
    const auto note = nlohmann::json::parse(read_file("cli_jac_cubic.json"));
    CHECK(note.contains("note"));
    std::filesystem::remove("cli_jac_cubic.json");
  }

  TEST_CASE("quantize") {
    const ScratchFile system("cli_q.ham", kOscillator);
    const Run r = run({"quantize", "--system", system.path(), "-N", "32", "--t", "1.0"});
    CHECK(r.code == kExitOk);
    const auto report = nlohmann::json::parse(r.out);
    CHECK(report.at("commutators").at("max_deviation").get<double>() < 1e-8);
    CHECK(report.at("instant_commutators").at("max_deviation").get<double>() < 1e-8);
    CHECK(report.at("capture_failed") == false);

    const Run small = run({"quantize", "-N", "4"});
    CHECK(small.code == kExitOk);
    CHECK(run({"quantize", "-N", "3"}).code == kExitUsage);

    const Run lost = run({"quantize", "-N", "6", "--a", "8"});
    CHECK(lost.code == kExitOk);
    CHECK(nlohmann::json::parse(lost.out).at("capture_failed") == true);
    CHECK(run({"quantize", "-N", "6", "--a", "8", "--strict"}).code == kExitNumeric);
  }

  TEST_CASE("oscillator demo passes") {
    const Run r = run({"quantize", "--demo-oscillator"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("PASS") != std::string::npos);
  }

  TEST_CASE("check-brackets is deterministic") {
    const Run a = run({"check-brackets", "--trials", "10", "--seed", "5"});
    const Run b = run({"check-brackets", "--trials", "10", "--seed", "5"});
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
    const auto report = nlohmann::json::parse(a.out);
    CHECK(report.at("reports").size() == 4);
    CHECK(run({"check-brackets", "--kind", "second", "--trials", "3", "-m", "1"}).code == kExitOk);
    CHECK(run({"check-brackets", "--trials", "0"}).code == kExitUsage);
    CHECK(run({"check-brackets", "--kind", "lie"}).code == kExitUsage);
  }
}
