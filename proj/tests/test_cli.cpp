#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ifsdim/config.hpp"
#include "ifsdim/errors.hpp"

using namespace ifsdim;
namespace fs = std::filesystem;

namespace {

// The driven binary and the shipped config directory, injected by the build.
const std::string kCli = IFSDIM_CLI_PATH;
const fs::path kConfigDir = IFSDIM_CONFIG_DIR;
const fs::path kGoldenDir = kConfigDir / ".." / "tests" / "golden";

struct RunResult {
  int code = -1;
  std::string output;  // stdout + stderr interleaved
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = kCli + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  const int status = pclose(pipe);
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.output = std::move(out);
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ifsdim_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("dim command reproduces the stored root") {
  const fs::path work = fresh_dir("dim");
  const fs::path cfg = write_config(work, "dim.cfg",
                                    "system.kind = lueroth\n"
                                    "target.weights = 1.0\n"
                                    "target.B = 2.718281828459045\n"
                                    "dim.tol = 1e-10\n");
  const RunResult r =
      run_cli("dim --config " + cfg.string() + " --out " + (work / "out").string());
  CAPTURE(r.output);
  REQUIRE(r.code == 0);

  const auto j = nlohmann::json::parse(slurp(work / "out" / "dim.json"));
  CHECK(std::abs(j.at("s0").get<double>() - 0.739882920285856788) < 1e-8);
  CHECK(j.at("clamped_low").get<bool>() == false);
  CHECK(j.at("clamped_high").get<bool>() == false);

  // dim.csv carries the same root in its single data row.
  const std::string csv = slurp(work / "out" / "dim.csv");
  CHECK(csv.rfind("s0,lo,hi,B,M,method\n", 0) == 0);
  CHECK(csv.find("0.73988292") != std::string::npos);
}

TEST_CASE("bad parameters exit with the config code") {
  const fs::path work = fresh_dir("bad");

  const fs::path low_base = write_config(work, "low_base.cfg",
                                         "system.kind = lueroth\n"
                                         "target.weights = 1.0\n"
                                         "target.B = 0.5\n");
  const RunResult r1 = run_cli("dim --config " + low_base.string());
  CHECK(r1.code == 2);
  CHECK(r1.output.find("B > 1") != std::string::npos);

  const fs::path unknown = write_config(work, "unknown.cfg",
                                        "system.kind = lueroth\n"
                                        "target.weights = 1.0\n"
                                        "target.B = 2.0\n"
                                        "bogus.key = 7\n");
  const RunResult r2 = run_cli("dim --config " + unknown.string());
  CHECK(r2.code == 2);
  CHECK(r2.output.find("unknown key 'bogus.key' at line 4") != std::string::npos);

  const fs::path dup = write_config(work, "dup.cfg",
                                    "target.B = 2.0\n"
                                    "target.B = 3.0\n");
  const RunResult r3 = run_cli("dim --config " + dup.string());
  CHECK(r3.code == 2);
  CHECK(r3.output.find("duplicate key 'target.B' at line 2") != std::string::npos);

  // Usage errors (no subcommand, missing file) are config errors too.
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("dim --config " + (work / "absent.cfg").string()).code == 2);
}

TEST_CASE("size caps exit with their own code") {
  const fs::path work = fresh_dir("caps");
  const fs::path cfg = write_config(work, "wide.cfg",
                                    "system.kind = lueroth\n"
                                    "target.weights = 1.0\n"
                                    "target.B = 2.0\n"
                                    "coverscan.n_lo = 6\n"
                                    "coverscan.n_hi = 40\n"
                                    "coverscan.s_list = 0.8\n");
  const RunResult r =
      run_cli("coverscan --config " + cfg.string() + " --out " + (work / "out").string());
  CHECK(r.code == 3);
  CHECK(r.output.find("cap") != std::string::npos);
}

TEST_CASE("validate runs are byte-identical") {
  const fs::path work = fresh_dir("validate");
  const fs::path cfg = write_config(
      work, "validate.cfg",
      "validate.golden_dir = " + fs::weakly_canonical(kGoldenDir).string() + "\nseed = 0\n");

  const fs::path out1 = work / "run1";
  const fs::path out2 = work / "run2";
  const RunResult r1 = run_cli("validate --config " + cfg.string() + " --out " + out1.string());
  CAPTURE(r1.output);
  REQUIRE(r1.code == 0);
  CHECK(r1.output.find("FAIL") == std::string::npos);
  const RunResult r2 = run_cli("validate --config " + cfg.string() + " --out " + out2.string());
  REQUIRE(r2.code == 0);

  // Same file set, same bytes.
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(out1))
    names.push_back(entry.path().filename().string());
  REQUIRE(names.size() >= 10);
  for (const std::string& name : names) {
    CAPTURE(name);
    REQUIRE(fs::exists(out2 / name));
    CHECK(slurp(out1 / name) == slurp(out2 / name));
  }
  std::size_t count2 = 0;
  for (const auto& entry : fs::directory_iterator(out2)) (void)entry, ++count2;
  CHECK(count2 == names.size());

  const std::string report = slurp(out1 / "validate_report.txt");
  CHECK(report.find("check 1 pressure-normalization: PASS") != std::string::npos);
  CHECK(report.find("check 9 determinism: PASS") != std::string::npos);
  CHECK(report.find("all checks passed") != std::string::npos);
}

TEST_CASE("shipped configs parse against the schema") {
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(kConfigDir)) {
    if (entry.path().extension() != ".cfg") continue;
    ++seen;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(Config::load_file(entry.path().string()));
  }
  CHECK(seen >= 9);

  // The quick ones also run end to end through the binary.
  const fs::path work = fresh_dir("shipped");
  for (const std::string name : {"pressure_lueroth", "aofs_pair", "dim_base_e",
                                 "sweep_gauss", "coverscan_lueroth", "cantor_desk"}) {
    const std::string command = name.substr(0, name.find('_'));
    const RunResult r = run_cli(command + " --config " + (kConfigDir / (name + ".cfg")).string() +
                                " --out " + (work / name).string());
    CAPTURE(name);
    CAPTURE(r.output);
    CHECK(r.code == 0);
  }
}
