// Integration tests for the dynlab CLI; argv[1] is the binary path.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace {

std::string g_cli;

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string out_path = "cli_test_stdout.txt";
  const std::string cmd = g_cli + " " + args + " > " + out_path + " 2>&1";
  const int raw = std::system(cmd.c_str());
  RunResult result;
  result.exit_code = WEXITSTATUS(raw);
  std::ifstream in(out_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  result.output = buf.str();
  std::remove(out_path.c_str());
  return result;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc);
  out << content;
}

const char* kScanConfig = R"({
  "kind": "criterion-scan",
  "x_system": {"variant": "full_shift", "alphabet_size": 2},
  "y_system": {"variant": "cyclic_rotation", "modulus": 3},
  "depth": 1,
  "horizon": 2000
})";

} // namespace

TEST_CASE("run: all-verified scan exits 0 and writes a report") {
  write_file("cli_scan.json", kScanConfig);
  const auto res = run_cli("run cli_scan.json -o cli_report.json");
  CHECK(res.exit_code == 0);
  std::ifstream in("cli_report.json");
  REQUIRE(in.good());
  const json report = json::parse(in);
  CHECK(report.at("aggregate").at("exit_code") == 0);
  CHECK(report.at("results").size() == 6);
}

TEST_CASE("run: identical reruns agree modulo timing") {
  write_file("cli_scan.json", kScanConfig);
  REQUIRE(run_cli("run cli_scan.json -o cli_a.json").exit_code == 0);
  REQUIRE(run_cli("run cli_scan.json -o cli_b.json").exit_code == 0);
  std::ifstream ia("cli_a.json");
  std::ifstream ib("cli_b.json");
  json a = json::parse(ia);
  json b = json::parse(ib);
  a.erase("timing_ms");
  b.erase("timing_ms");
  CHECK(a == b);
  std::remove("cli_a.json");
  std::remove("cli_b.json");
}

TEST_CASE("run: invalid configs exit at 3 or above with a diagnostic") {
  write_file("cli_bad.json", R"({"kind":"criterion-scan"})");
  const auto res = run_cli("run cli_bad.json");
  CHECK(res.exit_code == 3);
  CHECK(res.output.find("x_system") != std::string::npos);

  write_file("cli_noh.json",
             R"({"kind":"witness-search","x_system":{"variant":"full_shift","alphabet_size":2},
                 "y_system":{"variant":"cyclic_rotation","modulus":3},
                 "y":{"variant":"cyclic","residue":0},
                 "u":{"variant":"cylinder","word":"0"},
                 "v":{"variant":"residue_set","residues":[0]}})");
  const auto noh = run_cli("run cli_noh.json");
  CHECK(noh.exit_code == 3);
  CHECK(noh.output.find("horizon") != std::string::npos);

  CHECK(run_cli("run cli_missing_file.json").exit_code == 4);
  std::remove("cli_bad.json");
  std::remove("cli_noh.json");
}

TEST_CASE("run: inconclusive verdicts exit 2") {
  write_file("cli_inconclusive.json", R"({
    "kind": "family-check",
    "window_text": "H=3\n0:3\n",
    "claim": {"family": "ip",
              "parameters": {"generator_count": 4, "value_bound": 2}}
  })");
  CHECK(run_cli("run cli_inconclusive.json").exit_code == 2);
  std::remove("cli_inconclusive.json");
}

TEST_CASE("run: refuted scans exit 1") {
  write_file("cli_refuted.json", R"({
    "kind": "criterion-scan",
    "x_system": {"variant": "cyclic_rotation", "modulus": 4},
    "y_system": {"variant": "cyclic_rotation", "modulus": 2},
    "depth": 1,
    "horizon": 1000
  })");
  CHECK(run_cli("run cli_refuted.json").exit_code == 1);
  std::remove("cli_refuted.json");
}

TEST_CASE("check-set: window files and generator specs") {
  write_file("cli_window.txt", "H=30\n0:1\n3\n6\n9\n12:1\n15\n18\n21\n24\n27\n");
  const auto ok = run_cli("check-set cli_window.txt --family syndetic --g 3");
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("\"outcome\":\"verified\"") != std::string::npos);

  const auto refuted =
      run_cli("check-set cli_window.txt --family thick --L 2");
  CHECK(refuted.exit_code == 1);

  write_file("cli_gen.json",
             R"({"variant":"thick_schedule","start_quadratic":1,"start_linear":0,"start_constant":0,"length_linear":1,"length_constant":0})");
  const auto gen =
      run_cli("check-set cli_gen.json --family thick --L 10 --horizon 200");
  CHECK(gen.exit_code == 0);
  CHECK(gen.output.find("\"run_start\":100") != std::string::npos);

  const auto missing_h = run_cli("check-set cli_gen.json --family thick --L 5");
  CHECK(missing_h.exit_code == 3);
  std::remove("cli_window.txt");
  std::remove("cli_gen.json");
}

TEST_CASE("report: csv conversion") {
  write_file("cli_scan.json", kScanConfig);
  REQUIRE(run_cli("run cli_scan.json -o cli_report.json").exit_code == 0);
  const auto csv = run_cli("report cli_report.json --format csv");
  CHECK(csv.exit_code == 0);
  CHECK(csv.output.rfind("claim_id,outcome,scope,witness,parameters", 0) == 0);
  size_t rows = 0;
  for (char c : csv.output) {
    if (c == '\n') {
      ++rows;
    }
  }
  CHECK(rows == 7); // header + six cells
  std::remove("cli_scan.json");
  std::remove("cli_report.json");
}

int main(int argc, char** argv) {
  if (argc > 1) {
    g_cli = argv[1];
  }
  doctest::Context context;
  context.applyCommandLine(argc > 1 ? 1 : argc, argv);
  return context.run();
}
