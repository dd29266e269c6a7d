#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "dynlab/error.hpp"
#include "dynlab/experiment.hpp"

using namespace dynlab;
using namespace dynlab::experiment;
using nlohmann::json;

namespace {

json strip_timing(json report) {
  report.erase("timing_ms");
  return report;
}

const json kFullShift{{"variant", "full_shift"}, {"alphabet_size", 2}};
const json kCyc3{{"variant", "cyclic_rotation"}, {"modulus", 3}};
const json kCyc5{{"variant", "cyclic_rotation"}, {"modulus", 5}};

json residue_set(std::vector<int64_t> rs) {
  return json{{"variant", "residue_set"}, {"residues", rs}};
}

json cylinder(const std::string& w) {
  return json{{"variant", "cylinder"}, {"word", w}};
}

} // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(normalize_config(json::array()), Error);
  CHECK_THROWS_AS(normalize_config(json{{"kind", "nope"}}), Error);
  // missing horizon carries a field diagnostic
  try {
    normalize_config(json{{"kind", "criterion-scan"},
                          {"x_system", kFullShift},
                          {"y_system", kCyc5}});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("horizon") != std::string::npos);
  }
  // window parameters may not exceed the horizon
  CHECK_THROWS_AS(
      normalize_config(json{{"kind", "witness-search"},
                            {"x_system", kFullShift},
                            {"y_system", kCyc3},
                            {"y", {{"variant", "cyclic"}, {"residue", 0}}},
                            {"u", cylinder("0")},
                            {"v", residue_set({0})},
                            {"horizon", 100},
                            {"gap", 200}}),
      Error);
  // normalization is idempotent and fills the seed
  const json cfg{{"kind", "hyperspace"},
                 {"mode", "periodic-search"},
                 {"system", kFullShift},
                 {"u", cylinder("0")}};
  const json once = normalize_config(cfg);
  CHECK(once.at("seed") == 0);
  CHECK(normalize_config(once) == once);
}

TEST_CASE("family-check experiment and exit codes") {
  const json verified{{"kind", "family-check"},
                      {"set",
                       {{"variant", "arithmetic_progression"},
                        {"start", 0},
                        {"step", 3}}},
                      {"claim",
                       {{"family", "syndetic"}, {"parameters", {{"gap", 3}}}}},
                      {"horizon", 300}};
  const json rep = run_experiment(verified);
  CHECK(rep.at("aggregate").at("exit_code") == 0);
  CHECK(report_exit_code(rep) == 0);
  CHECK(rep.at("results").size() == 1);
  CHECK(rep.at("results").at(0).at("outcome") == "verified");

  json refuted = verified;
  refuted["claim"]["parameters"]["gap"] = 2;
  CHECK(report_exit_code(run_experiment(refuted)) == 1);

  // inconclusive: an IP search where every candidate overflows the window
  const json inconclusive{
      {"kind", "family-check"},
      {"window_text", "H=3\n0:3\n"},
      {"claim",
       {{"family", "ip"},
        {"parameters", {{"generator_count", 4}, {"value_bound", 2}}}}}};
  CHECK(report_exit_code(run_experiment(inconclusive)) == 2);
}

TEST_CASE("reports are deterministic modulo timing") {
  const json cfg{{"kind", "criterion-scan"},
                 {"x_system", kFullShift},
                 {"y_system", kCyc5},
                 {"depth", 2},
                 {"horizon", 2000}};
  const json a = run_experiment(cfg);
  const json b = run_experiment(cfg);
  CHECK(strip_timing(a) == strip_timing(b));
  CHECK(a.at("aggregate").at("exit_code") == 0);
  CHECK(a.at("results").size() == 20);
  CHECK(a.at("config").at("seed") == 0);
  CHECK(a.at("tool") == "dynlab");
}

TEST_CASE("csv summary has one row per claim") {
  const json cfg{{"kind", "criterion-scan"},
                 {"x_system", kFullShift},
                 {"y_system", kCyc3},
                 {"depth", 1},
                 {"horizon", 1000}};
  const json rep = run_experiment(cfg);
  const std::string csv = report_to_csv(rep);
  size_t lines = 0;
  for (char c : csv) {
    if (c == '\n') {
      ++lines;
    }
  }
  CHECK(lines == 1 + rep.at("results").size());
  CHECK(csv.rfind("claim_id,outcome,scope,witness,parameters", 0) == 0);
  CHECK(csv.find("\"verified\"") != std::string::npos);
}

TEST_CASE("central-bridge experiment with round trip") {
  const json cfg{{"kind", "central-bridge"},
                 {"thick", {{"variant", "thick_schedule"}}},
                 {"system", kCyc3},
                 {"point", {{"variant", "cyclic"}, {"residue", 0}}},
                 {"neighborhood", residue_set({0})},
                 {"horizon", 1000},
                 {"epsilon", "1/64"},
                 {"run_length", 16},
                 {"roundtrip_epsilon", "1/8"}};
  const json rep = run_experiment(cfg);
  CHECK(report_exit_code(rep) == 0);
  CHECK(rep.at("results").size() == 4);
  for (const auto& row : rep.at("results")) {
    CHECK(row.at("outcome") == "verified");
  }
}

TEST_CASE("witness-search and transfer experiments") {
  const json ws{{"kind", "witness-search"},
                {"x_system", kFullShift},
                {"y_system", kCyc3},
                {"y", {{"variant", "cyclic"}, {"residue", 0}}},
                {"u", cylinder("01")},
                {"v", residue_set({0})},
                {"horizon", 10000},
                {"gap", 12}};
  const json wrep = run_experiment(ws);
  CHECK(report_exit_code(wrep) == 0);
  CHECK(wrep.at("results").at(0).contains("record"));

  const json power{{"kind", "transfer"},
                   {"mode", "power"},
                   {"x_system", kFullShift},
                   {"y_system", kCyc3},
                   {"exponent", 2},
                   {"u", cylinder("01")},
                   {"v", residue_set({0})},
                   {"horizon", 10000}};
  CHECK(report_exit_code(run_experiment(power)) == 0);

  const json product{{"kind", "transfer"},
                     {"mode", "product"},
                     {"x_system", kFullShift},
                     {"y_system", kCyc3},
                     {"offsets", {0, 1}},
                     {"u", cylinder("01")},
                     {"v", residue_set({0})},
                     {"horizon", 5000}};
  CHECK(report_exit_code(run_experiment(product)) == 0);
}

TEST_CASE("joining coverage experiment against a target") {
  const json cfg{{"kind", "joining-coverage"},
                 {"x_system", kCyc3},
                 {"y_system", kCyc3},
                 {"x0", {{"variant", "cyclic"}, {"residue", 0}}},
                 {"y0", {{"variant", "cyclic"}, {"residue", 0}}},
                 {"depth", 1},
                 {"horizon", 100},
                 {"min_coverage", "1/3"}};
  const json rep = run_experiment(cfg);
  CHECK(report_exit_code(rep) == 0);
  CHECK(rep.at("results").at(0).at("coverage") == "1/3");

  json strict = cfg;
  strict["min_coverage"] = "1/2";
  CHECK(report_exit_code(run_experiment(strict)) == 1);
}

TEST_CASE("star-check and hyperspace experiments") {
  const json star{{"kind", "star-check"},
                  {"x_system", kFullShift},
                  {"u", cylinder("0")},
                  {"star", "ip"},
                  {"corpus_bound", 10},
                  {"horizon", 500}};
  CHECK(report_exit_code(run_experiment(star)) == 0);

  const json metric{{"kind", "hyperspace"},
                    {"mode", "metric-axioms"},
                    {"system", kFullShift},
                    {"samples", 100},
                    {"seed", 1}};
  CHECK(report_exit_code(run_experiment(metric)) == 0);

  const json periodic{{"kind", "hyperspace"},
                      {"mode", "periodic-search"},
                      {"system", kFullShift},
                      {"u", cylinder("0110")}};
  CHECK(report_exit_code(run_experiment(periodic)) == 0);
}
