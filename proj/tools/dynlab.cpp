// Batch experiment runner over the dynlab C API.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dynlab.h"

namespace {

int exit_code_for(dynlab_status status) {
  switch (status) {
  case DYNLAB_OK:
    return 0;
  case DYNLAB_ERR_IO:
    return 4;
  case DYNLAB_ERR_INTERNAL:
    return 5;
  default:
    return 3;
  }
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool write_file(const std::string& path, const std::string& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return false;
  }
  out << payload;
  return static_cast<bool>(out);
}

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { dynlab_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

int fail(dynlab_status status, const OwnedString& message) {
  std::cerr << "dynlab: " << (message.ptr ? message.str() : "error") << "\n";
  return exit_code_for(status);
}

int emit(const std::string& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload;
    if (payload.empty() || payload.back() != '\n') {
      std::cout << "\n";
    }
    return 0;
  }
  if (!write_file(out_path, payload)) {
    std::cerr << "dynlab: cannot write " << out_path << "\n";
    return 4;
  }
  return 0;
}

int run_command(const std::string& config_path, const std::string& out_path,
                const std::string& format) {
  const auto config = read_file(config_path);
  if (!config) {
    std::cerr << "dynlab: cannot read config " << config_path << "\n";
    return 4;
  }
  OwnedString report;
  OwnedString error;
  const auto status =
      dynlab_run_experiment(config->c_str(), &report.ptr, &error.ptr);
  if (status != DYNLAB_OK) {
    return fail(status, error);
  }
  std::string payload = report.str();
  if (format == "csv") {
    OwnedString csv;
    OwnedString csv_error;
    const auto csv_status =
        dynlab_report_to_csv(report.ptr, &csv.ptr, &csv_error.ptr);
    if (csv_status != DYNLAB_OK) {
      return fail(csv_status, csv_error);
    }
    payload = csv.str();
  } else {
    payload += "\n";
  }
  if (const int rc = emit(payload, out_path); rc != 0) {
    return rc;
  }
  return dynlab_report_exit_code(report.ptr);
}

int check_set_command(const std::string& set_path, const std::string& family,
                      uint64_t horizon, std::optional<uint64_t> gap,
                      std::optional<uint64_t> run_length,
                      std::optional<uint64_t> generators,
                      std::optional<uint64_t> value_bound,
                      const std::string& corpus,
                      std::optional<uint64_t> corpus_bound,
                      const std::string& out_path) {
  const auto content = read_file(set_path);
  if (!content) {
    std::cerr << "dynlab: cannot read set file " << set_path << "\n";
    return 4;
  }
  dynlab_window* window = nullptr;
  OwnedString error;
  dynlab_status status = DYNLAB_OK;
  if (content->rfind("H=", 0) == 0) {
    status = dynlab_window_from_text(content->c_str(), &window, &error.ptr);
  } else {
    if (horizon == 0) {
      std::cerr << "dynlab: --horizon is required for generator specs\n";
      return 3;
    }
    dynlab_setgen* gen = nullptr;
    status = dynlab_setgen_create(content->c_str(), &gen, &error.ptr);
    if (status == DYNLAB_OK) {
      status = dynlab_setgen_window(gen, horizon, &window, &error.ptr);
      dynlab_setgen_destroy(gen);
    }
  }
  if (status != DYNLAB_OK) {
    return fail(status, error);
  }

  std::ostringstream claim;
  claim << "{\"family\":\"" << family << "\",\"parameters\":{";
  bool first = true;
  auto put = [&](const char* key, std::optional<uint64_t> value) {
    if (!value) {
      return;
    }
    if (!first) {
      claim << ",";
    }
    first = false;
    claim << "\"" << key << "\":" << *value;
  };
  put("gap", gap);
  put("run_length", run_length);
  put("generator_count", generators);
  put("value_bound", value_bound);
  put("corpus_bound", corpus_bound);
  if (family == "dual") {
    if (!first) {
      claim << ",";
    }
    claim << "\"corpus\":\"" << (corpus.empty() ? "default" : corpus) << "\"";
  }
  claim << "}}";

  OwnedString verdict;
  OwnedString check_error;
  status = dynlab_check_family(window, claim.str().c_str(), &verdict.ptr,
                               &check_error.ptr);
  dynlab_window_destroy(window);
  if (status != DYNLAB_OK) {
    return fail(status, check_error);
  }
  const std::string payload = verdict.str();
  if (const int rc = emit(payload + "\n", out_path); rc != 0) {
    return rc;
  }
  if (payload.find("\"outcome\":\"verified\"") != std::string::npos) {
    return 0;
  }
  if (payload.find("\"outcome\":\"refuted\"") != std::string::npos) {
    return 1;
  }
  return 2;
}

int report_command(const std::string& report_path, const std::string& format,
                   const std::string& out_path) {
  const auto report = read_file(report_path);
  if (!report) {
    std::cerr << "dynlab: cannot read report " << report_path << "\n";
    return 4;
  }
  if (format == "json") {
    return emit(*report, out_path);
  }
  OwnedString csv;
  OwnedString error;
  const auto status = dynlab_report_to_csv(report->c_str(), &csv.ptr, &error.ptr);
  if (status != DYNLAB_OK) {
    return fail(status, error);
  }
  return emit(csv.str(), out_path);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynlab: finite-horizon experiments on dynamical systems and "
               "integer-set families"};
  app.set_version_flag("--version", std::string(dynlab_version()));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment config");
  std::string config_path;
  std::string run_out;
  std::string run_format = "json";
  run->add_option("config", config_path, "experiment config (JSON)")
      ->required();
  run->add_option("-o,--output", run_out, "write the report here");
  run->add_option("--format", run_format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* check = app.add_subcommand("check-set", "family-check one set window");
  std::string set_path;
  std::string family;
  std::string check_out;
  uint64_t horizon = 0;
  std::optional<uint64_t> gap;
  std::optional<uint64_t> run_length;
  std::optional<uint64_t> generators;
  std::optional<uint64_t> value_bound;
  std::string corpus;
  std::optional<uint64_t> corpus_bound;
  check->add_option("setfile", set_path,
                    "window text file (H=... header) or generator spec JSON")
      ->required();
  check->add_option("--family", family,
                    "syndetic | thick | piecewise_syndetic | ip | dual")
      ->required()
      ->check(CLI::IsMember(
          {"syndetic", "thick", "piecewise_syndetic", "ip", "dual"}));
  check->add_option("--horizon", horizon, "window horizon for generator specs");
  check->add_option("--g,--gap", gap, "gap bound");
  check->add_option("--L,--run-length", run_length, "run length");
  check->add_option("--k,--generators", generators, "IP generator count");
  check->add_option("--B,--value-bound", value_bound, "IP value bound");
  check->add_option("--corpus", corpus,
                    "dual corpus: default | ip | syndetic | thick | "
                    "dyn_syndetic | central")
      ->check(CLI::IsMember(
          {"default", "ip", "syndetic", "thick", "dyn_syndetic", "central"}));
  check->add_option("--corpus-bound", corpus_bound, "corpus size bound");
  check->add_option("-o,--output", check_out, "write the verdict here");

  auto* rep = app.add_subcommand("report", "convert a report");
  std::string report_path;
  std::string report_format = "csv";
  std::string report_out;
  rep->add_option("report", report_path, "report JSON file")->required();
  rep->add_option("--format", report_format, "json | csv")
      ->check(CLI::IsMember({"json", "csv"}));
  rep->add_option("-o,--output", report_out, "write the conversion here");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    return run_command(config_path, run_out, run_format);
  }
  if (check->parsed()) {
    return check_set_command(set_path, family, horizon, gap, run_length,
                             generators, value_bound, corpus, corpus_bound,
                             check_out);
  }
  return report_command(report_path, report_format, report_out);
}
