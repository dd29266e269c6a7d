#ifndef DYNLAB_EXPERIMENT_HPP
#define DYNLAB_EXPERIMENT_HPP

#include <string>

#include <nlohmann/json.hpp>

namespace dynlab::experiment {

inline constexpr const char* kToolVersion = "0.1.0";

/// Parses, validates and fills defaults; throws Error on a bad config.
/// Normalization is idempotent.
nlohmann::json normalize_config(const nlohmann::json& config);

/// Runs one experiment. The report is deterministic for a fixed config
/// except for its timing_ms field.
nlohmann::json run_experiment(const nlohmann::json& config);

/// 0 all verified, 1 some refuted, 2 inconclusive present, 3 errors
/// recorded inside the report.
int report_exit_code(const nlohmann::json& report);

/// One row per claim: claim_id, outcome, scope, witness, parameters.
std::string report_to_csv(const nlohmann::json& report);

/// Serializes to `path` atomically (tmp file + rename).
void write_report(const nlohmann::json& report, const std::string& path,
                  const std::string& format);

} // namespace dynlab::experiment

#endif
