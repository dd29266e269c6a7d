#include "dynlab/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "dynlab/catalog.hpp"
#include "dynlab/disjoint.hpp"
#include "dynlab/error.hpp"
#include "dynlab/hyper.hpp"
#include "dynlab/intfam.hpp"

namespace dynlab::experiment {

using nlohmann::json;
using systems::OpenSetSpec;
using systems::PointRef;
using systems::System;

namespace {

constexpr const char* kSemantics =
    "window-relative evidence: verified/refuted are horizon-bounded verdicts "
    "with finite witnesses, never infinitary theorems";

const std::vector<std::string> kKinds = {
    "family-check",    "central-bridge", "witness-search", "criterion-scan",
    "joining-coverage", "star-check",     "transfer",       "hyperspace"};

void require_field(const json& cfg, const std::string& field,
                   const std::string& kind) {
  if (!cfg.contains(field)) {
    throw_invalid("config for kind '" + kind + "' is missing required field '" +
                  field + "'");
  }
}

uint64_t horizon_of(const json& cfg, const std::string& kind) {
  require_field(cfg, "horizon", kind);
  const uint64_t h = cfg.at("horizon").get<uint64_t>();
  if (h < 1) {
    throw_invalid("horizon must be >= 1");
  }
  return h;
}

void check_window_param(const json& cfg, const char* field, uint64_t horizon) {
  if (cfg.contains(field)) {
    const uint64_t v = cfg.at(field).get<uint64_t>();
    if (v > horizon) {
      throw_invalid(std::string("parameter '") + field +
                    "' exceeds the horizon");
    }
  }
}

std::shared_ptr<const System> system_from(const json& j) {
  return std::make_shared<const System>(System::from_json(j));
}

struct ResultRow {
  std::string claim_id;
  json payload; // verdict-shaped json with outcome/scope fields
};

struct Tally {
  uint64_t verified = 0;
  uint64_t refuted = 0;
  uint64_t inconclusive = 0;
  uint64_t errors = 0;

  void add_outcome(const std::string& outcome) {
    if (outcome == "verified") {
      ++verified;
    } else if (outcome == "refuted") {
      ++refuted;
    } else {
      ++inconclusive;
    }
  }
  int exit_code() const {
    if (errors > 0) {
      return 3;
    }
    if (refuted > 0) {
      return 1;
    }
    if (inconclusive > 0) {
      return 2;
    }
    return 0;
  }
};

json assemble_report(const json& config, std::vector<ResultRow> rows,
                     const Tally& tally, int64_t elapsed_ms) {
  json results = json::array();
  for (auto& row : rows) {
    json entry = std::move(row.payload);
    entry["claim_id"] = row.claim_id;
    results.push_back(std::move(entry));
  }
  return json{{"tool", "dynlab"},
              {"version", kToolVersion},
              {"config", config},
              {"semantics", kSemantics},
              {"results", results},
              {"aggregate",
               {{"verified", tally.verified},
                {"refuted", tally.refuted},
                {"inconclusive", tally.inconclusive},
                {"errors", tally.errors},
                {"exit_code", tally.exit_code()}}},
              {"timing_ms", elapsed_ms}};
}

// --- per-kind runners -------------------------------------------------------

void run_family_check(const json& cfg, std::vector<ResultRow>& rows,
                      Tally& tally) {
  BitWindow window(0);
  if (cfg.contains("set")) {
    const uint64_t h = horizon_of(cfg, "family-check");
    window = intfam::SetGenerator::from_json(cfg.at("set"))->window(h);
  } else {
    window = BitWindow::from_text(cfg.at("window_text").get<std::string>());
  }
  intfam::FamilyClaim claim;
  claim.family = cfg.at("claim").at("family").get<std::string>();
  claim.parameters = cfg.at("claim").value("parameters", json::object());
  claim.horizon = window.horizon();
  const auto verdict = intfam::check_claim(window, claim);
  tally.add_outcome(intfam::outcome_name(verdict.outcome));
  rows.push_back({"family-check:" + claim.family, verdict.to_json()});
}

void run_central_bridge(const json& cfg, std::vector<ResultRow>& rows,
                        Tally& tally) {
  const uint64_t h = horizon_of(cfg, "central-bridge");
  intfam::DpsDecomposition dec;
  dec.thick_generator = intfam::SetGenerator::from_json(cfg.at("thick"));
  dec.minimal_system = system_from(cfg.at("system"));
  dec.point = PointRef::from_json(cfg.at("point"));
  dec.neighborhood = OpenSetSpec::from_json(cfg.at("neighborhood"));
  intfam::CentralBridgeParams params;
  if (cfg.contains("epsilon")) {
    params.eps = parse_rational(cfg.at("epsilon").get<std::string>());
  }
  params.run_length = cfg.value("run_length", uint64_t{16});
  const auto cw = intfam::central_from_dps(dec, h, params);
  for (const auto& [id, verdict] :
       {std::pair<const char*, const intfam::Verdict*>{"identity",
                                                       &cw.identity_verdict},
        {"proximal", &cw.proximal_verdict},
        {"syndetic", &cw.syndetic_verdict}}) {
    tally.add_outcome(intfam::outcome_name(verdict->outcome));
    rows.push_back({std::string("central-bridge:") + id, verdict->to_json()});
  }
  if (cfg.contains("roundtrip_epsilon")) {
    const Rational eps =
        parse_rational(cfg.at("roundtrip_epsilon").get<std::string>());
    const auto back = intfam::dps_from_central(cw, eps);
    const BitWindow wa = back.thick_generator->window(h);
    const BitWindow wb = systems::return_set(*back.minimal_system, back.point,
                                             back.neighborhood, h);
    const BitWindow meet = wa.intersect(wb);
    json rt{{"outcome", meet.is_subset_of(cw.q_window) && !meet.none()
                            ? "verified"
                            : "refuted"},
            {"scope", "window"},
            {"included", meet.is_subset_of(cw.q_window)},
            {"intersection_count", meet.count()}};
    tally.add_outcome(rt.at("outcome").get<std::string>());
    rows.push_back({"central-bridge:roundtrip", rt});
  }
}

void run_witness_search(const json& cfg, std::vector<ResultRow>& rows,
                        Tally& tally) {
  const uint64_t h = horizon_of(cfg, "witness-search");
  auto x_system = system_from(cfg.at("x_system"));
  auto y_system = system_from(cfg.at("y_system"));
  const auto y = PointRef::from_json(cfg.at("y"));
  const auto u = OpenSetSpec::from_json(cfg.at("u"));
  const auto v = OpenSetSpec::from_json(cfg.at("v"));
  disjoint::WitnessSearchParams params;
  params.horizon = h;
  params.budget = cfg.value("budget", uint64_t{64});
  params.gap = cfg.contains("gap") ? cfg.at("gap").get<uint64_t>()
                                   : disjoint::default_gap(*x_system, 3, *y_system);
  disjoint::DenseEnumeration dense(x_system);
  const auto res =
      disjoint::witness_search(x_system, dense, y_system, y, v, u, params);
  tally.add_outcome(intfam::outcome_name(res.verdict.outcome));
  json payload = res.verdict.to_json();
  if (res.record) {
    payload["record"] = res.record->to_json();
  }
  rows.push_back({"witness-search", payload});
}

std::string open_set_id(const OpenSetSpec& spec) {
  if (const auto* cy = std::get_if<systems::Cylinder>(&spec.v)) {
    return "[" + cy->word + "]";
  }
  if (const auto* rs = std::get_if<systems::ResidueSet>(&spec.v)) {
    std::string out = "{";
    for (int64_t r : rs->residues) {
      out += std::to_string(r) + ",";
    }
    out.back() = '}';
    return out;
  }
  if (const auto* arc = std::get_if<systems::Arc>(&spec.v)) {
    return "[" + format_rational(arc->low) + "," + format_rational(arc->high) +
           ")";
  }
  return spec.to_json().dump();
}

void run_criterion_scan(const json& cfg, std::vector<ResultRow>& rows,
                        Tally& tally) {
  const uint64_t h = horizon_of(cfg, "criterion-scan");
  auto x_system = system_from(cfg.at("x_system"));
  auto y_system = system_from(cfg.at("y_system"));
  disjoint::ScanParams params;
  params.depth = cfg.value("depth", 2);
  params.horizon = h;
  if (cfg.contains("gap")) {
    params.gap = cfg.at("gap").get<uint64_t>();
  }
  params.budget = cfg.value("budget", params.budget);
  params.y_samples = cfg.value("y_samples", uint64_t{2});
  const auto report = disjoint::criterion_scan(x_system, y_system, params);
  for (const auto& cell : report.cells) {
    json payload{{"outcome", intfam::outcome_name(cell.outcome)},
                 {"scope", "budget"},
                 {"samples", cell.per_sample}};
    if (cell.error) {
      payload["error"] = *cell.error;
      ++tally.errors;
    } else {
      tally.add_outcome(intfam::outcome_name(cell.outcome));
    }
    rows.push_back(
        {"U=" + open_set_id(cell.u) + "|V=" + open_set_id(cell.v), payload});
  }
}

void run_joining_coverage(const json& cfg, std::vector<ResultRow>& rows,
                          Tally& tally) {
  const uint64_t h = horizon_of(cfg, "joining-coverage");
  auto x_system = system_from(cfg.at("x_system"));
  auto y_system = system_from(cfg.at("y_system"));
  const auto x0 = PointRef::from_json(cfg.at("x0"));
  const auto y0 = PointRef::from_json(cfg.at("y0"));
  const int depth = cfg.value("depth", 2);
  const auto approx =
      disjoint::joining_coverage(x_system, y_system, x0, y0, depth, h);
  json payload = approx.to_json();
  std::string outcome = "verified";
  if (cfg.contains("min_coverage")) {
    const Rational target =
        parse_rational(cfg.at("min_coverage").get<std::string>());
    outcome = approx.coverage >= target ? "verified" : "refuted";
    payload["min_coverage"] = format_rational(target);
  }
  payload["outcome"] = outcome;
  payload["scope"] = "window";
  tally.add_outcome(outcome);
  rows.push_back({"joining-coverage", payload});
}

void run_star_check(const json& cfg, std::vector<ResultRow>& rows,
                    Tally& tally) {
  const uint64_t h = horizon_of(cfg, "star-check");
  auto x_system = system_from(cfg.at("x_system"));
  const auto u = OpenSetSpec::from_json(cfg.at("u"));
  const std::string star = cfg.at("star").get<std::string>();
  std::vector<intfam::CorpusMember> corpus;
  disjoint::StarKind kind;
  if (star == "ip") {
    kind = disjoint::StarKind::ip_star;
    corpus = intfam::ip_corpus(cfg.value("corpus_bound", uint64_t{20}));
  } else if (star == "c") {
    kind = disjoint::StarKind::c_star;
    corpus = intfam::central_corpus(h);
  } else {
    throw_invalid("star must be 'ip' or 'c'");
  }
  const auto res = disjoint::star_sufficient_check(
      x_system, u, kind, corpus, h, cfg.value("budget", uint64_t{64}));
  tally.add_outcome(intfam::outcome_name(res.verdict.outcome));
  rows.push_back({"star-check:" + star, res.verdict.to_json()});
}

void run_transfer(const json& cfg, std::vector<ResultRow>& rows, Tally& tally) {
  const uint64_t h = horizon_of(cfg, "transfer");
  const std::string mode = cfg.at("mode").get<std::string>();
  auto x_system = system_from(cfg.at("x_system"));
  auto y_system = system_from(cfg.at("y_system"));
  const auto u = OpenSetSpec::from_json(cfg.at("u"));
  const auto v = OpenSetSpec::from_json(cfg.at("v"));
  disjoint::WitnessSearchParams params;
  params.horizon = h;
  params.budget = cfg.value("budget", uint64_t{128});
  if (mode == "power") {
    const int64_t exponent = cfg.at("exponent").get<int64_t>();
    // the tower search runs against Tower(Y, e), whose period is e times
    // Y's, so the default gap is computed against the tower
    const systems::System tower{systems::TowerSystem{y_system, exponent}};
    params.gap = cfg.contains("gap") ? cfg.at("gap").get<uint64_t>()
                                     : disjoint::default_gap(*x_system, 3, tower);
    const auto res = disjoint::power_witness_transfer(x_system, y_system,
                                                      exponent, u, v, params);
    tally.add_outcome(intfam::outcome_name(res.verdict.outcome));
    tally.add_outcome(intfam::outcome_name(res.tower_route.outcome));
    rows.push_back({"transfer:power", res.verdict.to_json()});
    rows.push_back({"transfer:power-route", res.tower_route.to_json()});
    return;
  }
  if (mode != "product") {
    throw_invalid("transfer mode must be 'product' or 'power'");
  }
  params.gap = cfg.contains("gap") ? cfg.at("gap").get<uint64_t>()
                                   : disjoint::default_gap(*x_system, 3, *y_system);
  require_field(cfg, "offsets", "transfer");
  const auto offsets = cfg.at("offsets").get<std::vector<uint64_t>>();
  const auto ys = disjoint::sample_points_in(*y_system, v, 1);
  if (ys.empty()) {
    throw_invalid("no sample point in V");
  }
  disjoint::DenseEnumeration dense(x_system);
  const auto base =
      disjoint::witness_search(x_system, dense, y_system, ys[0], v, u, params);
  if (!base.record) {
    tally.add_outcome(intfam::outcome_name(base.verdict.outcome));
    rows.push_back({"transfer:product", base.verdict.to_json()});
    return;
  }
  const auto rec = disjoint::product_witness_transfer(*base.record, offsets, h);
  tally.add_outcome(intfam::outcome_name(rec.syndetic_verdict.outcome));
  json payload = rec.syndetic_verdict.to_json();
  payload["record"] = rec.to_json();
  rows.push_back({"transfer:product", payload});
}

void run_hyperspace(const json& cfg, std::vector<ResultRow>& rows,
                    Tally& tally) {
  const std::string mode = cfg.at("mode").get<std::string>();
  auto sys = system_from(cfg.at("system"));
  if (mode == "periodic-search") {
    const auto u = OpenSetSpec::from_json(cfg.at("u"));
    hyper::PeriodicSetParams params;
    params.max_size = cfg.value("max_size", uint64_t{4});
    params.max_period = cfg.value("max_period", uint64_t{4});
    params.budget = cfg.value("budget", uint64_t{64});
    const auto res = hyper::periodic_set_search(sys, u, params);
    tally.add_outcome(intfam::outcome_name(res.verdict.outcome));
    rows.push_back({"hyperspace:periodic-search", res.verdict.to_json()});
    return;
  }
  if (mode != "metric-axioms") {
    throw_invalid("hyperspace mode must be 'periodic-search' or 'metric-axioms'");
  }
  const uint64_t samples = cfg.value("samples", uint64_t{1000});
  const uint64_t set_size = cfg.value("set_size", uint64_t{4});
  const unsigned depth = cfg.value("depth", 64u);
  std::mt19937_64 rng(cfg.value("seed", uint64_t{0}));

  auto random_point = [&]() -> PointRef {
    if (const auto* fs = std::get_if<systems::FullShift>(&sys->spec())) {
      std::uniform_int_distribution<int> letter(0, fs->alphabet_size - 1);
      std::uniform_int_distribution<int> pre_len(0, 4);
      std::uniform_int_distribution<int> per_len(1, 3);
      std::string pre;
      std::string per;
      const int pl = pre_len(rng);
      for (int i = 0; i < pl; ++i) {
        pre += static_cast<char>('0' + letter(rng));
      }
      const int ql = per_len(rng);
      for (int i = 0; i < ql; ++i) {
        per += static_cast<char>('0' + letter(rng));
      }
      return PointRef{systems::ShiftPoint{
          symseq::make_generator(symseq::EventuallyPeriodic{pre, per}), 0}};
    }
    if (const auto* cr = std::get_if<systems::CyclicRotation>(&sys->spec())) {
      std::uniform_int_distribution<int64_t> res(0, cr->modulus - 1);
      return PointRef{systems::CyclicPoint{res(rng)}};
    }
    throw_unsupported("metric-axioms mode supports full shifts and cyclic "
                      "rotations");
  };
  auto random_set = [&]() {
    std::uniform_int_distribution<uint64_t> size(1, set_size);
    std::vector<PointRef> pts;
    const uint64_t n = size(rng);
    for (uint64_t i = 0; i < n; ++i) {
      pts.push_back(random_point());
    }
    return hyper::make_finite_subset(sys, std::move(pts));
  };

  uint64_t failures = 0;
  for (uint64_t trial = 0; trial < samples; ++trial) {
    const auto a = random_set();
    const auto b = random_set();
    const auto c = random_set();
    const auto dab = hyper::hausdorff_distance(a, b, depth);
    const auto dba = hyper::hausdorff_distance(b, a, depth);
    const auto dac = hyper::hausdorff_distance(a, c, depth);
    const auto dbc = hyper::hausdorff_distance(b, c, depth);
    const bool symmetric = dab.value == dba.value;
    const bool identity =
        (dab.value == 0 && !dab.truncated) == hyper::same_subset(a, b);
    const bool triangle = dac.value <= dab.value + dbc.value;
    if (!(symmetric && identity && triangle)) {
      ++failures;
    }
  }
  json payload{{"outcome", failures == 0 ? "verified" : "refuted"},
               {"scope", "window"},
               {"samples", samples},
               {"failures", failures}};
  tally.add_outcome(payload.at("outcome").get<std::string>());
  rows.push_back({"hyperspace:metric-axioms", payload});
}

} // namespace

json normalize_config(const json& config) {
  if (!config.is_object()) {
    throw_invalid("config must be a JSON object");
  }
  if (!config.contains("kind")) {
    throw_invalid("config is missing required field 'kind'");
  }
  const std::string kind = config.at("kind").get<std::string>();
  if (std::find(kKinds.begin(), kKinds.end(), kind) == kKinds.end()) {
    throw_invalid("unknown experiment kind: " + kind);
  }
  json out = config;
  out["seed"] = config.value("seed", uint64_t{0});

  if (kind == "family-check") {
    if (!config.contains("set") && !config.contains("window_text")) {
      throw_invalid("family-check needs 'set' or 'window_text'");
    }
    if (config.contains("set")) {
      horizon_of(config, kind);
    }
    require_field(config, "claim", kind);
  } else if (kind == "central-bridge") {
    for (const char* f : {"thick", "system", "point", "neighborhood"}) {
      require_field(config, f, kind);
    }
    const uint64_t h = horizon_of(config, kind);
    check_window_param(config, "run_length", h);
  } else if (kind == "witness-search") {
    for (const char* f : {"x_system", "y_system", "y", "u", "v"}) {
      require_field(config, f, kind);
    }
    const uint64_t h = horizon_of(config, kind);
    check_window_param(config, "gap", h);
  } else if (kind == "criterion-scan") {
    for (const char* f : {"x_system", "y_system"}) {
      require_field(config, f, kind);
    }
    const uint64_t h = horizon_of(config, kind);
    check_window_param(config, "gap", h);
  } else if (kind == "joining-coverage") {
    for (const char* f : {"x_system", "y_system", "x0", "y0"}) {
      require_field(config, f, kind);
    }
    horizon_of(config, kind);
  } else if (kind == "star-check") {
    for (const char* f : {"x_system", "u", "star"}) {
      require_field(config, f, kind);
    }
    horizon_of(config, kind);
  } else if (kind == "transfer") {
    for (const char* f : {"mode", "x_system", "y_system", "u", "v"}) {
      require_field(config, f, kind);
    }
    const uint64_t h = horizon_of(config, kind);
    check_window_param(config, "gap", h);
  } else if (kind == "hyperspace") {
    for (const char* f : {"mode", "system"}) {
      require_field(config, f, kind);
    }
  }
  return out;
}

json run_experiment(const json& config) {
  const json cfg = normalize_config(config);
  const std::string kind = cfg.at("kind").get<std::string>();
  const auto start = std::chrono::steady_clock::now();
  std::vector<ResultRow> rows;
  Tally tally;
  if (kind == "family-check") {
    run_family_check(cfg, rows, tally);
  } else if (kind == "central-bridge") {
    run_central_bridge(cfg, rows, tally);
  } else if (kind == "witness-search") {
    run_witness_search(cfg, rows, tally);
  } else if (kind == "criterion-scan") {
    run_criterion_scan(cfg, rows, tally);
  } else if (kind == "joining-coverage") {
    run_joining_coverage(cfg, rows, tally);
  } else if (kind == "star-check") {
    run_star_check(cfg, rows, tally);
  } else if (kind == "transfer") {
    run_transfer(cfg, rows, tally);
  } else if (kind == "hyperspace") {
    run_hyperspace(cfg, rows, tally);
  }
  const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return assemble_report(cfg, std::move(rows), tally, elapsed);
}

int report_exit_code(const json& report) {
  if (!report.is_object() || !report.contains("aggregate")) {
    return -1;
  }
  return report.at("aggregate").value("exit_code", -1);
}

namespace {

std::string csv_escape(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') {
      out += "\"\"";
    } else {
      out += c;
    }
  }
  out += "\"";
  return out;
}

} // namespace

std::string report_to_csv(const json& report) {
  if (!report.contains("results")) {
    throw_invalid("report has no results array");
  }
  std::ostringstream out;
  out << "claim_id,outcome,scope,witness,parameters\n";
  for (const auto& row : report.at("results")) {
    const std::string id = row.value("claim_id", "");
    const std::string outcome = row.value("outcome", "");
    const std::string scope = row.value("scope", "");
    std::string witness;
    if (row.contains("witness")) {
      witness = row.at("witness").dump();
    } else if (row.contains("counterexample")) {
      witness = row.at("counterexample").dump();
    } else if (row.contains("samples") && !row.at("samples").empty()) {
      const auto& first = row.at("samples").at(0);
      if (first.contains("witness")) {
        witness = first.at("witness").dump();
      } else if (first.contains("counterexample")) {
        witness = first.at("counterexample").dump();
      }
    }
    std::string parameters;
    if (row.contains("claim")) {
      parameters = row.at("claim").dump();
    } else if (row.contains("samples") && !row.at("samples").empty() &&
               row.at("samples").at(0).contains("claim")) {
      parameters = row.at("samples").at(0).at("claim").dump();
    }
    out << csv_escape(id) << "," << csv_escape(outcome) << ","
        << csv_escape(scope) << "," << csv_escape(witness) << ","
        << csv_escape(parameters) << "\n";
  }
  return out.str();
}

void write_report(const json& report, const std::string& path,
                  const std::string& format) {
  std::string payload;
  if (format == "json") {
    payload = report.dump(2) + "\n";
  } else if (format == "csv") {
    payload = report_to_csv(report);
  } else {
    throw_invalid("unknown report format: " + format);
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw_io("cannot open for writing: " + tmp);
    }
    out << payload;
    if (!out) {
      throw_io("short write: " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw_io("cannot move report into place: " + path);
  }
}

} // namespace dynlab::experiment
