#include "dynlab/intfam.hpp"

#include <algorithm>

#include "dynlab/error.hpp"

namespace dynlab::intfam {

using nlohmann::json;
using systems::OpenSetSpec;
using systems::PointRef;
using systems::System;

namespace {

struct SetValidator {
  void operator()(const ArithmeticProgression& ap) const {
    if (ap.step < 1) {
      throw_invalid("arithmetic progression step must be >= 1");
    }
  }
  void operator()(const ThickSchedule& ts) const {
    if (ts.length_linear < 1) {
      throw_invalid("thick schedule run lengths must grow (b1 >= 1)");
    }
    if (ts.start_quadratic + ts.start_linear < 1) {
      throw_invalid("thick schedule run starts must increase");
    }
  }
  void operator()(const FiniteSums& fs) const {
    if (fs.generators.empty()) {
      throw_invalid("finite sums need at least one generator");
    }
    for (uint64_t p : fs.generators) {
      if (p < 1) {
        throw_invalid("finite sums generators must be positive");
      }
    }
  }
  void operator()(const ReturnSetRef& rr) const {
    if (!rr.system) {
      throw_invalid("return set reference needs a system");
    }
  }
  void operator()(const DynSyndetic& ds) const {
    if (!ds.system) {
      throw_invalid("dynamical syndetic set needs a system");
    }
    if (!ds.system->minimal_by_construction()) {
      throw_invalid("dynamical syndetic sets need a minimal-by-construction "
                    "system");
    }
    if (!systems::contains(*ds.system, ds.neighborhood, ds.point)) {
      throw_invalid("dynamical syndetic neighborhood must contain its point");
    }
  }
  void operator()(const MSet& ms) const {
    if (!ms.system || !ms.system->minimal_by_construction()) {
      throw_invalid("m-sets need a minimal-by-construction system");
    }
  }
  void operator()(const ProximalRuns& pr) const {
    if (!pr.system || pr.eps <= 0) {
      throw_invalid("proximal runs need a system and eps > 0");
    }
  }
  void operator()(const ExplicitSet&) const {}
  void operator()(const UnionOf& u) const {
    if (u.parts.empty()) {
      throw_invalid("union needs parts");
    }
  }
  void operator()(const IntersectionOf& i) const {
    if (i.parts.empty()) {
      throw_invalid("intersection needs parts");
    }
  }
  void operator()(const ComplementOf& c) const {
    if (!c.inner) {
      throw_invalid("complement needs an inner set");
    }
  }
  void operator()(const TranslateBy& t) const {
    if (!t.inner) {
      throw_invalid("translate needs an inner set");
    }
  }
};

} // namespace

SetGenerator::SetGenerator(Spec spec) : spec_(std::move(spec)) {
  std::visit(SetValidator{}, spec_);
}

SetGeneratorPtr make_set(SetGenerator::Spec spec) {
  return std::make_shared<const SetGenerator>(std::move(spec));
}

BitWindow SetGenerator::window(uint64_t horizon) const {
  if (const auto* ap = std::get_if<ArithmeticProgression>(&spec_)) {
    BitWindow out(horizon);
    for (uint64_t n = ap->start; n < horizon; n += ap->step) {
      out.set(n);
    }
    return out;
  }
  if (const auto* ts = std::get_if<ThickSchedule>(&spec_)) {
    BitWindow out(horizon);
    for (uint64_t i = 1;; ++i) {
      const uint64_t start = ts->start_quadratic * i * i + ts->start_linear * i +
                             ts->start_constant;
      if (start >= horizon) {
        break;
      }
      const uint64_t len = ts->length_linear * i + ts->length_constant;
      for (uint64_t n = start; n < start + len && n < horizon; ++n) {
        out.set(n);
      }
    }
    return out;
  }
  if (const auto* fs = std::get_if<FiniteSums>(&spec_)) {
    // FS of the cycled sequence: closure of the generators under
    // addition, i.e. all positive combinations sum(c_i * p_i).
    BitWindow out(horizon);
    if (horizon == 0) {
      return out;
    }
    std::vector<bool> reach(horizon, false);
    reach[0] = true;
    for (uint64_t p : fs->generators) {
      for (uint64_t n = p; n < horizon; ++n) {
        if (reach[n - p]) {
          reach[n] = true;
        }
      }
    }
    for (uint64_t n = 1; n < horizon; ++n) {
      if (reach[n]) {
        out.set(n);
      }
    }
    return out;
  }
  if (const auto* rr = std::get_if<ReturnSetRef>(&spec_)) {
    return systems::return_set(*rr->system, rr->point, rr->open_set, horizon);
  }
  if (const auto* ds = std::get_if<DynSyndetic>(&spec_)) {
    return systems::return_set(*ds->system, ds->point, ds->neighborhood, horizon);
  }
  if (const auto* ms = std::get_if<MSet>(&spec_)) {
    return systems::return_set(*ms->system, ms->point, ms->open_set, horizon);
  }
  if (const auto* pr = std::get_if<ProximalRuns>(&spec_)) {
    return systems::proximal_run_set(*pr->system, pr->x, pr->y, pr->eps, horizon);
  }
  if (const auto* ex = std::get_if<ExplicitSet>(&spec_)) {
    BitWindow out(horizon);
    for (uint64_t n : ex->elements) {
      if (n < horizon) {
        out.set(n);
      }
    }
    if (ex->tail_start) {
      for (uint64_t n = *ex->tail_start; n < horizon; n += ex->tail_step) {
        out.set(n);
      }
    }
    return out;
  }
  if (const auto* un = std::get_if<UnionOf>(&spec_)) {
    BitWindow out(horizon);
    for (const auto& part : un->parts) {
      out = out.unite(part->window(horizon));
    }
    return out;
  }
  if (const auto* in = std::get_if<IntersectionOf>(&spec_)) {
    BitWindow out(horizon, true);
    for (const auto& part : in->parts) {
      out = out.intersect(part->window(horizon));
    }
    return out;
  }
  if (const auto* co = std::get_if<ComplementOf>(&spec_)) {
    return co->inner->window(horizon).complement();
  }
  const auto& tr = std::get<TranslateBy>(spec_);
  return tr.inner->window(horizon).translated(tr.shift);
}

bool SetGenerator::contains(uint64_t n) const {
  std::lock_guard lock(cache_mutex_);
  if (!cache_ || cache_->horizon() <= n) {
    uint64_t target = 64;
    while (target <= n) {
      target *= 2;
    }
    if (cache_ && cache_->horizon() * 2 > target) {
      target = cache_->horizon() * 2;
    }
    cache_ = window(target);
  }
  return cache_->test(n);
}

std::string SetGenerator::family_tag() const {
  struct Tag {
    std::string operator()(const ArithmeticProgression&) { return "syndetic"; }
    std::string operator()(const ThickSchedule&) { return "thick"; }
    std::string operator()(const FiniteSums&) { return "ip"; }
    std::string operator()(const ReturnSetRef&) { return "return_set"; }
    std::string operator()(const DynSyndetic&) { return "dynamical_syndetic"; }
    std::string operator()(const MSet&) { return "m_set"; }
    std::string operator()(const ProximalRuns&) { return "proximal_runs"; }
    std::string operator()(const ExplicitSet&) { return "explicit"; }
    std::string operator()(const UnionOf&) { return "union"; }
    std::string operator()(const IntersectionOf&) { return "intersection"; }
    std::string operator()(const ComplementOf&) { return "complement"; }
    std::string operator()(const TranslateBy&) { return "translate"; }
  };
  return std::visit(Tag{}, spec_);
}

json SetGenerator::to_json() const {
  json j;
  if (const auto* ap = std::get_if<ArithmeticProgression>(&spec_)) {
    j["variant"] = "arithmetic_progression";
    j["start"] = ap->start;
    j["step"] = ap->step;
  } else if (const auto* ts = std::get_if<ThickSchedule>(&spec_)) {
    j["variant"] = "thick_schedule";
    j["start_quadratic"] = ts->start_quadratic;
    j["start_linear"] = ts->start_linear;
    j["start_constant"] = ts->start_constant;
    j["length_linear"] = ts->length_linear;
    j["length_constant"] = ts->length_constant;
  } else if (const auto* fs = std::get_if<FiniteSums>(&spec_)) {
    j["variant"] = "finite_sums";
    j["generators"] = fs->generators;
  } else if (const auto* rr = std::get_if<ReturnSetRef>(&spec_)) {
    j["variant"] = "return_set";
    j["system"] = rr->system->to_json();
    j["point"] = rr->point.to_json();
    j["open_set"] = rr->open_set.to_json();
  } else if (const auto* ds = std::get_if<DynSyndetic>(&spec_)) {
    j["variant"] = "dyn_syndetic";
    j["system"] = ds->system->to_json();
    j["point"] = ds->point.to_json();
    j["neighborhood"] = ds->neighborhood.to_json();
  } else if (const auto* ms = std::get_if<MSet>(&spec_)) {
    j["variant"] = "m_set";
    j["system"] = ms->system->to_json();
    j["point"] = ms->point.to_json();
    j["open_set"] = ms->open_set.to_json();
  } else if (const auto* pr = std::get_if<ProximalRuns>(&spec_)) {
    j["variant"] = "proximal_runs";
    j["system"] = pr->system->to_json();
    j["x"] = pr->x.to_json();
    j["y"] = pr->y.to_json();
    j["eps"] = format_rational(pr->eps);
  } else if (const auto* ex = std::get_if<ExplicitSet>(&spec_)) {
    j["variant"] = "explicit";
    j["elements"] = ex->elements;
    if (ex->tail_start) {
      j["tail_start"] = *ex->tail_start;
      j["tail_step"] = ex->tail_step;
    }
  } else if (const auto* un = std::get_if<UnionOf>(&spec_)) {
    j["variant"] = "union";
    json parts = json::array();
    for (const auto& p : un->parts) {
      parts.push_back(p->to_json());
    }
    j["parts"] = parts;
  } else if (const auto* in = std::get_if<IntersectionOf>(&spec_)) {
    j["variant"] = "intersection";
    json parts = json::array();
    for (const auto& p : in->parts) {
      parts.push_back(p->to_json());
    }
    j["parts"] = parts;
  } else if (const auto* co = std::get_if<ComplementOf>(&spec_)) {
    j["variant"] = "complement";
    j["inner"] = co->inner->to_json();
  } else if (const auto* tr = std::get_if<TranslateBy>(&spec_)) {
    j["variant"] = "translate";
    j["inner"] = tr->inner->to_json();
    j["shift"] = tr->shift;
  }
  return j;
}

SetGeneratorPtr SetGenerator::from_json(const json& j) {
  if (!j.is_object() || !j.contains("variant")) {
    throw_parse("set spec must be an object with a 'variant' field");
  }
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "arithmetic_progression") {
    return make_set(ArithmeticProgression{j.at("start").get<uint64_t>(),
                                          j.at("step").get<uint64_t>()});
  }
  if (variant == "thick_schedule") {
    ThickSchedule ts;
    ts.start_quadratic = j.value("start_quadratic", uint64_t{1});
    ts.start_linear = j.value("start_linear", uint64_t{0});
    ts.start_constant = j.value("start_constant", uint64_t{0});
    ts.length_linear = j.value("length_linear", uint64_t{1});
    ts.length_constant = j.value("length_constant", uint64_t{0});
    return make_set(ts);
  }
  if (variant == "finite_sums") {
    return make_set(FiniteSums{j.at("generators").get<std::vector<uint64_t>>()});
  }
  if (variant == "return_set") {
    ReturnSetRef rr;
    rr.system = std::make_shared<const System>(System::from_json(j.at("system")));
    rr.point = PointRef::from_json(j.at("point"));
    rr.open_set = OpenSetSpec::from_json(j.at("open_set"));
    return make_set(std::move(rr));
  }
  if (variant == "dyn_syndetic") {
    DynSyndetic ds;
    ds.system = std::make_shared<const System>(System::from_json(j.at("system")));
    ds.point = PointRef::from_json(j.at("point"));
    ds.neighborhood = OpenSetSpec::from_json(j.at("neighborhood"));
    return make_set(std::move(ds));
  }
  if (variant == "m_set") {
    MSet ms;
    ms.system = std::make_shared<const System>(System::from_json(j.at("system")));
    ms.point = PointRef::from_json(j.at("point"));
    ms.open_set = OpenSetSpec::from_json(j.at("open_set"));
    return make_set(std::move(ms));
  }
  if (variant == "proximal_runs") {
    ProximalRuns pr;
    pr.system = std::make_shared<const System>(System::from_json(j.at("system")));
    pr.x = PointRef::from_json(j.at("x"));
    pr.y = PointRef::from_json(j.at("y"));
    pr.eps = parse_rational(j.at("eps").get<std::string>());
    return make_set(std::move(pr));
  }
  if (variant == "explicit") {
    ExplicitSet ex;
    ex.elements = j.at("elements").get<std::vector<uint64_t>>();
    if (j.contains("tail_start")) {
      ex.tail_start = j.at("tail_start").get<uint64_t>();
      ex.tail_step = j.value("tail_step", uint64_t{1});
    }
    return make_set(std::move(ex));
  }
  if (variant == "union" || variant == "intersection") {
    std::vector<SetGeneratorPtr> parts;
    for (const auto& p : j.at("parts")) {
      parts.push_back(SetGenerator::from_json(p));
    }
    if (variant == "union") {
      return make_set(UnionOf{std::move(parts)});
    }
    return make_set(IntersectionOf{std::move(parts)});
  }
  if (variant == "complement") {
    return make_set(ComplementOf{SetGenerator::from_json(j.at("inner"))});
  }
  if (variant == "translate") {
    return make_set(TranslateBy{SetGenerator::from_json(j.at("inner")),
                                j.at("shift").get<uint64_t>()});
  }
  throw_parse("unknown set variant: " + variant);
}

// --- verdicts -----------------------------------------------------------------

std::string outcome_name(Outcome o) {
  switch (o) {
  case Outcome::verified:
    return "verified";
  case Outcome::refuted:
    return "refuted";
  case Outcome::inconclusive:
    return "inconclusive";
  }
  return "inconclusive";
}

std::string scope_name(Scope s) {
  switch (s) {
  case Scope::window:
    return "window";
  case Scope::budget:
    return "budget";
  case Scope::corpus:
    return "corpus";
  }
  return "window";
}

json FamilyClaim::to_json() const {
  return json{
      {"family", family}, {"parameters", parameters}, {"horizon", horizon}};
}

json Verdict::to_json() const {
  json j{{"outcome", outcome_name(outcome)},
         {"scope", scope_name(scope)},
         {"claim", claim.to_json()}};
  if (outcome == Outcome::verified) {
    j["witness"] = witness;
  }
  if (outcome == Outcome::refuted) {
    j["counterexample"] = counterexample;
  }
  return j;
}

Verdict check_syndetic(const BitWindow& s, uint64_t gap) {
  const uint64_t h = s.horizon();
  if (gap < 1 || gap > h) {
    throw_invalid("syndetic gap bound must satisfy 1 <= g <= H");
  }
  Verdict v;
  v.claim = {"syndetic", json{{"gap", gap}}, h};
  if (auto hole = s.find_empty_interval(gap)) {
    v.outcome = Outcome::refuted;
    v.scope = Scope::window;
    v.counterexample = json{{"gap_start", *hole}, {"gap_length", gap}};
  } else {
    v.outcome = Outcome::verified;
    v.scope = Scope::window;
    v.witness =
        json{{"gap_bound", gap}, {"max_gap_observed", s.longest_gap().length}};
  }
  return v;
}

Verdict check_thick(const BitWindow& s, uint64_t run_length) {
  const uint64_t h = s.horizon();
  if (run_length < 1 || run_length > h) {
    throw_invalid("thick run length must satisfy 1 <= L <= H");
  }
  Verdict v;
  v.claim = {"thick", json{{"run_length", run_length}}, h};
  // first run of the requested length, for deterministic witnesses
  uint64_t len = 0;
  for (uint64_t n = 0; n < h; ++n) {
    len = s.test(n) ? len + 1 : 0;
    if (len >= run_length) {
      const uint64_t start = n + 1 - len;
      uint64_t end = n + 1;
      while (end < h && s.test(end)) {
        ++end;
      }
      v.outcome = Outcome::verified;
      v.scope = Scope::window;
      v.witness = json{{"run_start", start}, {"run_length", end - start}};
      return v;
    }
  }
  v.outcome = Outcome::refuted;
  v.scope = Scope::window;
  v.counterexample = json{{"max_run_length", s.longest_run().length}};
  return v;
}

Verdict check_piecewise_syndetic(const BitWindow& s, uint64_t gap,
                                 uint64_t run_length) {
  const uint64_t h = s.horizon();
  if (gap < 1 || gap > h || run_length < 1 || run_length > h) {
    throw_invalid("piecewise syndetic parameters must satisfy 1 <= g, L <= H");
  }
  Verdict v;
  v.claim = {"piecewise_syndetic", json{{"gap", gap}, {"run_length", run_length}},
             h};
  // bad[i] marks a g-hole starting at i; an interval qualifies when it
  // contains no complete g-hole.
  std::vector<bool> bad(h, false);
  {
    uint64_t empty = 0;
    for (uint64_t n = 0; n < h; ++n) {
      empty = s.test(n) ? 0 : empty + 1;
      if (empty >= gap) {
        bad[n + 1 - gap] = true;
      }
    }
  }
  if (run_length < gap) {
    v.outcome = Outcome::verified;
    v.scope = Scope::window;
    v.witness = json{{"interval_start", 0},
                     {"interval_length", run_length},
                     {"note", "interval shorter than the gap bound"}};
    return v;
  }
  const uint64_t span = run_length - gap + 1; // bad-free stretch needed
  uint64_t good = 0;
  uint64_t best = 0;
  for (uint64_t i = 0; i + gap <= h; ++i) {
    good = bad[i] ? 0 : good + 1;
    best = std::max(best, good);
    if (good >= span) {
      v.outcome = Outcome::verified;
      v.scope = Scope::window;
      v.witness = json{{"interval_start", i + 1 - span},
                       {"interval_length", run_length}};
      return v;
    }
  }
  v.outcome = Outcome::refuted;
  v.scope = Scope::window;
  v.counterexample = json{{"max_bad_free_span", best}};
  return v;
}

namespace {

struct IpSearch {
  const BitWindow& s;
  unsigned k;
  uint64_t bound;
  uint64_t horizon;
  bool in_range_failure = false;
  bool overflow_seen = false;
  std::vector<uint64_t> chosen;
  std::vector<uint64_t> sums;

  bool dfs(uint64_t min_p) {
    if (chosen.size() == k) {
      return true;
    }
    for (uint64_t p = min_p; p <= bound; ++p) {
      bool ok = true;
      bool overflow = false;
      std::vector<uint64_t> added;
      added.push_back(p);
      for (uint64_t old : sums) {
        added.push_back(old + p);
      }
      for (uint64_t v : added) {
        if (v >= horizon) {
          overflow = true;
          break;
        }
        if (!s.test(v)) {
          ok = false;
          break;
        }
      }
      if (overflow) {
        overflow_seen = true;
        continue;
      }
      if (!ok) {
        in_range_failure = true;
        continue;
      }
      chosen.push_back(p);
      const size_t before = sums.size();
      sums.insert(sums.end(), added.begin(), added.end());
      if (dfs(p)) {
        return true;
      }
      chosen.pop_back();
      sums.resize(before);
    }
    return false;
  }
};

} // namespace

Verdict find_ip_generators(const BitWindow& s, unsigned k, uint64_t value_bound) {
  const uint64_t h = s.horizon();
  if (k < 1 || value_bound < 1 || value_bound > h) {
    throw_invalid("IP search needs k >= 1 and 1 <= B <= H");
  }
  Verdict v;
  v.claim = {"ip", json{{"generator_count", k}, {"value_bound", value_bound}}, h};
  IpSearch search{s, k, value_bound, h, false, false, {}, {}};
  if (search.dfs(1)) {
    v.outcome = Outcome::verified;
    v.scope = Scope::window;
    std::sort(search.sums.begin(), search.sums.end());
    search.sums.erase(std::unique(search.sums.begin(), search.sums.end()),
                      search.sums.end());
    v.witness = json{{"generators", search.chosen}, {"sums", search.sums}};
    return v;
  }
  if (search.in_range_failure || !search.overflow_seen) {
    v.outcome = Outcome::refuted;
    v.scope = Scope::window;
    v.counterexample = json{{"note", "exhaustive search found no generators"},
                            {"generator_count", k},
                            {"value_bound", value_bound}};
  } else {
    v.outcome = Outcome::inconclusive;
    v.scope = Scope::window;
    v.counterexample =
        json{{"note", "every candidate overflowed the horizon"}};
  }
  return v;
}

Verdict dual_check(const BitWindow& s, const std::vector<CorpusMember>& corpus,
                   uint64_t horizon) {
  if (corpus.empty()) {
    throw_invalid("dual check needs a nonempty corpus");
  }
  if (horizon != s.horizon()) {
    throw_invalid("dual check horizon must match the window");
  }
  Verdict v;
  v.claim = {"dual", json{{"corpus_size", corpus.size()}}, horizon};
  for (const auto& member : corpus) {
    const BitWindow w = member.generator->window(horizon);
    if (!w.intersects(s)) {
      v.outcome = Outcome::refuted;
      v.scope = Scope::corpus;
      v.counterexample = json{{"member_id", member.id},
                              {"member_family", member.generator->family_tag()},
                              {"member", member.generator->to_json()}};
      return v;
    }
  }
  v.outcome = Outcome::verified;
  v.scope = Scope::corpus;
  v.witness = json{{"corpus_size", corpus.size()}};
  return v;
}

Verdict check_claim(const BitWindow& s, const FamilyClaim& claim) {
  if (claim.family == "syndetic") {
    return check_syndetic(s, claim.parameters.at("gap").get<uint64_t>());
  }
  if (claim.family == "thick") {
    return check_thick(s, claim.parameters.at("run_length").get<uint64_t>());
  }
  if (claim.family == "piecewise_syndetic") {
    return check_piecewise_syndetic(
        s, claim.parameters.at("gap").get<uint64_t>(),
        claim.parameters.at("run_length").get<uint64_t>());
  }
  if (claim.family == "ip") {
    return find_ip_generators(
        s, claim.parameters.at("generator_count").get<unsigned>(),
        claim.parameters.at("value_bound").get<uint64_t>());
  }
  if (claim.family == "dual") {
    return dual_check(s, corpus_from_parameters(claim.parameters, s.horizon()),
                      s.horizon());
  }
  throw_invalid("unknown family kind: " + claim.family);
}

// --- the central-set bridge ----------------------------------------------------

CentralWitness central_from_dps(const DpsDecomposition& dec, uint64_t horizon,
                                const CentralBridgeParams& params) {
  if (!dec.thick_generator || !dec.minimal_system) {
    throw_invalid("central_from_dps needs a thick generator and a system");
  }
  if (!dec.minimal_system->minimal_by_construction()) {
    throw_invalid("central_from_dps needs a minimal-by-construction system");
  }
  if (!systems::contains(*dec.minimal_system, dec.neighborhood, dec.point)) {
    throw_invalid("dynamical syndetic neighborhood must contain its point");
  }
  const BitWindow w_a = dec.thick_generator->window(horizon);
  {
    const Verdict thick = check_thick(w_a, params.run_length);
    if (!thick.verified()) {
      throw_invalid("central_from_dps requires A thick-verified at (H, L)");
    }
  }

  CentralWitness cw;
  cw.factor_system = dec.minimal_system;
  cw.factor_point = dec.point;
  cw.eps = params.eps;
  cw.run_length = params.run_length;
  cw.horizon = horizon;

  // Product system Sigma_2 x Y with x0 = (1_A, y) and y0 = (1^inf, y).
  systems::ProductSystem prod;
  prod.factors.push_back(System(systems::FullShift{2}));
  prod.factors.push_back(*dec.minimal_system);
  cw.system = std::make_shared<const System>(System(std::move(prod)));

  const auto indicator =
      symseq::make_generator(symseq::Indicator{dec.thick_generator});
  const auto ones =
      symseq::make_generator(symseq::EventuallyPeriodic{"", "1"});
  cw.x = PointRef{systems::ProductPoint{
      {PointRef{systems::ShiftPoint{indicator, 0}}, dec.point}}};
  cw.minimal_y = PointRef{systems::ProductPoint{
      {PointRef{systems::ShiftPoint{ones, 0}}, dec.point}}};
  cw.neighborhood = OpenSetSpec{systems::ProductSpec{
      {OpenSetSpec{systems::Cylinder{"1"}}, dec.neighborhood}}};

  // (i) N(x0, U) agrees with window(A) & window(N_S(y, V_y)) exactly.
  const BitWindow w_b = systems::return_set(*dec.minimal_system, dec.point,
                                            dec.neighborhood, horizon);
  cw.q_window = w_a.intersect(w_b);
  const BitWindow w_n =
      systems::return_set(*cw.system, cw.x, cw.neighborhood, horizon);
  cw.identity_verdict.claim = {"window_identity", json::object(), horizon};
  if (w_n == cw.q_window) {
    cw.identity_verdict.outcome = Outcome::verified;
    cw.identity_verdict.witness = json{{"elements", w_n.count()}};
  } else {
    cw.identity_verdict.outcome = Outcome::refuted;
    cw.identity_verdict.counterexample =
        json{{"lhs_count", w_n.count()}, {"rhs_count", cw.q_window.count()}};
  }

  // (ii) x0 and y0 run eps-close along a run of the requested length.
  const BitWindow prox =
      systems::proximal_run_set(*cw.system, cw.x, cw.minimal_y, params.eps,
                                horizon);
  cw.proximal_verdict = check_thick(prox, params.run_length);
  cw.proximal_verdict.claim.family = "proximal_runs";
  cw.proximal_verdict.claim.parameters["eps"] = format_rational(params.eps);

  // (iii) y0 returns syndetically to every tested basic neighborhood.
  const auto hint = dec.minimal_system->period_hint();
  if (!hint) {
    throw_unsupported("central_from_dps needs a minimal system with a period "
                      "hint for the syndetic condition");
  }
  const uint64_t gap = std::min<uint64_t>(2 * *hint, horizon);
  cw.syndetic_verdict.claim = {"syndetic_returns",
                               json{{"gap", gap}, {"depths", {1, 2, 3}}},
                               horizon};
  json tested = json::array();
  bool all_ok = true;
  for (int depth = 1; depth <= 3; ++depth) {
    OpenSetSpec u_j{systems::ProductSpec{
        {OpenSetSpec{systems::Cylinder{std::string(depth, '1')}},
         dec.neighborhood}}};
    const BitWindow w =
        systems::return_set(*cw.system, cw.minimal_y, u_j, horizon);
    const Verdict vj = check_syndetic(w, gap);
    tested.push_back({{"depth", depth}, {"outcome", outcome_name(vj.outcome)}});
    all_ok = all_ok && vj.verified();
  }
  cw.syndetic_verdict.outcome = all_ok ? Outcome::verified : Outcome::refuted;
  if (all_ok) {
    cw.syndetic_verdict.witness = json{{"tested", tested}};
  } else {
    cw.syndetic_verdict.counterexample = json{{"tested", tested}};
  }
  return cw;
}

DpsDecomposition dps_from_central(const CentralWitness& cw, const Rational& eps) {
  if (eps <= 0) {
    throw_invalid("dps_from_central needs eps > 0");
  }
  const OpenSetSpec ball2 =
      systems::compile_ball(*cw.system, cw.minimal_y, 2 * eps);
  if (!systems::spec_subset(*cw.system, ball2, cw.neighborhood)) {
    throw_invalid("eps inconsistent with the witness neighborhood: "
                  "B_2eps(y) must sit inside U_y");
  }
  DpsDecomposition out;
  out.thick_generator = make_set(
      ProximalRuns{cw.system, cw.x, cw.minimal_y, eps});
  out.minimal_system = cw.factor_system;
  out.point = cw.factor_point;
  out.neighborhood =
      systems::compile_ball(*cw.factor_system, cw.factor_point, eps);

  // Triangle inequality, checked on the window rather than trusted.
  const uint64_t h = cw.horizon;
  const BitWindow w_a = out.thick_generator->window(h);
  const BitWindow w_b = systems::return_set(*out.minimal_system, out.point,
                                            out.neighborhood, h);
  const BitWindow rhs = systems::return_set(*cw.system, cw.x, ball2, h);
  if (!w_a.intersect(w_b).is_subset_of(rhs)) {
    throw Error(ErrorCode::internal,
                "windowed triangle-inequality inclusion failed");
  }
  return out;
}

// --- documented default corpora ---------------------------------------------

std::vector<CorpusMember> syndetic_corpus(uint64_t max_step) {
  std::vector<CorpusMember> out;
  for (uint64_t d = 1; d <= max_step; ++d) {
    for (uint64_t a = 0; a < d; ++a) {
      out.push_back({"ap(" + std::to_string(a) + "," + std::to_string(d) + ")",
                     make_set(ArithmeticProgression{a, d})});
    }
  }
  return out;
}

std::vector<CorpusMember> thick_corpus() {
  std::vector<CorpusMember> out;
  const std::vector<ThickSchedule> schedules = {
      {1, 0, 0, 1, 0}, {1, 0, 0, 2, 0}, {1, 1, 0, 1, 2},
      {2, 0, 0, 2, 0}, {1, 0, 5, 1, 1}, {1, 2, 0, 3, 0},
  };
  size_t index = 0;
  for (const auto& ts : schedules) {
    out.push_back({"thick[" + std::to_string(index++) + "]", make_set(ts)});
  }
  return out;
}

std::vector<CorpusMember> ip_corpus(uint64_t bound) {
  std::vector<CorpusMember> out;
  for (uint64_t p = 1; p <= bound; ++p) {
    for (uint64_t q = p; q <= bound; ++q) {
      out.push_back({"fs(" + std::to_string(p) + "," + std::to_string(q) + ")",
                     make_set(FiniteSums{{p, q}})});
    }
  }
  for (uint64_t p = 1; p <= bound; ++p) {
    for (uint64_t q = p; q <= bound; ++q) {
      for (uint64_t r = q; r <= bound; ++r) {
        out.push_back({"fs(" + std::to_string(p) + "," + std::to_string(q) +
                           "," + std::to_string(r) + ")",
                       make_set(FiniteSums{{p, q, r}})});
      }
    }
  }
  return out;
}

std::vector<CorpusMember> dyn_syndetic_corpus(int64_t max_modulus) {
  std::vector<CorpusMember> out;
  for (int64_t m = 2; m <= max_modulus; ++m) {
    DynSyndetic ds;
    ds.system = std::make_shared<const System>(System(systems::CyclicRotation{m}));
    ds.point = PointRef{systems::CyclicPoint{0}};
    ds.neighborhood = OpenSetSpec{systems::ResidueSet{{0}}};
    out.push_back({"dynsyn(cyclic " + std::to_string(m) + ")",
                   make_set(std::move(ds))});
  }
  return out;
}

std::vector<CorpusMember> central_corpus(uint64_t horizon) {
  std::vector<CorpusMember> out;
  const std::vector<ThickSchedule> schedules = {
      {1, 0, 0, 1, 0}, {1, 0, 0, 2, 0}, {1, 1, 0, 1, 2}, {2, 0, 0, 2, 0},
      {1, 0, 3, 1, 4},
  };
  const std::vector<int64_t> moduli = {3, 5};
  size_t index = 0;
  for (const auto& ts : schedules) {
    for (int64_t m : moduli) {
      DynSyndetic ds;
      ds.system =
          std::make_shared<const System>(System(systems::CyclicRotation{m}));
      ds.point = PointRef{systems::CyclicPoint{0}};
      ds.neighborhood = OpenSetSpec{systems::ResidueSet{{0}}};
      out.push_back(
          {"central[" + std::to_string(index++) + "]",
           make_set(IntersectionOf{{make_set(ts), make_set(std::move(ds))}})});
    }
  }
  (void)horizon;
  return out;
}

std::vector<CorpusMember> default_dual_corpus(uint64_t horizon) {
  std::vector<CorpusMember> out = syndetic_corpus(12);
  for (auto& builder :
       {thick_corpus(), ip_corpus(20), dyn_syndetic_corpus(8),
        central_corpus(horizon)}) {
    out.insert(out.end(), builder.begin(), builder.end());
  }
  return out;
}

std::vector<CorpusMember> corpus_from_parameters(const json& parameters,
                                                 uint64_t horizon) {
  if (!parameters.contains("corpus")) {
    throw_invalid("dual claims need a 'corpus' parameter");
  }
  const auto& corpus = parameters.at("corpus");
  if (corpus.is_array()) {
    std::vector<CorpusMember> out;
    size_t index = 0;
    for (const auto& member : corpus) {
      out.push_back({"corpus[" + std::to_string(index++) + "]",
                     SetGenerator::from_json(member)});
    }
    return out;
  }
  const std::string name = corpus.get<std::string>();
  const uint64_t bound = parameters.value("corpus_bound", uint64_t{20});
  if (name == "default") {
    return default_dual_corpus(horizon);
  }
  if (name == "ip") {
    return ip_corpus(bound);
  }
  if (name == "syndetic") {
    return syndetic_corpus(bound);
  }
  if (name == "thick") {
    return thick_corpus();
  }
  if (name == "dyn_syndetic") {
    return dyn_syndetic_corpus(static_cast<int64_t>(bound));
  }
  if (name == "central") {
    return central_corpus(horizon);
  }
  throw_invalid("unknown corpus name: " + name);
}

} // namespace dynlab::intfam
