#include "dynlab/disjoint.hpp"

#include <algorithm>
#include <numeric>

#include "dynlab/error.hpp"

namespace dynlab::disjoint {

using intfam::Outcome;
using intfam::Scope;
using intfam::Verdict;
using nlohmann::json;
using systems::OpenSetSpec;
using systems::PointRef;
using systems::System;

namespace {

bool word_is_primitive(const std::string& w) {
  const size_t n = w.size();
  for (size_t d = 1; d < n; ++d) {
    if (n % d != 0) {
      continue;
    }
    bool periodic = true;
    for (size_t i = d; i < n && periodic; ++i) {
      periodic = w[i] == w[i - d];
    }
    if (periodic) {
      return false;
    }
  }
  return true;
}

std::string word_from_index(int alphabet, uint64_t length, uint64_t index) {
  std::string w(length, '0');
  for (size_t i = length; i-- > 0;) {
    w[i] = static_cast<char>('0' + index % static_cast<uint64_t>(alphabet));
    index /= static_cast<uint64_t>(alphabet);
  }
  return w;
}

uint64_t pow_u64(uint64_t base, uint64_t exp) {
  uint64_t out = 1;
  for (uint64_t i = 0; i < exp; ++i) {
    out *= base;
  }
  return out;
}

uint64_t odometer_total(const std::vector<int64_t>& radixes) {
  uint64_t total = 1;
  for (int64_t r : radixes) {
    total *= static_cast<uint64_t>(r);
  }
  return total;
}

std::vector<int64_t> odometer_digits(const std::vector<int64_t>& radixes,
                                     uint64_t value) {
  std::vector<int64_t> digits(radixes.size(), 0);
  for (size_t i = 0; i < radixes.size(); ++i) {
    digits[i] = static_cast<int64_t>(value % static_cast<uint64_t>(radixes[i]));
    value /= static_cast<uint64_t>(radixes[i]);
  }
  return digits;
}

} // namespace

// --- dense enumeration --------------------------------------------------------

DenseEnumeration::DenseEnumeration(SystemPtr sys) : sys_(std::move(sys)) {
  const auto& spec = sys_->spec();
  if (const auto* pr = std::get_if<systems::ProductSystem>(&spec)) {
    for (const auto& f : pr->factors) {
      children_.push_back(std::make_unique<DenseEnumeration>(
          std::make_shared<const System>(f)));
    }
  } else if (const auto* pw = std::get_if<systems::PowerSystem>(&spec)) {
    children_.push_back(std::make_unique<DenseEnumeration>(pw->base));
  } else if (const auto* tw = std::get_if<systems::TowerSystem>(&spec)) {
    children_.push_back(std::make_unique<DenseEnumeration>(tw->base));
  }
}

bool DenseEnumeration::produce_next() const {
  const auto& spec = sys_->spec();

  if (const auto* fs = std::get_if<systems::FullShift>(&spec)) {
    // Periodic points ordered by (period length, lexicographic word),
    // primitive words only so the enumeration stays injective.
    const auto k = static_cast<uint64_t>(fs->alphabet_size);
    while (true) {
      uint64_t idx = cursor_++;
      uint64_t length = 1;
      uint64_t block = k;
      while (idx >= block) {
        idx -= block;
        ++length;
        block = pow_u64(k, length);
        if (length > 24) {
          return false;
        }
      }
      const std::string w = word_from_index(fs->alphabet_size, length, idx);
      if (!word_is_primitive(w)) {
        continue;
      }
      cache_.push_back(PointRef{systems::ShiftPoint{
          symseq::make_generator(symseq::EventuallyPeriodic{"", w}), 0}});
      return true;
    }
  }

  if (const auto* sc = std::get_if<systems::SubshiftClosure>(&spec)) {
    uint64_t misses = 0;
    while (misses < 4096) {
      const uint64_t t = cursor_++;
      PointRef p{systems::ShiftPoint{sc->generator, t}};
      if (seen_.insert(p.canonical_key()).second) {
        cache_.push_back(p);
        return true;
      }
      ++misses;
      if (auto form = sc->generator->eventually_periodic_form()) {
        if (t >= form->preperiod.size() + form->period.size()) {
          return false;
        }
      }
    }
    return false;
  }

  if (const auto* cr = std::get_if<systems::CyclicRotation>(&spec)) {
    if (cursor_ >= static_cast<uint64_t>(cr->modulus)) {
      return false;
    }
    cache_.push_back(PointRef{systems::CyclicPoint{
        static_cast<int64_t>(cursor_++)}});
    return true;
  }

  if (const auto* od = std::get_if<systems::OdometerTruncation>(&spec)) {
    const uint64_t total = odometer_total(od->radixes);
    if (cursor_ >= total) {
      return false;
    }
    cache_.push_back(
        PointRef{systems::OdometerPoint{odometer_digits(od->radixes, cursor_++)}});
    return true;
  }

  if (const auto* cr = std::get_if<systems::CircleRotation>(&spec)) {
    // Levels of the dyadic refinement of the orbit grid {j/q}.
    const uint64_t q =
        boost::multiprecision::denominator(cr->angle).convert_to<uint64_t>();
    uint64_t idx = cursor_++;
    uint64_t level = 0;
    uint64_t level_size = q;
    while (idx >= level_size) {
      idx -= level_size;
      ++level;
      level_size = q * (uint64_t{1} << (level - 1));
      if (level > 40) {
        return false;
      }
    }
    Rational value;
    if (level == 0) {
      value = Rational(idx, q);
    } else {
      const uint64_t denom = q * (uint64_t{1} << level);
      value = Rational(2 * idx + 1, denom);
    }
    cache_.push_back(PointRef{systems::CirclePoint{frac_mod1(value)}});
    return true;
  }

  if (std::holds_alternative<systems::PowerSystem>(spec)) {
    auto p = children_[0]->point_at(cursor_++);
    if (!p) {
      return false;
    }
    cache_.push_back(*p);
    return true;
  }

  if (const auto* tw = std::get_if<systems::TowerSystem>(&spec)) {
    // Diagonal pairing of (base index, level).
    const auto h = static_cast<uint64_t>(tw->height);
    while (true) {
      const uint64_t idx = cursor_++;
      // decode idx as (d, i) with i <= d, pair = (base i, level d - i)
      uint64_t d = 0;
      uint64_t rest = idx;
      while (rest > d) {
        rest -= d + 1;
        ++d;
      }
      const uint64_t base_idx = rest;
      const uint64_t level = d - rest;
      if (level >= h) {
        if (base_idx == 0 && !children_[0]->point_at(d)) {
          return false; // diagonal exhausted on both axes
        }
        continue;
      }
      auto p = children_[0]->point_at(base_idx);
      if (!p) {
        continue;
      }
      cache_.push_back(PointRef{systems::TowerPoint{
          std::make_shared<const PointRef>(*p), static_cast<int64_t>(level + 1)}});
      return true;
    }
  }

  if (const auto* pr = std::get_if<systems::ProductSystem>(&spec)) {
    // Tuples (i_1..i_n) by total sum, lexicographic within a sum.
    const size_t n = pr->factors.size();
    while (true) {
      const uint64_t idx = cursor_++;
      if (idx > (1u << 22)) {
        return false;
      }
      // enumerate tuples in the global order and pick the idx-th valid one
      // by replaying; to stay O(1) amortized we instead decode by walking
      // sums and compositions.
      uint64_t remaining = idx;
      uint64_t d = 0;
      bool emitted = false;
      while (!emitted) {
        // compositions of d into n parts, lexicographic
        std::vector<uint64_t> tuple(n, 0);
        tuple[n - 1] = d;
        bool any_valid_this_sum = false;
        while (true) {
          bool valid = true;
          std::vector<PointRef> parts;
          for (size_t i = 0; i < n && valid; ++i) {
            auto p = children_[i]->point_at(tuple[i]);
            if (!p) {
              valid = false;
            } else {
              parts.push_back(*p);
            }
          }
          if (valid) {
            any_valid_this_sum = true;
            if (remaining == 0) {
              cache_.push_back(PointRef{systems::ProductPoint{std::move(parts)}});
              emitted = true;
              break;
            }
            --remaining;
          }
          // next composition: move one unit left-to-right
          size_t j = n - 1;
          while (j > 0 && tuple[j] == 0) {
            --j;
          }
          if (j == 0) {
            break;
          }
          const uint64_t rest = tuple[j] - 1;
          ++tuple[j - 1];
          for (size_t t = j; t < n; ++t) {
            tuple[t] = 0;
          }
          tuple[n - 1] = rest;
        }
        if (emitted) {
          break;
        }
        ++d;
        if (!any_valid_this_sum && d > 64) {
          return false;
        }
        if (d > (1u << 20)) {
          return false;
        }
      }
      return true;
    }
  }

  throw_unsupported("dense enumeration is not defined for this system variant");
}

void DenseEnumeration::grow(uint64_t index) const {
  while (!exhausted_ && cache_.size() <= index) {
    if (!produce_next()) {
      exhausted_ = true;
    }
  }
}

std::optional<PointRef> DenseEnumeration::point_at(uint64_t index) const {
  std::lock_guard lock(mutex_);
  grow(index);
  if (index < cache_.size()) {
    return cache_[index];
  }
  return std::nullopt;
}

std::vector<PointRef> enumerate_dense(SystemPtr sys, uint64_t count) {
  DenseEnumeration d(std::move(sys));
  std::vector<PointRef> out;
  for (uint64_t i = 0; i < count; ++i) {
    auto p = d.point_at(i);
    if (!p) {
      break;
    }
    out.push_back(*p);
  }
  return out;
}

// --- witness search -------------------------------------------------------------

json WitnessRecord::to_json() const {
  return json{{"x_system", x_system->to_json()},
              {"y_system", y_system->to_json()},
              {"x", x.to_json()},
              {"y", y.to_json()},
              {"u", u.to_json()},
              {"v", v.to_json()},
              {"horizon", horizon},
              {"gap", gap},
              {"transfer_count", transfer_window.count()},
              {"verdict", syndetic_verdict.to_json()}};
}

bool WitnessRecord::reverify() const {
  const BitWindow w =
      systems::transfer_set(*x_system, *y_system, x, y, u, v, horizon);
  if (w != transfer_window) {
    return false;
  }
  const Verdict again = intfam::check_syndetic(w, gap);
  return again.to_json() == syndetic_verdict.to_json();
}

SearchOutcome witness_search(SystemPtr x_system, const DenseEnumeration& dense,
                             SystemPtr y_system, const PointRef& y,
                             const OpenSetSpec& v, const OpenSetSpec& u,
                             const WitnessSearchParams& params) {
  SearchOutcome out;
  out.verdict.claim = {"witness_search",
                       json{{"gap", params.gap},
                            {"budget", params.budget},
                            {"u", u.to_json()},
                            {"v", v.to_json()},
                            {"y", y.to_json()}},
                       params.horizon};
  uint64_t tested = 0;
  uint64_t best_gap = params.horizon + 1;
  json best_x;
  for (uint64_t i = 0; i < params.budget; ++i) {
    auto cand = dense.point_at(i);
    if (!cand) {
      break;
    }
    if (!systems::contains(*x_system, u, *cand)) {
      continue;
    }
    ++tested;
    const BitWindow w = systems::transfer_set(*x_system, *y_system, *cand, y, u,
                                              v, params.horizon);
    const Verdict sv = intfam::check_syndetic(w, params.gap);
    if (sv.verified()) {
      out.verdict.outcome = Outcome::verified;
      out.verdict.scope = Scope::window;
      out.verdict.witness = json{{"x", cand->to_json()},
                                 {"enumeration_index", i},
                                 {"max_gap_observed",
                                  sv.witness.at("max_gap_observed")}};
      WitnessRecord rec{x_system, y_system, *cand,       y,
                        u,        v,        params.horizon, params.gap,
                        w,        sv};
      out.record = std::move(rec);
      return out;
    }
    const uint64_t observed = w.none() ? params.horizon : w.longest_gap().length;
    if (observed < best_gap) {
      best_gap = observed;
      best_x = cand->to_json();
    }
  }
  if (tested == 0) {
    out.verdict.outcome = Outcome::inconclusive;
    out.verdict.scope = Scope::budget;
    out.verdict.counterexample =
        json{{"note", "no enumerated point fell in U within budget"},
             {"budget", params.budget}};
  } else {
    out.verdict.outcome = Outcome::refuted;
    out.verdict.scope = Scope::budget;
    out.verdict.counterexample = json{{"candidates_tested", tested},
                                      {"best_max_gap", best_gap},
                                      {"best_x", best_x}};
  }
  return out;
}

// --- scan machinery -------------------------------------------------------------

namespace {

uint64_t candidate_period_bound(const System& sys, int depth) {
  const auto& spec = sys.spec();
  if (std::holds_alternative<systems::FullShift>(spec) ||
      std::holds_alternative<systems::SubshiftClosure>(spec)) {
    // candidate periodic points extend depth-l cylinder words by up to
    // two letters to reach every return phase
    uint64_t l = 1;
    for (int i = 2; i <= std::max(depth, 1) + 2; ++i) {
      l = std::lcm<uint64_t>(l, static_cast<uint64_t>(i));
    }
    return l;
  }
  if (auto hint = sys.period_hint()) {
    return *hint;
  }
  if (const auto* pr = std::get_if<systems::ProductSystem>(&spec)) {
    uint64_t l = 1;
    for (const auto& f : pr->factors) {
      l = std::lcm(l, candidate_period_bound(f, depth));
    }
    return l;
  }
  if (const auto* pw = std::get_if<systems::PowerSystem>(&spec)) {
    return candidate_period_bound(*pw->base, depth);
  }
  throw_unsupported("no default gap for this X variant; supply one");
}

} // namespace

uint64_t default_gap(const System& x_system, int depth, const System& y_system) {
  const auto hint = y_system.period_hint();
  if (!hint) {
    throw_unsupported("no default gap without a Y period hint; supply one");
  }
  return 2 * std::lcm(candidate_period_bound(x_system, depth), *hint);
}

std::vector<OpenSetSpec> basic_opens(const System& sys, int depth) {
  const auto& spec = sys.spec();
  if (const auto* fs = std::get_if<systems::FullShift>(&spec)) {
    if (depth <= 0) {
      return {OpenSetSpec{systems::Cylinder{""}}};
    }
    std::vector<OpenSetSpec> out;
    const uint64_t total = pow_u64(static_cast<uint64_t>(fs->alphabet_size),
                                   static_cast<uint64_t>(depth));
    for (uint64_t i = 0; i < total; ++i) {
      out.push_back(OpenSetSpec{systems::Cylinder{
          word_from_index(fs->alphabet_size, static_cast<uint64_t>(depth), i)}});
    }
    return out;
  }
  if (const auto* sc = std::get_if<systems::SubshiftClosure>(&spec)) {
    if (depth <= 0) {
      return {OpenSetSpec{systems::Cylinder{""}}};
    }
    const std::string lang = sc->generator->prefix(sc->language_depth);
    std::set<std::string> words;
    for (size_t i = 0; i + depth <= lang.size(); ++i) {
      words.insert(lang.substr(i, static_cast<size_t>(depth)));
    }
    std::vector<OpenSetSpec> out;
    for (const auto& w : words) {
      out.push_back(OpenSetSpec{systems::Cylinder{w}});
    }
    return out;
  }
  if (const auto* cr = std::get_if<systems::CyclicRotation>(&spec)) {
    std::vector<OpenSetSpec> out;
    for (int64_t r = 0; r < cr->modulus; ++r) {
      out.push_back(OpenSetSpec{systems::ResidueSet{{r}}});
    }
    return out;
  }
  if (const auto* od = std::get_if<systems::OdometerTruncation>(&spec)) {
    std::vector<OpenSetSpec> out;
    const auto total = static_cast<int64_t>(odometer_total(od->radixes));
    for (int64_t v = 0; v < total; ++v) {
      out.push_back(OpenSetSpec{systems::ResidueSet{{v}}});
    }
    return out;
  }
  if (const auto* cr = std::get_if<systems::CircleRotation>(&spec)) {
    std::vector<OpenSetSpec> out;
    const int res = cr->partition_resolution;
    for (int i = 0; i < res; ++i) {
      out.push_back(OpenSetSpec{
          systems::Arc{Rational(i, res), Rational(i + 1, res)}});
    }
    return out;
  }
  if (const auto* pr = std::get_if<systems::ProductSystem>(&spec)) {
    std::vector<std::vector<OpenSetSpec>> factor_opens;
    for (const auto& f : pr->factors) {
      factor_opens.push_back(basic_opens(f, depth));
    }
    std::vector<OpenSetSpec> out{OpenSetSpec{systems::ProductSpec{}}};
    for (const auto& opens : factor_opens) {
      std::vector<OpenSetSpec> next;
      for (const auto& partial : out) {
        for (const auto& o : opens) {
          auto ps = std::get<systems::ProductSpec>(partial.v);
          ps.parts.push_back(o);
          next.push_back(OpenSetSpec{std::move(ps)});
        }
      }
      out = std::move(next);
      if (out.size() > 4096) {
        throw_unsupported("product basic-open grid too large");
      }
    }
    return out;
  }
  if (const auto* pw = std::get_if<systems::PowerSystem>(&spec)) {
    return basic_opens(*pw->base, depth);
  }
  if (const auto* tw = std::get_if<systems::TowerSystem>(&spec)) {
    std::vector<OpenSetSpec> out;
    for (int64_t level = 1; level <= tw->height; ++level) {
      for (const auto& b : basic_opens(*tw->base, depth)) {
        systems::LevelSet ls;
        ls.level = level;
        ls.base = std::make_shared<const OpenSetSpec>(b);
        out.push_back(OpenSetSpec{std::move(ls)});
      }
    }
    return out;
  }
  if (const auto* ld = std::get_if<systems::LadderSystem>(&spec)) {
    std::vector<OpenSetSpec> out;
    for (int64_t level = 0; level <= ld->depth; ++level) {
      for (const auto& b : basic_opens(*ld->base, depth)) {
        systems::LevelSet ls;
        ls.level = level;
        ls.base = std::make_shared<const OpenSetSpec>(b);
        out.push_back(OpenSetSpec{std::move(ls)});
      }
    }
    return out;
  }
  throw_unsupported("no basic-open grid for this system variant");
}

std::vector<PointRef> sample_points_in(const System& sys,
                                       const OpenSetSpec& cell0,
                                       uint64_t count) {
  const OpenSetSpec cell = systems::compile_spec(sys, cell0);
  const auto& spec = sys.spec();
  std::vector<PointRef> out;
  if (std::holds_alternative<systems::CyclicRotation>(spec)) {
    const auto& rs = std::get<systems::ResidueSet>(cell.v);
    for (int64_t r : rs.residues) {
      if (out.size() >= count) {
        break;
      }
      out.push_back(PointRef{systems::CyclicPoint{r}});
    }
    return out;
  }
  if (const auto* od = std::get_if<systems::OdometerTruncation>(&spec)) {
    const auto& rs = std::get<systems::ResidueSet>(cell.v);
    for (int64_t v : rs.residues) {
      if (out.size() >= count) {
        break;
      }
      out.push_back(PointRef{systems::OdometerPoint{
          odometer_digits(od->radixes, static_cast<uint64_t>(v))}});
    }
    return out;
  }
  if (std::holds_alternative<systems::CircleRotation>(spec)) {
    const auto& arc = std::get<systems::Arc>(cell.v);
    std::vector<Rational> reps;
    if (arc.low < arc.high) {
      reps = {(arc.low + arc.high) / 2, arc.low,
              (3 * arc.low + arc.high) / 4};
    } else {
      // wrap arc: favor the segment starting at low
      reps = {frac_mod1((arc.low + arc.high + 1) / 2), arc.low};
    }
    for (const auto& r : reps) {
      if (out.size() >= count) {
        break;
      }
      out.push_back(PointRef{systems::CirclePoint{frac_mod1(r)}});
    }
    return out;
  }
  if (const auto* fs = std::get_if<systems::FullShift>(&spec)) {
    const auto& cy = std::get<systems::Cylinder>(cell.v);
    const std::string w = cy.word.empty() ? "0" : cy.word;
    out.push_back(PointRef{systems::ShiftPoint{
        symseq::make_generator(symseq::EventuallyPeriodic{"", w}), 0}});
    if (count > 1) {
      out.push_back(PointRef{systems::ShiftPoint{
          symseq::make_generator(symseq::EventuallyPeriodic{
              cy.word, std::string(1, '0')}),
          0}});
    }
    (void)fs;
    while (out.size() > count) {
      out.pop_back();
    }
    return out;
  }
  if (const auto* sc = std::get_if<systems::SubshiftClosure>(&spec)) {
    const auto& cy = std::get<systems::Cylinder>(cell.v);
    const std::string lang = sc->generator->prefix(
        std::min<uint64_t>(sc->language_depth, 4096) + cy.word.size());
    for (size_t t = 0; t + cy.word.size() <= lang.size(); ++t) {
      if (out.size() >= count) {
        break;
      }
      if (lang.compare(t, cy.word.size(), cy.word) == 0) {
        out.push_back(PointRef{systems::ShiftPoint{sc->generator, t}});
      }
    }
    return out;
  }
  if (const auto* pr = std::get_if<systems::ProductSystem>(&spec)) {
    const auto& ps = std::get<systems::ProductSpec>(cell.v);
    std::vector<std::vector<PointRef>> factor_samples;
    for (size_t i = 0; i < pr->factors.size(); ++i) {
      factor_samples.push_back(
          sample_points_in(pr->factors[i], ps.parts[i], count));
      if (factor_samples.back().empty()) {
        return {};
      }
    }
    for (uint64_t i = 0; i < count; ++i) {
      systems::ProductPoint pp;
      bool fresh = false;
      for (const auto& samples : factor_samples) {
        const auto& pick = samples[std::min<size_t>(i, samples.size() - 1)];
        fresh = fresh || i < samples.size();
        pp.parts.push_back(pick);
      }
      if (i > 0 && !fresh) {
        break;
      }
      out.push_back(PointRef{std::move(pp)});
    }
    return out;
  }
  if (const auto* pw = std::get_if<systems::PowerSystem>(&spec)) {
    return sample_points_in(*pw->base, cell, count);
  }
  if (const auto* tw = std::get_if<systems::TowerSystem>(&spec)) {
    const auto& ls = std::get<systems::LevelSet>(cell.v);
    const auto base_samples =
        ls.base ? sample_points_in(*tw->base, *ls.base, count)
                : enumerate_dense(tw->base, count);
    for (const auto& b : base_samples) {
      out.push_back(PointRef{systems::TowerPoint{
          std::make_shared<const PointRef>(b), ls.level}});
    }
    return out;
  }
  if (const auto* ld = std::get_if<systems::LadderSystem>(&spec)) {
    const auto& ls = std::get<systems::LevelSet>(cell.v);
    const auto base_samples =
        ls.base ? sample_points_in(*ld->base, *ls.base, count)
                : enumerate_dense(ld->base, count);
    for (const auto& b : base_samples) {
      out.push_back(PointRef{systems::TowerPoint{
          std::make_shared<const PointRef>(b), ls.level}});
    }
    return out;
  }
  throw_unsupported("no sampling rule for this system variant");
}

json ScanReport::to_json() const {
  json cells_json = json::array();
  for (const auto& cell : cells) {
    json c{{"u", cell.u.to_json()},
           {"v", cell.v.to_json()},
           {"outcome", intfam::outcome_name(cell.outcome)},
           {"samples", cell.per_sample}};
    if (cell.error) {
      c["error"] = *cell.error;
    }
    cells_json.push_back(c);
  }
  return json{{"cells", cells_json},
              {"verified", verified},
              {"refuted", refuted},
              {"inconclusive", inconclusive},
              {"errors", errors},
              {"gap", gap}};
}

ScanReport criterion_scan(SystemPtr x_system, SystemPtr y_system,
                          const ScanParams& params) {
  ScanReport report;
  const uint64_t gap = params.gap
                           ? *params.gap
                           : default_gap(*x_system, params.depth, *y_system);
  report.gap = gap;
  const auto us = basic_opens(*x_system, params.depth);
  const auto vs = basic_opens(*y_system, 1);
  DenseEnumeration dense(x_system);
  for (const auto& u : us) {
    for (const auto& v : vs) {
      ScanCell cell;
      cell.u = u;
      cell.v = v;
      try {
        auto ys = sample_points_in(*y_system, v, params.y_samples);
        if (ys.empty()) {
          throw_unsupported("no sample points in the Y cell");
        }
        // On finite rotations (singleton cells) also probe the canonical
        // base point against every cell: transfer sets must survive
        // phase-shifted neighborhoods, the negative-control geometry.
        if (std::holds_alternative<systems::CyclicRotation>(y_system->spec()) ||
            std::holds_alternative<systems::OdometerTruncation>(
                y_system->spec())) {
          const auto y0 = enumerate_dense(y_system, 1).at(0);
          if (!systems::contains(*y_system, v, y0)) {
            ys.push_back(y0);
          }
        }
        bool any_refuted = false;
        bool any_inconclusive = false;
        for (const auto& y : ys) {
          const auto res =
              witness_search(x_system, dense, y_system, y, v, u,
                             {params.horizon, gap, params.budget});
          cell.per_sample.push_back(res.verdict.to_json());
          any_refuted =
              any_refuted || res.verdict.outcome == Outcome::refuted;
          any_inconclusive =
              any_inconclusive || res.verdict.outcome == Outcome::inconclusive;
        }
        cell.outcome = any_refuted ? Outcome::refuted
                       : any_inconclusive ? Outcome::inconclusive
                                          : Outcome::verified;
      } catch (const Error& e) {
        cell.error = e.what();
        ++report.errors;
      }
      switch (cell.outcome) {
      case Outcome::verified:
        if (!cell.error) {
          ++report.verified;
        }
        break;
      case Outcome::refuted:
        ++report.refuted;
        break;
      case Outcome::inconclusive:
        if (!cell.error) {
          ++report.inconclusive;
        }
        break;
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

SearchOutcome central_criterion_check(
    SystemPtr x_system, const DenseEnumeration& dense, const OpenSetSpec& u,
    const intfam::SetGeneratorPtr& b_dyn_syndetic,
    const std::vector<intfam::SetGeneratorPtr>& thick_list, uint64_t horizon,
    uint64_t budget) {
  if (thick_list.empty()) {
    throw_invalid("central criterion check rejects an empty thick list");
  }
  if (!std::holds_alternative<intfam::DynSyndetic>(b_dyn_syndetic->spec())) {
    throw_invalid("B must be a dynamical syndetic generator");
  }
  SearchOutcome out;
  out.verdict.claim = {"central_criterion",
                       json{{"thick_count", thick_list.size()},
                            {"budget", budget},
                            {"u", u.to_json()}},
                       horizon};
  const BitWindow w_b = b_dyn_syndetic->window(horizon);
  std::vector<BitWindow> qs;
  for (const auto& a : thick_list) {
    const BitWindow w_a = a->window(horizon);
    if (!intfam::check_thick(w_a, std::min<uint64_t>(8, horizon)).verified()) {
      throw_invalid("every listed A must be thick-verified on the window");
    }
    qs.push_back(w_a.intersect(w_b));
  }
  uint64_t tested = 0;
  for (uint64_t i = 0; i < budget; ++i) {
    auto cand = dense.point_at(i);
    if (!cand) {
      break;
    }
    if (!systems::contains(*x_system, u, *cand)) {
      continue;
    }
    ++tested;
    const BitWindow nx = systems::return_set(*x_system, *cand, u, horizon);
    bool all = true;
    json hits = json::array();
    for (const auto& q : qs) {
      const BitWindow meet = nx.intersect(q);
      if (auto first = meet.first()) {
        hits.push_back(*first);
      } else {
        all = false;
        break;
      }
    }
    if (all) {
      out.verdict.outcome = Outcome::verified;
      out.verdict.scope = Scope::window;
      out.verdict.witness = json{{"x", cand->to_json()},
                                 {"enumeration_index", i},
                                 {"first_hits", hits}};
      return out;
    }
  }
  out.verdict.outcome = tested == 0 ? Outcome::inconclusive : Outcome::refuted;
  out.verdict.scope = Scope::budget;
  out.verdict.counterexample =
      json{{"candidates_tested", tested}, {"budget", budget}};
  return out;
}

// --- joining coverage ------------------------------------------------------------

namespace {

uint64_t cell_count(const System& sys, int depth) {
  const auto& spec = sys.spec();
  if (const auto* fs = std::get_if<systems::FullShift>(&spec)) {
    return pow_u64(static_cast<uint64_t>(fs->alphabet_size),
                   static_cast<uint64_t>(std::max(depth, 0)));
  }
  if (const auto* sc = std::get_if<systems::SubshiftClosure>(&spec)) {
    return pow_u64(sc->generator->alphabet().size(),
                   static_cast<uint64_t>(std::max(depth, 0)));
  }
  if (const auto* cr = std::get_if<systems::CyclicRotation>(&spec)) {
    return static_cast<uint64_t>(cr->modulus);
  }
  if (const auto* od = std::get_if<systems::OdometerTruncation>(&spec)) {
    return odometer_total(od->radixes);
  }
  if (const auto* cr = std::get_if<systems::CircleRotation>(&spec)) {
    return static_cast<uint64_t>(cr->partition_resolution);
  }
  if (const auto* pr = std::get_if<systems::ProductSystem>(&spec)) {
    uint64_t total = 1;
    for (const auto& f : pr->factors) {
      total *= cell_count(f, depth);
    }
    return total;
  }
  if (const auto* pw = std::get_if<systems::PowerSystem>(&spec)) {
    return cell_count(*pw->base, depth);
  }
  if (const auto* tw = std::get_if<systems::TowerSystem>(&spec)) {
    return static_cast<uint64_t>(tw->height) * cell_count(*tw->base, depth);
  }
  throw_unsupported("no cell grid for this system variant");
}

uint64_t cell_index(const System& sys, const PointRef& p, int depth) {
  const auto& spec = sys.spec();
  if (const auto* fs = std::get_if<systems::FullShift>(&spec)) {
    const auto& sp = std::get<systems::ShiftPoint>(p.v);
    uint64_t idx = 0;
    for (int i = 0; i < depth; ++i) {
      idx = idx * static_cast<uint64_t>(fs->alphabet_size) +
            static_cast<uint64_t>(sp.generator->symbol_at(sp.offset +
                                                          static_cast<uint64_t>(i)) -
                                  '0');
    }
    return idx;
  }
  if (const auto* sc = std::get_if<systems::SubshiftClosure>(&spec)) {
    const auto& sp = std::get<systems::ShiftPoint>(p.v);
    const auto k = sc->generator->alphabet().size();
    uint64_t idx = 0;
    for (int i = 0; i < depth; ++i) {
      idx = idx * k + static_cast<uint64_t>(
                          sp.generator->symbol_at(sp.offset +
                                                  static_cast<uint64_t>(i)) -
                          '0');
    }
    return idx;
  }
  if (std::holds_alternative<systems::CyclicRotation>(spec)) {
    return static_cast<uint64_t>(std::get<systems::CyclicPoint>(p.v).residue);
  }
  if (const auto* od = std::get_if<systems::OdometerTruncation>(&spec)) {
    uint64_t value = 0;
    const auto& digits = std::get<systems::OdometerPoint>(p.v).digits;
    for (size_t i = digits.size(); i-- > 0;) {
      value = value * static_cast<uint64_t>(od->radixes[i]) +
              static_cast<uint64_t>(digits[i]);
    }
    return value;
  }
  if (const auto* cr = std::get_if<systems::CircleRotation>(&spec)) {
    const auto& cp = std::get<systems::CirclePoint>(p.v);
    const BigInt idx =
        rational_floor(cp.value * Rational(cr->partition_resolution));
    return idx.convert_to<uint64_t>();
  }
  if (const auto* pr = std::get_if<systems::ProductSystem>(&spec)) {
    const auto& pp = std::get<systems::ProductPoint>(p.v);
    uint64_t idx = 0;
    for (size_t i = 0; i < pr->factors.size(); ++i) {
      idx = idx * cell_count(pr->factors[i], depth) +
            cell_index(pr->factors[i], pp.parts[i], depth);
    }
    return idx;
  }
  if (const auto* pw = std::get_if<systems::PowerSystem>(&spec)) {
    return cell_index(*pw->base, p, depth);
  }
  if (const auto* tw = std::get_if<systems::TowerSystem>(&spec)) {
    const auto& tp = std::get<systems::TowerPoint>(p.v);
    return static_cast<uint64_t>(tp.level - 1) * cell_count(*tw->base, depth) +
           cell_index(*tw->base, *tp.base, depth);
  }
  throw_unsupported("no cell grid for this system variant");
}

} // namespace

json JoiningApprox::to_json() const {
  return json{{"total_cells", total_cells},
              {"visited_cells", visited.size()},
              {"coverage", format_rational(coverage)},
              {"depth", depth},
              {"horizon", horizon}};
}

JoiningApprox joining_coverage(SystemPtr x_system, SystemPtr y_system,
                               const PointRef& x0, const PointRef& y0, int depth,
                               uint64_t horizon) {
  systems::validate_point(*x_system, x0);
  systems::validate_point(*y_system, y0);
  JoiningApprox out;
  out.depth = depth;
  out.horizon = horizon;
  const uint64_t cx = cell_count(*x_system, depth);
  const uint64_t cy = cell_count(*y_system, depth);
  out.total_cells = cx * cy;
  std::set<uint64_t> visited;
  PointRef px = x0;
  PointRef py = y0;
  for (uint64_t n = 0; n < horizon; ++n) {
    visited.insert(cell_index(*x_system, px, depth) * cy +
                   cell_index(*y_system, py, depth));
    if (n + 1 < horizon) {
      px = systems::step(*x_system, px);
      py = systems::step(*y_system, py);
    }
  }
  out.visited.assign(visited.begin(), visited.end());
  out.coverage = Rational(out.visited.size(), out.total_cells);
  return out;
}

// --- star checks ------------------------------------------------------------------

SearchOutcome star_sufficient_check(SystemPtr x_system, const OpenSetSpec& u,
                                    StarKind kind,
                                    const std::vector<intfam::CorpusMember>& corpus,
                                    uint64_t horizon, uint64_t budget) {
  SearchOutcome out;
  out.verdict.claim = {kind == StarKind::ip_star ? "ip_star" : "c_star",
                       json{{"corpus_size", corpus.size()},
                            {"budget", budget},
                            {"u", u.to_json()}},
                       horizon};
  DenseEnumeration dense(x_system);
  uint64_t tested = 0;
  json last_refutation;
  for (uint64_t i = 0; i < budget; ++i) {
    auto cand = dense.point_at(i);
    if (!cand) {
      break;
    }
    if (!systems::contains(*x_system, u, *cand)) {
      continue;
    }
    ++tested;
    const BitWindow w = systems::return_set(*x_system, *cand, u, horizon);
    const Verdict dv = intfam::dual_check(w, corpus, horizon);
    if (dv.verified()) {
      out.verdict.outcome = Outcome::verified;
      out.verdict.scope = Scope::corpus;
      out.verdict.witness = json{{"x", cand->to_json()},
                                 {"enumeration_index", i},
                                 {"corpus_size", corpus.size()}};
      return out;
    }
    last_refutation = dv.counterexample;
  }
  out.verdict.outcome = tested == 0 ? Outcome::inconclusive : Outcome::refuted;
  out.verdict.scope = Scope::budget;
  out.verdict.counterexample = json{{"candidates_tested", tested},
                                    {"last_refutation", last_refutation}};
  return out;
}

// --- witness transfers ---------------------------------------------------------------

WitnessRecord product_witness_transfer(const WitnessRecord& rec,
                                       const std::vector<uint64_t>& offsets,
                                       uint64_t horizon,
                                       const std::vector<OpenSetSpec>* targets) {
  if (!rec.syndetic_verdict.verified()) {
    throw_invalid("product transfer needs a verified witness record");
  }
  if (offsets.empty()) {
    throw_invalid("product transfer needs at least one offset");
  }
  if (targets && targets->size() != offsets.size()) {
    throw_invalid("product transfer needs one target open per offset");
  }
  const auto* cy = std::get_if<systems::Cylinder>(&rec.u.v);
  if (!cy) {
    throw_invalid("product transfer shifts cylinder sets");
  }
  systems::ProductSystem prod;
  systems::ProductPoint xprime;
  systems::ProductSpec w;
  for (size_t i = 0; i < offsets.size(); ++i) {
    const uint64_t k = offsets[i];
    prod.factors.push_back(*rec.x_system);
    xprime.parts.push_back(systems::step_n(*rec.x_system, rec.x, k));
    // sigma^k of an anchored cylinder on the full shift is the cylinder
    // of the word with its first k letters dropped.
    const std::string shifted =
        cy->word.substr(std::min<size_t>(k, cy->word.size()));
    OpenSetSpec image{systems::Cylinder{shifted}};
    if (targets) {
      if (!systems::spec_subset(*rec.x_system, image, (*targets)[i])) {
        throw_invalid("offset/open-set compatibility failure: sigma^k U is "
                      "not inside the supplied target");
      }
      w.parts.push_back((*targets)[i]);
    } else {
      w.parts.push_back(std::move(image));
    }
  }
  auto prod_sys = std::make_shared<const System>(System(std::move(prod)));
  const PointRef xp{std::move(xprime)};
  const OpenSetSpec wspec{std::move(w)};
  const BitWindow original = systems::transfer_set(
      *rec.x_system, *rec.y_system, rec.x, rec.y, rec.u, rec.v, horizon);
  const BitWindow transferred = systems::transfer_set(
      *prod_sys, *rec.y_system, xp, rec.y, wspec, rec.v, horizon);
  if (!original.is_subset_of(transferred)) {
    throw Error(ErrorCode::internal,
                "product transfer containment failed on the window");
  }
  WitnessRecord out{prod_sys,
                    rec.y_system,
                    xp,
                    rec.y,
                    wspec,
                    rec.v,
                    horizon,
                    rec.gap,
                    transferred,
                    intfam::check_syndetic(transferred, rec.gap)};
  return out;
}

PowerTransferResult power_witness_transfer(SystemPtr x_system, SystemPtr y_system,
                                           int64_t exponent, const OpenSetSpec& u,
                                           const OpenSetSpec& v,
                                           const WitnessSearchParams& params) {
  if (exponent < 1) {
    throw_invalid("power transfer needs exponent >= 1");
  }
  if (!y_system->minimal_by_construction()) {
    throw_invalid("power transfer needs a minimal-by-construction Y");
  }
  const auto e = static_cast<uint64_t>(exponent);
  auto tower = std::make_shared<const System>(
      System(systems::TowerSystem{y_system, exponent}));

  const auto ys = sample_points_in(*y_system, v, 1);
  if (ys.empty()) {
    throw_invalid("no sample point in V");
  }
  systems::LevelSet lv;
  lv.level = 1;
  lv.base = std::make_shared<const OpenSetSpec>(v);
  const OpenSetSpec v_tower{std::move(lv)};
  const PointRef y_tower{
      systems::TowerPoint{std::make_shared<const PointRef>(ys[0]), 1}};

  DenseEnumeration dense(x_system);
  PowerTransferResult result;
  const auto search =
      witness_search(x_system, dense, tower, y_tower, v_tower, u, params);
  result.verdict = search.verdict;
  result.mapped_window = BitWindow((params.horizon + e - 1) / e);
  if (!search.record) {
    return result;
  }
  result.tower_record = search.record;

  // Transfer times on level 1 are multiples of e; map k = e*k1 to k1.
  const BitWindow mapped = search.record->transfer_window.strided(e);
  result.mapped_window = mapped;
  const uint64_t mapped_gap = params.gap / e + 1;
  result.verdict = intfam::check_syndetic(mapped, mapped_gap);
  result.verdict.claim.family = "power_transfer";
  result.verdict.claim.parameters["exponent"] = exponent;
  result.verdict.claim.parameters["mapped_gap"] = mapped_gap;

  // Same window through the other route: (X, T^e) against (Y, S).
  auto power_sys = std::make_shared<const System>(
      System(systems::PowerSystem{x_system, exponent}));
  const BitWindow direct =
      systems::transfer_set(*power_sys, *y_system, search.record->x, ys[0], u, v,
                            mapped.horizon());
  result.tower_route.claim = {"power_route_agreement",
                              json{{"exponent", exponent}},
                              mapped.horizon()};
  if (direct == mapped) {
    result.tower_route.outcome = Outcome::verified;
    result.tower_route.witness = json{{"elements", mapped.count()}};
  } else {
    result.tower_route.outcome = Outcome::refuted;
    result.tower_route.counterexample = json{
        {"tower_count", mapped.count()}, {"direct_count", direct.count()}};
  }
  return result;
}

json WeakMixingReport::to_json() const {
  return json{{"pairs", pairs},
              {"thick_verified", thick_verified},
              {"thick_refuted", thick_refuted}};
}

WeakMixingReport weak_mixing_scan(SystemPtr sys, int depth, uint64_t run_length,
                                  uint64_t horizon) {
  WeakMixingReport report;
  const auto opens = basic_opens(*sys, depth);
  for (const auto& u : opens) {
    for (const auto& v : opens) {
      const BitWindow w = systems::hitting_set(*sys, u, v, horizon);
      const Verdict tv = intfam::check_thick(w, run_length);
      report.pairs.push_back(json{{"u", u.to_json()},
                                  {"v", v.to_json()},
                                  {"outcome", intfam::outcome_name(tv.outcome)}});
      if (tv.verified()) {
        ++report.thick_verified;
      } else {
        ++report.thick_refuted;
      }
    }
  }
  return report;
}

PointRef transitive_point(int alphabet_size, uint64_t modulus) {
  return PointRef{systems::ShiftPoint{
      symseq::make_generator(symseq::WordCatalog{alphabet_size, modulus}), 0}};
}

} // namespace dynlab::disjoint
