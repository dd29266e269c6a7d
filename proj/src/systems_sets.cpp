#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include <nlohmann/json.hpp>

#include "dynlab/error.hpp"
#include "dynlab/systems.hpp"

namespace dynlab::systems {

namespace {

uint64_t odometer_total(const std::vector<int64_t>& radixes) {
  uint64_t total = 1;
  for (int64_t r : radixes) {
    total *= static_cast<uint64_t>(r);
  }
  return total;
}

uint64_t odometer_value(const std::vector<int64_t>& radixes,
                        const std::vector<int64_t>& digits) {
  uint64_t value = 0;
  for (size_t i = digits.size(); i-- > 0;) {
    value = value * static_cast<uint64_t>(radixes[i]) +
            static_cast<uint64_t>(digits[i]);
  }
  return value;
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

BitWindow tile_pattern(const std::vector<bool>& pattern, uint64_t horizon) {
  BitWindow out(horizon);
  const uint64_t p = pattern.size();
  for (uint64_t n = 0; n < horizon; ++n) {
    if (pattern[n % p]) {
      out.set(n);
    }
  }
  return out;
}

bool arc_contains(const Arc& arc, const Rational& z) {
  if (arc.low < arc.high) {
    return z >= arc.low && z < arc.high;
  }
  return z >= arc.low || z < arc.high;
}

std::vector<std::pair<Rational, Rational>> arc_segments(const Arc& a) {
  std::vector<std::pair<Rational, Rational>> out;
  if (a.low < a.high) {
    out.emplace_back(a.low, a.high);
  } else {
    out.emplace_back(a.low, Rational(1));
    out.emplace_back(Rational(0), a.high);
  }
  return out;
}

bool arcs_intersect(const Arc& a, const Arc& b) {
  for (const auto& [alo, ahi] : arc_segments(a)) {
    if (alo >= ahi) {
      continue;
    }
    for (const auto& [blo, bhi] : arc_segments(b)) {
      if (blo >= bhi) {
        continue;
      }
      if (std::max(alo, blo) < std::min(ahi, bhi)) {
        return true;
      }
    }
  }
  return false;
}

Arc arc_shift(const Arc& a, const Rational& delta) {
  // [low + delta, high + delta) on the circle; preserves full arcs.
  if (a.low == 0 && a.high == 1) {
    return a;
  }
  return Arc{frac_mod1(a.low + delta), frac_mod1(a.high + delta)};
}

struct TowerTiming {
  uint64_t first = 0;    // smallest n reaching the target level
  uint64_t stride = 0;   // level revisit period
  uint64_t crossings = 0; // base steps applied at n = first
};

TowerTiming tower_timing(int64_t height, int64_t from_level, int64_t to_level) {
  TowerTiming t;
  const int64_t h = height;
  int64_t r = ((to_level - from_level) % h + h) % h;
  t.first = static_cast<uint64_t>(r);
  t.stride = static_cast<uint64_t>(h);
  t.crossings = static_cast<uint64_t>((from_level - 1 + r) / h);
  return t;
}

} // namespace

BitWindow return_set_naive(const System& sys, const PointRef& x,
                           const OpenSetSpec& u, uint64_t horizon) {
  validate_point(sys, x);
  const OpenSetSpec compiled = compile_spec(sys, u);
  BitWindow out(horizon);
  PointRef p = x;
  for (uint64_t n = 0; n < horizon; ++n) {
    if (contains(sys, compiled, p)) {
      out.set(n);
    }
    if (n + 1 < horizon) {
      p = step(sys, p);
    }
  }
  return out;
}

BitWindow return_set(const System& sys, const PointRef& x, const OpenSetSpec& u0,
                     uint64_t horizon) {
  validate_point(sys, x);
  const OpenSetSpec u = compile_spec(sys, u0);
  const auto& spec = sys.spec();

  if (std::holds_alternative<FullShift>(spec) ||
      std::holds_alternative<SubshiftClosure>(spec)) {
    const auto* cy = std::get_if<Cylinder>(&u.v);
    if (!cy) {
      throw_invalid("shift systems take cylinder (or metric ball) sets");
    }
    const auto& sp = std::get<ShiftPoint>(x.v);
    const std::string& w = cy->word;
    const std::string s = sp.generator->prefix(sp.offset + horizon + w.size());
    BitWindow out(horizon);
    for (uint64_t n = 0; n < horizon; ++n) {
      if (s.compare(sp.offset + n, w.size(), w) == 0) {
        out.set(n);
      }
    }
    return out;
  }

  if (const auto* cr = std::get_if<CyclicRotation>(&spec)) {
    const auto* rs = std::get_if<ResidueSet>(&u.v);
    if (!rs) {
      throw_invalid("cyclic rotations take residue sets");
    }
    const int64_t m = cr->modulus;
    const int64_t r0 = std::get<CyclicPoint>(x.v).residue;
    std::vector<bool> pattern(static_cast<size_t>(m), false);
    for (int64_t j = 0; j < m; ++j) {
      pattern[static_cast<size_t>(j)] = std::binary_search(
          rs->residues.begin(), rs->residues.end(), (r0 + j) % m);
    }
    return tile_pattern(pattern, horizon);
  }

  if (const auto* od = std::get_if<OdometerTruncation>(&spec)) {
    const auto* rs = std::get_if<ResidueSet>(&u.v);
    if (!rs) {
      throw_invalid("odometers take residue sets on values");
    }
    const uint64_t total = odometer_total(od->radixes);
    const uint64_t v0 =
        odometer_value(od->radixes, std::get<OdometerPoint>(x.v).digits);
    std::vector<bool> pattern(total, false);
    for (uint64_t j = 0; j < total; ++j) {
      pattern[j] = std::binary_search(rs->residues.begin(), rs->residues.end(),
                                      static_cast<int64_t>((v0 + j) % total));
    }
    return tile_pattern(pattern, horizon);
  }

  if (const auto* cr = std::get_if<CircleRotation>(&spec)) {
    const auto* arc = std::get_if<Arc>(&u.v);
    if (!arc) {
      throw_invalid("circle rotations take arcs");
    }
    const uint64_t q =
        boost::multiprecision::denominator(cr->angle).convert_to<uint64_t>();
    const Rational v0 = std::get<CirclePoint>(x.v).value;
    std::vector<bool> pattern(q, false);
    Rational pos = v0;
    for (uint64_t j = 0; j < q; ++j) {
      pattern[j] = arc_contains(*arc, pos);
      pos = frac_mod1(pos + cr->angle);
    }
    return tile_pattern(pattern, horizon);
  }

  if (const auto* pr = std::get_if<ProductSystem>(&spec)) {
    const auto* ps = std::get_if<ProductSpec>(&u.v);
    if (!ps || ps->parts.size() != pr->factors.size()) {
      throw_invalid("product systems take product specs of matching arity");
    }
    const auto& pp = std::get<ProductPoint>(x.v);
    BitWindow out(horizon, true);
    for (size_t i = 0; i < pr->factors.size(); ++i) {
      out = out.intersect(
          return_set(pr->factors[i], pp.parts[i], ps->parts[i], horizon));
    }
    return out;
  }

  if (const auto* pw = std::get_if<PowerSystem>(&spec)) {
    const uint64_t e = static_cast<uint64_t>(pw->exponent);
    const uint64_t base_h = horizon == 0 ? 0 : (horizon - 1) * e + 1;
    return return_set(*pw->base, x, u, base_h).strided(e).resized(horizon);
  }

  if (const auto* tw = std::get_if<TowerSystem>(&spec)) {
    const auto* ls = std::get_if<LevelSet>(&u.v);
    if (!ls) {
      throw_invalid("towers take level sets");
    }
    if (ls->level < 1 || ls->level > tw->height) {
      throw_invalid("level set outside tower range");
    }
    const auto& tp = std::get<TowerPoint>(x.v);
    const auto timing = tower_timing(tw->height, tp.level, ls->level);
    BitWindow out(horizon);
    if (timing.first >= horizon) {
      return out;
    }
    const uint64_t ks = (horizon - 1 - timing.first) / timing.stride + 1;
    if (!ls->base) {
      for (uint64_t k = 0; k < ks; ++k) {
        out.set(timing.first + k * timing.stride);
      }
      return out;
    }
    const BitWindow base =
        return_set(*tw->base, *tp.base, *ls->base, timing.crossings + ks);
    for (uint64_t k = 0; k < ks; ++k) {
      if (base.test(timing.crossings + k)) {
        out.set(timing.first + k * timing.stride);
      }
    }
    return out;
  }

  if (const auto* ld = std::get_if<LadderSystem>(&spec)) {
    const auto* ls = std::get_if<LevelSet>(&u.v);
    if (!ls) {
      throw_invalid("ladders take level sets");
    }
    const auto& tp = std::get<TowerPoint>(x.v);
    BitWindow out(horizon);
    const auto base_ok = [&](const PointRef& b) {
      return !ls->base || contains(*ld->base, *ls->base, b);
    };
    if (tp.level == 0) {
      if (ls->level == 0 && base_ok(*tp.base)) {
        return BitWindow(horizon, true);
      }
      return out;
    }
    if (ls->level == 0) {
      return out;
    }
    if (ls->level >= 2) {
      const int64_t n = tp.level - ls->level;
      if (n >= 0 && static_cast<uint64_t>(n) < horizon && base_ok(*tp.base)) {
        out.set(static_cast<uint64_t>(n));
      }
      return out;
    }
    // target level 1: reached at n0 = level-1, base runs from then on
    const uint64_t n0 = static_cast<uint64_t>(tp.level - 1);
    if (n0 >= horizon) {
      return out;
    }
    if (!ls->base) {
      for (uint64_t n = n0; n < horizon; ++n) {
        out.set(n);
      }
      return out;
    }
    const BitWindow base = return_set(*ld->base, *tp.base, *ls->base, horizon - n0);
    for (uint64_t k = 0; k + n0 < horizon; ++k) {
      if (base.test(k)) {
        out.set(k + n0);
      }
    }
    return out;
  }

  return return_set_naive(sys, x, u, horizon);
}

BitWindow transfer_set(const System& sys_x, const System& sys_y,
                       const PointRef& x, const PointRef& y,
                       const OpenSetSpec& u, const OpenSetSpec& v,
                       uint64_t horizon) {
  return return_set(sys_x, x, u, horizon)
      .intersect(return_set(sys_y, y, v, horizon));
}

BitWindow hitting_set(const System& sys, const OpenSetSpec& u0,
                      const OpenSetSpec& v0, uint64_t horizon) {
  const OpenSetSpec u = compile_spec(sys, u0);
  const OpenSetSpec v = compile_spec(sys, v0);
  const auto& spec = sys.spec();

  if (std::holds_alternative<FullShift>(spec)) {
    const auto* cu = std::get_if<Cylinder>(&u.v);
    const auto* cv = std::get_if<Cylinder>(&v.v);
    if (!cu || !cv) {
      throw_invalid("full shift hitting sets take cylinders");
    }
    // Two anchored word constraints at offset n are compatible exactly
    // when they agree on their overlap.
    BitWindow out(horizon);
    for (uint64_t n = 0; n < horizon; ++n) {
      bool ok = true;
      for (uint64_t i = n; i < cu->word.size() && i - n < cv->word.size(); ++i) {
        if (cu->word[i] != cv->word[i - n]) {
          ok = false;
          break;
        }
      }
      if (ok) {
        out.set(n);
      }
    }
    return out;
  }

  if (const auto* sc = std::get_if<SubshiftClosure>(&spec)) {
    const auto* cu = std::get_if<Cylinder>(&u.v);
    const auto* cv = std::get_if<Cylinder>(&v.v);
    if (!cu || !cv) {
      throw_invalid("subshift hitting sets take cylinders");
    }
    const uint64_t need = horizon + cu->word.size() + cv->word.size();
    if (sc->language_depth < need) {
      throw_unsupported("subshift language depth too small for this horizon");
    }
    const std::string lang = sc->generator->prefix(sc->language_depth);
    auto occurrences = [&](const std::string& w) {
      BitWindow occ(lang.size());
      if (w.empty()) {
        return BitWindow(lang.size(), true);
      }
      size_t pos = lang.find(w);
      while (pos != std::string::npos) {
        occ.set(pos);
        pos = lang.find(w, pos + 1);
      }
      return occ;
    };
    const BitWindow occ_u = occurrences(cu->word);
    const BitWindow occ_v = occurrences(cv->word);
    BitWindow out(horizon);
    const auto elems = occ_u.elements();
    for (uint64_t n = 0; n < horizon; ++n) {
      for (uint64_t i : elems) {
        if (i + n + cv->word.size() > lang.size()) {
          break;
        }
        if (occ_v.test(i + n)) {
          out.set(n);
          break;
        }
      }
    }
    return out;
  }

  if (const auto* cr = std::get_if<CyclicRotation>(&spec)) {
    const auto* ru = std::get_if<ResidueSet>(&u.v);
    const auto* rv = std::get_if<ResidueSet>(&v.v);
    if (!ru || !rv) {
      throw_invalid("cyclic rotations take residue sets");
    }
    const int64_t m = cr->modulus;
    std::vector<bool> pattern(static_cast<size_t>(m), false);
    for (int64_t j = 0; j < m; ++j) {
      for (int64_t a : ru->residues) {
        if (std::binary_search(rv->residues.begin(), rv->residues.end(),
                               (a + j) % m)) {
          pattern[static_cast<size_t>(j)] = true;
          break;
        }
      }
    }
    return tile_pattern(pattern, horizon);
  }

  if (const auto* od = std::get_if<OdometerTruncation>(&spec)) {
    const auto* ru = std::get_if<ResidueSet>(&u.v);
    const auto* rv = std::get_if<ResidueSet>(&v.v);
    if (!ru || !rv) {
      throw_invalid("odometers take residue sets");
    }
    const auto m = static_cast<int64_t>(odometer_total(od->radixes));
    std::vector<bool> pattern(static_cast<size_t>(m), false);
    for (int64_t j = 0; j < m; ++j) {
      for (int64_t a : ru->residues) {
        if (std::binary_search(rv->residues.begin(), rv->residues.end(),
                               (a + j) % m)) {
          pattern[static_cast<size_t>(j)] = true;
          break;
        }
      }
    }
    return tile_pattern(pattern, horizon);
  }

  if (const auto* cr = std::get_if<CircleRotation>(&spec)) {
    const auto* au = std::get_if<Arc>(&u.v);
    const auto* av = std::get_if<Arc>(&v.v);
    if (!au || !av) {
      throw_invalid("circle rotations take arcs");
    }
    const uint64_t q =
        boost::multiprecision::denominator(cr->angle).convert_to<uint64_t>();
    std::vector<bool> pattern(q, false);
    Rational shift{0};
    for (uint64_t j = 0; j < q; ++j) {
      // U meets T^-j V  iff  U intersects V - j*angle
      pattern[j] = arcs_intersect(*au, arc_shift(*av, -shift));
      shift = frac_mod1(shift + cr->angle);
    }
    return tile_pattern(pattern, horizon);
  }

  if (const auto* pr = std::get_if<ProductSystem>(&spec)) {
    const auto* pu = std::get_if<ProductSpec>(&u.v);
    const auto* pv = std::get_if<ProductSpec>(&v.v);
    if (!pu || !pv || pu->parts.size() != pr->factors.size() ||
        pv->parts.size() != pr->factors.size()) {
      throw_invalid("product hitting sets take product specs");
    }
    BitWindow out(horizon, true);
    for (size_t i = 0; i < pr->factors.size(); ++i) {
      out = out.intersect(
          hitting_set(pr->factors[i], pu->parts[i], pv->parts[i], horizon));
    }
    return out;
  }

  if (const auto* pw = std::get_if<PowerSystem>(&spec)) {
    const uint64_t e = static_cast<uint64_t>(pw->exponent);
    const uint64_t base_h = horizon == 0 ? 0 : (horizon - 1) * e + 1;
    return hitting_set(*pw->base, u, v, base_h).strided(e).resized(horizon);
  }

  if (const auto* tw = std::get_if<TowerSystem>(&spec)) {
    const auto* lu = std::get_if<LevelSet>(&u.v);
    const auto* lv = std::get_if<LevelSet>(&v.v);
    if (!lu || !lv) {
      throw_invalid("tower hitting sets take level sets");
    }
    const auto timing = tower_timing(tw->height, lu->level, lv->level);
    BitWindow out(horizon);
    if (timing.first >= horizon) {
      return out;
    }
    const uint64_t ks = (horizon - 1 - timing.first) / timing.stride + 1;
    if (!lu->base || !lv->base) {
      throw_unsupported("tower hitting sets need base specs on both sides");
    }
    const BitWindow base =
        hitting_set(*tw->base, *lu->base, *lv->base, timing.crossings + ks);
    for (uint64_t k = 0; k < ks; ++k) {
      if (base.test(timing.crossings + k)) {
        out.set(timing.first + k * timing.stride);
      }
    }
    return out;
  }

  throw_unsupported("hitting_set is not available for this system variant");
}

BitWindow proximal_run_set(const System& sys, const PointRef& x,
                           const PointRef& y, const Rational& eps,
                           uint64_t horizon) {
  validate_point(sys, x);
  validate_point(sys, y);
  if (eps <= 0) {
    throw_invalid("proximal_run_set requires eps > 0");
  }
  BitWindow out(horizon);
  PointRef a = x;
  PointRef b = y;
  for (uint64_t n = 0; n < horizon; ++n) {
    if (closer_than(sys, a, b, eps)) {
      out.set(n);
    }
    if (n + 1 < horizon) {
      a = step(sys, a);
      b = step(sys, b);
    }
  }
  return out;
}

std::optional<PointRef> sample_proximal_cell(const System& sys,
                                             const PointRef& x,
                                             const OpenSetSpec& region,
                                             const ProximalSearchParams& params) {
  const auto& spec = sys.spec();
  const bool is_full_shift = std::holds_alternative<FullShift>(spec);
  const bool is_subshift = std::holds_alternative<SubshiftClosure>(spec);
  if (!is_full_shift && !is_subshift) {
    throw_unsupported("sample_proximal_cell searches shift variants only");
  }
  const OpenSetSpec compiled = compile_spec(sys, region);
  const auto* cy = std::get_if<Cylinder>(&compiled.v);
  if (!cy) {
    throw_invalid("proximal cell regions must compile to cylinders");
  }

  auto accept = [&](const PointRef& z) -> bool {
    if (!contains(sys, compiled, z)) {
      return false;
    }
    const BitWindow runs = proximal_run_set(sys, x, z, params.eps, params.horizon);
    return runs.longest_run().length >= params.min_run;
  };

  uint64_t budget = params.budget;
  if (budget > 0 && contains(sys, compiled, x)) {
    --budget;
    if (accept(x)) {
      return x;
    }
  }

  if (is_subshift) {
    // Candidates are the declared shifts of the system generator.
    const auto& sc = std::get<SubshiftClosure>(spec);
    for (uint64_t t = 0; t < budget; ++t) {
      PointRef z{ShiftPoint{sc.generator, t}};
      if (accept(z)) {
        return z;
      }
    }
    return std::nullopt;
  }

  const auto& sp = std::get<ShiftPoint>(x.v);
  // Patched candidate: region word followed by x's own tail, available
  // whenever x has an exact eventually periodic form.
  if (auto form = sp.generator->eventually_periodic_form()) {
    const auto xe = symseq::shift_eventually_periodic(*form, sp.offset);
    const std::string& w = cy->word;
    const uint64_t join = std::max<uint64_t>(w.size(), xe.preperiod.size());
    symseq::EventuallyPeriodic ze;
    ze.preperiod = w;
    for (uint64_t i = w.size(); i < join; ++i) {
      ze.preperiod += xe.preperiod[i];
    }
    const uint64_t k = xe.period.empty()
                           ? 0
                           : (join - xe.preperiod.size()) % xe.period.size();
    ze.period = xe.period.substr(k) + xe.period.substr(0, k);
    PointRef z{ShiftPoint{symseq::make_generator(ze), 0}};
    if (budget > 0) {
      --budget;
      if (accept(z)) {
        return z;
      }
    }
  }

  // Small eventually periodic grid behind the region word.
  const auto& fs = std::get<FullShift>(spec);
  std::vector<std::string> periods;
  for (int a = 0; a < fs.alphabet_size; ++a) {
    periods.push_back(std::string(1, static_cast<char>('0' + a)));
  }
  for (int a = 0; a < fs.alphabet_size; ++a) {
    for (int b = 0; b < fs.alphabet_size; ++b) {
      std::string w;
      w += static_cast<char>('0' + a);
      w += static_cast<char>('0' + b);
      periods.push_back(w);
    }
  }
  for (const auto& per : periods) {
    if (budget == 0) {
      break;
    }
    --budget;
    PointRef z{ShiftPoint{
        symseq::make_generator(symseq::EventuallyPeriodic{cy->word, per}), 0}};
    if (accept(z)) {
      return z;
    }
  }
  return std::nullopt;
}

System make_surjective(const System& sys, int64_t depth) {
  return System(LadderSystem{std::make_shared<const System>(sys), depth});
}

std::vector<PointRef> enumerate_states(const System& sys) {
  const auto& spec = sys.spec();
  if (const auto* cr = std::get_if<CyclicRotation>(&spec)) {
    std::vector<PointRef> out;
    for (int64_t r = 0; r < cr->modulus; ++r) {
      out.push_back(PointRef{CyclicPoint{r}});
    }
    return out;
  }
  if (const auto* od = std::get_if<OdometerTruncation>(&spec)) {
    const uint64_t total = odometer_total(od->radixes);
    std::vector<PointRef> out;
    for (uint64_t v = 0; v < total; ++v) {
      out.push_back(PointRef{OdometerPoint{odometer_digits(od->radixes, v)}});
    }
    return out;
  }
  if (const auto* sc = std::get_if<SubshiftClosure>(&spec)) {
    auto form = sc->generator->eventually_periodic_form();
    if (!form) {
      throw_unsupported("state enumeration needs an eventually periodic "
                        "subshift generator");
    }
    std::vector<PointRef> out;
    std::set<std::string> seen;
    const uint64_t bound = form->preperiod.size() + form->period.size();
    for (uint64_t t = 0; t < bound; ++t) {
      PointRef p{ShiftPoint{sc->generator, t}};
      if (seen.insert(p.canonical_key()).second) {
        out.push_back(p);
      }
    }
    return out;
  }
  if (const auto* pr = std::get_if<ProductSystem>(&spec)) {
    std::vector<std::vector<PointRef>> factor_states;
    for (const auto& f : pr->factors) {
      factor_states.push_back(enumerate_states(f));
    }
    std::vector<PointRef> out{PointRef{ProductPoint{}}};
    for (const auto& states : factor_states) {
      std::vector<PointRef> next;
      for (const auto& partial : out) {
        for (const auto& s : states) {
          auto pp = std::get<ProductPoint>(partial.v);
          pp.parts.push_back(s);
          next.push_back(PointRef{std::move(pp)});
        }
      }
      out = std::move(next);
      if (out.size() > 1'000'000) {
        throw_unsupported("product state space too large to enumerate");
      }
    }
    return out;
  }
  if (const auto* pw = std::get_if<PowerSystem>(&spec)) {
    return enumerate_states(*pw->base);
  }
  if (const auto* tw = std::get_if<TowerSystem>(&spec)) {
    std::vector<PointRef> out;
    for (const auto& b : enumerate_states(*tw->base)) {
      for (int64_t level = 1; level <= tw->height; ++level) {
        out.push_back(
            PointRef{TowerPoint{std::make_shared<const PointRef>(b), level}});
      }
    }
    return out;
  }
  if (const auto* ld = std::get_if<LadderSystem>(&spec)) {
    std::vector<PointRef> out;
    for (const auto& b : enumerate_states(*ld->base)) {
      for (int64_t level = 0; level <= ld->depth; ++level) {
        out.push_back(
            PointRef{TowerPoint{std::make_shared<const PointRef>(b), level}});
      }
    }
    return out;
  }
  throw_unsupported("state enumeration needs a finite-presentation system");
}

std::vector<PointRef> surjectivity_defect(const System& sys) {
  const auto states = enumerate_states(sys);
  std::set<std::string> covered;
  for (const auto& s : states) {
    covered.insert(step(sys, s).canonical_key());
  }
  std::vector<PointRef> out;
  for (const auto& s : states) {
    if (!covered.count(s.canonical_key())) {
      out.push_back(s);
    }
  }
  return out;
}

std::optional<uint64_t> first_visit(const System& sys, const PointRef& y,
                                    const OpenSetSpec& v, uint64_t horizon) {
  const OpenSetSpec compiled = compile_spec(sys, v);
  PointRef p = y;
  for (uint64_t n = 0; n < horizon; ++n) {
    if (contains(sys, compiled, p)) {
      return n;
    }
    p = step(sys, p);
  }
  return std::nullopt;
}

OpenSetSpec preimage_spec(const System& sys, const OpenSetSpec& v0, uint64_t k) {
  const OpenSetSpec v = compile_spec(sys, v0);
  const auto& spec = sys.spec();
  if (const auto* cr = std::get_if<CyclicRotation>(&spec)) {
    const auto* rs = std::get_if<ResidueSet>(&v.v);
    if (!rs) {
      throw_invalid("cyclic preimages take residue sets");
    }
    ResidueSet out;
    const int64_t m = cr->modulus;
    const int64_t shift = static_cast<int64_t>(k % static_cast<uint64_t>(m));
    for (int64_t r : rs->residues) {
      out.residues.push_back(((r - shift) % m + m) % m);
    }
    std::sort(out.residues.begin(), out.residues.end());
    return OpenSetSpec{std::move(out)};
  }
  if (const auto* od = std::get_if<OdometerTruncation>(&spec)) {
    const auto* rs = std::get_if<ResidueSet>(&v.v);
    if (!rs) {
      throw_invalid("odometer preimages take residue sets");
    }
    ResidueSet out;
    const auto m = static_cast<int64_t>(odometer_total(od->radixes));
    const int64_t shift = static_cast<int64_t>(k % static_cast<uint64_t>(m));
    for (int64_t r : rs->residues) {
      out.residues.push_back(((r - shift) % m + m) % m);
    }
    std::sort(out.residues.begin(), out.residues.end());
    return OpenSetSpec{std::move(out)};
  }
  if (const auto* cr = std::get_if<CircleRotation>(&spec)) {
    const auto* arc = std::get_if<Arc>(&v.v);
    if (!arc) {
      throw_invalid("circle preimages take arcs");
    }
    return OpenSetSpec{arc_shift(*arc, -Rational(k) * cr->angle)};
  }
  throw_unsupported("preimage_spec supports rotation-like variants");
}

} // namespace dynlab::systems
