#include "dynlab/systems.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dynlab/error.hpp"

namespace dynlab::systems {

using nlohmann::json;

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

struct SystemValidator {
  void operator()(const FullShift& fs) const {
    if (fs.alphabet_size < 2 || fs.alphabet_size > 10) {
      throw_invalid("full shift alphabet size must be in [2, 10]");
    }
  }
  void operator()(const SubshiftClosure& sc) const {
    if (!sc.generator) {
      throw_invalid("subshift closure needs a generator");
    }
    if (sc.language_depth < 1) {
      throw_invalid("subshift language depth must be >= 1");
    }
  }
  void operator()(const CyclicRotation& cr) const {
    if (cr.modulus < 1) {
      throw_invalid("cyclic rotation modulus must be >= 1");
    }
  }
  void operator()(const OdometerTruncation& od) const {
    if (od.radixes.empty()) {
      throw_invalid("odometer needs at least one radix");
    }
    for (int64_t r : od.radixes) {
      if (r < 2) {
        throw_invalid("odometer radixes must be >= 2");
      }
    }
  }
  void operator()(const CircleRotation& cr) const {
    if (cr.angle <= 0 || cr.angle >= 1) {
      throw_invalid("circle rotation angle must lie in (0, 1)");
    }
    if (cr.partition_resolution < 1) {
      throw_invalid("circle rotation partition resolution must be >= 1");
    }
  }
  void operator()(const ProductSystem& pr) const {
    if (pr.factors.empty()) {
      throw_invalid("product system needs at least one factor");
    }
  }
  void operator()(const PowerSystem& pw) const {
    if (!pw.base || pw.exponent < 1) {
      throw_invalid("power system needs a base and exponent >= 1");
    }
  }
  void operator()(const TowerSystem& tw) const {
    if (!tw.base || tw.height < 1) {
      throw_invalid("tower needs a base and height >= 1");
    }
  }
  void operator()(const LadderSystem& ld) const {
    if (!ld.base || ld.depth < 1) {
      throw_invalid("ladder needs a base and depth >= 1");
    }
  }
};

uint64_t lcm_u64(uint64_t a, uint64_t b) { return std::lcm(a, b); }

} // namespace

System::System(Spec spec) : spec_(std::move(spec)) {
  std::visit(SystemValidator{}, spec_);
}

bool System::minimal_by_construction() const {
  if (std::holds_alternative<CyclicRotation>(spec_) ||
      std::holds_alternative<OdometerTruncation>(spec_) ||
      std::holds_alternative<CircleRotation>(spec_)) {
    return true;
  }
  if (const auto* tw = std::get_if<TowerSystem>(&spec_)) {
    return tw->base->minimal_by_construction();
  }
  return false;
}

std::optional<uint64_t> System::period_hint() const {
  if (const auto* cr = std::get_if<CyclicRotation>(&spec_)) {
    return static_cast<uint64_t>(cr->modulus);
  }
  if (const auto* od = std::get_if<OdometerTruncation>(&spec_)) {
    return odometer_total(od->radixes);
  }
  if (const auto* cr = std::get_if<CircleRotation>(&spec_)) {
    return boost::multiprecision::denominator(cr->angle).convert_to<uint64_t>();
  }
  if (const auto* sc = std::get_if<SubshiftClosure>(&spec_)) {
    if (auto ep = sc->generator->eventually_periodic_form()) {
      if (ep->preperiod.empty()) {
        return ep->period.size();
      }
    }
    return std::nullopt;
  }
  if (const auto* pr = std::get_if<ProductSystem>(&spec_)) {
    uint64_t acc = 1;
    for (const auto& f : pr->factors) {
      auto h = f.period_hint();
      if (!h) {
        return std::nullopt;
      }
      acc = lcm_u64(acc, *h);
    }
    return acc;
  }
  if (const auto* pw = std::get_if<PowerSystem>(&spec_)) {
    auto h = pw->base->period_hint();
    if (!h) {
      return std::nullopt;
    }
    return *h / std::gcd(*h, static_cast<uint64_t>(pw->exponent));
  }
  if (const auto* tw = std::get_if<TowerSystem>(&spec_)) {
    auto h = tw->base->period_hint();
    if (!h) {
      return std::nullopt;
    }
    return *h * static_cast<uint64_t>(tw->height);
  }
  return std::nullopt;
}

std::string System::canonical_key() const { return to_json().dump(); }

json System::to_json() const {
  json j;
  if (const auto* fs = std::get_if<FullShift>(&spec_)) {
    j["variant"] = "full_shift";
    j["alphabet_size"] = fs->alphabet_size;
  } else if (const auto* sc = std::get_if<SubshiftClosure>(&spec_)) {
    j["variant"] = "subshift_closure";
    j["generator"] = sc->generator->to_json();
    j["language_depth"] = sc->language_depth;
  } else if (const auto* cr = std::get_if<CyclicRotation>(&spec_)) {
    j["variant"] = "cyclic_rotation";
    j["modulus"] = cr->modulus;
  } else if (const auto* od = std::get_if<OdometerTruncation>(&spec_)) {
    j["variant"] = "odometer";
    j["radixes"] = od->radixes;
  } else if (const auto* cr = std::get_if<CircleRotation>(&spec_)) {
    j["variant"] = "circle_rotation";
    j["angle"] = format_rational(cr->angle);
    j["partition_resolution"] = cr->partition_resolution;
  } else if (const auto* pr = std::get_if<ProductSystem>(&spec_)) {
    j["variant"] = "product";
    json factors = json::array();
    for (const auto& f : pr->factors) {
      factors.push_back(f.to_json());
    }
    j["factors"] = factors;
  } else if (const auto* pw = std::get_if<PowerSystem>(&spec_)) {
    j["variant"] = "power";
    j["base"] = pw->base->to_json();
    j["exponent"] = pw->exponent;
  } else if (const auto* tw = std::get_if<TowerSystem>(&spec_)) {
    j["variant"] = "tower";
    j["base"] = tw->base->to_json();
    j["height"] = tw->height;
  } else if (const auto* ld = std::get_if<LadderSystem>(&spec_)) {
    j["variant"] = "ladder";
    j["base"] = ld->base->to_json();
    j["depth"] = ld->depth;
  }
  return j;
}

System System::from_json(const json& j) {
  if (!j.is_object() || !j.contains("variant")) {
    throw_parse("system spec must be an object with a 'variant' field");
  }
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "full_shift") {
    return System(FullShift{j.at("alphabet_size").get<int>()});
  }
  if (variant == "subshift_closure") {
    SubshiftClosure sc;
    sc.generator = symseq::SymbolGenerator::from_json(j.at("generator"));
    sc.language_depth = j.value("language_depth", uint64_t{4096});
    return System(std::move(sc));
  }
  if (variant == "cyclic_rotation") {
    return System(CyclicRotation{j.at("modulus").get<int64_t>()});
  }
  if (variant == "odometer") {
    return System(OdometerTruncation{j.at("radixes").get<std::vector<int64_t>>()});
  }
  if (variant == "circle_rotation") {
    CircleRotation cr;
    cr.angle = parse_rational(j.at("angle").get<std::string>());
    cr.partition_resolution = j.value("partition_resolution", 8);
    return System(std::move(cr));
  }
  if (variant == "product") {
    ProductSystem pr;
    for (const auto& f : j.at("factors")) {
      pr.factors.push_back(System::from_json(f));
    }
    return System(std::move(pr));
  }
  if (variant == "power") {
    PowerSystem pw;
    pw.base = std::make_shared<const System>(System::from_json(j.at("base")));
    pw.exponent = j.at("exponent").get<int64_t>();
    return System(std::move(pw));
  }
  if (variant == "tower") {
    TowerSystem tw;
    tw.base = std::make_shared<const System>(System::from_json(j.at("base")));
    tw.height = j.at("height").get<int64_t>();
    return System(std::move(tw));
  }
  if (variant == "ladder") {
    LadderSystem ld;
    ld.base = std::make_shared<const System>(System::from_json(j.at("base")));
    ld.depth = j.at("depth").get<int64_t>();
    return System(std::move(ld));
  }
  throw_parse("unknown system variant: " + variant);
}

// --- points -----------------------------------------------------------------

std::string PointRef::canonical_key() const {
  if (const auto* sp = std::get_if<ShiftPoint>(&v)) {
    if (auto ep = sp->generator->eventually_periodic_form()) {
      auto shifted = symseq::shift_eventually_periodic(*ep, sp->offset);
      return "ep:" + shifted.preperiod + "|" + shifted.period;
    }
    return "shift:" + sp->generator->canonical_key() + "@" +
           std::to_string(sp->offset);
  }
  if (const auto* cp = std::get_if<CyclicPoint>(&v)) {
    return "cyc:" + std::to_string(cp->residue);
  }
  if (const auto* op = std::get_if<OdometerPoint>(&v)) {
    std::string key = "odo:";
    for (int64_t d : op->digits) {
      key += std::to_string(d) + ",";
    }
    return key;
  }
  if (const auto* cp = std::get_if<CirclePoint>(&v)) {
    return "circ:" + format_rational(cp->value);
  }
  if (const auto* pp = std::get_if<ProductPoint>(&v)) {
    std::string key = "prod:(";
    for (const auto& part : pp->parts) {
      key += part.canonical_key() + ";";
    }
    return key + ")";
  }
  const auto& tp = std::get<TowerPoint>(v);
  return "tower:(" + tp.base->canonical_key() + ")@" + std::to_string(tp.level);
}

json PointRef::to_json() const {
  json j;
  if (const auto* sp = std::get_if<ShiftPoint>(&v)) {
    j["variant"] = "shift";
    j["generator"] = sp->generator->to_json();
    j["offset"] = sp->offset;
  } else if (const auto* cp = std::get_if<CyclicPoint>(&v)) {
    j["variant"] = "cyclic";
    j["residue"] = cp->residue;
  } else if (const auto* op = std::get_if<OdometerPoint>(&v)) {
    j["variant"] = "odometer";
    j["digits"] = op->digits;
  } else if (const auto* cp = std::get_if<CirclePoint>(&v)) {
    j["variant"] = "circle";
    j["value"] = format_rational(cp->value);
  } else if (const auto* pp = std::get_if<ProductPoint>(&v)) {
    j["variant"] = "product";
    json parts = json::array();
    for (const auto& part : pp->parts) {
      parts.push_back(part.to_json());
    }
    j["parts"] = parts;
  } else if (const auto* tp = std::get_if<TowerPoint>(&v)) {
    j["variant"] = "tower";
    j["base"] = tp->base->to_json();
    j["level"] = tp->level;
  }
  return j;
}

PointRef PointRef::from_json(const json& j) {
  if (!j.is_object() || !j.contains("variant")) {
    throw_parse("point spec must be an object with a 'variant' field");
  }
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "shift") {
    return PointRef{ShiftPoint{symseq::SymbolGenerator::from_json(j.at("generator")),
                               j.value("offset", uint64_t{0})}};
  }
  if (variant == "cyclic") {
    return PointRef{CyclicPoint{j.at("residue").get<int64_t>()}};
  }
  if (variant == "odometer") {
    return PointRef{OdometerPoint{j.at("digits").get<std::vector<int64_t>>()}};
  }
  if (variant == "circle") {
    return PointRef{CirclePoint{parse_rational(j.at("value").get<std::string>())}};
  }
  if (variant == "product") {
    ProductPoint pp;
    for (const auto& part : j.at("parts")) {
      pp.parts.push_back(PointRef::from_json(part));
    }
    return PointRef{std::move(pp)};
  }
  if (variant == "tower") {
    TowerPoint tp;
    tp.base = std::make_shared<const PointRef>(PointRef::from_json(j.at("base")));
    tp.level = j.at("level").get<int64_t>();
    return PointRef{std::move(tp)};
  }
  throw_parse("unknown point variant: " + variant);
}

// --- open sets ---------------------------------------------------------------

std::string OpenSetSpec::canonical_key() const { return to_json().dump(); }

json OpenSetSpec::to_json() const {
  json j;
  if (const auto* cy = std::get_if<Cylinder>(&v)) {
    j["variant"] = "cylinder";
    j["word"] = cy->word;
  } else if (const auto* rs = std::get_if<ResidueSet>(&v)) {
    j["variant"] = "residue_set";
    j["residues"] = rs->residues;
  } else if (const auto* arc = std::get_if<Arc>(&v)) {
    j["variant"] = "arc";
    j["low"] = format_rational(arc->low);
    j["high"] = format_rational(arc->high);
  } else if (const auto* ls = std::get_if<LevelSet>(&v)) {
    j["variant"] = "level_set";
    j["level"] = ls->level;
    if (ls->base) {
      j["base"] = ls->base->to_json();
    }
  } else if (const auto* ps = std::get_if<ProductSpec>(&v)) {
    j["variant"] = "product";
    json parts = json::array();
    for (const auto& part : ps->parts) {
      parts.push_back(part.to_json());
    }
    j["parts"] = parts;
  } else if (const auto* mb = std::get_if<MetricBall>(&v)) {
    j["variant"] = "metric_ball";
    j["center"] = mb->center->to_json();
    j["radius"] = format_rational(mb->radius);
  }
  return j;
}

OpenSetSpec OpenSetSpec::from_json(const json& j) {
  if (!j.is_object() || !j.contains("variant")) {
    throw_parse("open set spec must be an object with a 'variant' field");
  }
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "cylinder") {
    return OpenSetSpec{Cylinder{j.at("word").get<std::string>()}};
  }
  if (variant == "residue_set") {
    ResidueSet rs{j.at("residues").get<std::vector<int64_t>>()};
    std::sort(rs.residues.begin(), rs.residues.end());
    rs.residues.erase(std::unique(rs.residues.begin(), rs.residues.end()),
                      rs.residues.end());
    if (rs.residues.empty()) {
      throw_parse("residue set must be nonempty");
    }
    return OpenSetSpec{std::move(rs)};
  }
  if (variant == "arc") {
    Arc arc{parse_rational(j.at("low").get<std::string>()),
            parse_rational(j.at("high").get<std::string>())};
    if (arc.low < 0 || arc.low >= 1 || arc.high < 0 || arc.high > 1 ||
        arc.low == arc.high) {
      throw_parse("arcs are nondegenerate with endpoints in [0, 1]");
    }
    return OpenSetSpec{std::move(arc)};
  }
  if (variant == "level_set") {
    LevelSet ls;
    ls.level = j.at("level").get<int64_t>();
    if (j.contains("base")) {
      ls.base = std::make_shared<const OpenSetSpec>(
          OpenSetSpec::from_json(j.at("base")));
    }
    return OpenSetSpec{std::move(ls)};
  }
  if (variant == "product") {
    ProductSpec ps;
    for (const auto& part : j.at("parts")) {
      ps.parts.push_back(OpenSetSpec::from_json(part));
    }
    return OpenSetSpec{std::move(ps)};
  }
  if (variant == "metric_ball") {
    MetricBall mb;
    mb.center =
        std::make_shared<const PointRef>(PointRef::from_json(j.at("center")));
    mb.radius = parse_rational(j.at("radius").get<std::string>());
    return OpenSetSpec{std::move(mb)};
  }
  throw_parse("unknown open set variant: " + variant);
}

// --- kinematics ---------------------------------------------------------------

void validate_point(const System& sys, const PointRef& x) {
  const auto& spec = sys.spec();
  if (const auto* fs = std::get_if<FullShift>(&spec)) {
    const auto* sp = std::get_if<ShiftPoint>(&x.v);
    if (!sp) {
      throw_invalid("full shift points are shift points");
    }
    for (char c : sp->generator->alphabet()) {
      if (c >= '0' + fs->alphabet_size) {
        throw_invalid("point uses letters outside the shift alphabet");
      }
    }
    return;
  }
  if (const auto* sc = std::get_if<SubshiftClosure>(&spec)) {
    const auto* sp = std::get_if<ShiftPoint>(&x.v);
    if (!sp) {
      throw_invalid("subshift points are shift points");
    }
    if (sp->generator->canonical_key() != sc->generator->canonical_key()) {
      throw_invalid("subshift point must be a declared shift of the system "
                    "generator");
    }
    return;
  }
  if (const auto* cr = std::get_if<CyclicRotation>(&spec)) {
    const auto* cp = std::get_if<CyclicPoint>(&x.v);
    if (!cp || cp->residue < 0 || cp->residue >= cr->modulus) {
      throw_invalid("cyclic point out of range");
    }
    return;
  }
  if (const auto* od = std::get_if<OdometerTruncation>(&spec)) {
    const auto* op = std::get_if<OdometerPoint>(&x.v);
    if (!op || op->digits.size() != od->radixes.size()) {
      throw_invalid("odometer point has wrong digit count");
    }
    for (size_t i = 0; i < op->digits.size(); ++i) {
      if (op->digits[i] < 0 || op->digits[i] >= od->radixes[i]) {
        throw_invalid("odometer digit out of range");
      }
    }
    return;
  }
  if (std::holds_alternative<CircleRotation>(spec)) {
    const auto* cp = std::get_if<CirclePoint>(&x.v);
    if (!cp || cp->value < 0 || cp->value >= 1) {
      throw_invalid("circle point must lie in [0, 1)");
    }
    return;
  }
  if (const auto* pr = std::get_if<ProductSystem>(&spec)) {
    const auto* pp = std::get_if<ProductPoint>(&x.v);
    if (!pp || pp->parts.size() != pr->factors.size()) {
      throw_invalid("product point arity mismatch");
    }
    for (size_t i = 0; i < pp->parts.size(); ++i) {
      validate_point(pr->factors[i], pp->parts[i]);
    }
    return;
  }
  if (const auto* pw = std::get_if<PowerSystem>(&spec)) {
    validate_point(*pw->base, x);
    return;
  }
  if (const auto* tw = std::get_if<TowerSystem>(&spec)) {
    const auto* tp = std::get_if<TowerPoint>(&x.v);
    if (!tp || tp->level < 1 || tp->level > tw->height) {
      throw_invalid("tower point level out of range");
    }
    validate_point(*tw->base, *tp->base);
    return;
  }
  if (const auto* ld = std::get_if<LadderSystem>(&spec)) {
    const auto* tp = std::get_if<TowerPoint>(&x.v);
    if (!tp || tp->level < 0 || tp->level > ld->depth) {
      throw_invalid("ladder point level out of range");
    }
    validate_point(*ld->base, *tp->base);
    return;
  }
  throw Error(ErrorCode::internal, "unhandled system variant");
}

PointRef step(const System& sys, const PointRef& x) {
  const auto& spec = sys.spec();
  if (std::holds_alternative<FullShift>(spec) ||
      std::holds_alternative<SubshiftClosure>(spec)) {
    auto sp = std::get<ShiftPoint>(x.v);
    sp.offset += 1;
    return PointRef{sp};
  }
  if (const auto* cr = std::get_if<CyclicRotation>(&spec)) {
    const auto& cp = std::get<CyclicPoint>(x.v);
    return PointRef{CyclicPoint{(cp.residue + 1) % cr->modulus}};
  }
  if (const auto* od = std::get_if<OdometerTruncation>(&spec)) {
    const auto& op = std::get<OdometerPoint>(x.v);
    const uint64_t total = odometer_total(od->radixes);
    const uint64_t value = (odometer_value(od->radixes, op.digits) + 1) % total;
    return PointRef{OdometerPoint{odometer_digits(od->radixes, value)}};
  }
  if (const auto* cr = std::get_if<CircleRotation>(&spec)) {
    const auto& cp = std::get<CirclePoint>(x.v);
    return PointRef{CirclePoint{frac_mod1(cp.value + cr->angle)}};
  }
  if (const auto* pr = std::get_if<ProductSystem>(&spec)) {
    const auto& pp = std::get<ProductPoint>(x.v);
    ProductPoint out;
    out.parts.reserve(pp.parts.size());
    for (size_t i = 0; i < pp.parts.size(); ++i) {
      out.parts.push_back(step(pr->factors[i], pp.parts[i]));
    }
    return PointRef{std::move(out)};
  }
  if (const auto* pw = std::get_if<PowerSystem>(&spec)) {
    return step_n(*pw->base, x, static_cast<uint64_t>(pw->exponent));
  }
  if (const auto* tw = std::get_if<TowerSystem>(&spec)) {
    const auto& tp = std::get<TowerPoint>(x.v);
    if (tp.level < tw->height) {
      return PointRef{TowerPoint{tp.base, tp.level + 1}};
    }
    return PointRef{TowerPoint{
        std::make_shared<const PointRef>(step(*tw->base, *tp.base)), 1}};
  }
  if (const auto* ld = std::get_if<LadderSystem>(&spec)) {
    const auto& tp = std::get<TowerPoint>(x.v);
    if (tp.level == 0) {
      return x; // frozen rim of the compactification
    }
    if (tp.level == 1) {
      return PointRef{TowerPoint{
          std::make_shared<const PointRef>(step(*ld->base, *tp.base)), 1}};
    }
    return PointRef{TowerPoint{tp.base, tp.level - 1}};
  }
  throw Error(ErrorCode::internal, "unhandled system variant in step");
}

PointRef step_n(const System& sys, const PointRef& x, uint64_t n) {
  PointRef p = x;
  for (uint64_t i = 0; i < n; ++i) {
    p = step(sys, p);
  }
  return p;
}

std::vector<PointRef> trajectory(const System& sys, const PointRef& x,
                                 uint64_t horizon) {
  validate_point(sys, x);
  std::vector<PointRef> out;
  out.reserve(horizon);
  PointRef p = x;
  for (uint64_t i = 0; i < horizon; ++i) {
    out.push_back(p);
    if (i + 1 < horizon) {
      p = step(sys, p);
    }
  }
  return out;
}

// --- metric -------------------------------------------------------------------

namespace {

bool arc_contains(const Arc& arc, const Rational& z) {
  if (arc.low < arc.high) {
    return z >= arc.low && z < arc.high;
  }
  // wraps through 0
  return z >= arc.low || z < arc.high;
}

Rational circle_distance(const Rational& a, const Rational& b) {
  Rational d = a - b;
  if (d < 0) {
    d = -d;
  }
  const Rational other = 1 - d;
  return d < other ? d : other;
}

} // namespace

bool closer_than(const System& sys, const PointRef& x, const PointRef& y,
                 const Rational& eps) {
  if (eps <= 0) {
    return false;
  }
  const auto& spec = sys.spec();
  if (std::holds_alternative<FullShift>(spec) ||
      std::holds_alternative<SubshiftClosure>(spec)) {
    if (eps > 1) {
      return true;
    }
    const auto& a = std::get<ShiftPoint>(x.v);
    const auto& b = std::get<ShiftPoint>(y.v);
    const unsigned t = agree_prefix_len(eps);
    for (unsigned i = 0; i < t; ++i) {
      if (a.generator->symbol_at(a.offset + i) !=
          b.generator->symbol_at(b.offset + i)) {
        return false;
      }
    }
    return true;
  }
  if (const auto* cr = std::get_if<CyclicRotation>(&spec)) {
    const auto& a = std::get<CyclicPoint>(x.v);
    const auto& b = std::get<CyclicPoint>(y.v);
    const int64_t diff = std::abs(a.residue - b.residue);
    const int64_t circ = std::min(diff, cr->modulus - diff);
    return Rational(circ, cr->modulus) < eps;
  }
  if (const auto* od = std::get_if<OdometerTruncation>(&spec)) {
    const uint64_t total = odometer_total(od->radixes);
    const auto va = odometer_value(od->radixes,
                                   std::get<OdometerPoint>(x.v).digits);
    const auto vb = odometer_value(od->radixes,
                                   std::get<OdometerPoint>(y.v).digits);
    const uint64_t diff = va > vb ? va - vb : vb - va;
    const uint64_t circ = std::min(diff, total - diff);
    return Rational(circ, total) < eps;
  }
  if (std::holds_alternative<CircleRotation>(spec)) {
    return circle_distance(std::get<CirclePoint>(x.v).value,
                           std::get<CirclePoint>(y.v).value) < eps;
  }
  if (const auto* pr = std::get_if<ProductSystem>(&spec)) {
    const auto& a = std::get<ProductPoint>(x.v);
    const auto& b = std::get<ProductPoint>(y.v);
    for (size_t i = 0; i < pr->factors.size(); ++i) {
      if (!closer_than(pr->factors[i], a.parts[i], b.parts[i], eps)) {
        return false;
      }
    }
    return true;
  }
  if (const auto* pw = std::get_if<PowerSystem>(&spec)) {
    return closer_than(*pw->base, x, y, eps);
  }
  if (const auto* tw = std::get_if<TowerSystem>(&spec)) {
    const auto& a = std::get<TowerPoint>(x.v);
    const auto& b = std::get<TowerPoint>(y.v);
    if (a.level != b.level && eps <= 1) {
      return false;
    }
    return closer_than(*tw->base, *a.base, *b.base, eps);
  }
  if (const auto* ld = std::get_if<LadderSystem>(&spec)) {
    const auto& a = std::get<TowerPoint>(x.v);
    const auto& b = std::get<TowerPoint>(y.v);
    if (a.level != b.level && eps <= 1) {
      return false;
    }
    return closer_than(*ld->base, *a.base, *b.base, eps);
  }
  throw Error(ErrorCode::internal, "unhandled system variant in closer_than");
}

TruncatedDistance distance_truncated(const System& sys, const PointRef& x,
                                     const PointRef& y, unsigned depth) {
  const auto& spec = sys.spec();
  if (std::holds_alternative<FullShift>(spec) ||
      std::holds_alternative<SubshiftClosure>(spec)) {
    const auto& a = std::get<ShiftPoint>(x.v);
    const auto& b = std::get<ShiftPoint>(y.v);
    for (unsigned i = 0; i < depth; ++i) {
      if (a.generator->symbol_at(a.offset + i) !=
          b.generator->symbol_at(b.offset + i)) {
        return {dyadic(i), false};
      }
    }
    const bool same = x.canonical_key() == y.canonical_key();
    return {Rational(0), !same};
  }
  if (const auto* cr = std::get_if<CyclicRotation>(&spec)) {
    const auto& a = std::get<CyclicPoint>(x.v);
    const auto& b = std::get<CyclicPoint>(y.v);
    const int64_t diff = std::abs(a.residue - b.residue);
    return {Rational(std::min(diff, cr->modulus - diff), cr->modulus), false};
  }
  if (const auto* od = std::get_if<OdometerTruncation>(&spec)) {
    const uint64_t total = odometer_total(od->radixes);
    const auto va = odometer_value(od->radixes,
                                   std::get<OdometerPoint>(x.v).digits);
    const auto vb = odometer_value(od->radixes,
                                   std::get<OdometerPoint>(y.v).digits);
    const uint64_t diff = va > vb ? va - vb : vb - va;
    return {Rational(std::min(diff, total - diff), total), false};
  }
  if (std::holds_alternative<CircleRotation>(spec)) {
    return {circle_distance(std::get<CirclePoint>(x.v).value,
                            std::get<CirclePoint>(y.v).value),
            false};
  }
  if (const auto* pr = std::get_if<ProductSystem>(&spec)) {
    const auto& a = std::get<ProductPoint>(x.v);
    const auto& b = std::get<ProductPoint>(y.v);
    TruncatedDistance best{Rational(0), false};
    for (size_t i = 0; i < pr->factors.size(); ++i) {
      auto d = distance_truncated(pr->factors[i], a.parts[i], b.parts[i], depth);
      if (d.value > best.value) {
        best.value = d.value;
      }
      best.truncated = best.truncated || d.truncated;
    }
    return best;
  }
  if (const auto* pw = std::get_if<PowerSystem>(&spec)) {
    return distance_truncated(*pw->base, x, y, depth);
  }
  if (const auto* tw = std::get_if<TowerSystem>(&spec)) {
    const auto& a = std::get<TowerPoint>(x.v);
    const auto& b = std::get<TowerPoint>(y.v);
    auto d = distance_truncated(*tw->base, *a.base, *b.base, depth);
    if (a.level != b.level && d.value < 1) {
      d.value = 1;
    }
    return d;
  }
  if (const auto* ld = std::get_if<LadderSystem>(&spec)) {
    const auto& a = std::get<TowerPoint>(x.v);
    const auto& b = std::get<TowerPoint>(y.v);
    auto d = distance_truncated(*ld->base, *a.base, *b.base, depth);
    if (a.level != b.level && d.value < 1) {
      d.value = 1;
    }
    return d;
  }
  throw Error(ErrorCode::internal, "unhandled variant in distance_truncated");
}

// --- open-set machinery ---------------------------------------------------------

OpenSetSpec compile_ball(const System& sys, const PointRef& center,
                         const Rational& radius) {
  if (radius <= 0) {
    throw_invalid("metric ball radius must be positive");
  }
  const auto& spec = sys.spec();
  if (std::holds_alternative<FullShift>(spec) ||
      std::holds_alternative<SubshiftClosure>(spec)) {
    if (radius > 1) {
      return OpenSetSpec{Cylinder{""}};
    }
    const auto& sp = std::get<ShiftPoint>(center.v);
    const unsigned t = agree_prefix_len(radius);
    std::string word;
    for (unsigned i = 0; i < t; ++i) {
      word += sp.generator->symbol_at(sp.offset + i);
    }
    return OpenSetSpec{Cylinder{word}};
  }
  if (const auto* cr = std::get_if<CyclicRotation>(&spec)) {
    const auto& cp = std::get<CyclicPoint>(center.v);
    ResidueSet rs;
    for (int64_t b = 0; b < cr->modulus; ++b) {
      const int64_t diff = std::abs(cp.residue - b);
      const int64_t circ = std::min(diff, cr->modulus - diff);
      if (Rational(circ, cr->modulus) < radius) {
        rs.residues.push_back(b);
      }
    }
    return OpenSetSpec{std::move(rs)};
  }
  if (const auto* od = std::get_if<OdometerTruncation>(&spec)) {
    const uint64_t total = odometer_total(od->radixes);
    const auto vc = odometer_value(od->radixes,
                                   std::get<OdometerPoint>(center.v).digits);
    ResidueSet rs;
    for (uint64_t b = 0; b < total; ++b) {
      const uint64_t diff = vc > b ? vc - b : b - vc;
      const uint64_t circ = std::min(diff, total - diff);
      if (Rational(circ, total) < radius) {
        rs.residues.push_back(static_cast<int64_t>(b));
      }
    }
    return OpenSetSpec{std::move(rs)};
  }
  if (std::holds_alternative<CircleRotation>(spec)) {
    const auto& cp = std::get<CirclePoint>(center.v);
    if (2 * radius >= 1) {
      return OpenSetSpec{Arc{Rational(0), Rational(1)}};
    }
    return OpenSetSpec{
        Arc{frac_mod1(cp.value - radius), frac_mod1(cp.value + radius)}};
  }
  if (const auto* pr = std::get_if<ProductSystem>(&spec)) {
    const auto& pp = std::get<ProductPoint>(center.v);
    ProductSpec ps;
    for (size_t i = 0; i < pr->factors.size(); ++i) {
      ps.parts.push_back(compile_ball(pr->factors[i], pp.parts[i], radius));
    }
    return OpenSetSpec{std::move(ps)};
  }
  if (const auto* pw = std::get_if<PowerSystem>(&spec)) {
    return compile_ball(*pw->base, center, radius);
  }
  if (const auto* tw = std::get_if<TowerSystem>(&spec)) {
    const auto& tp = std::get<TowerPoint>(center.v);
    if (radius > 1) {
      throw_unsupported("tower metric balls of radius > 1");
    }
    LevelSet ls;
    ls.level = tp.level;
    ls.base = std::make_shared<const OpenSetSpec>(
        compile_ball(*tw->base, *tp.base, radius));
    return OpenSetSpec{std::move(ls)};
  }
  if (const auto* ld = std::get_if<LadderSystem>(&spec)) {
    const auto& tp = std::get<TowerPoint>(center.v);
    if (radius > 1) {
      throw_unsupported("ladder metric balls of radius > 1");
    }
    LevelSet ls;
    ls.level = tp.level;
    ls.base = std::make_shared<const OpenSetSpec>(
        compile_ball(*ld->base, *tp.base, radius));
    return OpenSetSpec{std::move(ls)};
  }
  throw Error(ErrorCode::internal, "unhandled system variant in compile_ball");
}

OpenSetSpec compile_spec(const System& sys, const OpenSetSpec& u) {
  if (const auto* mb = std::get_if<MetricBall>(&u.v)) {
    return compile_ball(sys, *mb->center, mb->radius);
  }
  if (const auto* ps = std::get_if<ProductSpec>(&u.v)) {
    const auto* pr = std::get_if<ProductSystem>(&sys.spec());
    if (!pr || pr->factors.size() != ps->parts.size()) {
      throw_invalid("product spec arity mismatch");
    }
    ProductSpec out;
    for (size_t i = 0; i < ps->parts.size(); ++i) {
      out.parts.push_back(compile_spec(pr->factors[i], ps->parts[i]));
    }
    return OpenSetSpec{std::move(out)};
  }
  if (const auto* ls = std::get_if<LevelSet>(&u.v)) {
    const System* base = nullptr;
    if (const auto* tw = std::get_if<TowerSystem>(&sys.spec())) {
      base = tw->base.get();
    } else if (const auto* ld = std::get_if<LadderSystem>(&sys.spec())) {
      base = ld->base.get();
    } else {
      throw_invalid("level sets apply to towers and ladders only");
    }
    LevelSet out;
    out.level = ls->level;
    if (ls->base) {
      out.base =
          std::make_shared<const OpenSetSpec>(compile_spec(*base, *ls->base));
    }
    return OpenSetSpec{std::move(out)};
  }
  return u;
}

bool contains(const System& sys, const OpenSetSpec& u0, const PointRef& x) {
  const OpenSetSpec u = compile_spec(sys, u0);
  const auto& spec = sys.spec();
  if (std::holds_alternative<FullShift>(spec) ||
      std::holds_alternative<SubshiftClosure>(spec)) {
    const auto* cy = std::get_if<Cylinder>(&u.v);
    if (!cy) {
      throw_invalid("shift systems take cylinder (or metric ball) sets");
    }
    const auto& sp = std::get<ShiftPoint>(x.v);
    for (size_t i = 0; i < cy->word.size(); ++i) {
      if (sp.generator->symbol_at(sp.offset + i) != cy->word[i]) {
        return false;
      }
    }
    return true;
  }
  if (std::holds_alternative<CyclicRotation>(spec)) {
    const auto* rs = std::get_if<ResidueSet>(&u.v);
    if (!rs) {
      throw_invalid("cyclic rotations take residue sets");
    }
    const auto& cp = std::get<CyclicPoint>(x.v);
    return std::binary_search(rs->residues.begin(), rs->residues.end(),
                              cp.residue);
  }
  if (const auto* od = std::get_if<OdometerTruncation>(&spec)) {
    const auto* rs = std::get_if<ResidueSet>(&u.v);
    if (!rs) {
      throw_invalid("odometers take residue sets on values");
    }
    const auto value = static_cast<int64_t>(
        odometer_value(od->radixes, std::get<OdometerPoint>(x.v).digits));
    return std::binary_search(rs->residues.begin(), rs->residues.end(), value);
  }
  if (std::holds_alternative<CircleRotation>(spec)) {
    const auto* arc = std::get_if<Arc>(&u.v);
    if (!arc) {
      throw_invalid("circle rotations take arcs");
    }
    return arc_contains(*arc, std::get<CirclePoint>(x.v).value);
  }
  if (const auto* pr = std::get_if<ProductSystem>(&spec)) {
    const auto* ps = std::get_if<ProductSpec>(&u.v);
    if (!ps || ps->parts.size() != pr->factors.size()) {
      throw_invalid("product systems take product specs of matching arity");
    }
    const auto& pp = std::get<ProductPoint>(x.v);
    for (size_t i = 0; i < ps->parts.size(); ++i) {
      if (!contains(pr->factors[i], ps->parts[i], pp.parts[i])) {
        return false;
      }
    }
    return true;
  }
  if (const auto* pw = std::get_if<PowerSystem>(&spec)) {
    return contains(*pw->base, u, x);
  }
  if (const auto* tw = std::get_if<TowerSystem>(&spec)) {
    const auto* ls = std::get_if<LevelSet>(&u.v);
    if (!ls) {
      throw_invalid("towers take level sets");
    }
    const auto& tp = std::get<TowerPoint>(x.v);
    if (tp.level != ls->level) {
      return false;
    }
    return !ls->base || contains(*tw->base, *ls->base, *tp.base);
  }
  if (const auto* ld = std::get_if<LadderSystem>(&spec)) {
    const auto* ls = std::get_if<LevelSet>(&u.v);
    if (!ls) {
      throw_invalid("ladders take level sets");
    }
    const auto& tp = std::get<TowerPoint>(x.v);
    if (tp.level != ls->level) {
      return false;
    }
    return !ls->base || contains(*ld->base, *ls->base, *tp.base);
  }
  throw Error(ErrorCode::internal, "unhandled system variant in contains");
}

bool spec_subset(const System& sys, const OpenSetSpec& inner0,
                 const OpenSetSpec& outer0) {
  const OpenSetSpec inner = compile_spec(sys, inner0);
  const OpenSetSpec outer = compile_spec(sys, outer0);
  if (const auto* ci = std::get_if<Cylinder>(&inner.v)) {
    const auto* co = std::get_if<Cylinder>(&outer.v);
    return co && ci->word.rfind(co->word, 0) == 0;
  }
  if (const auto* ri = std::get_if<ResidueSet>(&inner.v)) {
    const auto* ro = std::get_if<ResidueSet>(&outer.v);
    if (!ro) {
      return false;
    }
    return std::includes(ro->residues.begin(), ro->residues.end(),
                         ri->residues.begin(), ri->residues.end());
  }
  if (const auto* ai = std::get_if<Arc>(&inner.v)) {
    const auto* ao = std::get_if<Arc>(&outer.v);
    if (!ao) {
      return false;
    }
    // Decompose into linear segments of [0, 1) and test coverage.
    auto segments = [](const Arc& a) {
      std::vector<std::pair<Rational, Rational>> out;
      if (a.low < a.high) {
        out.emplace_back(a.low, a.high);
      } else {
        out.emplace_back(a.low, Rational(1));
        out.emplace_back(Rational(0), a.high);
      }
      return out;
    };
    for (const auto& [lo, hi] : segments(*ai)) {
      if (lo >= hi) {
        continue;
      }
      bool covered = false;
      for (const auto& [olo, ohi] : segments(*ao)) {
        if (olo <= lo && hi <= ohi) {
          covered = true;
          break;
        }
      }
      if (!covered) {
        return false;
      }
    }
    return true;
  }
  if (const auto* li = std::get_if<LevelSet>(&inner.v)) {
    const auto* lo = std::get_if<LevelSet>(&outer.v);
    if (!lo || li->level != lo->level) {
      return false;
    }
    if (!lo->base) {
      return true;
    }
    if (!li->base) {
      return false;
    }
    const System* base = nullptr;
    if (const auto* tw = std::get_if<TowerSystem>(&sys.spec())) {
      base = tw->base.get();
    } else if (const auto* ld = std::get_if<LadderSystem>(&sys.spec())) {
      base = ld->base.get();
    } else {
      return false;
    }
    return spec_subset(*base, *li->base, *lo->base);
  }
  if (const auto* pi = std::get_if<ProductSpec>(&inner.v)) {
    const auto* po = std::get_if<ProductSpec>(&outer.v);
    const auto* pr = std::get_if<ProductSystem>(&sys.spec());
    if (!po || !pr || pi->parts.size() != po->parts.size()) {
      return false;
    }
    for (size_t i = 0; i < pi->parts.size(); ++i) {
      if (!spec_subset(pr->factors[i], pi->parts[i], po->parts[i])) {
        return false;
      }
    }
    return true;
  }
  return false;
}

} // namespace dynlab::systems
