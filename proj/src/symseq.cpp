#include "dynlab/symseq.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "dynlab/error.hpp"
#include "dynlab/intfam.hpp"

namespace dynlab::symseq {

using nlohmann::json;

namespace {

void check_letter(char c, const char* where) {
  if (c < '0' || c > '9') {
    throw_invalid(std::string("letters must be digits '0'..'9' in ") + where);
  }
}

std::vector<char> sorted_letters(const std::set<char>& s) {
  return {s.begin(), s.end()};
}

// Smallest d dividing |w| with w = root^(|w|/d).
std::string primitive_root(const std::string& w) {
  const size_t n = w.size();
  for (size_t d = 1; d <= n; ++d) {
    if (n % d != 0) {
      continue;
    }
    bool ok = true;
    for (size_t i = d; i < n && ok; ++i) {
      ok = w[i] == w[i - d];
    }
    if (ok) {
      return w.substr(0, d);
    }
  }
  return w;
}

struct GeneratorValidator {
  std::vector<char> operator()(const EventuallyPeriodic& ep) const {
    if (ep.period.empty()) {
      throw_invalid("eventually periodic generator needs a nonempty period");
    }
    std::set<char> letters;
    for (char c : ep.preperiod) {
      check_letter(c, "preperiod");
      letters.insert(c);
    }
    for (char c : ep.period) {
      check_letter(c, "period");
      letters.insert(c);
    }
    return sorted_letters(letters);
  }

  std::vector<char> operator()(const Substitution& sub) const {
    if (sub.rules.empty()) {
      throw_invalid("substitution needs at least one rule");
    }
    std::set<char> letters;
    for (const auto& [from, image] : sub.rules) {
      check_letter(from, "substitution rule");
      letters.insert(from);
      if (image.empty()) {
        throw_invalid("substitution image of every letter must be nonempty");
      }
      for (char c : image) {
        check_letter(c, "substitution image");
      }
    }
    for (const auto& [from, image] : sub.rules) {
      for (char c : image) {
        if (!sub.rules.count(c)) {
          throw_invalid(std::string("substitution image uses letter '") + c +
                        "' without a rule");
        }
      }
    }
    const auto seed_it = sub.rules.find(sub.seed);
    if (seed_it == sub.rules.end()) {
      throw_invalid("substitution seed has no rule");
    }
    if (seed_it->second.size() < 2 || seed_it->second[0] != sub.seed) {
      throw_invalid("substitution is not prolongable: rules(seed) must start "
                    "with the seed and have length >= 2");
    }
    return sorted_letters(letters);
  }

  std::vector<char> operator()(const RotationCoding& rc) const {
    if (rc.angle <= 0 || rc.angle >= 1) {
      throw_invalid("rotation angle must lie in (0, 1)");
    }
    if (rc.offset < 0 || rc.offset >= 1) {
      throw_invalid("rotation offset must lie in [0, 1)");
    }
    if (rc.partition.empty()) {
      throw_invalid("rotation coding needs a partition");
    }
    auto arcs = rc.partition;
    std::sort(arcs.begin(), arcs.end(),
              [](const CodedArc& a, const CodedArc& b) { return a.low < b.low; });
    Rational expect{0};
    std::set<char> letters;
    for (const auto& arc : arcs) {
      check_letter(arc.letter, "rotation partition");
      letters.insert(arc.letter);
      if (arc.low != expect) {
        throw_invalid("rotation partition must cover [0, 1) disjointly");
      }
      if (arc.high <= arc.low) {
        throw_invalid("rotation partition arcs must be nondegenerate");
      }
      expect = arc.high;
    }
    if (expect != 1) {
      throw_invalid("rotation partition must end at 1");
    }
    return sorted_letters(letters);
  }

  std::vector<char> operator()(const Indicator& ind) const {
    if (!ind.set) {
      throw_invalid("indicator generator needs a set");
    }
    return {'0', '1'};
  }

  std::vector<char> operator()(const WordCatalog& wc) const {
    if (wc.alphabet_size < 2 || wc.alphabet_size > 10) {
      throw_invalid("word catalog alphabet size must be in [2, 10]");
    }
    if (wc.modulus < 1) {
      throw_invalid("word catalog modulus must be >= 1");
    }
    std::vector<char> letters;
    for (int i = 0; i < wc.alphabet_size; ++i) {
      letters.push_back(static_cast<char>('0' + i));
    }
    return letters;
  }
};

char rotation_symbol(const RotationCoding& rc, uint64_t n) {
  const Rational pos = frac_mod1(rc.offset + Rational(n) * rc.angle);
  for (const auto& arc : rc.partition) {
    if (pos >= arc.low && pos < arc.high) {
      return arc.letter;
    }
  }
  throw Error(ErrorCode::internal, "rotation partition gap");
}

} // namespace

SymbolGenerator::SymbolGenerator(Spec spec) : spec_(std::move(spec)) {
  alphabet_ = std::visit(GeneratorValidator{}, spec_);
}

GeneratorPtr make_generator(SymbolGenerator::Spec spec) {
  return std::make_shared<const SymbolGenerator>(std::move(spec));
}

void SymbolGenerator::materialize_to(uint64_t length) const {
  std::lock_guard lock(memo_mutex_);
  if (memo_.size() >= length) {
    return;
  }
  uint64_t target = std::max<uint64_t>(length, 64);
  target = std::max<uint64_t>(target, memo_.size() * 2);
  if (const auto* sub = std::get_if<Substitution>(&spec_)) {
    if (memo_.empty()) {
      memo_ = sub->rules.at(sub->seed);
      memo_expanded_ = 1; // position 0 is covered by the seed image
    }
    // The fixed point is rules(x0) rules(x1) ...; keep appending images,
    // resuming from the first position not yet expanded.
    while (memo_.size() < target) {
      memo_ += sub->rules.at(memo_[memo_expanded_]);
      ++memo_expanded_;
    }
  } else if (const auto* wc = std::get_if<WordCatalog>(&spec_)) {
    const int k = wc->alphabet_size;
    uint64_t word_len = 1;
    memo_.clear();
    while (memo_.size() < target) {
      std::string word(word_len, '0');
      while (true) {
        for (uint64_t r = 0; r < wc->modulus; ++r) {
          while (memo_.size() % wc->modulus != r) {
            memo_ += '0';
          }
          memo_ += word;
        }
        // next word in lex order
        size_t i = word.size();
        while (i > 0) {
          if (word[i - 1] < static_cast<char>('0' + k - 1)) {
            ++word[i - 1];
            std::fill(word.begin() + static_cast<long>(i), word.end(), '0');
            break;
          }
          --i;
        }
        if (i == 0) {
          break;
        }
      }
      ++word_len;
    }
  } else if (const auto* ind = std::get_if<Indicator>(&spec_)) {
    for (uint64_t n = memo_.size(); n < target; ++n) {
      memo_ += ind->set->contains(n) ? '1' : '0';
    }
  }
}

char SymbolGenerator::symbol_at(uint64_t n) const {
  if (const auto* ep = std::get_if<EventuallyPeriodic>(&spec_)) {
    if (n < ep->preperiod.size()) {
      return ep->preperiod[n];
    }
    return ep->period[(n - ep->preperiod.size()) % ep->period.size()];
  }
  if (const auto* rc = std::get_if<RotationCoding>(&spec_)) {
    return rotation_symbol(*rc, n);
  }
  materialize_to(n + 1);
  std::lock_guard lock(memo_mutex_);
  return memo_[n];
}

std::string SymbolGenerator::prefix(uint64_t n) const {
  if (std::holds_alternative<EventuallyPeriodic>(spec_) ||
      std::holds_alternative<RotationCoding>(spec_)) {
    std::string out;
    out.reserve(n);
    for (uint64_t i = 0; i < n; ++i) {
      out += symbol_at(i);
    }
    return out;
  }
  materialize_to(n);
  std::lock_guard lock(memo_mutex_);
  return memo_.substr(0, n);
}

std::optional<EventuallyPeriodic>
SymbolGenerator::eventually_periodic_form() const {
  if (const auto* ep = std::get_if<EventuallyPeriodic>(&spec_)) {
    return normalize_eventually_periodic(*ep);
  }
  if (const auto* rc = std::get_if<RotationCoding>(&spec_)) {
    // With exact rational angle p/q the coding has period dividing q.
    const BigInt q = boost::multiprecision::denominator(rc->angle);
    const uint64_t period = q.convert_to<uint64_t>();
    std::string word;
    for (uint64_t i = 0; i < period; ++i) {
      word += rotation_symbol(*rc, i);
    }
    return normalize_eventually_periodic({"", word});
  }
  return std::nullopt;
}

std::string SymbolGenerator::canonical_key() const {
  if (auto ep = eventually_periodic_form()) {
    return "ep:" + ep->preperiod + "|" + ep->period;
  }
  return to_json().dump();
}

EventuallyPeriodic normalize_eventually_periodic(EventuallyPeriodic ep) {
  ep.period = primitive_root(ep.period);
  while (!ep.preperiod.empty() && ep.preperiod.back() == ep.period.back()) {
    ep.preperiod.pop_back();
    ep.period.insert(ep.period.begin(), ep.period.back());
    ep.period.pop_back();
  }
  return ep;
}

EventuallyPeriodic shift_eventually_periodic(const EventuallyPeriodic& ep,
                                             uint64_t shift) {
  EventuallyPeriodic out;
  if (shift < ep.preperiod.size()) {
    out.preperiod = ep.preperiod.substr(shift);
    out.period = ep.period;
  } else {
    const uint64_t k = (shift - ep.preperiod.size()) % ep.period.size();
    out.period = ep.period.substr(k) + ep.period.substr(0, k);
  }
  return normalize_eventually_periodic(out);
}

json SymbolGenerator::to_json() const {
  json j;
  if (const auto* ep = std::get_if<EventuallyPeriodic>(&spec_)) {
    j["variant"] = "eventually_periodic";
    j["preperiod"] = ep->preperiod;
    j["period"] = ep->period;
  } else if (const auto* sub = std::get_if<Substitution>(&spec_)) {
    j["variant"] = "substitution";
    json rules = json::object();
    for (const auto& [from, image] : sub->rules) {
      rules[std::string(1, from)] = image;
    }
    j["rules"] = rules;
    j["seed"] = std::string(1, sub->seed);
  } else if (const auto* rc = std::get_if<RotationCoding>(&spec_)) {
    j["variant"] = "rotation_coding";
    j["angle"] = format_rational(rc->angle);
    j["offset"] = format_rational(rc->offset);
    json partition = json::array();
    for (const auto& arc : rc->partition) {
      partition.push_back({{"low", format_rational(arc.low)},
                           {"high", format_rational(arc.high)},
                           {"letter", std::string(1, arc.letter)}});
    }
    j["partition"] = partition;
  } else if (const auto* ind = std::get_if<Indicator>(&spec_)) {
    j["variant"] = "indicator";
    j["set"] = ind->set->to_json();
  } else if (const auto* wc = std::get_if<WordCatalog>(&spec_)) {
    j["variant"] = "word_catalog";
    j["alphabet_size"] = wc->alphabet_size;
    j["modulus"] = wc->modulus;
  }
  return j;
}

namespace {

char single_letter(const json& j, const char* field) {
  const auto s = j.get<std::string>();
  if (s.size() != 1) {
    throw_parse(std::string("expected a single letter in ") + field);
  }
  return s[0];
}

} // namespace

GeneratorPtr SymbolGenerator::from_json(const json& j) {
  if (!j.is_object() || !j.contains("variant")) {
    throw_parse("generator spec must be an object with a 'variant' field");
  }
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "eventually_periodic") {
    return make_generator(EventuallyPeriodic{
        j.at("preperiod").get<std::string>(), j.at("period").get<std::string>()});
  }
  if (variant == "substitution") {
    Substitution sub;
    for (const auto& [key, value] : j.at("rules").items()) {
      if (key.size() != 1) {
        throw_parse("substitution rule keys must be single letters");
      }
      sub.rules[key[0]] = value.get<std::string>();
    }
    sub.seed = single_letter(j.at("seed"), "seed");
    return make_generator(std::move(sub));
  }
  if (variant == "rotation_coding") {
    RotationCoding rc;
    rc.angle = parse_rational(j.at("angle").get<std::string>());
    rc.offset = parse_rational(j.at("offset").get<std::string>());
    for (const auto& arc : j.at("partition")) {
      rc.partition.push_back(
          {parse_rational(arc.at("low").get<std::string>()),
           parse_rational(arc.at("high").get<std::string>()),
           single_letter(arc.at("letter"), "letter")});
    }
    return make_generator(std::move(rc));
  }
  if (variant == "indicator") {
    return make_generator(Indicator{intfam::SetGenerator::from_json(j.at("set"))});
  }
  if (variant == "word_catalog") {
    return make_generator(WordCatalog{j.at("alphabet_size").get<int>(),
                                      j.at("modulus").get<uint64_t>()});
  }
  throw_parse("unknown generator variant: " + variant);
}

} // namespace dynlab::symseq
