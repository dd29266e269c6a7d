#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include <nlohmann/json.hpp>

#include "dynlab/catalog.hpp"
#include "dynlab/error.hpp"
#include "dynlab/intfam.hpp"
#include "dynlab/symseq.hpp"

using namespace dynlab;
using namespace dynlab::symseq;

namespace {

// Independent oracle: iterate the substitution on the seed in test code.
std::string substitution_oracle(const std::map<char, std::string>& rules,
                                char seed, int iterations) {
  std::string s(1, seed);
  for (int i = 0; i < iterations; ++i) {
    std::string next;
    for (char c : s) {
      next += rules.at(c);
    }
    s = next;
  }
  return s;
}

// Independent oracle: simulate the rotation with exact rationals.
char rotation_oracle(const Rational& angle, const Rational& offset,
                     const std::vector<CodedArc>& arcs, uint64_t n) {
  const Rational pos = frac_mod1(offset + Rational(n) * angle);
  for (const auto& arc : arcs) {
    if (pos >= arc.low && pos < arc.high) {
      return arc.letter;
    }
  }
  return '?';
}

} // namespace

TEST_CASE("eventually periodic basics") {
  const auto gen = make_generator(EventuallyPeriodic{"", "01"});
  CHECK(gen->symbol_at(5) == '1');
  CHECK(gen->prefix(6) == "010101");
  const auto gen2 = make_generator(EventuallyPeriodic{"1", "0"});
  CHECK(gen2->prefix(4) == "1000");
  CHECK(gen2->prefix(0).empty());
}

TEST_CASE("generator validation errors") {
  CHECK_THROWS_AS(make_generator(EventuallyPeriodic{"1", ""}), Error);
  // rules(0) does not start with 0
  CHECK_THROWS_AS(
      make_generator(Substitution{{{'0', "10"}, {'1', "01"}}, '0'}), Error);
  CHECK_THROWS_AS(make_generator(Substitution{{{'0', "01"}, {'1', ""}}, '0'}),
                  Error);
  // partition not covering [0,1)
  CHECK_THROWS_AS(
      make_generator(RotationCoding{
          Rational(1, 3), Rational(0),
          {{Rational(0), Rational(1, 2), '0'}}}),
      Error);
  CHECK_THROWS_AS(
      make_generator(RotationCoding{
          Rational(3, 2), Rational(0),
          {{Rational(0), Rational(1), '0'}}}),
      Error);
}

TEST_CASE("Morse prefix against the iterated-substitution oracle") {
  const std::map<char, std::string> rules{{'0', "01"}, {'1', "10"}};
  const auto morse = catalog::morse_generator();
  CHECK(morse->prefix(8) == substitution_oracle(rules, '0', 3));
  CHECK(morse->prefix(8) == "01101001");
  // longer prefixes still agree with the oracle
  CHECK(morse->prefix(64) == substitution_oracle(rules, '0', 6));
}

TEST_CASE("substitution fixed-point law") {
  const std::map<char, std::string> rules{{'0', "01"}, {'1', "0"}};
  const auto fib = catalog::fibonacci_generator();
  const std::string p = fib->prefix(200);
  std::string image;
  for (char c : p) {
    image += rules.at(c);
  }
  CHECK(image.substr(0, 200) == p);
}

TEST_CASE("rotation coding by one third") {
  const std::vector<CodedArc> arcs{{Rational(0), Rational(2, 3), '0'},
                                   {Rational(2, 3), Rational(1), '1'}};
  const auto gen =
      make_generator(RotationCoding{Rational(1, 3), Rational(0), arcs});
  CHECK(gen->prefix(3) == "001");
  for (uint64_t n = 0; n < 30; ++n) {
    CHECK(gen->symbol_at(n) ==
          rotation_oracle(Rational(1, 3), Rational(0), arcs, n));
  }
  // exact rational angle p/q: period divides q
  for (uint64_t n = 0; n < 12; ++n) {
    CHECK(gen->symbol_at(n) == gen->symbol_at(n + 3));
  }
  const auto form = gen->eventually_periodic_form();
  REQUIRE(form.has_value());
  CHECK(form->preperiod.empty());
  CHECK(form->period == "001");
}

TEST_CASE("indicator round trip with its set window") {
  const auto ap = intfam::make_set(intfam::ArithmeticProgression{0, 3});
  const auto ind = make_generator(Indicator{ap});
  CHECK(ind->symbol_at(6) == '1');
  CHECK(ind->symbol_at(7) == '0');
  for (uint64_t n = 0; n < 100; ++n) {
    const bool in_window = ap->window(n + 1).test(n);
    CHECK((ind->symbol_at(n) == '1') == in_window);
  }
}

TEST_CASE("incremental materialization agrees with one-shot prefixes") {
  // grow the memoized prefix in several steps and compare against a
  // fresh generator materialized once
  const std::vector<SymbolGenerator::Spec> specs{
      Substitution{{{'0', "01"}, {'1', "10"}}, '0'},
      Substitution{{{'0', "01"}, {'1', "0"}}, '0'},
      WordCatalog{2, 3},
      Indicator{intfam::make_set(intfam::ThickSchedule{})},
  };
  for (const auto& spec : specs) {
    const auto whole = make_generator(spec);
    const auto grown = make_generator(spec);
    const std::string reference = whole->prefix(900);
    std::string incremental;
    for (uint64_t upto : {3u, 70u, 71u, 200u, 333u, 900u}) {
      incremental = grown->prefix(upto);
      CHECK(incremental == reference.substr(0, upto));
    }
  }
}

TEST_CASE("prefix consistency across the generator corpus") {
  std::vector<GeneratorPtr> corpus{
      make_generator(EventuallyPeriodic{"", "01"}),
      make_generator(EventuallyPeriodic{"110", "100"}),
      catalog::morse_generator(),
      catalog::fibonacci_generator(),
      make_generator(RotationCoding{
          Rational(2, 5), Rational(1, 7),
          {{Rational(0), Rational(1, 2), '0'}, {Rational(1, 2), Rational(1), '1'}}}),
      make_generator(WordCatalog{2, 3}),
      make_generator(
          Indicator{intfam::make_set(intfam::ThickSchedule{})}),
  };
  for (const auto& gen : corpus) {
    const std::string full = gen->prefix(1000);
    for (uint64_t n = 0; n < 1000; ++n) {
      CHECK(full.substr(0, n + 1) == full.substr(0, n) + gen->symbol_at(n));
    }
  }
}

TEST_CASE("word catalog hits every word at every residue") {
  const auto gen = make_generator(WordCatalog{2, 3});
  const std::string s = gen->prefix(400);
  for (const std::string& w : {"0", "1", "00", "01", "10", "11"}) {
    for (uint64_t r = 0; r < 3; ++r) {
      bool found = false;
      for (size_t i = r; i + w.size() <= s.size() && !found; i += 3) {
        found = s.compare(i, w.size(), w) == 0;
      }
      CHECK_MESSAGE(found, "word ", w, " missing at residue ", r);
    }
  }
}

TEST_CASE("eventually periodic normalization and shifts") {
  const auto norm = normalize_eventually_periodic({"10", "0"});
  CHECK(norm.preperiod == "1");
  CHECK(norm.period == "0");
  const auto prim = normalize_eventually_periodic({"", "0101"});
  CHECK(prim.period == "01");

  const EventuallyPeriodic ep{"110", "100"};
  const auto gen = make_generator(ep);
  for (uint64_t shift = 0; shift < 10; ++shift) {
    const auto shifted = shift_eventually_periodic(ep, shift);
    const auto sgen = make_generator(shifted);
    for (uint64_t n = 0; n < 40; ++n) {
      CHECK(sgen->symbol_at(n) == gen->symbol_at(n + shift));
    }
  }
}

TEST_CASE("shared generators evaluate race-free") {
  const auto morse = catalog::morse_generator();
  const auto ind = make_generator(
      Indicator{intfam::make_set(intfam::ThickSchedule{})});
  const std::string expected_morse = morse->prefix(4000);
  const std::string expected_ind = ind->prefix(4000);
  std::vector<std::thread> workers;
  std::vector<int> mismatches(4, 0);
  for (int t = 0; t < 4; ++t) {
    workers.emplace_back([&, t] {
      for (uint64_t n = 0; n < 4000; ++n) {
        // stride the accesses so threads race on the memo growth
        const uint64_t i = (n * 7 + static_cast<uint64_t>(t) * 997) % 4000;
        if (morse->symbol_at(i) != expected_morse[i] ||
            ind->symbol_at(i) != expected_ind[i]) {
          ++mismatches[static_cast<size_t>(t)];
        }
      }
    });
  }
  for (auto& w : workers) {
    w.join();
  }
  for (int m : mismatches) {
    CHECK(m == 0);
  }
}

TEST_CASE("canonical keys identify equal sequences") {
  const auto a = make_generator(EventuallyPeriodic{"", "01"});
  const auto b = make_generator(EventuallyPeriodic{"01", "0101"});
  CHECK(a->canonical_key() == b->canonical_key());
  const auto c = make_generator(EventuallyPeriodic{"1", "01"});
  CHECK(a->canonical_key() != c->canonical_key());
}

TEST_CASE("json round trip") {
  std::vector<GeneratorPtr> corpus{
      make_generator(EventuallyPeriodic{"1", "10"}),
      catalog::morse_generator(),
      make_generator(RotationCoding{
          Rational(1, 3), Rational(0),
          {{Rational(0), Rational(2, 3), '0'}, {Rational(2, 3), Rational(1), '1'}}}),
      make_generator(Indicator{intfam::make_set(intfam::ArithmeticProgression{1, 4})}),
      make_generator(WordCatalog{2, 5}),
  };
  for (const auto& gen : corpus) {
    const auto round = SymbolGenerator::from_json(gen->to_json());
    CHECK(round->to_json() == gen->to_json());
    CHECK(round->prefix(50) == gen->prefix(50));
  }
}
