#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <nlohmann/json.hpp>

#include "dynlab/catalog.hpp"
#include "dynlab/disjoint.hpp"
#include "dynlab/error.hpp"
#include "dynlab/intfam.hpp"
#include "dynlab/systems.hpp"

using namespace dynlab;
using namespace dynlab::systems;

namespace {

PointRef shift_point(const std::string& pre, const std::string& per) {
  return PointRef{ShiftPoint{
      symseq::make_generator(symseq::EventuallyPeriodic{pre, per}), 0}};
}

PointRef cyc_point(int64_t r) { return PointRef{CyclicPoint{r}}; }

OpenSetSpec cyl(const std::string& w) { return OpenSetSpec{Cylinder{w}}; }

OpenSetSpec residues(std::vector<int64_t> rs) {
  return OpenSetSpec{ResidueSet{std::move(rs)}};
}

std::vector<uint64_t> elems(const BitWindow& w) { return w.elements(); }

} // namespace

TEST_CASE("system validation errors") {
  CHECK_THROWS_AS(System(FullShift{1}), Error);
  CHECK_THROWS_AS(System(ProductSystem{}), Error);
  CHECK_THROWS_AS(System(CyclicRotation{0}), Error);
  CHECK_THROWS_AS(System(CircleRotation{Rational(5, 3), 8}), Error);
}

TEST_CASE("cyclic trajectory wraps") {
  const System sys{CyclicRotation{5}};
  const auto traj = trajectory(sys, cyc_point(0), 6);
  std::vector<int64_t> seen;
  for (const auto& p : traj) {
    seen.push_back(std::get<CyclicPoint>(p.v).residue);
  }
  CHECK(seen == std::vector<int64_t>{0, 1, 2, 3, 4, 0});
}

TEST_CASE("full shift step shifts the word") {
  const System sys{FullShift{2}};
  const auto x = shift_point("", "01");
  const auto y = step(sys, x);
  CHECK(y.canonical_key() == shift_point("", "10").canonical_key());
}

TEST_CASE("tower map against the exhaustive six-state oracle") {
  const auto base = catalog::cyclic(2);
  const System tower{TowerSystem{base, 3}};
  // oracle: enumerate all 6 states and the map by hand
  std::map<std::pair<int64_t, int64_t>, std::pair<int64_t, int64_t>> oracle;
  for (int64_t r = 0; r < 2; ++r) {
    for (int64_t level = 1; level <= 3; ++level) {
      if (level < 3) {
        oracle[{r, level}] = {r, level + 1};
      } else {
        oracle[{r, 3}] = {(r + 1) % 2, 1};
      }
    }
  }
  for (const auto& [from, to] : oracle) {
    const PointRef p{TowerPoint{
        std::make_shared<const PointRef>(cyc_point(from.first)), from.second}};
    const auto q = step(tower, p);
    const auto& tp = std::get<TowerPoint>(q.v);
    CHECK(std::get<CyclicPoint>(tp.base->v).residue == to.first);
    CHECK(tp.level == to.second);
  }
  // three applications on level 1 equal one base step
  const PointRef start{
      TowerPoint{std::make_shared<const PointRef>(cyc_point(0)), 1}};
  const auto after = step_n(tower, start, 3);
  const auto& tp = std::get<TowerPoint>(after.v);
  CHECK(std::get<CyclicPoint>(tp.base->v).residue == 1);
  CHECK(tp.level == 1);
}

TEST_CASE("tower law: nk steps on level 1 equal k base steps") {
  for (int64_t m = 2; m <= 6; ++m) {
    for (int64_t n = 2; n <= 6; ++n) {
      const auto base = catalog::cyclic(m);
      const System tower{TowerSystem{base, n}};
      PointRef p{TowerPoint{std::make_shared<const PointRef>(cyc_point(0)), 1}};
      for (int64_t k = 1; k <= 50; ++k) {
        p = step_n(tower, p, static_cast<uint64_t>(n));
        const auto& tp = std::get<TowerPoint>(p.v);
        CHECK(tp.level == 1);
        CHECK(std::get<CyclicPoint>(tp.base->v).residue == k % m);
      }
    }
  }
}

TEST_CASE("return sets: periodic shift point") {
  const System sys{FullShift{2}};
  const auto w = return_set(sys, shift_point("", "01"), cyl("0"), 10);
  CHECK(elems(w) == std::vector<uint64_t>{0, 2, 4, 6, 8});
}

TEST_CASE("return sets: cyclic") {
  const System sys{CyclicRotation{5}};
  const auto w = return_set(sys, cyc_point(0), residues({0}), 20);
  CHECK(elems(w) == std::vector<uint64_t>{0, 5, 10, 15});
}

TEST_CASE("return sets: fibonacci subshift gaps lie in {1,2}") {
  const auto gen = catalog::fibonacci_generator();
  const auto sys = catalog::subshift(gen, 4096);
  const auto w =
      return_set(*sys, PointRef{ShiftPoint{gen, 0}}, cyl("0"), 1000);
  // oracle: brute-force scan of the generated prefix
  const std::string prefix = gen->prefix(1000);
  for (uint64_t n = 0; n < 1000; ++n) {
    CHECK(w.test(n) == (prefix[n] == '0'));
  }
  const auto zeros = elems(w);
  for (size_t i = 1; i < zeros.size(); ++i) {
    const uint64_t gap = zeros[i] - zeros[i - 1];
    CHECK(gap >= 1);
    CHECK(gap <= 2);
  }
}

TEST_CASE("transfer set equals lcm pattern and product return set") {
  const auto fs = catalog::full_shift(2);
  const auto c2 = catalog::cyclic(2);
  const auto x = shift_point("", "011");
  const auto w =
      transfer_set(*fs, *c2, x, cyc_point(0), cyl("011"), residues({0}), 60);
  for (uint64_t n = 0; n < 60; ++n) {
    CHECK(w.test(n) == (n % 6 == 0));
  }

  // definitional route: the product system gives the same window
  const System prod{ProductSystem{{*fs, *c2}}};
  const PointRef xy{ProductPoint{{x, cyc_point(0)}}};
  const OpenSetSpec uv{ProductSpec{{cyl("011"), residues({0})}}};
  CHECK(return_set(prod, xy, uv, 60) == w);

  // parity conflict: empty transfer set
  const auto empty = transfer_set(*fs, *c2, shift_point("1", "0"), cyc_point(0),
                                  cyl("1"), residues({1}), 100);
  CHECK(empty.none());
}

TEST_CASE("transfer-product consistency across the catalog") {
  const uint64_t H = 10000;
  const auto fs = catalog::full_shift(2);
  const auto x = shift_point("", "011");
  struct Side {
    std::shared_ptr<const System> sys;
    PointRef y;
    OpenSetSpec v;
  };
  const std::vector<Side> sides{
      {catalog::cyclic(5), cyc_point(2), residues({0, 3})},
      {catalog::odometer({2, 2}), PointRef{OdometerPoint{{1, 0}}},
       residues({2})},
      {catalog::circle(Rational(5, 8), 8), PointRef{CirclePoint{Rational(1, 5)}},
       OpenSetSpec{Arc{Rational(1, 2), Rational(3, 4)}}},
      {catalog::subshift(catalog::morse_generator(), 16384),
       PointRef{ShiftPoint{catalog::morse_generator(), 1}}, cyl("01")},
  };
  for (const auto& side : sides) {
    const auto direct =
        transfer_set(*fs, *side.sys, x, side.y, cyl("011"), side.v, H);
    const System prod{ProductSystem{{*fs, *side.sys}}};
    const PointRef xy{ProductPoint{{x, side.y}}};
    const OpenSetSpec uv{ProductSpec{{cyl("011"), side.v}}};
    CHECK(direct == return_set(prod, xy, uv, H));
    CHECK(direct == return_set(*fs, x, cyl("011"), H)
                        .intersect(return_set(*side.sys, side.y, side.v, H)));
  }
}

TEST_CASE("hitting sets on the full shift via the word-extension oracle") {
  const System sys{FullShift{2}};
  // oracle: enumerate all binary words of length n + |v|
  auto brute = [&](const std::string& u, const std::string& v, uint64_t H) {
    BitWindow out(H);
    for (uint64_t n = 0; n < H; ++n) {
      const size_t len = std::max<size_t>(u.size(), n + v.size());
      const uint64_t limit = uint64_t{1} << len;
      for (uint64_t bits = 0; bits < limit; ++bits) {
        std::string w(len, '0');
        for (size_t i = 0; i < len; ++i) {
          if ((bits >> i) & 1) {
            w[i] = '1';
          }
        }
        if (w.compare(0, u.size(), u) == 0 &&
            w.compare(n, v.size(), v) == 0) {
          out.set(n);
          break;
        }
      }
    }
    return out;
  };
  const auto w01 = hitting_set(sys, cyl("0"), cyl("1"), 10);
  CHECK(w01 == brute("0", "1", 10));
  CHECK(elems(w01) == std::vector<uint64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  const auto w00 = hitting_set(sys, cyl("0"), cyl("0"), 10);
  CHECK(w00 == brute("0", "0", 10));
  CHECK(w00.test(0));
  CHECK(hitting_set(sys, cyl("01"), cyl("10"), 12) == brute("01", "10", 12));
}

TEST_CASE("hitting sets on rotations") {
  const System sys{CyclicRotation{5}};
  const auto w = hitting_set(sys, residues({0}), residues({2}), 30);
  for (uint64_t n = 0; n < 30; ++n) {
    CHECK(w.test(n) == (n % 5 == 2));
  }
}

TEST_CASE("hitting sets on towers and powers via state enumeration") {
  // oracle: N(U, V) = {n : some state of U lands in V after n steps}
  auto brute = [](const System& sys, const OpenSetSpec& u, const OpenSetSpec& v,
                  uint64_t H) {
    BitWindow out(H);
    for (const auto& s : enumerate_states(sys)) {
      if (!contains(sys, u, s)) {
        continue;
      }
      PointRef p = s;
      for (uint64_t n = 0; n < H; ++n) {
        if (contains(sys, v, p)) {
          out.set(n);
        }
        p = step(sys, p);
      }
    }
    return out;
  };

  const System tower{TowerSystem{catalog::cyclic(3), 2}};
  for (int64_t lu = 1; lu <= 2; ++lu) {
    for (int64_t lv = 1; lv <= 2; ++lv) {
      LevelSet u;
      u.level = lu;
      u.base = std::make_shared<const OpenSetSpec>(residues({0, 2}));
      LevelSet v;
      v.level = lv;
      v.base = std::make_shared<const OpenSetSpec>(residues({1}));
      CHECK(hitting_set(tower, OpenSetSpec{u}, OpenSetSpec{v}, 60) ==
            brute(tower, OpenSetSpec{u}, OpenSetSpec{v}, 60));
    }
  }

  const System pow{PowerSystem{catalog::cyclic(5), 2}};
  CHECK(hitting_set(pow, residues({0}), residues({3}), 40) ==
        brute(pow, residues({0}), residues({3}), 40));
}

TEST_CASE("proximal runs on towers track levels and base distance") {
  const System tower{TowerSystem{catalog::cyclic(6), 3}};
  const PointRef a{TowerPoint{std::make_shared<const PointRef>(cyc_point(0)), 1}};
  const PointRef b{TowerPoint{std::make_shared<const PointRef>(cyc_point(0)), 2}};
  // different levels never come closer than the discrete level distance
  CHECK(proximal_run_set(tower, a, b, Rational(1, 2), 50).none());
  // same level, same base point: identically zero distance
  CHECK(proximal_run_set(tower, a, a, Rational(1, 100), 50).count() == 50);
  // same level, nearby base points: constant base distance decides
  const PointRef c{TowerPoint{std::make_shared<const PointRef>(cyc_point(1)), 1}};
  CHECK(proximal_run_set(tower, a, c, Rational(1, 4), 50).count() == 50);
  CHECK(proximal_run_set(tower, a, c, Rational(1, 8), 50).none());
}

TEST_CASE("weak-mixing window law") {
  const uint64_t H = 1000;
  const System fs{FullShift{2}};
  // all cylinder pairs of depth <= 3 have thick hitting sets at L = H/4
  for (int depth = 1; depth <= 3; ++depth) {
    for (uint64_t a = 0; a < (uint64_t{1} << depth); ++a) {
      for (uint64_t b = 0; b < (uint64_t{1} << depth); ++b) {
        std::string u(depth, '0');
        std::string v(depth, '0');
        for (int i = 0; i < depth; ++i) {
          if ((a >> i) & 1) {
            u[i] = '1';
          }
          if ((b >> i) & 1) {
            v[i] = '1';
          }
        }
        const auto w = hitting_set(fs, cyl(u), cyl(v), H);
        CHECK(intfam::check_thick(w, H / 4).verified());
      }
    }
  }
  // a rotation refutes thickness on some pair
  for (int64_t m = 2; m <= 5; ++m) {
    const System rot{CyclicRotation{m}};
    const auto w = hitting_set(rot, residues({0}), residues({1}), H);
    CHECK_FALSE(intfam::check_thick(w, 4).verified());
  }
}

TEST_CASE("proximal run sets") {
  const System fs{FullShift{2}};
  const auto x = shift_point("", "10");
  CHECK(proximal_run_set(fs, x, x, Rational(1, 32), 50).count() == 50);

  const System rot{CyclicRotation{5}};
  CHECK(proximal_run_set(rot, cyc_point(0), cyc_point(1), Rational(1, 5), 100)
            .none());

  // thick indicator vs the all-ones point: runs grow inside the runs of A
  const auto thick = intfam::make_set(intfam::ThickSchedule{});
  const auto ind = PointRef{ShiftPoint{
      symseq::make_generator(symseq::Indicator{thick}), 0}};
  const auto ones = shift_point("", "1");
  const uint64_t H = 10000;
  const auto runs = proximal_run_set(fs, ind, ones, Rational(1, 32), H);
  // oracle: direct window scan; d < 2^-5 means indices n..n+5 all in A
  const auto a = thick->window(H + 6);
  for (uint64_t n = 0; n < H; ++n) {
    bool all = true;
    for (uint64_t j = 0; j <= 5; ++j) {
      all = all && a.test(n + j);
    }
    CHECK(runs.test(n) == all);
  }
  CHECK(runs.longest_run().length >= 90);
}

TEST_CASE("sample_proximal_cell finds patched candidates") {
  const auto fs = catalog::full_shift(2);
  const auto x = shift_point("", "0");
  ProximalSearchParams params;
  params.min_run = 100;
  params.horizon = 1024;
  const auto z = sample_proximal_cell(*fs, x, cyl("1"), params);
  REQUIRE(z.has_value());
  CHECK(contains(*fs, cyl("1"), *z));
  CHECK(proximal_run_set(*fs, x, *z, params.eps, params.horizon)
            .longest_run()
            .length >= 100);

  // x itself inside the region is returned directly
  const auto self = sample_proximal_cell(*fs, x, cyl("00"), params);
  REQUIRE(self.has_value());
  CHECK(self->canonical_key() == x.canonical_key());

  // degenerate single-point subshift has nothing in the region
  const auto zero_sys = catalog::subshift(
      symseq::make_generator(symseq::EventuallyPeriodic{"", "0"}), 256);
  const auto none = sample_proximal_cell(
      *zero_sys, PointRef{ShiftPoint{
                     std::get<SubshiftClosure>(zero_sys->spec()).generator, 0}},
      cyl("1"), params);
  CHECK_FALSE(none.has_value());
}

TEST_CASE("metric ball compilation") {
  const System fs{FullShift{2}};
  const auto x = shift_point("", "01");
  const auto ball = compile_ball(fs, x, Rational(1, 8));
  const auto* cyl_spec = std::get_if<Cylinder>(&ball.v);
  REQUIRE(cyl_spec != nullptr);
  CHECK(cyl_spec->word == "0101"); // agree through 2^-4 < 1/8

  const System rot{CyclicRotation{6}};
  const auto rball = compile_ball(rot, cyc_point(0), Rational(1, 4));
  const auto* rs = std::get_if<ResidueSet>(&rball.v);
  REQUIRE(rs != nullptr);
  CHECK(rs->residues == std::vector<int64_t>{0, 1, 5});

  // membership through the compiled ball equals the exact metric test
  for (int64_t r = 0; r < 6; ++r) {
    CHECK(contains(rot, rball, cyc_point(r)) ==
          closer_than(rot, cyc_point(0), cyc_point(r), Rational(1, 4)));
  }
}

TEST_CASE("minimal-point law across every basic open of the catalog") {
  // points of minimal-by-construction systems return syndetically to
  // every basic open set containing them, with the period as gap bound
  const uint64_t H = 1000;
  for (const auto& sys : catalog::minimal_catalog()) {
    const auto hint = sys->period_hint();
    REQUIRE(hint.has_value());
    if (*hint > H / 2) {
      continue; // gap bound would not fit the window
    }
    CHECK(sys->minimal_by_construction());
    for (const auto& u : disjoint::basic_opens(*sys, 1)) {
      for (const auto& p : disjoint::sample_points_in(*sys, u, 2)) {
        REQUIRE(contains(*sys, u, p));
        const auto w = return_set(*sys, p, u, H);
        CHECK(intfam::check_syndetic(w, *hint).verified());
      }
    }
  }
}

TEST_CASE("oracle equivalence: shortcuts equal naive simulation") {
  const uint64_t H = 10000;
  struct Case {
    std::shared_ptr<const System> sys;
    PointRef x;
    OpenSetSpec u;
  };
  const auto fib = catalog::fibonacci_generator();
  std::vector<Case> cases{
      {catalog::cyclic(7), cyc_point(3), residues({0, 2})},
      {catalog::odometer({2, 3}), PointRef{OdometerPoint{{1, 2}}},
       residues({0, 4})},
      {catalog::circle(Rational(5, 8), 8), PointRef{CirclePoint{Rational(1, 3)}},
       OpenSetSpec{Arc{Rational(1, 4), Rational(5, 8)}}},
      {catalog::subshift(fib, 16384), PointRef{ShiftPoint{fib, 2}}, cyl("010")},
      {catalog::full_shift(2), shift_point("11", "010"), cyl("01")},
  };
  for (const auto& c : cases) {
    CHECK(return_set(*c.sys, c.x, c.u, H) == return_set_naive(*c.sys, c.x, c.u, H));
  }

  // structured systems: product, power, tower, ladder
  const System prod{ProductSystem{{*catalog::full_shift(2), *catalog::cyclic(3)}}};
  const PointRef prod_pt{ProductPoint{{shift_point("", "01"), cyc_point(1)}}};
  const OpenSetSpec prod_u{ProductSpec{{cyl("0"), residues({0})}}};
  CHECK(return_set(prod, prod_pt, prod_u, H) ==
        return_set_naive(prod, prod_pt, prod_u, H));

  const System pow{PowerSystem{catalog::full_shift(2), 3}};
  CHECK(return_set(pow, shift_point("", "01"), cyl("0"), 3000) ==
        return_set_naive(pow, shift_point("", "01"), cyl("0"), 3000));

  const System tower{TowerSystem{catalog::cyclic(4), 3}};
  const PointRef tower_pt{
      TowerPoint{std::make_shared<const PointRef>(cyc_point(2)), 2}};
  LevelSet ls;
  ls.level = 1;
  ls.base = std::make_shared<const OpenSetSpec>(residues({0}));
  CHECK(return_set(tower, tower_pt, OpenSetSpec{ls}, H) ==
        return_set_naive(tower, tower_pt, OpenSetSpec{ls}, H));

  const auto ladder = make_surjective(*catalog::cyclic(3), 4);
  const PointRef ladder_pt{
      TowerPoint{std::make_shared<const PointRef>(cyc_point(1)), 3}};
  LevelSet lls;
  lls.level = 1;
  lls.base = std::make_shared<const OpenSetSpec>(residues({2}));
  CHECK(return_set(ladder, ladder_pt, OpenSetSpec{lls}, 500) ==
        return_set_naive(ladder, ladder_pt, OpenSetSpec{lls}, 500));
}

TEST_CASE("make_surjective covers everything below the rim") {
  // 10^inf has no shift preimage; the ladder restores preimages
  const auto gen = symseq::make_generator(symseq::EventuallyPeriodic{"1", "0"});
  const auto base = catalog::subshift(gen, 256);
  {
    const auto defect = surjectivity_defect(*base);
    REQUIRE(defect.size() == 1); // exactly 10^inf itself
    CHECK(defect[0].canonical_key() ==
          PointRef{ShiftPoint{gen, 0}}.canonical_key());
  }
  const int64_t depth = 3;
  const auto ladder = make_surjective(*base, depth);
  const auto states = enumerate_states(ladder);
  CHECK(states.size() == enumerate_states(*base).size() * (depth + 1));
  const auto defect = surjectivity_defect(ladder);
  // every uncovered state sits on the truncation rim (level == depth)
  for (const auto& p : defect) {
    CHECK(std::get<TowerPoint>(p.v).level == depth);
  }
  CHECK(defect.size() == enumerate_states(*base).size());

  // level-1 embedding reproduces the base dynamics
  PointRef embedded{TowerPoint{
      std::make_shared<const PointRef>(PointRef{ShiftPoint{gen, 0}}), 1}};
  PointRef plain{ShiftPoint{gen, 0}};
  for (int i = 0; i < 10; ++i) {
    const auto& tp = std::get<TowerPoint>(embedded.v);
    CHECK(tp.level == 1);
    CHECK(tp.base->canonical_key() == plain.canonical_key());
    embedded = step(ladder, embedded);
    plain = step(*base, plain);
  }
}

TEST_CASE("m-set machinery: first visit and preimage specs") {
  const auto sys = catalog::cyclic(7);
  const auto v = residues({2});
  const auto k = first_visit(*sys, cyc_point(3), v, 100);
  REQUIRE(k.has_value());
  CHECK(*k == 6); // 3 + 6 = 9 = 2 mod 7
  const auto pre = preimage_spec(*sys, v, *k);
  const auto* rs = std::get_if<ResidueSet>(&pre.v);
  REQUIRE(rs != nullptr);
  CHECK(rs->residues == std::vector<int64_t>{3});
}

TEST_CASE("spec subset checks") {
  const System fs{FullShift{2}};
  CHECK(spec_subset(fs, cyl("011"), cyl("01")));
  CHECK_FALSE(spec_subset(fs, cyl("01"), cyl("011")));
  const System rot{CyclicRotation{6}};
  CHECK(spec_subset(rot, residues({1, 2}), residues({0, 1, 2})));
  CHECK_FALSE(spec_subset(rot, residues({3}), residues({0, 1})));
  const System circ{CircleRotation{Rational(1, 3), 8}};
  CHECK(spec_subset(circ, OpenSetSpec{Arc{Rational(1, 4), Rational(1, 2)}},
                    OpenSetSpec{Arc{Rational(0), Rational(3, 4)}}));
  CHECK_FALSE(spec_subset(circ, OpenSetSpec{Arc{Rational(1, 4), Rational(1, 2)}},
                          OpenSetSpec{Arc{Rational(0), Rational(1, 3)}}));
}

TEST_CASE("json round trips") {
  const auto systems_corpus = std::vector<System>{
      System{FullShift{2}},
      *catalog::subshift(catalog::morse_generator(), 512),
      System{CyclicRotation{5}},
      System{OdometerTruncation{{2, 3, 2}}},
      System{CircleRotation{Rational(3, 5), 8}},
      System{ProductSystem{{System{FullShift{2}}, System{CyclicRotation{3}}}}},
      System{PowerSystem{catalog::full_shift(2), 2}},
      System{TowerSystem{catalog::cyclic(3), 4}},
      make_surjective(*catalog::cyclic(2), 3),
  };
  for (const auto& sys : systems_corpus) {
    CHECK(System::from_json(sys.to_json()).to_json() == sys.to_json());
  }
  const auto pts = std::vector<PointRef>{
      shift_point("1", "01"),
      cyc_point(2),
      PointRef{OdometerPoint{{1, 0, 1}}},
      PointRef{CirclePoint{Rational(2, 7)}},
      PointRef{ProductPoint{{cyc_point(1), shift_point("", "1")}}},
      PointRef{TowerPoint{std::make_shared<const PointRef>(cyc_point(0)), 2}},
  };
  for (const auto& p : pts) {
    CHECK(PointRef::from_json(p.to_json()).to_json() == p.to_json());
  }
  LevelSet ls;
  ls.level = 2;
  ls.base = std::make_shared<const OpenSetSpec>(residues({1}));
  MetricBall mb;
  mb.center = std::make_shared<const PointRef>(cyc_point(0));
  mb.radius = Rational(1, 3);
  const auto specs = std::vector<OpenSetSpec>{
      cyl("01"),
      residues({0, 2}),
      OpenSetSpec{Arc{Rational(0), Rational(1, 2)}},
      OpenSetSpec{ls},
      OpenSetSpec{ProductSpec{{cyl("0"), residues({1})}}},
      OpenSetSpec{mb},
  };
  for (const auto& s : specs) {
    CHECK(OpenSetSpec::from_json(s.to_json()).to_json() == s.to_json());
  }
}

TEST_CASE("incompatible open sets are rejected") {
  const System fs{FullShift{2}};
  CHECK_THROWS_AS(return_set(fs, shift_point("", "0"), residues({0}), 10),
                  Error);
  const System rot{CyclicRotation{3}};
  CHECK_THROWS_AS(contains(rot, cyl("0"), cyc_point(0)), Error);
  CHECK_THROWS_AS(validate_point(rot, cyc_point(5)), Error);
}
