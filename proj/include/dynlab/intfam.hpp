#ifndef DYNLAB_INTFAM_HPP
#define DYNLAB_INTFAM_HPP

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "dynlab/bitwindow.hpp"
#include "dynlab/rational.hpp"
#include "dynlab/systems.hpp"

namespace dynlab::intfam {

class SetGenerator;
using SetGeneratorPtr = std::shared_ptr<const SetGenerator>;

/// {a, a+d, a+2d, ...}
struct ArithmeticProgression {
  uint64_t start = 0;
  uint64_t step = 1;
};

/// Union of runs [n_i, n_i + len_i) for i >= 1 with
/// n_i = a2*i^2 + a1*i + a0 and len_i = b1*i + b0; run lengths grow
/// without bound, so the set is thick.
struct ThickSchedule {
  uint64_t start_quadratic = 1; // a2
  uint64_t start_linear = 0;    // a1
  uint64_t start_constant = 0;  // a0
  uint64_t length_linear = 1;   // b1 >= 1
  uint64_t length_constant = 0; // b0
};

/// FS of the infinite sequence obtained by cycling the listed
/// generators, i.e. all sums sum(c_i * p_i) with c_i >= 0 not all zero.
/// This is the finite description of a genuine IP set.
struct FiniteSums {
  std::vector<uint64_t> generators;
};

struct ReturnSetRef {
  std::shared_ptr<const systems::System> system;
  systems::PointRef point;
  systems::OpenSetSpec open_set;
};

/// N_S(y, V_y) with y in V_y and (Y, S) minimal-by-construction.
struct DynSyndetic {
  std::shared_ptr<const systems::System> system;
  systems::PointRef point;
  systems::OpenSetSpec neighborhood;
};

/// N_S(y, V) for minimal (Y, S) and any nonempty open V.
struct MSet {
  std::shared_ptr<const systems::System> system;
  systems::PointRef point;
  systems::OpenSetSpec open_set;
};

/// {n : d(T^n x, T^n y) < eps}; the thick side of a central witness.
struct ProximalRuns {
  std::shared_ptr<const systems::System> system;
  systems::PointRef x;
  systems::PointRef y;
  Rational eps;
};

struct ExplicitSet {
  std::vector<uint64_t> elements;
  // Optional arithmetic tail {start + k*step : k >= 0}.
  std::optional<uint64_t> tail_start;
  uint64_t tail_step = 1;
};

struct UnionOf {
  std::vector<SetGeneratorPtr> parts;
};
struct IntersectionOf {
  std::vector<SetGeneratorPtr> parts;
};
struct ComplementOf {
  SetGeneratorPtr inner;
};
struct TranslateBy {
  SetGeneratorPtr inner;
  uint64_t shift = 0;
};

class SetGenerator {
public:
  using Spec = std::variant<ArithmeticProgression, ThickSchedule, FiniteSums,
                            ReturnSetRef, DynSyndetic, MSet, ProximalRuns,
                            ExplicitSet, UnionOf, IntersectionOf, ComplementOf,
                            TranslateBy>;

  explicit SetGenerator(Spec spec);

  const Spec& spec() const { return spec_; }

  /// Exact membership of every n in [0, H); combinators are realized
  /// windowwise (complement within [0, H)).
  BitWindow window(uint64_t horizon) const;

  /// Point membership, backed by a geometrically grown cached window.
  bool contains(uint64_t n) const;

  /// Family the generator instantiates, for corpus bookkeeping.
  std::string family_tag() const;

  nlohmann::json to_json() const;
  static SetGeneratorPtr from_json(const nlohmann::json& j);

private:
  Spec spec_;
  mutable std::mutex cache_mutex_;
  mutable std::optional<BitWindow> cache_;
};

SetGeneratorPtr make_set(SetGenerator::Spec spec);

// --- verdicts ---------------------------------------------------------------

enum class Outcome { verified, refuted, inconclusive };

/// Scope of a verdict: what the outcome is relative to. Window verdicts
/// are exact on [0, H); budget and corpus verdicts are evidence only.
enum class Scope { window, budget, corpus };

struct FamilyClaim {
  std::string family; // syndetic | thick | piecewise_syndetic | ip | dual
  nlohmann::json parameters;
  uint64_t horizon = 0;

  nlohmann::json to_json() const;
};

struct Verdict {
  Outcome outcome = Outcome::inconclusive;
  Scope scope = Scope::window;
  FamilyClaim claim;
  nlohmann::json witness;        // present iff verified
  nlohmann::json counterexample; // present iff refuted

  bool verified() const { return outcome == Outcome::verified; }
  nlohmann::json to_json() const;
};

std::string outcome_name(Outcome o);
std::string scope_name(Scope s);

/// Verified iff every length-g subwindow of [0, H) meets S; the refuting
/// counterexample is the first empty length-g interval. Requires
/// 1 <= g <= H. Window-exact: verified and refuted are complementary.
Verdict check_syndetic(const BitWindow& s, uint64_t gap);

/// Verified iff S contains a run of >= L consecutive integers; otherwise
/// refuted on this window (the infinitary claim stays open).
Verdict check_thick(const BitWindow& s, uint64_t run_length);

/// Verified iff some length-L interval of [0, H) carries S with all
/// gaps < g inside it.
Verdict check_piecewise_syndetic(const BitWindow& s, uint64_t gap,
                                 uint64_t run_length);

/// Searches p_1 <= ... <= p_k in [1, B] (lexicographic, subset-sum
/// pruned) whose 2^k - 1 nonempty subset sums all lie in S below H.
Verdict find_ip_generators(const BitWindow& s, unsigned k, uint64_t value_bound);

struct CorpusMember {
  std::string id;
  SetGeneratorPtr generator;
};

/// Refuted when some corpus member window is disjoint from S; otherwise
/// verified against this corpus (bounded evidence of dual membership).
Verdict dual_check(const BitWindow& s, const std::vector<CorpusMember>& corpus,
                   uint64_t horizon);

/// Dispatches one of the window checks from a FamilyClaim. The claim's
/// `family` selects the check and `parameters` carry its arguments.
Verdict check_claim(const BitWindow& s, const FamilyClaim& claim);

// --- the central-set bridge -------------------------------------------------

/// The dynamical-piecewise-syndetic side: a thick generator A and a
/// dynamical-syndetic witness (Y, S, y, V_y).
struct DpsDecomposition {
  SetGeneratorPtr thick_generator;
  std::shared_ptr<const systems::System> minimal_system;
  systems::PointRef point;
  systems::OpenSetSpec neighborhood;
};

/// The central-set side: (system, x, proximal minimal y, neighborhood)
/// plus the window verdicts for the three defining conditions.
struct CentralWitness {
  std::shared_ptr<const systems::System> system;
  systems::PointRef x;
  systems::PointRef minimal_y;
  systems::OpenSetSpec neighborhood; // U, a neighborhood of minimal_y
  // Minimality certificate: the minimal factor the witness was built from.
  std::shared_ptr<const systems::System> factor_system;
  systems::PointRef factor_point;
  Rational eps;
  uint64_t run_length = 0;
  uint64_t horizon = 0;

  Verdict identity_verdict;  // N(x, U) window equals window(A) & window(B)
  Verdict proximal_verdict;  // eps-agreement run of >= run_length
  Verdict syndetic_verdict;  // y's returns to tested neighborhoods

  BitWindow q_window; // window(A) & window(N_S(y, V_y))

  bool all_verified() const {
    return identity_verdict.verified() && proximal_verdict.verified() &&
           syndetic_verdict.verified();
  }
};

struct CentralBridgeParams {
  Rational eps = Rational(1, 64);
  uint64_t run_length = 16;
};

/// Builds the product system Sigma_2 x Y with x0 = (1_A, y),
/// y0 = (1^inf, y) and U = [1] x V_y, and certifies the three central-set
/// conditions on [0, H). Requires A thick-verified at (H, run_length) and
/// Y minimal-by-construction.
CentralWitness central_from_dps(const DpsDecomposition& dec, uint64_t horizon,
                                const CentralBridgeParams& params = {});

/// Extracts A' = {n : d(T^n x, T^n y) < eps} and
/// B' = N(y, B_eps(y)) from a central witness; asserts the windowed
/// inclusion window(A') & window(B') <= window(N(x, B_2eps(y))).
/// Requires B_2eps(y) inside the witness neighborhood.
DpsDecomposition dps_from_central(const CentralWitness& cw, const Rational& eps);

// --- documented default corpora ---------------------------------------------

/// Arithmetic progressions with step <= max_step, all offsets.
std::vector<CorpusMember> syndetic_corpus(uint64_t max_step);

/// A small spread of thick schedules.
std::vector<CorpusMember> thick_corpus();

/// FS sets of all generator pairs and triples with values <= bound.
std::vector<CorpusMember> ip_corpus(uint64_t bound);

/// N_S(y, V_y) sets from cyclic rotations with modulus <= max_modulus.
std::vector<CorpusMember> dyn_syndetic_corpus(int64_t max_modulus);

/// Central sets built by central_from_dps over a small grid of
/// (thick schedule, minimal rotation) pairs.
std::vector<CorpusMember> central_corpus(uint64_t horizon);

/// The documented default dual-check corpus: arithmetic progressions
/// with step <= 12, thick schedules, FS pairs/triples <= 20, dynamical
/// syndetic sets from cyclic rotations, and the central grid.
std::vector<CorpusMember> default_dual_corpus(uint64_t horizon);

/// Resolves the `corpus` field of a dual claim: either an inline array
/// of set specs or a named corpus ("default", "ip", "syndetic",
/// "thick", "dyn_syndetic", "central") with an optional "corpus_bound".
std::vector<CorpusMember> corpus_from_parameters(const nlohmann::json& parameters,
                                                 uint64_t horizon);

} // namespace dynlab::intfam

#endif
