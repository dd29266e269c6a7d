#ifndef DYNLAB_SYSTEMS_HPP
#define DYNLAB_SYSTEMS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dynlab/bitwindow.hpp"
#include "dynlab/rational.hpp"
#include "dynlab/symseq.hpp"

namespace dynlab::systems {

class System;
struct PointRef;
struct OpenSetSpec;

struct FullShift {
  int alphabet_size = 2;
};

/// Orbit closure of a generator, represented by the generator plus its
/// factor language up to `language_depth` symbols. Points are the
/// generator's shifts; limit points beyond shifts are out of scope.
struct SubshiftClosure {
  symseq::GeneratorPtr generator;
  uint64_t language_depth = 4096;
};

struct CyclicRotation {
  int64_t modulus = 1;
};

/// Truncated odometer, realized as rotation on Z/(r1*...*rd) with
/// mixed-radix digit labels (least significant digit first).
struct OdometerTruncation {
  std::vector<int64_t> radixes;
};

struct CircleRotation {
  Rational angle; // exact rational in (0, 1)
  int partition_resolution = 8;
};

struct ProductSystem {
  std::vector<System> factors;
};

struct PowerSystem {
  std::shared_ptr<const System> base;
  int64_t exponent = 1;
};

/// The tower over a base system: states (y, i) for 1 <= i <= height,
/// stepping (y, i) -> (y, i+1) below the top and (y, height) -> (Sy, 1).
struct TowerSystem {
  std::shared_ptr<const System> base;
  int64_t height = 1;
};

/// Ladder extension used by make_surjective: states (x, j) for
/// 0 <= j <= depth. Level 0 is frozen, level 1 runs the base map,
/// levels 2..depth feed down by identity. Every state at level < depth
/// has a preimage; level depth is the truncation rim.
struct LadderSystem {
  std::shared_ptr<const System> base;
  int64_t depth = 1;
};

class System {
public:
  using Spec = std::variant<FullShift, SubshiftClosure, CyclicRotation,
                            OdometerTruncation, CircleRotation, ProductSystem,
                            PowerSystem, TowerSystem, LadderSystem>;

  explicit System(Spec spec);

  const Spec& spec() const { return spec_; }

  /// Static flag from the construction, never a runtime claim.
  bool minimal_by_construction() const;

  /// Exact orbit period shared by all points, when the variant has one
  /// (rotations, odometers, towers/products over such).
  std::optional<uint64_t> period_hint() const;

  std::string canonical_key() const;

  nlohmann::json to_json() const;
  static System from_json(const nlohmann::json& j);

private:
  Spec spec_;
};

struct ShiftPoint {
  symseq::GeneratorPtr generator;
  uint64_t offset = 0;
};

struct CyclicPoint {
  int64_t residue = 0;
};

struct OdometerPoint {
  std::vector<int64_t> digits; // least significant first
};

struct CirclePoint {
  Rational value; // in [0, 1)
};

struct ProductPoint {
  std::vector<PointRef> parts;
};

struct TowerPoint {
  std::shared_ptr<const PointRef> base;
  int64_t level = 1; // ladder points use levels 0..depth
};

struct PointRef {
  using Spec = std::variant<ShiftPoint, CyclicPoint, OdometerPoint,
                            CirclePoint, ProductPoint, TowerPoint>;
  Spec v;

  std::string canonical_key() const;
  nlohmann::json to_json() const;
  static PointRef from_json(const nlohmann::json& j);
};

struct Cylinder {
  std::string word; // anchored at index 0; empty word = whole space
};

struct ResidueSet {
  std::vector<int64_t> residues; // sorted, unique
};

/// Half-open arc [low, high) on the circle; high <= low wraps through 0.
struct Arc {
  Rational low;
  Rational high;
};

struct LevelSet {
  int64_t level = 1;
  std::shared_ptr<const OpenSetSpec> base;
};

struct ProductSpec {
  std::vector<OpenSetSpec> parts;
};

struct MetricBall {
  std::shared_ptr<const PointRef> center;
  Rational radius;
};

struct OpenSetSpec {
  using Spec =
      std::variant<Cylinder, ResidueSet, Arc, LevelSet, ProductSpec, MetricBall>;
  Spec v;

  std::string canonical_key() const;
  nlohmann::json to_json() const;
  static OpenSetSpec from_json(const nlohmann::json& j);
};

// --- kinematics -----------------------------------------------------------

PointRef step(const System& sys, const PointRef& x);
PointRef step_n(const System& sys, const PointRef& x, uint64_t n);
std::vector<PointRef> trajectory(const System& sys, const PointRef& x,
                                 uint64_t horizon);

/// Exact membership of x in the open set. MetricBall specs are compiled
/// to variant-native specs first.
bool contains(const System& sys, const OpenSetSpec& u, const PointRef& x);

/// Throws unless x structurally belongs to sys.
void validate_point(const System& sys, const PointRef& x);

/// Compiles a metric ball to the variant-native spec (cylinder, residue
/// set, arc, level set, product) under the module metric.
OpenSetSpec compile_ball(const System& sys, const PointRef& center,
                         const Rational& radius);
OpenSetSpec compile_spec(const System& sys, const OpenSetSpec& u);

/// Decides d(x, y) < eps exactly under the module metric
/// (2^-k on shifts, normalized circle distance on rotations, max on
/// products, discrete level distance on towers).
bool closer_than(const System& sys, const PointRef& x, const PointRef& y,
                 const Rational& eps);

struct TruncatedDistance {
  Rational value;
  bool truncated = false; // shift prefixes agreed through the whole depth
};

/// Distance with shift comparisons truncated at `depth` symbols;
/// exact for the finite variants.
TruncatedDistance distance_truncated(const System& sys, const PointRef& x,
                                     const PointRef& y, unsigned depth);

/// N_T(x, U) on [0, H) via variant shortcuts.
BitWindow return_set(const System& sys, const PointRef& x, const OpenSetSpec& u,
                     uint64_t horizon);
/// Same set by plain trajectory simulation; the oracle route.
BitWindow return_set_naive(const System& sys, const PointRef& x,
                           const OpenSetSpec& u, uint64_t horizon);

/// N_{TxS}((x,y), UxV) on [0, H).
BitWindow transfer_set(const System& sys_x, const System& sys_y,
                       const PointRef& x, const PointRef& y,
                       const OpenSetSpec& u, const OpenSetSpec& v,
                       uint64_t horizon);

/// N_T(U, V) = {n : U meets T^-n V} on [0, H), exact per variant
/// (word-extension feasibility on shifts, residue/arc arithmetic on
/// rotations, exhaustive on finite variants).
BitWindow hitting_set(const System& sys, const OpenSetSpec& u,
                      const OpenSetSpec& v, uint64_t horizon);

/// {n : d(T^n x, T^n y) < eps} on [0, H).
BitWindow proximal_run_set(const System& sys, const PointRef& x,
                           const PointRef& y, const Rational& eps,
                           uint64_t horizon);

struct ProximalSearchParams {
  Rational eps = Rational(1, 64);
  uint64_t min_run = 32;
  uint64_t horizon = 4096;
  uint64_t budget = 256;
};

/// Searches periodic/eventually-periodic candidates z in `region` whose
/// run of eps-agreement with x reaches min_run. Absent result means the
/// budget ran out, not nonexistence.
std::optional<PointRef> sample_proximal_cell(const System& sys,
                                             const PointRef& x,
                                             const OpenSetSpec& region,
                                             const ProximalSearchParams& params);

/// Ladder extension of the footnote construction; see LadderSystem.
System make_surjective(const System& sys, int64_t depth);

/// All states of a finite-presentation system, canonical order.
std::vector<PointRef> enumerate_states(const System& sys);

/// States without a preimage under one step (exhaustive over
/// enumerate_states); empty means surjective on the enumerated space.
std::vector<PointRef> surjectivity_defect(const System& sys);

/// First n in [0, H) with T^n y in V, if any.
std::optional<uint64_t> first_visit(const System& sys, const PointRef& y,
                                    const OpenSetSpec& v, uint64_t horizon);

/// The open set T^-k V for rotation-like variants (residues and arcs).
OpenSetSpec preimage_spec(const System& sys, const OpenSetSpec& v, uint64_t k);

/// Whether `inner` provably sits inside `outer` at the level of the
/// open-set descriptions (cylinder prefix extension, residue subset,
/// arc inclusion, product componentwise).
bool spec_subset(const System& sys, const OpenSetSpec& inner,
                 const OpenSetSpec& outer);

} // namespace dynlab::systems

#endif
