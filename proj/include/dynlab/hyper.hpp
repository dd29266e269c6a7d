#ifndef DYNLAB_HYPER_HPP
#define DYNLAB_HYPER_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "dynlab/intfam.hpp"
#include "dynlab/rational.hpp"
#include "dynlab/systems.hpp"

namespace dynlab::hyper {

/// A point of the finite-subset approximation of K(X): nonempty,
/// canonically ordered, duplicates removed.
struct FiniteSubsetPoint {
  std::shared_ptr<const systems::System> system;
  std::vector<systems::PointRef> points;

  nlohmann::json to_json() const;
};

FiniteSubsetPoint make_finite_subset(std::shared_ptr<const systems::System> sys,
                                     std::vector<systems::PointRef> points);

bool same_subset(const FiniteSubsetPoint& a, const FiniteSubsetPoint& b);

struct HausdorffResult {
  Rational value;
  /// Set when some shift comparison exhausted the truncation depth;
  /// the reported value is then a lower bound collapsed to 0 for the
  /// affected pairs.
  bool truncated = false;
};

/// Hausdorff distance under the module metric, shift comparisons
/// truncated at `depth` symbols (exact dyadic rationals).
HausdorffResult hausdorff_distance(const FiniteSubsetPoint& a,
                                   const FiniteSubsetPoint& b,
                                   unsigned depth = 64);

/// T_K(A) = {Tx : x in A}, re-canonicalized; size may drop on merges.
FiniteSubsetPoint induced_step(const FiniteSubsetPoint& a);

FiniteSubsetPoint induced_step_n(const FiniteSubsetPoint& a, uint64_t n);

struct PeriodicSetParams {
  uint64_t max_size = 4;
  uint64_t max_period = 4;
  uint64_t budget = 64;
};

struct PeriodicSetResult {
  intfam::Verdict verdict;
  std::optional<FiniteSubsetPoint> witness_set;
  uint64_t period = 0;
};

/// Searches for a finite C inside U with induced_step^k'(C) a subset of
/// C for some k' <= max_period; a verified C is a periodic (hence
/// distal) point of the finite hyperspace approximation. Negative
/// results are budget-relative.
PeriodicSetResult periodic_set_search(std::shared_ptr<const systems::System> sys,
                                      const systems::OpenSetSpec& u,
                                      const PeriodicSetParams& params);

/// Re-runs the witness conditions: C inside U, induced_step^period(C)
/// inside C, for `multiples` successive period blocks.
bool reverify_periodic_witness(const PeriodicSetResult& result,
                               const systems::OpenSetSpec& u,
                               uint64_t multiples = 3);

} // namespace dynlab::hyper

#endif
