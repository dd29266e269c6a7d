#ifndef DYNLAB_DISJOINT_HPP
#define DYNLAB_DISJOINT_HPP

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

#include <nlohmann/json.hpp>

#include "dynlab/intfam.hpp"
#include "dynlab/systems.hpp"

namespace dynlab::disjoint {

using SystemPtr = std::shared_ptr<const systems::System>;

/// Deterministic enumeration of a countable dense subset: periodic
/// points ordered by (period length, lexicographic word) on full
/// shifts, all states on finite systems, shifts of the generator on
/// subshift closures, diagonal pairing on products. Injective.
class DenseEnumeration {
public:
  explicit DenseEnumeration(SystemPtr sys);

  /// The index-th point, or nullopt once a finite enumeration is
  /// exhausted.
  std::optional<systems::PointRef> point_at(uint64_t index) const;

  const systems::System& system() const { return *sys_; }

private:
  void grow(uint64_t index) const;
  bool produce_next() const; // appends one point or reports exhaustion

  SystemPtr sys_;
  mutable std::mutex mutex_;
  mutable std::vector<systems::PointRef> cache_;
  mutable bool exhausted_ = false;
  mutable uint64_t cursor_ = 0; // variant-specific generation cursor
  mutable std::vector<std::unique_ptr<DenseEnumeration>> children_;
  mutable std::set<std::string> seen_; // dedup for subshift shifts
};

std::vector<systems::PointRef> enumerate_dense(SystemPtr sys, uint64_t count);

/// A located witness x in D cap U together with everything needed to
/// re-verify it from scratch.
struct WitnessRecord {
  SystemPtr x_system;
  SystemPtr y_system;
  systems::PointRef x;
  systems::PointRef y;
  systems::OpenSetSpec u;
  systems::OpenSetSpec v;
  uint64_t horizon = 0;
  uint64_t gap = 0;
  BitWindow transfer_window;
  intfam::Verdict syndetic_verdict;

  nlohmann::json to_json() const;
  /// Recomputes the transfer window and its verdict; true when both
  /// match the record bit-exactly.
  bool reverify() const;
};

struct SearchOutcome {
  intfam::Verdict verdict;
  std::optional<WitnessRecord> record;
};

struct WitnessSearchParams {
  uint64_t horizon = 1024;
  uint64_t gap = 1;
  uint64_t budget = 64;
};

/// Scans D cap U in enumeration order for the first x whose transfer
/// window N((x,y), UxV) passes check_syndetic at the configured gap.
SearchOutcome witness_search(SystemPtr x_system, const DenseEnumeration& dense,
                             SystemPtr y_system, const systems::PointRef& y,
                             const systems::OpenSetSpec& v,
                             const systems::OpenSetSpec& u,
                             const WitnessSearchParams& params);

/// Gap default for periodic scenarios: twice the lcm of the periods in
/// play (candidate periods up to `depth` on shifts, the period hint on
/// rotation-like systems).
uint64_t default_gap(const systems::System& x_system, int depth,
                     const systems::System& y_system);

/// The basic open sets of the given depth: cylinders on shifts,
/// singletons on finite rotations, partition arcs on circles, level
/// sets on towers, componentwise products.
std::vector<systems::OpenSetSpec> basic_opens(const systems::System& sys,
                                              int depth);

/// Deterministic sample points inside a basic open set.
std::vector<systems::PointRef> sample_points_in(const systems::System& sys,
                                                const systems::OpenSetSpec& cell,
                                                uint64_t count);

struct ScanParams {
  int depth = 2;       // cylinder depth on the X side
  uint64_t horizon = 10000;
  std::optional<uint64_t> gap; // default: default_gap
  uint64_t budget = 128;
  uint64_t y_samples = 2;
};

struct ScanCell {
  systems::OpenSetSpec u;
  systems::OpenSetSpec v;
  intfam::Outcome outcome = intfam::Outcome::inconclusive;
  std::vector<nlohmann::json> per_sample;
  std::optional<std::string> error;
};

struct ScanReport {
  std::vector<ScanCell> cells;
  uint64_t verified = 0;
  uint64_t refuted = 0;
  uint64_t inconclusive = 0;
  uint64_t errors = 0;
  uint64_t gap = 0;
  nlohmann::json to_json() const;
  bool all_verified() const {
    return refuted == 0 && inconclusive == 0 && errors == 0 && verified > 0;
  }
};

/// Runs witness_search for every (depth-l cylinder U, partition cell V,
/// sampled y in V); on finite rotations the canonical base point is
/// probed against every cell as well, so phase conflicts surface as
/// refuted pairs. An all-verified report is the finite shadow of the
/// disjointness criterion.
ScanReport criterion_scan(SystemPtr x_system, SystemPtr y_system,
                          const ScanParams& params);

/// One x in D cap U whose return window meets window(A & B) for every
/// listed thick generator A; the same x serves all of them.
SearchOutcome central_criterion_check(
    SystemPtr x_system, const DenseEnumeration& dense,
    const systems::OpenSetSpec& u, const intfam::SetGeneratorPtr& b_dyn_syndetic,
    const std::vector<intfam::SetGeneratorPtr>& thick_list, uint64_t horizon,
    uint64_t budget);

struct JoiningApprox {
  uint64_t total_cells = 0;
  std::vector<uint64_t> visited; // sorted cell ids, recomputable
  int depth = 1;
  uint64_t horizon = 0;
  Rational coverage;
  nlohmann::json to_json() const;
};

/// Visited-cell fraction of the product trajectory at resolution
/// (depth-l cylinders on X) x (canonical Y cells).
JoiningApprox joining_coverage(SystemPtr x_system, SystemPtr y_system,
                               const systems::PointRef& x0,
                               const systems::PointRef& y0, int depth,
                               uint64_t horizon);

enum class StarKind { ip_star, c_star };

/// Searches enumerated x in U whose return window passes dual_check
/// against the corpus of the matching family.
SearchOutcome star_sufficient_check(SystemPtr x_system,
                                    const systems::OpenSetSpec& u, StarKind kind,
                                    const std::vector<intfam::CorpusMember>& corpus,
                                    uint64_t horizon, uint64_t budget);

/// Transfers a verified witness to the n-fold product along offsets:
/// x' = (T^k1 x, ..., T^kn x) and W = W_1 x ... x W_n where W_i defaults
/// to sigma^ki U; supplied targets must contain sigma^ki U (checked at
/// the cylinder level). The returned record's window contains the
/// input's, exactly.
WitnessRecord product_witness_transfer(
    const WitnessRecord& rec, const std::vector<uint64_t>& offsets,
    uint64_t horizon,
    const std::vector<systems::OpenSetSpec>* targets = nullptr);

struct PowerTransferResult {
  intfam::Verdict verdict;      // syndetic check of the mapped window
  intfam::Verdict tower_route;  // tower transfer window == dilated window
  std::optional<WitnessRecord> tower_record;
  BitWindow mapped_window;      // transfer times of (X, T^n) vs (Y, S)
};

/// Certifies (X, T^n) against (Y, S) through the tower over Y:
/// transfer times on level 1 are n*k and map down to k.
PowerTransferResult power_witness_transfer(SystemPtr x_system, SystemPtr y_system,
                                           int64_t exponent,
                                           const systems::OpenSetSpec& u,
                                           const systems::OpenSetSpec& v,
                                           const WitnessSearchParams& params);

struct WeakMixingReport {
  std::vector<nlohmann::json> pairs;
  uint64_t thick_verified = 0;
  uint64_t thick_refuted = 0;
  nlohmann::json to_json() const;
};

/// check_thick on every hitting set N(U, V) over the depth-l basic
/// opens; all-thick is the window shadow of weak mixing.
WeakMixingReport weak_mixing_scan(SystemPtr sys, int depth, uint64_t run_length,
                                  uint64_t horizon);

/// The constructed transitive point of FullShift(k): every word occurs
/// at every residue class mod `modulus`.
systems::PointRef transitive_point(int alphabet_size, uint64_t modulus);

} // namespace dynlab::disjoint

#endif
