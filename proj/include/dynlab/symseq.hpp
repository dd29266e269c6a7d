#ifndef DYNLAB_SYMSEQ_HPP
#define DYNLAB_SYMSEQ_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dynlab/rational.hpp"

namespace dynlab::intfam {
class SetGenerator;
}

namespace dynlab::symseq {

/// Finite word with preperiod, then the period repeated forever.
struct EventuallyPeriodic {
  std::string preperiod;
  std::string period;
};

/// Fixed point of a prolongable substitution started from the seed letter.
struct Substitution {
  std::map<char, std::string> rules;
  char seed = '0';
};

struct CodedArc {
  Rational low;
  Rational high; // half-open [low, high)
  char letter = '0';
};

/// Coding of the rotation n -> offset + n*angle (mod 1) by a finite
/// partition of the circle into half-open arcs.
struct RotationCoding {
  Rational angle;  // in (0, 1), exact rational
  Rational offset; // in [0, 1)
  std::vector<CodedArc> partition;
};

/// Indicator sequence 1_A of an integer set.
struct Indicator {
  std::shared_ptr<const intfam::SetGenerator> set;
};

/// Deterministic transitive sequence: all words over the alphabet are
/// concatenated in length-lexicographic order, padded with zeros so
/// every word also occurs at every residue class mod `modulus`.
struct WordCatalog {
  int alphabet_size = 2;
  uint64_t modulus = 1;
};

/// An immutable, finitely-described one-sided infinite sequence over a
/// small alphabet of digit letters '0'..'9'. All queries are pure;
/// internal prefix memoization is mutex-guarded and invisible to callers.
class SymbolGenerator {
public:
  using Spec = std::variant<EventuallyPeriodic, Substitution, RotationCoding,
                            Indicator, WordCatalog>;

  explicit SymbolGenerator(Spec spec);

  char symbol_at(uint64_t n) const;
  std::string prefix(uint64_t n) const;

  const Spec& spec() const { return spec_; }
  const std::vector<char>& alphabet() const { return alphabet_; }

  /// Exact eventually-periodic form when structurally available
  /// (EventuallyPeriodic and RotationCoding variants).
  std::optional<EventuallyPeriodic> eventually_periodic_form() const;

  /// Normalized identity string; equal keys mean equal sequences for
  /// the structurally comparable variants.
  std::string canonical_key() const;

  nlohmann::json to_json() const;
  static std::shared_ptr<const SymbolGenerator> from_json(const nlohmann::json& j);

private:
  void materialize_to(uint64_t length) const;

  Spec spec_;
  std::vector<char> alphabet_;
  mutable std::mutex memo_mutex_;
  mutable std::string memo_;        // grown prefix for the iterative variants
  mutable size_t memo_expanded_ = 0; // substitution: next position to expand
};

using GeneratorPtr = std::shared_ptr<const SymbolGenerator>;

GeneratorPtr make_generator(SymbolGenerator::Spec spec);

/// Canonical form with minimal preperiod and primitive period.
EventuallyPeriodic normalize_eventually_periodic(EventuallyPeriodic ep);

/// The sequence n -> ep(n + shift), again in canonical form.
EventuallyPeriodic shift_eventually_periodic(const EventuallyPeriodic& ep,
                                             uint64_t shift);

} // namespace dynlab::symseq

#endif
