#ifndef DYNLAB_BITWINDOW_HPP
#define DYNLAB_BITWINDOW_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dynlab {

/// A finite materialization of a subset of Z+ on the window [0, H):
/// dense boolean membership, word-packed.
class BitWindow {
public:
  struct Run {
    uint64_t start = 0;
    uint64_t length = 0;
  };

  explicit BitWindow(uint64_t horizon = 0, bool fill = false);

  uint64_t horizon() const { return horizon_; }
  bool test(uint64_t n) const;
  void set(uint64_t n, bool value = true);

  uint64_t count() const;
  bool none() const { return count() == 0; }
  std::optional<uint64_t> first() const;
  std::vector<uint64_t> elements() const;

  BitWindow intersect(const BitWindow& other) const;
  BitWindow unite(const BitWindow& other) const;
  BitWindow complement() const;
  /// {n + k : n in this} clipped to [0, H). k >= 0.
  BitWindow translated(uint64_t k) const;
  /// Keeps every stride-th bit: result[i] = this[i * stride].
  BitWindow strided(uint64_t stride) const;
  /// Copy truncated or zero-extended to a new horizon.
  BitWindow resized(uint64_t new_horizon) const;

  bool intersects(const BitWindow& other) const;
  bool is_subset_of(const BitWindow& other) const;
  bool operator==(const BitWindow& other) const;
  bool operator!=(const BitWindow& other) const { return !(*this == other); }

  /// Longest run of consecutive members; length 0 if empty.
  Run longest_run() const;
  /// First position i with [i, i+g) disjoint from the set and i+g <= H.
  std::optional<uint64_t> find_empty_interval(uint64_t g) const;
  /// Longest run of consecutive non-members inside [0, H).
  Run longest_gap() const;

  /// Text format: header "H=<int>", then one element per line, or
  /// run-length lines "start:length". Emission is always explicit.
  std::string to_text() const;
  static BitWindow from_text(std::string_view text);

private:
  uint64_t horizon_;
  std::vector<uint64_t> words_;
};

} // namespace dynlab

#endif
