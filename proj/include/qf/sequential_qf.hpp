#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>

#include "qf/fingerprint.hpp"
#include "qf/slot_storage.hpp"

namespace qf {

class FilterFullError : public std::runtime_error {
 public:
  FilterFullError() : std::runtime_error("quotient filter is full") {}
};

enum class Variant : uint8_t {
  three_bit = 0,  // classic layout, 3 status bits per slot
  two_bit = 1,    // occupied + new-run bits, non-zero remainders
};

/// Half-open slot range of a canonical run together with its cluster start.
struct RunLocation {
  uint64_t run_start = 0;
  uint64_t run_end = 0;  // exclusive
  uint64_t cluster_start = 0;

  friend bool operator==(const RunLocation&, const RunLocation&) = default;
};

/// Single-threaded quotient filter.  Remainders are kept sorted within each
/// run, so the table layout is a pure function of the stored fingerprint
/// multiset.  Inserts are refused once the fill degree reaches 0.95.
class QuotientFilter {
 public:
  static constexpr double kMaxFillDegree = 0.95;

  QuotientFilter(FilterParams params, Variant variant = Variant::three_bit);

  Fingerprint fingerprint(uint64_t key) const;

  void insert(const Fingerprint& fp);
  bool contains(const Fingerprint& fp) const;

  void insert_key(uint64_t key) { insert(fingerprint(key)); }
  bool contains_key(uint64_t key) const { return contains(fingerprint(key)); }

  /// Requires the canonical slot's occupied bit; nullopt when there is no run.
  std::optional<RunLocation> find_run(uint64_t quotient) const;

  /// New filter with q+1 quotient bits and r-1 remainder bits holding the
  /// same fingerprint multiset (re-split, same k bits).
  QuotientFilter bounded_grow() const;

  /// n * 2^-k for the 3-bit layout.  The 2-bit layout draws remainders from
  /// 2^r - 1 values, giving n/m * 1/(2^r - 1) per stored element.
  double fpr_estimate() const;

  uint64_t size() const { return count_; }
  double fill_degree() const {
    return static_cast<double>(count_) / static_cast<double>(params_.num_slots());
  }
  const FilterParams& params() const { return params_; }
  Variant variant() const { return variant_; }
  const PackedTable& table() const { return table_; }

  /// Walks stored elements in slot order, reconstructing each fingerprint
  /// from its run structure.
  void for_each_fingerprint(
      const std::function<void(const Fingerprint&)>& fn) const;

  /// Status-bit legality, sorted runs, and element count; used by tests.
  bool check_consistency() const;

  void dump(std::ostream& out) const;
  static QuotientFilter load(std::istream& in);

 private:
  friend class ConcurrentQF;

  void insert3(const Fingerprint& fp);
  bool contains3(const Fingerprint& fp) const;
  void insert2(const Fingerprint& fp);
  bool contains2(const Fingerprint& fp) const;

  // 3-bit helpers.
  uint64_t cluster_start_of(uint64_t quotient) const;
  // Start slot of the run for `quotient` (or where it would begin) given the
  // cluster start; classic occupied/run-start ranking.
  uint64_t rank_run_start(uint64_t cluster_start, uint64_t quotient) const;

  // 2-bit helpers.
  uint64_t supercluster_start_of(uint64_t quotient) const;

  void ensure_not_full() const;

  FilterParams params_;
  Variant variant_;
  PackedTable table_;
  uint64_t count_ = 0;
};

}  // namespace qf
