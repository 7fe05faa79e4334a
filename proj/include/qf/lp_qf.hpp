#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>

#include "qf/fingerprint.hpp"
#include "qf/sequential_qf.hpp"
#include "qf/slot_storage.hpp"

namespace qf {

/// Linear-probing quotient filter: no status bits, non-zero remainders of
/// r + 3 bits stored in the first empty slot at or after the canonical slot,
/// with a probe sequence that wraps at the table end.  Inserts are lock-free
/// (a single CAS publishes the slot), queries are wait-free.  No growing, no
/// deletions; inserts refused at fill degree 0.9.
class LinearProbingQF {
 public:
  static constexpr uint32_t kExtraRemainderBits = 3;
  static constexpr double kMaxFillDegree = 0.9;

  /// `remainder_bits` is the base width r; slots store r + 3 bits.
  LinearProbingQF(uint32_t quotient_bits, uint32_t remainder_bits,
                  uint64_t seed = kDefaultSeed);

  LinearProbingQF(LinearProbingQF&& other) noexcept
      : params_(other.params_),
        table_(std::move(other.table_)),
        count_(other.count_.load(std::memory_order_relaxed)) {}

  Fingerprint fingerprint(uint64_t key) const;
  Fingerprint fingerprint(std::span<const std::byte> key) const;

  void insert(const Fingerprint& fp);
  bool contains(const Fingerprint& fp) const;

  void insert_key(uint64_t key) { insert(fingerprint(key)); }
  bool contains_key(uint64_t key) const { return contains(fingerprint(key)); }

  /// Corollary-1 closed form: 1/2 (1 + 1/(1-delta)^2) / (2^(r+3) - 1).
  /// An upper bound; the expected-comparison count uses Knuth's unsuccessful
  /// linear-probing probe bound, which includes the terminating empty slot.
  static double expected_fpr(double delta, uint32_t remainder_bits);

  /// Same form with the terminating empty-slot probe removed; matches the
  /// measured rate (an empty slot never compares equal to a non-zero
  /// remainder).
  static double expected_fpr_empirical(double delta, uint32_t remainder_bits);

  uint64_t size() const { return count_.load(std::memory_order_relaxed); }
  double fill_degree() const {
    return static_cast<double>(size()) /
           static_cast<double>(params_.num_slots());
  }
  const FilterParams& params() const { return params_; }
  const PackedTable& table() const { return table_; }

  void dump(std::ostream& out) const;
  static LinearProbingQF load(std::istream& in);

 private:
  FilterParams params_;  // remainder_bits holds the stored width r + 3
  PackedTable table_;
  std::atomic<uint64_t> count_{0};  // approximate under concurrency
};

}  // namespace qf
