#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "qf/fingerprint.hpp"
#include "qf/sequential_qf.hpp"
#include "qf/slot_storage.hpp"

namespace qf {

struct ConcurrentQFOptions {
  /// Fill degree at which a table migration into a table of twice the size
  /// is triggered.
  double grow_fill_degree = 0.85;
  /// Largest quotient width the filter may grow to; 0 means grow until the
  /// remainder is down to one bit.
  uint32_t max_quotient_bits = 0;
  uint64_t seed = kDefaultSeed;
};

/// Concurrent quotient filter with the 3-bit slot layout.  The two status
/// codes unused by the sequential layout act as slot-local locks:
///
///   010  read lock, placed on a cluster-start slot (remainder kept)
///   110 with remainder 0  write lock, placed on an empty slot
///   110 with remainder 1  migration seal, placed on an empty slot
///
/// An insert write-locks the first empty slot right of its canonical slot,
/// read-locks the cluster start, then shifts group by group.  Queries
/// read-lock only when the answer is not decidable from the canonical slot's
/// group.  Growing migrates superclusters cooperatively in 4096-slot blocks;
/// inserts that run into a migration help finish it, queries keep reading
/// the old table until the new one is published.
///
/// Concurrent inserts and queries are safe from any number of threads.
/// Destruction, dump and check_consistency require external quiescence.
class ConcurrentQF {
 public:
  static constexpr double kMaxFillDegree = 0.95;
  static constexpr uint64_t kMigrationBlockSlots = 4096;

  ConcurrentQF(uint32_t quotient_bits, uint32_t remainder_bits,
               ConcurrentQFOptions options = {});
  ~ConcurrentQF();

  ConcurrentQF(const ConcurrentQF&) = delete;
  ConcurrentQF& operator=(const ConcurrentQF&) = delete;

  void insert_hash(uint64_t hash);
  bool contains_hash(uint64_t hash) const;

  void insert_key(uint64_t key);
  bool contains_key(uint64_t key) const;
  void insert(std::span<const std::byte> key);
  bool contains(std::span<const std::byte> key) const;

  /// Stores the fingerprint iff its canonical slot is empty (one CAS, no
  /// locks, no shifting).  Used for opportunistic placement into retired
  /// levels of the expandable filter.
  bool try_place_at_empty_canonical(uint64_t hash);

  /// Query without taking read locks; decodes normally around in-flight
  /// canonical-slot placements but must not race shifting inserts.
  bool contains_hash_unlocked(uint64_t hash) const;

  /// Whether the hash's canonical slot is currently empty.  On a level that
  /// only receives canonical-slot placements, an empty canonical slot proves
  /// the element absent.
  bool canonical_slot_empty(uint64_t hash) const;

  /// Triggers a migration to the next table size (if allowed) and helps
  /// until it completes.
  void grow();

  uint64_t size() const;
  double fill_degree() const;
  /// Parameters of the current table; changes across growth steps.
  FilterParams params() const;
  uint32_t max_quotient_bits() const { return options_.max_quotient_bits; }
  uint64_t seed() const { return options_.seed; }

  /// Copy of the current table as a sequential filter (quiescent callers
  /// only); basis for dump and consistency checking.
  QuotientFilter snapshot() const;
  bool check_consistency() const { return snapshot().check_consistency(); }

  void dump(std::ostream& out) const;
  /// Rebuilds a filter from a dump written by `dump`.
  explicit ConcurrentQF(std::istream& in, ConcurrentQFOptions options = {});
  /// Seeds the filter from a sequential snapshot (3-bit layout only); the
  /// snapshot's seed overrides the one in `options`.
  explicit ConcurrentQF(const QuotientFilter& snapshot,
                        ConcurrentQFOptions options = {});

 private:
  struct Table;
  enum class InsertOutcome { done, needs_migration, table_full };

  Fingerprint fingerprint_of(uint64_t hash, const Table& t) const;
  InsertOutcome try_insert(Table& t, const Fingerprint& fp);
  // Queries mutate lock bits only; they take the table non-const.
  bool try_contains(Table& t, const Fingerprint& fp) const;
  bool slow_contains(Table& t, const Fingerprint& fp, bool& answer) const;

  bool can_grow(const Table& t) const;
  void start_migration(Table& t);
  void help_migration(Table& t);
  void migrate_block(Table& src, Table& dst, uint64_t block);
  void migrate_supercluster(Table& src, Table& dst, uint64_t first,
                            uint64_t end);

  ConcurrentQFOptions options_;
  std::atomic<Table*> current_;
  // All tables ever created, oldest first; retired tables stay readable so
  // in-flight queries never touch freed memory.
  std::vector<std::unique_ptr<Table>> tables_;
  std::mutex grow_mutex_;
};

}  // namespace qf
