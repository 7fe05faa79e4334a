#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "qf/concurrent_qf.hpp"
#include "qf/fingerprint.hpp"

namespace qf {

/// Sizing inputs for the expandable filter.  The first level is the smallest
/// power-of-two table whose grow threshold exceeds `min_capacity`, with the
/// smallest remainder width whose per-level false-positive bound stays below
/// `target_fpr`.
struct ExpandableConfig {
  uint64_t min_capacity = 1000;
  double target_fpr = 1.0 / 1024.0;
  double grow_fill_degree = 0.85;
  uint64_t seed = kDefaultSeed;
};

/// Multi-level filter without a capacity limit.  Each level is a concurrent
/// quotient filter that grows in place up to its final size (q0+i quotient
/// bits, r0+i remainder bits for level i, so the fingerprint gains two bits
/// per level).  Once a level reaches its final size and its grow threshold,
/// inserts hand over to a freshly created next level; full levels are
/// retired but stay queryable.
///
/// Each level's false-positive budget is its element cap times its
/// fingerprint collision rate, delta*2^-(r0+i); the geometric sum over all
/// levels stays below twice the first level's budget no matter how many
/// levels exist, and the first level's remainder width is chosen so that
/// doubled budget undercuts `target_fpr`.
class ExpandableQF {
 public:
  static constexpr int kMaxLevels = 64;

  explicit ExpandableQF(ExpandableConfig config = {});
  /// Rebuilds a filter from a dump written by `dump`.
  explicit ExpandableQF(std::istream& in);
  ~ExpandableQF();

  ExpandableQF(const ExpandableQF&) = delete;
  ExpandableQF& operator=(const ExpandableQF&) = delete;

  void insert_hash(uint64_t hash);
  bool contains_hash(uint64_t hash) const;

  void insert_key(uint64_t key);
  bool contains_key(uint64_t key) const;
  void insert(std::span<const std::byte> key);
  bool contains(std::span<const std::byte> key) const;

  /// Insert that first tries a lock-free placement into an empty canonical
  /// slot of each retired level (oldest first) before falling back to the
  /// active level.  Counters the per-level load imbalance of plain handoff.
  void insert_hash_cascading(uint64_t hash);
  void insert_key_cascading(uint64_t key);

  /// Early-abort query, valid when every insert went through the cascading
  /// path: an empty canonical slot at a retired level proves the element is
  /// in no level (the cascade would have claimed that slot), so the walk
  /// stops there.  Retired levels are read without locks.
  bool contains_hash_early_abort(uint64_t hash) const;
  bool contains_key_early_abort(uint64_t key) const;

  /// Combined membership test and insert; returns whether the element was
  /// already present (racy under concurrency, as any query-then-insert is).
  /// Reuses the cascading walk, so the check costs no extra level passes.
  bool query_or_insert_hash(uint64_t hash);
  bool query_or_insert_key(uint64_t key);

  uint64_t size() const;
  int num_levels() const {
    return num_levels_.load(std::memory_order_acquire);
  }
  /// Current table parameters of level `i`.
  FilterParams level_params(int i) const;
  /// Final (fully grown) quotient and remainder widths of level `i`.
  std::pair<uint32_t, uint32_t> level_final_bits(int i) const;
  const ExpandableConfig& config() const { return config_; }

  struct FprBound {
    double sum;    // summed per-level budgets for the current levels
    double limit;  // twice the first level's budget; holds for any level count
  };
  FprBound fpr_bound() const;

  // First-level widths derived from a config; exposed for sizing tests.
  static uint32_t base_quotient_bits(const ExpandableConfig& config);
  static uint32_t base_remainder_bits(const ExpandableConfig& config);

  void dump(std::ostream& out) const;

 private:
  struct Level;

  Level* newest(int& count) const;
  bool needs_handoff(const Level& level) const;
  void add_level(int expected_count);
  void append_level_locked(std::istream* in);

  ExpandableConfig config_;
  uint32_t base_q_ = 0;
  uint32_t base_r_ = 0;
  std::atomic<Level*> levels_[kMaxLevels];
  std::atomic<int> num_levels_{0};
  std::vector<std::unique_ptr<Level>> owned_;
  std::mutex level_mutex_;
};

}  // namespace qf
