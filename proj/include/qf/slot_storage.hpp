#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>

namespace qf {

// 3-bit status codes, value = occupied<<2 | continuation<<1 | shifted.
//   000 empty, 100 cluster start, *01 run start, *11 run continuation.
// The two *10 codes never occur naturally and double as locks.
inline constexpr uint8_t kStatusEmpty = 0b000;
inline constexpr uint8_t kStatusClusterStart = 0b100;
inline constexpr uint8_t kStatusReadLock = 0b010;
inline constexpr uint8_t kStatusWriteLock = 0b110;

inline constexpr uint8_t kOccupiedBit = 0b100;
inline constexpr uint8_t kContinuationBit = 0b010;
inline constexpr uint8_t kShiftedBit = 0b001;

// 2-bit layout: value = occupied<<1 | new_run.
inline constexpr uint8_t kOccupiedBit2 = 0b10;
inline constexpr uint8_t kNewRunBit2 = 0b01;

struct Slot {
  uint8_t status = 0;
  uint64_t remainder = 0;

  friend bool operator==(const Slot&, const Slot&) = default;
};

/// Thread-local log of group words touched by PackedTable accesses.  Cheap
/// enough to stay always on; the fast-path tests assert cache-line-level
/// access counts through it.
namespace storage_stats {

inline constexpr int kMaxTrackedGroups = 64;

struct AccessLog {
  uint64_t accesses = 0;
  int distinct = 0;
  uint64_t groups[kMaxTrackedGroups];

  void note(const void* table, uint64_t group) {
    ++accesses;
    // Distinguish groups across tables by mixing in the table address.
    uint64_t id = reinterpret_cast<uint64_t>(table) ^ (group * 0x9e3779b1ULL);
    for (int i = 0; i < distinct; ++i) {
      if (groups[i] == id) return;
    }
    if (distinct < kMaxTrackedGroups) groups[distinct++] = id;
  }
};

inline thread_local AccessLog tls_log;

inline void reset() { tls_log = AccessLog{}; }
inline uint64_t accesses() { return tls_log.accesses; }
inline int distinct_groups() { return tls_log.distinct; }

}  // namespace storage_stats

/// Slots of (status bits + remainder bits) packed into 64-bit groups that are
/// read and updated as single atomic words.  Slots never straddle a group
/// boundary; the high waste bits of each word stay zero.
///
/// Memory-visibility contract: group loads are acquire, compare-exchanges are
/// acq_rel.  A thread that observes a CAS-published word also observes every
/// table write made before that CAS.
class PackedTable {
 public:
  static constexpr uint32_t slots_per_group(uint32_t slot_bits) {
    return 64 / slot_bits;
  }

  PackedTable(uint32_t status_bits, uint32_t remainder_bits,
              uint64_t num_slots)
      : status_bits_(status_bits),
        remainder_bits_(remainder_bits),
        slot_bits_(status_bits + remainder_bits),
        num_slots_(num_slots) {
    if (slot_bits_ < 1 || slot_bits_ > 64) {
      throw std::invalid_argument("PackedTable: slot width out of range");
    }
    group_slots_ = slots_per_group(slot_bits_);
    num_groups_ = (num_slots_ + group_slots_ - 1) / group_slots_;
    slot_mask_ = slot_bits_ == 64 ? ~uint64_t{0}
                                  : (uint64_t{1} << slot_bits_) - 1;
    remainder_mask_ = (uint64_t{1} << remainder_bits_) - 1;
    words_ = std::make_unique<std::atomic<uint64_t>[]>(num_groups_);
    for (uint64_t g = 0; g < num_groups_; ++g) {
      words_[g].store(0, std::memory_order_relaxed);
    }
    install_sentinels();
  }

  PackedTable(const PackedTable& other)
      : status_bits_(other.status_bits_),
        remainder_bits_(other.remainder_bits_),
        slot_bits_(other.slot_bits_),
        num_slots_(other.num_slots_),
        group_slots_(other.group_slots_),
        num_groups_(other.num_groups_),
        slot_mask_(other.slot_mask_),
        remainder_mask_(other.remainder_mask_) {
    words_ = std::make_unique<std::atomic<uint64_t>[]>(num_groups_);
    for (uint64_t g = 0; g < num_groups_; ++g) {
      words_[g].store(other.words_[g].load(std::memory_order_relaxed),
                      std::memory_order_relaxed);
    }
  }

  PackedTable(PackedTable&&) noexcept = default;
  PackedTable& operator=(PackedTable&&) noexcept = default;

  uint32_t status_bits() const { return status_bits_; }
  uint32_t remainder_bits() const { return remainder_bits_; }
  uint32_t slot_bits() const { return slot_bits_; }
  uint32_t group_slots() const { return group_slots_; }
  uint64_t num_slots() const { return num_slots_; }
  uint64_t num_groups() const { return num_groups_; }

  uint64_t group_of(uint64_t slot) const { return slot / group_slots_; }
  uint32_t lane_of(uint64_t slot) const {
    return static_cast<uint32_t>(slot % group_slots_);
  }

  /// Single-word atomic snapshot; every slot inside is from one consistent
  /// table state.
  uint64_t load_group(uint64_t group) const {
    check_group(group);
    storage_stats::tls_log.note(this, group);
    return words_[group].load(std::memory_order_acquire);
  }

  /// Replaces the word iff it still equals `expected`.  On failure `expected`
  /// holds the current word and the caller re-reads.
  bool cas_group(uint64_t group, uint64_t& expected, uint64_t desired) {
    check_group(group);
    storage_stats::tls_log.note(this, group);
    return words_[group].compare_exchange_strong(
        expected, desired, std::memory_order_acq_rel,
        std::memory_order_acquire);
  }

  uint64_t slot_value(uint64_t word, uint32_t lane) const {
    return (word >> (lane * slot_bits_)) & slot_mask_;
  }

  uint64_t word_with_slot_value(uint64_t word, uint32_t lane,
                                uint64_t value) const {
    uint32_t shift = lane * slot_bits_;
    return (word & ~(slot_mask_ << shift)) | ((value & slot_mask_) << shift);
  }

  uint64_t encode(const Slot& s) const {
    return (uint64_t{s.status} << remainder_bits_) |
           (s.remainder & remainder_mask_);
  }

  Slot decode(uint64_t value) const {
    return Slot{static_cast<uint8_t>(value >> remainder_bits_),
                value & remainder_mask_};
  }

  Slot slot_from_word(uint64_t word, uint32_t lane) const {
    return decode(slot_value(word, lane));
  }

  Slot get_slot(uint64_t slot) const {
    check_slot(slot);
    return slot_from_word(load_group(group_of(slot)), lane_of(slot));
  }

  /// CAS-looped read-modify-write of the containing group.
  void set_slot(uint64_t slot, const Slot& s) {
    check_slot(slot);
    uint64_t g = group_of(slot);
    uint32_t lane = lane_of(slot);
    uint64_t expected = load_group(g);
    for (;;) {
      uint64_t desired = word_with_slot_value(expected, lane, encode(s));
      if (cas_group(g, expected, desired)) return;
    }
  }

  /// CAS of a single slot; fails if the slot no longer holds `expected`.
  /// `observed` receives the slot value seen on failure.
  bool cas_slot(uint64_t slot, const Slot& expected, const Slot& desired,
                Slot* observed = nullptr) {
    check_slot(slot);
    uint64_t g = group_of(slot);
    uint32_t lane = lane_of(slot);
    uint64_t word = load_group(g);
    for (;;) {
      if (slot_value(word, lane) != encode(expected)) {
        if (observed) *observed = slot_from_word(word, lane);
        return false;
      }
      uint64_t desired_word =
          word_with_slot_value(word, lane, encode(desired));
      if (cas_group(g, word, desired_word)) return true;
      // CAS failure reloaded the word; loop re-examines the slot.
    }
  }

  // Raw word access for serialization and whole-table comparison.
  uint64_t raw_word(uint64_t group) const {
    check_group(group);
    return words_[group].load(std::memory_order_relaxed);
  }
  void set_raw_word(uint64_t group, uint64_t word) {
    check_group(group);
    words_[group].store(word, std::memory_order_relaxed);
  }

  bool same_contents(const PackedTable& other) const {
    if (slot_bits_ != other.slot_bits_ || num_slots_ != other.num_slots_ ||
        status_bits_ != other.status_bits_) {
      return false;
    }
    for (uint64_t g = 0; g < num_groups_; ++g) {
      if (raw_word(g) != other.raw_word(g)) return false;
    }
    return true;
  }

 private:
  void check_group(uint64_t group) const {
    if (group >= num_groups_) {
      throw std::out_of_range("PackedTable: group index out of range");
    }
  }
  void check_slot(uint64_t slot) const {
    if (slot >= num_slots_) {
      throw std::out_of_range("PackedTable: slot index out of range");
    }
  }

  // Slots past num_slots_ in the last group are permanently write-locked
  // sentinels with an all-ones remainder so scans cannot run off the end.
  void install_sentinels() {
    uint64_t first_pad = num_slots_;
    uint64_t total = num_groups_ * group_slots_;
    for (uint64_t i = first_pad; i < total; ++i) {
      uint64_t g = i / group_slots_;
      uint32_t lane = static_cast<uint32_t>(i % group_slots_);
      uint64_t sentinel = status_bits_ == 3
                              ? encode(Slot{kStatusWriteLock, remainder_mask_})
                              : slot_mask_;
      words_[g].store(
          word_with_slot_value(words_[g].load(std::memory_order_relaxed),
                               lane, sentinel),
          std::memory_order_relaxed);
    }
  }

  uint32_t status_bits_;
  uint32_t remainder_bits_;
  uint32_t slot_bits_;
  uint64_t num_slots_;
  uint32_t group_slots_ = 0;
  uint64_t num_groups_ = 0;
  uint64_t slot_mask_ = 0;
  uint64_t remainder_mask_ = 0;
  std::unique_ptr<std::atomic<uint64_t>[]> words_;
};

}  // namespace qf
