#pragma once

#include <cstdint>

#include "qf/fingerprint.hpp"
#include "qf/sequential_qf.hpp"
#include "qf/slot_storage.hpp"

// Single-writer operations on a 3-bit packed table.  The sequential filter
// uses them directly; the concurrent filter reuses them for migration target
// tables, where block ownership guarantees exclusive slot ranges.
namespace qf::detail {

inline uint64_t cluster_start_of(const PackedTable& tab, uint64_t quotient) {
  uint64_t b = quotient;
  while (tab.get_slot(b).status & kShiftedBit) --b;
  return b;
}

/// Start slot of `quotient`'s run (or where it would begin): skip one run per
/// occupied canonical slot in [cluster_start, quotient).
inline uint64_t rank_run_start(const PackedTable& tab, uint64_t cluster_start,
                               uint64_t quotient, uint64_t limit) {
  uint64_t runs_before = 0;
  for (uint64_t i = cluster_start; i < quotient; ++i) {
    if (tab.get_slot(i).status & kOccupiedBit) ++runs_before;
  }
  uint64_t s = cluster_start;
  for (uint64_t skipped = 0; skipped < runs_before; ++skipped) {
    do {
      ++s;
    } while (s < limit && (tab.get_slot(s).status & kContinuationBit));
  }
  return s;
}

/// Sorted insertion with right-shift; throws FilterFullError when the shift
/// would run off the table end.
inline void insert_three_bit(PackedTable& tab, uint64_t num_slots,
                             const Fingerprint& fp) {
  const uint64_t m = num_slots;
  const uint64_t q = fp.quotient;

  Slot canonical = tab.get_slot(q);
  if (canonical.status == kStatusEmpty) {
    tab.set_slot(q, Slot{kStatusClusterStart, fp.remainder});
    return;
  }

  const bool was_occupied = canonical.status & kOccupiedBit;
  const uint64_t cs = cluster_start_of(tab, q);
  const uint64_t run_start = rank_run_start(tab, cs, q, m);

  uint64_t pos = run_start;
  bool takes_run_start = true;
  if (was_occupied) {
    for (;;) {
      if (pos >= m) break;
      Slot cur = tab.get_slot(pos);
      if (cur.remainder >= fp.remainder) break;
      ++pos;
      if (pos >= m) break;
      if (!(tab.get_slot(pos).status & kContinuationBit)) break;
    }
    takes_run_start = (pos == run_start);
  }

  uint64_t empty = pos;
  while (empty < m && tab.get_slot(empty).status != kStatusEmpty) ++empty;
  if (empty >= m) throw FilterFullError();

  Slot slot_q = tab.get_slot(q);
  slot_q.status |= kOccupiedBit;
  tab.set_slot(q, slot_q);

  uint8_t entry_bits = (!was_occupied || takes_run_start)
                           ? (pos == q ? uint8_t{0} : kShiftedBit)
                           : uint8_t(kContinuationBit | kShiftedBit);
  uint8_t carry_bits = entry_bits;
  uint64_t carry_rem = fp.remainder;
  for (uint64_t i = pos;; ++i) {
    Slot old = tab.get_slot(i);
    uint8_t occ = old.status & kOccupiedBit;
    tab.set_slot(i, Slot{uint8_t(occ | carry_bits), carry_rem});
    if (i == empty) break;
    uint8_t cont = old.status & kContinuationBit;
    if (i == pos && was_occupied && takes_run_start) {
      cont = kContinuationBit;  // displaced run start joins as continuation
    }
    carry_bits = uint8_t(cont | kShiftedBit);
    carry_rem = old.remainder;
  }
}

}  // namespace qf::detail
