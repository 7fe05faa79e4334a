#include "qf/concurrent_qf.hpp"

#include <algorithm>
#include <cassert>
#include <queue>
#include <stdexcept>
#include <thread>

#include "qf/detail/table_ops.hpp"

namespace qf {

namespace {

constexpr uint64_t kNoSlot = ~uint64_t{0};

bool is_insert_lock(const Slot& s) {
  return s.status == kStatusWriteLock && s.remainder == 0;
}

bool is_migration_seal(const Slot& s) {
  return s.status == kStatusWriteLock && s.remainder != 0;
}

bool is_read_lock(const Slot& s) { return s.status == kStatusReadLock; }

// Logical view of a slot with lock codes mapped back to the state they
// protect: a read-locked cluster start is a cluster start, a write-locked or
// sealed empty slot is empty.
Slot normalized(Slot s) {
  if (s.status == kStatusReadLock) {
    s.status = kStatusClusterStart;
  } else if (s.status == kStatusWriteLock) {
    s = Slot{};
  }
  return s;
}

void spin_relax(int& spins) {
  if (++spins >= 4) std::this_thread::yield();
}

void wait_for_change(const PackedTable& tab, uint64_t slot, const Slot& seen) {
  int spins = 0;
  while (tab.get_slot(slot) == seen) spin_relax(spins);
}

/// Ranking over a live table: like detail::rank_run_start but through the
/// normalized slot view, so concurrent read locks do not distort the count.
uint64_t ranked_run_start(const PackedTable& tab, uint64_t cluster_start,
                          uint64_t quotient, uint64_t limit) {
  uint64_t runs_before = 0;
  for (uint64_t i = cluster_start; i < quotient; ++i) {
    if (normalized(tab.get_slot(i)).status & kOccupiedBit) ++runs_before;
  }
  uint64_t s = cluster_start;
  for (uint64_t skipped = 0; skipped < runs_before; ++skipped) {
    do {
      ++s;
    } while (s < limit &&
             (normalized(tab.get_slot(s)).status & kContinuationBit));
  }
  return s;
}

}  // namespace

struct ConcurrentQF::Table {
  FilterParams params;
  PackedTable slots;
  std::atomic<uint64_t> count{0};

  // Migration state; `next` doubles as the "migration running" flag.
  std::atomic<Table*> next{nullptr};
  std::atomic<uint64_t> next_block{0};
  std::atomic<uint64_t> blocks_done{0};

  explicit Table(const FilterParams& p)
      : params(p), slots(3, p.remainder_bits, p.num_slots()) {}

  uint64_t num_blocks() const {
    return (params.num_slots() + kMigrationBlockSlots - 1) /
           kMigrationBlockSlots;
  }
};

ConcurrentQF::ConcurrentQF(uint32_t quotient_bits, uint32_t remainder_bits,
                           ConcurrentQFOptions options)
    : options_(options) {
  FilterParams p{quotient_bits, remainder_bits, false, options_.seed};
  p.validate();
  if (options_.max_quotient_bits != 0 &&
      options_.max_quotient_bits < quotient_bits) {
    throw std::invalid_argument(
        "ConcurrentQF: max_quotient_bits below the initial quotient width");
  }
  if (!(options_.grow_fill_degree > 0.0 &&
        options_.grow_fill_degree <= kMaxFillDegree)) {
    throw std::invalid_argument(
        "ConcurrentQF: grow_fill_degree out of (0, 0.95]");
  }
  tables_.push_back(std::make_unique<Table>(p));
  current_.store(tables_.back().get(), std::memory_order_relaxed);
}

ConcurrentQF::~ConcurrentQF() = default;

Fingerprint ConcurrentQF::fingerprint_of(uint64_t hash, const Table& t) const {
  return split_fingerprint(hash, t.params);
}

void ConcurrentQF::insert_key(uint64_t key) {
  insert_hash(hash_key(key, options_.seed));
}

bool ConcurrentQF::contains_key(uint64_t key) const {
  return contains_hash(hash_key(key, options_.seed));
}

void ConcurrentQF::insert(std::span<const std::byte> key) {
  insert_hash(hash_bytes(key, options_.seed));
}

bool ConcurrentQF::contains(std::span<const std::byte> key) const {
  return contains_hash(hash_bytes(key, options_.seed));
}

void ConcurrentQF::insert_hash(uint64_t hash) {
  for (;;) {
    Table* t = current_.load(std::memory_order_acquire);
    if (t->next.load(std::memory_order_acquire) != nullptr) {
      help_migration(*t);
      continue;
    }
    if (!can_grow(*t)) {
      uint64_t n = t->count.load(std::memory_order_relaxed);
      if (static_cast<double>(n + 1) >
          kMaxFillDegree * static_cast<double>(t->params.num_slots())) {
        throw FilterFullError();
      }
    }
    InsertOutcome out = try_insert(*t, fingerprint_of(hash, *t));
    if (out == InsertOutcome::done) {
      uint64_t n = t->count.fetch_add(1, std::memory_order_relaxed) + 1;
      if (can_grow(*t) &&
          static_cast<double>(n) >=
              options_.grow_fill_degree *
                  static_cast<double>(t->params.num_slots())) {
        start_migration(*t);
        help_migration(*t);
      }
      return;
    }
    if (out == InsertOutcome::needs_migration) {
      help_migration(*t);
      continue;
    }
    // Physically full: the shift would run off the table end.
    if (!can_grow(*t)) throw FilterFullError();
    start_migration(*t);
    help_migration(*t);
  }
}

ConcurrentQF::InsertOutcome ConcurrentQF::try_insert(Table& t,
                                                     const Fingerprint& fp) {
  PackedTable& tab = t.slots;
  const uint64_t m = t.params.num_slots();
  const uint64_t q = fp.quotient;

  // Trivial case: CAS the fingerprint into its empty canonical slot.  The
  // whole modification is one group-word CAS.
  for (;;) {
    uint64_t g = tab.group_of(q);
    uint32_t lane = tab.lane_of(q);
    uint64_t word = tab.load_group(g);
    Slot s = tab.slot_from_word(word, lane);
    if (is_migration_seal(s)) return InsertOutcome::needs_migration;
    if (s.status != kStatusEmpty) break;
    uint64_t desired = tab.word_with_slot_value(
        word, lane, tab.encode(Slot{kStatusClusterStart, fp.remainder}));
    if (tab.cas_group(g, word, desired)) return InsertOutcome::done;
  }

  // Write-lock the first empty slot right of the canonical slot.  This pins
  // the supercluster end: no second insert can shift the same region.
  uint64_t wlock = q;
  for (;;) {
    if (wlock >= m) return InsertOutcome::table_full;
    Slot s = tab.get_slot(wlock);
    if (is_migration_seal(s)) return InsertOutcome::needs_migration;
    if (is_insert_lock(s)) {
      wait_for_change(tab, wlock, s);
      continue;
    }
    if (s.status == kStatusEmpty) {
      if (tab.cas_slot(wlock, s, Slot{kStatusWriteLock, 0})) break;
      continue;
    }
    ++wlock;
  }

  if (wlock == q) {
    // The canonical slot was free after all: the entry replaces the lock.
    bool ok = tab.cas_slot(q, Slot{kStatusWriteLock, 0},
                           Slot{kStatusClusterStart, fp.remainder});
    assert(ok);
    (void)ok;
    return InsertOutcome::done;
  }

  // Read-lock the cluster start covering the canonical slot.  Queries of
  // this cluster now wait until the shift below is complete.
  uint64_t cs = q;
  for (;;) {
    Slot s = tab.get_slot(cs);
    if (is_read_lock(s)) {
      wait_for_change(tab, cs, s);
      continue;
    }
    if (s.status == kStatusClusterStart) {
      if (tab.cas_slot(cs, s, Slot{kStatusReadLock, s.remainder})) break;
      continue;
    }
    --cs;  // shifted content; the cluster start lies further left
  }

  // Mark the canonical run as present.  Safe under the read lock: any other
  // insert that would touch this bit waits on one of our locks first.
  bool was_occupied;
  if (cs == q) {
    was_occupied = true;  // a cluster start always heads its own run
  } else {
    for (;;) {
      Slot s = tab.get_slot(q);
      was_occupied = s.status & kOccupiedBit;
      if (was_occupied) break;
      Slot d = s;
      d.status = uint8_t(d.status | kOccupiedBit);
      if (tab.cas_slot(q, s, d)) break;
    }
  }

  // Sorted position within the (possibly new) run.
  const uint64_t run_start = ranked_run_start(tab, cs, q, wlock);
  uint64_t pos = run_start;
  bool takes_run_start = true;
  if (was_occupied) {
    for (;;) {
      if (pos >= wlock) break;
      Slot cur = normalized(tab.get_slot(pos));
      if (cur.remainder >= fp.remainder) break;
      ++pos;
      if (pos >= wlock) break;
      if (!(normalized(tab.get_slot(pos)).status & kContinuationBit)) break;
    }
    takes_run_start = (pos == run_start);
  }

  uint8_t entry_bits;
  if (!was_occupied || takes_run_start) {
    entry_bits = (pos == q) ? uint8_t{0} : kShiftedBit;
  } else {
    entry_bits = uint8_t(kContinuationBit | kShiftedBit);
  }
  const bool entry_new_cluster_start = (entry_bits == 0);

  // Shift [pos, wlock] one slot right, rebuilding whole group words so a
  // concurrent reader never sees a half-moved group.  Foreign read locks in
  // the affected lanes are waited out; a newly written cluster start is kept
  // in locked form until the whole shift is done.
  uint64_t extra_locked = kNoSlot;
  uint8_t carry_bits = entry_bits;
  uint64_t carry_rem = fp.remainder;
  const uint32_t spg = tab.group_slots();
  const uint64_t first_group = tab.group_of(pos);
  const uint64_t last_group = tab.group_of(wlock);
  for (uint64_t g = first_group; g <= last_group; ++g) {
    const uint64_t lo = std::max(pos, g * spg);
    const uint64_t hi = std::min(wlock, g * spg + spg - 1);
    int spins = 0;
    for (;;) {
      uint64_t word = tab.load_group(g);
      bool locked_lane = false;
      for (uint64_t i = lo; i <= hi; ++i) {
        Slot s = tab.slot_from_word(word, tab.lane_of(i));
        if (is_read_lock(s) && i != cs) {
          locked_lane = true;
          break;
        }
      }
      if (locked_lane) {
        spin_relax(spins);
        continue;
      }
      uint64_t nw = word;
      uint8_t cb = carry_bits;
      uint64_t cr = carry_rem;
      bool group_extra_lock = false;
      for (uint64_t i = lo; i <= hi; ++i) {
        uint32_t lane = tab.lane_of(i);
        Slot old = tab.slot_from_word(word, lane);
        Slot out;
        if (i == cs) {
          // Overwriting our own locked cluster start keeps the lock form.
          out = Slot{kStatusReadLock, cr};
        } else if (i == pos && entry_new_cluster_start) {
          out = Slot{kStatusReadLock, cr};
          group_extra_lock = true;
        } else {
          uint8_t occ = (i == wlock) ? uint8_t{0}
                                     : uint8_t(old.status & kOccupiedBit);
          out = Slot{uint8_t(occ | cb), cr};
        }
        nw = tab.word_with_slot_value(nw, lane, tab.encode(out));
        if (i == wlock) break;
        uint8_t cont = old.status & kContinuationBit;
        if (i == pos && was_occupied && takes_run_start) {
          cont = kContinuationBit;  // displaced run start joins as continuation
        }
        cb = uint8_t(cont | kShiftedBit);
        cr = old.remainder;
      }
      if (tab.cas_group(g, word, nw)) {
        carry_bits = cb;
        carry_rem = cr;
        if (group_extra_lock) extra_locked = pos;
        break;
      }
    }
  }

  // The write lock disappeared under the shift; release the read locks.
  if (extra_locked != kNoSlot) {
    Slot s = tab.get_slot(extra_locked);
    assert(is_read_lock(s));
    bool ok = tab.cas_slot(extra_locked, s,
                           Slot{kStatusClusterStart, s.remainder});
    assert(ok);
    (void)ok;
  }
  {
    Slot s = tab.get_slot(cs);
    assert(is_read_lock(s));
    bool ok = tab.cas_slot(cs, s, Slot{kStatusClusterStart, s.remainder});
    assert(ok);
    (void)ok;
  }
  return InsertOutcome::done;
}

bool ConcurrentQF::contains_hash(uint64_t hash) const {
  Table* t = current_.load(std::memory_order_acquire);
  return try_contains(*t, fingerprint_of(hash, *t));
}

bool ConcurrentQF::try_contains(Table& t, const Fingerprint& fp) const {
  PackedTable& tab = t.slots;
  const uint64_t m = t.params.num_slots();
  const uint64_t q = fp.quotient;
  const uint32_t spg = tab.group_slots();

  for (;;) {
    // Fast path: decide from the canonical slot's group when possible.
    uint64_t g = tab.group_of(q);
    uint64_t word = tab.load_group(g);
    Slot s = tab.slot_from_word(word, tab.lane_of(q));
    if (s.status == kStatusEmpty || s.status == kStatusWriteLock) {
      return false;  // empty (possibly insert-locked or sealed)
    }
    if (s.status == kStatusClusterStart) {
      // The run starts right here; try to resolve it within this group.
      uint64_t i = q;
      Slot cur = s;
      bool decided = false;
      bool answer = false;
      for (;;) {
        if (cur.remainder == fp.remainder) {
          decided = true;
          answer = true;
          break;
        }
        if (cur.remainder > fp.remainder) {
          decided = true;
          break;
        }
        ++i;
        if (i >= m) {
          decided = true;
          break;
        }
        if (i >= (g + 1) * spg) break;  // run continues in the next group
        cur = normalized(tab.slot_from_word(word, tab.lane_of(i)));
        if (!(cur.status & kContinuationBit)) {
          decided = true;
          break;
        }
      }
      if (decided) return answer;
    } else if (!(normalized(s).status & kOccupiedBit)) {
      return false;  // only shifted foreign content, no canonical run
    }
    bool answer = false;
    if (slow_contains(t, fp, answer)) return answer;
    // The canonical slot changed underfoot; retake the fast path.
  }
}

bool ConcurrentQF::slow_contains(Table& t, const Fingerprint& fp,
                                 bool& answer) const {
  PackedTable& tab = t.slots;
  const uint64_t m = t.params.num_slots();
  const uint64_t q = fp.quotient;

  // Lock the cluster start covering the canonical slot; this keeps inserts
  // from shifting the cluster while we decode it.
  uint64_t cs = q;
  for (;;) {
    Slot s = tab.get_slot(cs);
    if (is_read_lock(s)) {
      wait_for_change(tab, cs, s);
      continue;
    }
    if (s.status == kStatusClusterStart) {
      if (tab.cas_slot(cs, s, Slot{kStatusReadLock, s.remainder})) break;
      continue;
    }
    if (cs == q &&
        (s.status == kStatusEmpty || s.status == kStatusWriteLock)) {
      return false;  // canonical slot changed since the fast path
    }
    --cs;
  }

  auto unlock = [&] {
    Slot s = tab.get_slot(cs);
    assert(is_read_lock(s));
    bool ok = tab.cas_slot(cs, s, Slot{kStatusClusterStart, s.remainder});
    assert(ok);
    (void)ok;
  };

  bool occupied =
      (cs == q) || (tab.get_slot(q).status & kOccupiedBit) != 0;
  if (!occupied) {
    unlock();
    answer = false;
    return true;
  }

  uint64_t pos = ranked_run_start(tab, cs, q, m);
  answer = false;
  for (;;) {
    if (pos >= m) break;
    Slot cur = normalized(tab.get_slot(pos));
    if (cur.status == kStatusEmpty) break;
    if (cur.remainder == fp.remainder) {
      answer = true;
      break;
    }
    if (cur.remainder > fp.remainder) break;
    ++pos;
    if (pos >= m) break;
    if (!(normalized(tab.get_slot(pos)).status & kContinuationBit)) break;
  }
  unlock();
  return true;
}

bool ConcurrentQF::try_place_at_empty_canonical(uint64_t hash) {
  Table* t = current_.load(std::memory_order_acquire);
  Fingerprint fp = fingerprint_of(hash, *t);
  // No fill cap: a canonical-slot placement never shifts, so it is safe at
  // any load, and refusing one would leave an empty canonical slot behind
  // for an element stored on a later level.
  for (;;) {
    Slot s = t->slots.get_slot(fp.quotient);
    if (s.status != kStatusEmpty) return false;
    if (t->slots.cas_slot(fp.quotient, s,
                          Slot{kStatusClusterStart, fp.remainder})) {
      t->count.fetch_add(1, std::memory_order_relaxed);
      return true;
    }
  }
}

bool ConcurrentQF::contains_hash_unlocked(uint64_t hash) const {
  Table* t = current_.load(std::memory_order_acquire);
  const PackedTable& tab = t->slots;
  const uint64_t m = t->params.num_slots();
  Fingerprint fp = fingerprint_of(hash, *t);
  const uint64_t q = fp.quotient;

  if (!(normalized(tab.get_slot(q)).status & kOccupiedBit)) return false;
  uint64_t cs = q;
  while (normalized(tab.get_slot(cs)).status & kShiftedBit) --cs;
  uint64_t pos = ranked_run_start(tab, cs, q, m);
  for (;;) {
    if (pos >= m) return false;
    Slot cur = normalized(tab.get_slot(pos));
    if (cur.status == kStatusEmpty) return false;
    if (cur.remainder == fp.remainder) return true;
    if (cur.remainder > fp.remainder) return false;
    ++pos;
    if (pos >= m) return false;
    if (!(normalized(tab.get_slot(pos)).status & kContinuationBit)) {
      return false;
    }
  }
}

bool ConcurrentQF::canonical_slot_empty(uint64_t hash) const {
  Table* t = current_.load(std::memory_order_acquire);
  Fingerprint fp = fingerprint_of(hash, *t);
  return normalized(t->slots.get_slot(fp.quotient)).status == kStatusEmpty;
}

bool ConcurrentQF::can_grow(const Table& t) const {
  if (t.params.remainder_bits < 2) return false;
  return options_.max_quotient_bits == 0 ||
         t.params.quotient_bits < options_.max_quotient_bits;
}

void ConcurrentQF::grow() {
  Table* t = current_.load(std::memory_order_acquire);
  if (t->next.load(std::memory_order_acquire) == nullptr) {
    if (!can_grow(*t)) return;
    start_migration(*t);
  }
  help_migration(*t);
}

void ConcurrentQF::start_migration(Table& t) {
  std::lock_guard<std::mutex> lock(grow_mutex_);
  if (t.next.load(std::memory_order_relaxed) != nullptr) return;
  FilterParams np = t.params;
  np.quotient_bits += 1;
  np.remainder_bits -= 1;
  auto next = std::make_unique<Table>(np);
  Table* raw = next.get();
  tables_.push_back(std::move(next));
  t.next.store(raw, std::memory_order_release);
}

void ConcurrentQF::help_migration(Table& t) {
  Table* nt = t.next.load(std::memory_order_acquire);
  if (nt == nullptr) return;
  const uint64_t nblocks = t.num_blocks();
  for (;;) {
    uint64_t b = t.next_block.fetch_add(1, std::memory_order_relaxed);
    if (b >= nblocks) break;
    migrate_block(t, *nt, b);
    t.blocks_done.fetch_add(1, std::memory_order_acq_rel);
  }
  int spins = 0;
  while (t.blocks_done.load(std::memory_order_acquire) < nblocks) {
    spin_relax(spins);
  }
  Table* expected = &t;
  current_.compare_exchange_strong(expected, nt, std::memory_order_acq_rel);
}

void ConcurrentQF::migrate_block(Table& src, Table& dst, uint64_t block) {
  PackedTable& tab = src.slots;
  const uint64_t m = src.params.num_slots();
  const uint64_t start = block * kMigrationBlockSlots;
  const uint64_t limit = std::min(start + kMigrationBlockSlots, m);
  const Slot seal{kStatusWriteLock, 1};

  uint64_t pos = start;
  if (start > 0) {
    // Settle the slot left of the block: once it is sealed (or holds
    // content) the boundary decision is fixed for every helper.
    bool crosses = false;
    for (;;) {
      Slot s = tab.get_slot(start - 1);
      if (is_insert_lock(s)) {
        wait_for_change(tab, start - 1, s);
        continue;
      }
      if (s.status == kStatusEmpty) {
        if (tab.cas_slot(start - 1, s, seal)) break;
        continue;
      }
      if (is_migration_seal(s)) break;
      crosses = true;  // supercluster crossing in; the left owner moves it
      break;
    }
    if (crosses) {
      for (;;) {
        if (pos >= m) return;
        Slot s = tab.get_slot(pos);
        if (is_insert_lock(s)) {
          wait_for_change(tab, pos, s);
          continue;
        }
        if (s.status == kStatusEmpty) {
          if (!tab.cas_slot(pos, s, seal)) continue;
          ++pos;
          break;
        }
        if (is_migration_seal(s)) {
          ++pos;
          break;
        }
        ++pos;  // still inside the crossing supercluster
      }
    }
  }

  while (pos < limit) {
    Slot s = tab.get_slot(pos);
    if (is_insert_lock(s)) {
      wait_for_change(tab, pos, s);
      continue;
    }
    if (s.status == kStatusEmpty) {
      // Seal so no late insert can claim the slot; sealing is idempotent
      // across helpers.
      if (tab.cas_slot(pos, s, seal)) ++pos;
      continue;
    }
    if (is_migration_seal(s)) {
      ++pos;
      continue;
    }
    // A supercluster starts here.  Freeze it by sealing its terminating
    // empty slot (waiting out any insert that still holds it as a write
    // lock), then move it.
    uint64_t end = pos;
    for (;;) {
      if (end >= m) break;
      Slot es = tab.get_slot(end);
      if (is_insert_lock(es)) {
        wait_for_change(tab, end, es);
        continue;
      }
      if (es.status == kStatusEmpty) {
        if (tab.cas_slot(end, es, seal)) break;
        continue;
      }
      if (is_migration_seal(es)) break;
      ++end;
    }
    migrate_supercluster(src, dst, pos, end);
    pos = end + 1;
  }
}

void ConcurrentQF::migrate_supercluster(Table& src, Table& dst, uint64_t first,
                                        uint64_t end) {
  const PackedTable& stab = src.slots;
  const uint64_t dm = dst.params.num_slots();
  uint64_t moved = 0;
  std::queue<uint64_t> pending;
  uint64_t current_q = 0;
  // Elements come out in fingerprint order, so the target region is built
  // exactly as a sequential bulk build would.  The region [2*first, 2*end)
  // is touched by this helper alone; shared boundary words are handled by
  // the CAS loops inside the table writes.
  for (uint64_t i = first; i < end; ++i) {
    Slot s = normalized(stab.get_slot(i));
    if (s.status & kOccupiedBit) pending.push(i);
    if (!(s.status & kContinuationBit)) {
      current_q = pending.front();
      pending.pop();
    }
    detail::insert_three_bit(
        dst.slots, dm,
        rebase_fingerprint(current_q, s.remainder, src.params, dst.params));
    ++moved;
  }
  dst.count.fetch_add(moved, std::memory_order_relaxed);
}

uint64_t ConcurrentQF::size() const {
  return current_.load(std::memory_order_acquire)
      ->count.load(std::memory_order_relaxed);
}

double ConcurrentQF::fill_degree() const {
  Table* t = current_.load(std::memory_order_acquire);
  return static_cast<double>(t->count.load(std::memory_order_relaxed)) /
         static_cast<double>(t->params.num_slots());
}

FilterParams ConcurrentQF::params() const {
  return current_.load(std::memory_order_acquire)->params;
}

QuotientFilter ConcurrentQF::snapshot() const {
  Table* t = current_.load(std::memory_order_acquire);
  QuotientFilter f(t->params, Variant::three_bit);
  for (uint64_t g = 0; g < t->slots.num_groups(); ++g) {
    f.table_.set_raw_word(g, t->slots.raw_word(g));
  }
  f.count_ = t->count.load(std::memory_order_relaxed);
  return f;
}

void ConcurrentQF::dump(std::ostream& out) const { snapshot().dump(out); }

ConcurrentQF::ConcurrentQF(std::istream& in, ConcurrentQFOptions options)
    : ConcurrentQF(
          [&] {
            QuotientFilter f = QuotientFilter::load(in);
            if (f.variant() != Variant::three_bit) {
              throw std::runtime_error("filter dump: variant mismatch");
            }
            return f;
          }(),
          options) {}

ConcurrentQF::ConcurrentQF(const QuotientFilter& f, ConcurrentQFOptions options)
    : ConcurrentQF(f.params().quotient_bits, f.params().remainder_bits,
                   [&] {
                     options.seed = f.params().seed;
                     return options;
                   }()) {
  Table* t = current_.load(std::memory_order_relaxed);
  for (uint64_t g = 0; g < t->slots.num_groups(); ++g) {
    t->slots.set_raw_word(g, f.table().raw_word(g));
  }
  t->count.store(f.size(), std::memory_order_relaxed);
}

}  // namespace qf
