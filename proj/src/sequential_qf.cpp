#include "qf/sequential_qf.hpp"

#include <cmath>
#include <queue>

#include "qf/detail/table_ops.hpp"
#include "qf/serialize.hpp"

namespace qf {

namespace {

constexpr uint32_t kDumpMagic = 0x31464651;  // "QFF1"

struct SlotContent {
  uint8_t bits = 0;  // continuation/shifted (3-bit) or new-run (2-bit)
  uint64_t remainder = 0;
};

}  // namespace

QuotientFilter::QuotientFilter(FilterParams params, Variant variant)
    : params_(params),
      variant_(variant),
      table_(variant == Variant::three_bit ? 3 : 2, params.remainder_bits,
             params.num_slots()) {
  if (variant_ == Variant::two_bit) params_.nonzero_remainder = true;
  params_.validate();
}

Fingerprint QuotientFilter::fingerprint(uint64_t key) const {
  return params_.nonzero_remainder ? make_nonzero_fingerprint(key, params_)
                                   : make_fingerprint(key, params_);
}

void QuotientFilter::ensure_not_full() const {
  if (static_cast<double>(count_ + 1) >
      kMaxFillDegree * static_cast<double>(params_.num_slots())) {
    throw FilterFullError();
  }
}

void QuotientFilter::insert(const Fingerprint& fp) {
  variant_ == Variant::three_bit ? insert3(fp) : insert2(fp);
}

bool QuotientFilter::contains(const Fingerprint& fp) const {
  return variant_ == Variant::three_bit ? contains3(fp) : contains2(fp);
}

uint64_t QuotientFilter::cluster_start_of(uint64_t quotient) const {
  return detail::cluster_start_of(table_, quotient);
}

uint64_t QuotientFilter::rank_run_start(uint64_t cluster_start,
                                        uint64_t quotient) const {
  return detail::rank_run_start(table_, cluster_start, quotient,
                                params_.num_slots());
}

void QuotientFilter::insert3(const Fingerprint& fp) {
  ensure_not_full();
  detail::insert_three_bit(table_, params_.num_slots(), fp);
  ++count_;
}

bool QuotientFilter::contains3(const Fingerprint& fp) const {
  const uint64_t m = params_.num_slots();
  const uint64_t q = fp.quotient;
  Slot canonical = table_.get_slot(q);
  if (!(canonical.status & kOccupiedBit)) return false;

  uint64_t pos = rank_run_start(cluster_start_of(q), q);
  for (;;) {
    Slot cur = table_.get_slot(pos);
    if (cur.remainder == fp.remainder) return true;
    if (cur.remainder > fp.remainder) return false;
    ++pos;
    if (pos >= m) return false;
    if (!(table_.get_slot(pos).status & kContinuationBit)) return false;
  }
}

std::optional<RunLocation> QuotientFilter::find_run(uint64_t quotient) const {
  if (variant_ != Variant::three_bit) {
    throw std::logic_error("find_run: run locations require the 3-bit layout");
  }
  if (!(table_.get_slot(quotient).status & kOccupiedBit)) return std::nullopt;
  const uint64_t m = params_.num_slots();
  uint64_t cs = cluster_start_of(quotient);
  uint64_t start = rank_run_start(cs, quotient);
  uint64_t end = start + 1;
  while (end < m && (table_.get_slot(end).status & kContinuationBit)) ++end;
  return RunLocation{start, end, cs};
}

uint64_t QuotientFilter::supercluster_start_of(uint64_t quotient) const {
  uint64_t b = quotient;
  while (b > 0 && table_.get_slot(b - 1).remainder != 0) --b;
  return b;
}

void QuotientFilter::insert2(const Fingerprint& fp) {
  ensure_not_full();
  const uint64_t m = params_.num_slots();
  const uint64_t q = fp.quotient;

  Slot canonical = table_.get_slot(q);
  if (canonical.remainder == 0) {
    table_.set_slot(q, Slot{uint8_t(kOccupiedBit2 | kNewRunBit2), fp.remainder});
    ++count_;
    return;
  }

  const bool was_occupied = canonical.status & kOccupiedBit2;
  const uint64_t sc = supercluster_start_of(q);

  // Rank of q's run among the supercluster's runs, counting q itself.
  uint64_t occ_rank = 1;
  for (uint64_t i = sc; i < q; ++i) {
    if (table_.get_slot(i).status & kOccupiedBit2) ++occ_rank;
  }

  uint64_t pos = m;
  uint64_t runs_seen = 0;
  for (uint64_t i = sc; i < m; ++i) {
    Slot cur = table_.get_slot(i);
    if (cur.remainder == 0) {
      pos = i;
      break;
    }
    if (cur.status & kNewRunBit2) {
      if (++runs_seen == occ_rank) {
        pos = i;
        break;
      }
    }
  }

  bool takes_run_start = true;
  if (was_occupied && pos < m) {
    uint64_t start = pos;
    for (;;) {
      Slot cur = table_.get_slot(pos);
      if (cur.remainder == 0 || cur.remainder >= fp.remainder) break;
      ++pos;
      if (pos >= m) break;
      Slot nxt = table_.get_slot(pos);
      if (nxt.remainder == 0 || (nxt.status & kNewRunBit2)) break;
    }
    takes_run_start = (pos == start);
  }

  uint64_t empty = pos;
  while (empty < m && table_.get_slot(empty).remainder != 0) ++empty;
  if (empty >= m) throw FilterFullError();

  Slot slot_q = table_.get_slot(q);
  slot_q.status |= kOccupiedBit2;
  table_.set_slot(q, slot_q);

  uint8_t entry_bits =
      (!was_occupied || takes_run_start) ? kNewRunBit2 : uint8_t{0};
  SlotContent carry{entry_bits, fp.remainder};
  for (uint64_t i = pos;; ++i) {
    Slot old = table_.get_slot(i);
    uint8_t occ = old.status & kOccupiedBit2;
    table_.set_slot(i, Slot{uint8_t(occ | carry.bits), carry.remainder});
    if (i == empty) break;
    uint8_t run_bit = old.status & kNewRunBit2;
    if (i == pos && was_occupied && takes_run_start) run_bit = 0;
    carry = SlotContent{run_bit, old.remainder};
  }
  ++count_;
}

bool QuotientFilter::contains2(const Fingerprint& fp) const {
  const uint64_t m = params_.num_slots();
  const uint64_t q = fp.quotient;
  Slot canonical = table_.get_slot(q);
  if (canonical.remainder == 0) return false;
  if (!(canonical.status & kOccupiedBit2)) return false;

  const uint64_t sc = supercluster_start_of(q);
  uint64_t occ_rank = 1;
  for (uint64_t i = sc; i < q; ++i) {
    if (table_.get_slot(i).status & kOccupiedBit2) ++occ_rank;
  }

  uint64_t runs_seen = 0;
  for (uint64_t i = sc; i < m; ++i) {
    Slot cur = table_.get_slot(i);
    if (cur.remainder == 0) return false;
    if (cur.status & kNewRunBit2) ++runs_seen;
    if (runs_seen == occ_rank) {
      // Scan this run's sorted remainders.
      for (uint64_t j = i; j < m; ++j) {
        Slot el = table_.get_slot(j);
        if (el.remainder == 0) return false;
        if (j > i && (el.status & kNewRunBit2)) return false;
        if (el.remainder == fp.remainder) return true;
        if (el.remainder > fp.remainder) return false;
      }
      return false;
    }
  }
  return false;
}

QuotientFilter QuotientFilter::bounded_grow() const {
  if (params_.remainder_bits < 2) {
    throw std::invalid_argument(
        "bounded_grow: remainder bits exhausted; use the expandable filter");
  }
  FilterParams np = params_;
  np.quotient_bits += 1;
  np.remainder_bits -= 1;
  QuotientFilter grown(np, variant_);
  // A left-to-right sweep re-inserts elements in fingerprint order, so the
  // grown table is identical to a fresh build from the rebased multiset.
  for_each_fingerprint([&](const Fingerprint& fp) {
    grown.insert(rebase_fingerprint(fp.quotient, fp.remainder, params_, np));
  });
  return grown;
}

double QuotientFilter::fpr_estimate() const {
  double n = static_cast<double>(count_);
  if (variant_ == Variant::three_bit) {
    return n * std::pow(2.0, -static_cast<double>(params_.fingerprint_bits()));
  }
  // Non-zero remainders draw from 2^r - 1 values.
  double values =
      std::pow(2.0, static_cast<double>(params_.remainder_bits)) - 1.0;
  return n / static_cast<double>(params_.num_slots()) / values;
}

void QuotientFilter::for_each_fingerprint(
    const std::function<void(const Fingerprint&)>& fn) const {
  const uint64_t m = params_.num_slots();
  const bool three = variant_ == Variant::three_bit;
  const uint8_t occ_bit = three ? kOccupiedBit : kOccupiedBit2;
  std::queue<uint64_t> pending;
  uint64_t current_q = 0;
  for (uint64_t i = 0; i < m; ++i) {
    Slot s = table_.get_slot(i);
    if (s.status & occ_bit) pending.push(i);
    bool holds_element =
        three ? s.status != kStatusEmpty : s.remainder != 0;
    if (!holds_element) continue;
    bool run_starts = three ? !(s.status & kContinuationBit)
                            : (s.status & kNewRunBit2) != 0;
    if (run_starts) {
      current_q = pending.front();
      pending.pop();
    }
    fn(Fingerprint{current_q, s.remainder});
  }
}

bool QuotientFilter::check_consistency() const {
  const uint64_t m = params_.num_slots();
  const bool three = variant_ == Variant::three_bit;
  const uint8_t occ_bit = three ? kOccupiedBit : kOccupiedBit2;
  std::queue<uint64_t> pending;
  uint64_t decoded = 0;
  uint64_t prev_remainder = 0;
  bool in_run = false;
  for (uint64_t i = 0; i < m; ++i) {
    Slot s = table_.get_slot(i);
    if (three) {
      if (s.status == kStatusReadLock || s.status == kStatusWriteLock) {
        return false;  // no lock codes in a quiescent table
      }
      if (s.status == kStatusEmpty && s.remainder != 0) return false;
    }
    if (s.status & occ_bit) pending.push(i);
    bool holds_element =
        three ? s.status != kStatusEmpty : s.remainder != 0;
    if (!holds_element) {
      // An empty slot ends the cluster; all pending runs must be consumed.
      if (!pending.empty()) return false;
      in_run = false;
      continue;
    }
    if (!three && s.remainder == 0) return false;
    bool run_starts = three ? !(s.status & kContinuationBit)
                            : (s.status & kNewRunBit2) != 0;
    if (run_starts) {
      if (pending.empty()) return false;
      uint64_t quot = pending.front();
      pending.pop();
      if (quot > i) return false;  // element left of its canonical slot
      if (three) {
        bool shifted = s.status & kShiftedBit;
        if (shifted != (i != quot)) return false;
      }
      in_run = true;
    } else {
      if (!in_run) return false;
      if (s.remainder < prev_remainder) return false;  // runs are sorted
    }
    prev_remainder = s.remainder;
    ++decoded;
  }
  return pending.empty() && decoded == count_;
}

void QuotientFilter::dump(std::ostream& out) const {
  io::write_u32(out, kDumpMagic);
  io::write_u32(out, params_.quotient_bits);
  io::write_u32(out, params_.remainder_bits);
  io::write_u32(out, static_cast<uint32_t>(variant_));
  io::write_u64(out, params_.seed);
  io::write_u64(out, count_);
  io::write_u64(out, table_.num_groups());
  for (uint64_t g = 0; g < table_.num_groups(); ++g) {
    io::write_u64(out, table_.raw_word(g));
  }
}

QuotientFilter QuotientFilter::load(std::istream& in) {
  if (io::read_u32(in) != kDumpMagic) {
    throw std::runtime_error("filter dump: bad magic");
  }
  FilterParams p;
  p.quotient_bits = io::read_u32(in);
  p.remainder_bits = io::read_u32(in);
  auto variant = static_cast<Variant>(io::read_u32(in));
  p.seed = io::read_u64(in);
  uint64_t count = io::read_u64(in);
  uint64_t groups = io::read_u64(in);
  QuotientFilter f(p, variant);
  if (groups != f.table_.num_groups()) {
    throw std::runtime_error("filter dump: group count mismatch");
  }
  for (uint64_t g = 0; g < groups; ++g) {
    f.table_.set_raw_word(g, io::read_u64(in));
  }
  f.count_ = count;
  return f;
}

}  // namespace qf
