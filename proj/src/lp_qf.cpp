#include "qf/lp_qf.hpp"

#include <cmath>
#include <stdexcept>

#include "qf/serialize.hpp"

namespace qf {

namespace {
constexpr uint32_t kDumpMagic = 0x3146504c;  // "LPF1"
}

LinearProbingQF::LinearProbingQF(uint32_t quotient_bits,
                                 uint32_t remainder_bits, uint64_t seed)
    : params_{quotient_bits, remainder_bits + kExtraRemainderBits, true, seed},
      table_(0, params_.remainder_bits, params_.num_slots()) {
  params_.validate();
}

Fingerprint LinearProbingQF::fingerprint(uint64_t key) const {
  return make_nonzero_fingerprint(key, params_);
}

Fingerprint LinearProbingQF::fingerprint(std::span<const std::byte> key) const {
  return make_nonzero_fingerprint(key, params_);
}

void LinearProbingQF::insert(const Fingerprint& fp) {
  const uint64_t m = params_.num_slots();
  if (static_cast<double>(count_.load(std::memory_order_relaxed) + 1) >
      kMaxFillDegree * static_cast<double>(m)) {
    throw FilterFullError();
  }
  // The probe sequence wraps: with no shifting a slot's position never
  // depends on its neighbors, so circular probing is safe and keeps the
  // table usable at any canonical slot up to the fill cap.
  uint64_t i = fp.quotient;
  for (uint64_t probed = 0; probed < m; ++probed) {
    Slot cur = table_.get_slot(i);
    if (cur.remainder == 0) {
      // Publish into the slot that was empty at CAS time; on failure the
      // loop re-examines the same slot.
      if (table_.cas_slot(i, Slot{0, 0}, Slot{0, fp.remainder})) {
        count_.fetch_add(1, std::memory_order_relaxed);
        return;
      }
      continue;
    }
    i = i + 1 == m ? 0 : i + 1;
  }
  throw FilterFullError();
}

bool LinearProbingQF::contains(const Fingerprint& fp) const {
  const uint64_t m = params_.num_slots();
  uint64_t i = fp.quotient;
  for (uint64_t probed = 0; probed < m; ++probed) {
    uint64_t stored = table_.get_slot(i).remainder;
    if (stored == 0) return false;
    if (stored == fp.remainder) return true;
    i = i + 1 == m ? 0 : i + 1;
  }
  return false;
}

double LinearProbingQF::expected_fpr(double delta, uint32_t remainder_bits) {
  if (delta < 0.0 || delta >= 1.0) {
    throw std::domain_error("expected_fpr: fill degree must be in [0, 1)");
  }
  double comparisons = 0.5 * (1.0 + 1.0 / ((1.0 - delta) * (1.0 - delta)));
  double values =
      std::pow(2.0, double(remainder_bits + kExtraRemainderBits)) - 1.0;
  return comparisons / values;
}

double LinearProbingQF::expected_fpr_empirical(double delta,
                                               uint32_t remainder_bits) {
  if (delta < 0.0 || delta >= 1.0) {
    throw std::domain_error("expected_fpr: fill degree must be in [0, 1)");
  }
  double comparisons =
      0.5 * (1.0 / ((1.0 - delta) * (1.0 - delta)) - 1.0);
  double values =
      std::pow(2.0, double(remainder_bits + kExtraRemainderBits)) - 1.0;
  return comparisons / values;
}

void LinearProbingQF::dump(std::ostream& out) const {
  io::write_u32(out, kDumpMagic);
  io::write_u32(out, params_.quotient_bits);
  io::write_u32(out, params_.remainder_bits - kExtraRemainderBits);
  io::write_u32(out, 2);  // variant tag: linear probing
  io::write_u64(out, params_.seed);
  io::write_u64(out, size());
  io::write_u64(out, table_.num_groups());
  for (uint64_t g = 0; g < table_.num_groups(); ++g) {
    io::write_u64(out, table_.raw_word(g));
  }
}

LinearProbingQF LinearProbingQF::load(std::istream& in) {
  if (io::read_u32(in) != kDumpMagic) {
    throw std::runtime_error("filter dump: bad magic");
  }
  uint32_t q = io::read_u32(in);
  uint32_t r = io::read_u32(in);
  if (io::read_u32(in) != 2) {
    throw std::runtime_error("filter dump: variant mismatch");
  }
  uint64_t seed = io::read_u64(in);
  uint64_t count = io::read_u64(in);
  uint64_t groups = io::read_u64(in);
  LinearProbingQF f(q, r, seed);
  if (groups != f.table_.num_groups()) {
    throw std::runtime_error("filter dump: group count mismatch");
  }
  for (uint64_t g = 0; g < groups; ++g) {
    f.table_.set_raw_word(g, io::read_u64(in));
  }
  f.count_.store(count, std::memory_order_relaxed);
  return f;
}

}  // namespace qf
