#include "qf/expandable_qf.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "qf/sequential_qf.hpp"
#include "qf/serialize.hpp"

namespace qf {

namespace {
constexpr uint32_t kDumpMagic = 0x31465845;  // "EXF1"
}

struct ExpandableQF::Level {
  uint32_t final_q;
  uint32_t final_r;
  ConcurrentQF filter;

  Level(uint32_t fq, uint32_t fr, uint32_t shift,
        const ConcurrentQFOptions& options)
      : final_q(fq), final_r(fr), filter(fq - shift, fr + shift, options) {}

  Level(uint32_t fq, uint32_t fr, std::istream& in,
        const ConcurrentQFOptions& options)
      : final_q(fq), final_r(fr), filter(in, options) {}
};

uint32_t ExpandableQF::base_quotient_bits(const ExpandableConfig& config) {
  uint32_t q = 1;
  while (config.grow_fill_degree * static_cast<double>(uint64_t{1} << q) <=
         static_cast<double>(config.min_capacity)) {
    ++q;
  }
  return q;
}

uint32_t ExpandableQF::base_remainder_bits(const ExpandableConfig& config) {
  uint32_t r = 1;
  while (2.0 * config.grow_fill_degree * std::pow(2.0, -double(r)) >=
         config.target_fpr) {
    ++r;
  }
  return r;
}

ExpandableQF::ExpandableQF(ExpandableConfig config) : config_(config) {
  if (config_.min_capacity == 0 || config_.target_fpr <= 0.0 ||
      config_.target_fpr >= 1.0 || config_.grow_fill_degree <= 0.0 ||
      config_.grow_fill_degree > 0.95) {
    throw std::invalid_argument("ExpandableQF: bad config");
  }
  base_q_ = base_quotient_bits(config_);
  base_r_ = base_remainder_bits(config_);
  for (auto& l : levels_) l.store(nullptr, std::memory_order_relaxed);
  append_level_locked(nullptr);
}

ExpandableQF::~ExpandableQF() = default;

ExpandableQF::Level* ExpandableQF::newest(int& count) const {
  count = num_levels_.load(std::memory_order_acquire);
  return levels_[count - 1].load(std::memory_order_acquire);
}

bool ExpandableQF::needs_handoff(const Level& level) const {
  FilterParams p = level.filter.params();
  if (p.quotient_bits != level.final_q) return false;  // still growing
  return static_cast<double>(level.filter.size()) >=
         config_.grow_fill_degree * static_cast<double>(p.num_slots());
}

void ExpandableQF::append_level_locked(std::istream* in) {
  int n = static_cast<int>(owned_.size());
  if (n >= kMaxLevels) throw std::runtime_error("ExpandableQF: too many levels");
  uint32_t fq = base_q_ + static_cast<uint32_t>(n);
  uint32_t fr = base_r_ + static_cast<uint32_t>(n);
  ConcurrentQFOptions options;
  options.grow_fill_degree = config_.grow_fill_degree;
  options.max_quotient_bits = fq;
  options.seed = config_.seed;
  // New levels start an eighth of their final size and grow in place.
  uint32_t shift = std::min<uint32_t>(3, fq - 1);
  owned_.push_back(in ? std::make_unique<Level>(fq, fr, *in, options)
                      : std::make_unique<Level>(fq, fr, shift, options));
  levels_[n].store(owned_.back().get(), std::memory_order_release);
  num_levels_.store(n + 1, std::memory_order_release);
}

void ExpandableQF::add_level(int expected_count) {
  std::lock_guard<std::mutex> lock(level_mutex_);
  if (num_levels_.load(std::memory_order_relaxed) != expected_count) return;
  append_level_locked(nullptr);
}

void ExpandableQF::insert_hash(uint64_t hash) {
  for (;;) {
    int n = 0;
    Level* level = newest(n);
    if (needs_handoff(*level)) {
      add_level(n);
      continue;
    }
    try {
      level->filter.insert_hash(hash);
      return;
    } catch (const FilterFullError&) {
      // Handoff lagged behind a burst of inserts; open the next level.
      add_level(n);
    }
  }
}

bool ExpandableQF::contains_hash(uint64_t hash) const {
  // Retired levels only ever receive canonical-slot placements, which never
  // move existing entries, so they are read without locks.
  int n = num_levels_.load(std::memory_order_acquire);
  for (int i = 0; i + 1 < n; ++i) {
    Level* level = levels_[i].load(std::memory_order_acquire);
    if (level->filter.contains_hash_unlocked(hash)) return true;
  }
  return levels_[n - 1].load(std::memory_order_acquire)
      ->filter.contains_hash(hash);
}

bool ExpandableQF::contains_hash_early_abort(uint64_t hash) const {
  int n = num_levels_.load(std::memory_order_acquire);
  for (int i = 0; i + 1 < n; ++i) {
    Level* level = levels_[i].load(std::memory_order_acquire);
    if (level->filter.canonical_slot_empty(hash)) return false;
    if (level->filter.contains_hash_unlocked(hash)) return true;
  }
  return levels_[n - 1].load(std::memory_order_acquire)
      ->filter.contains_hash(hash);
}

void ExpandableQF::insert_hash_cascading(uint64_t hash) {
  int n = num_levels_.load(std::memory_order_acquire);
  for (int i = 0; i + 1 < n; ++i) {
    Level* level = levels_[i].load(std::memory_order_acquire);
    if (level->filter.try_place_at_empty_canonical(hash)) return;
  }
  insert_hash(hash);
}

void ExpandableQF::insert_key(uint64_t key) {
  insert_hash(hash_key(key, config_.seed));
}

bool ExpandableQF::contains_key(uint64_t key) const {
  return contains_hash(hash_key(key, config_.seed));
}

void ExpandableQF::insert(std::span<const std::byte> key) {
  insert_hash(hash_bytes(key, config_.seed));
}

bool ExpandableQF::contains(std::span<const std::byte> key) const {
  return contains_hash(hash_bytes(key, config_.seed));
}

void ExpandableQF::insert_key_cascading(uint64_t key) {
  insert_hash_cascading(hash_key(key, config_.seed));
}

bool ExpandableQF::contains_key_early_abort(uint64_t key) const {
  return contains_hash_early_abort(hash_key(key, config_.seed));
}

bool ExpandableQF::query_or_insert_hash(uint64_t hash) {
  // One cascading walk does double duty: the first retired level with an
  // empty canonical slot both proves absence and is where the element goes.
  int n = num_levels_.load(std::memory_order_acquire);
  for (int i = 0; i + 1 < n; ++i) {
    Level* level = levels_[i].load(std::memory_order_acquire);
    if (level->filter.try_place_at_empty_canonical(hash)) return false;
    if (level->filter.contains_hash_unlocked(hash)) return true;
  }
  Level* active = levels_[n - 1].load(std::memory_order_acquire);
  if (active->filter.contains_hash(hash)) return true;
  insert_hash(hash);
  return false;
}

bool ExpandableQF::query_or_insert_key(uint64_t key) {
  return query_or_insert_hash(hash_key(key, config_.seed));
}

uint64_t ExpandableQF::size() const {
  int n = num_levels_.load(std::memory_order_acquire);
  uint64_t total = 0;
  for (int i = 0; i < n; ++i) {
    total += levels_[i].load(std::memory_order_acquire)->filter.size();
  }
  return total;
}

FilterParams ExpandableQF::level_params(int i) const {
  if (i < 0 || i >= num_levels_.load(std::memory_order_acquire)) {
    throw std::out_of_range("ExpandableQF: level index out of range");
  }
  return levels_[i].load(std::memory_order_acquire)->filter.params();
}

std::pair<uint32_t, uint32_t> ExpandableQF::level_final_bits(int i) const {
  if (i < 0 || i >= num_levels_.load(std::memory_order_acquire)) {
    throw std::out_of_range("ExpandableQF: level index out of range");
  }
  Level* level = levels_[i].load(std::memory_order_acquire);
  return {level->final_q, level->final_r};
}

ExpandableQF::FprBound ExpandableQF::fpr_bound() const {
  // Level i caps out at delta * 2^(q0+i) elements with fingerprints of
  // q0+r0+2i bits, so its false-positive budget is delta * 2^-(r0+i).  The
  // geometric sum is under twice the first budget for any level count, and
  // the first remainder width was chosen to keep that under target_fpr.
  int n = num_levels_.load(std::memory_order_acquire);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += config_.grow_fill_degree *
           std::pow(2.0, -double(base_r_ + uint32_t(i)));
  }
  double limit =
      2.0 * config_.grow_fill_degree * std::pow(2.0, -double(base_r_));
  return {sum, limit};
}

void ExpandableQF::dump(std::ostream& out) const {
  io::write_u32(out, kDumpMagic);
  io::write_u64(out, config_.min_capacity);
  io::write_u64(out, std::bit_cast<uint64_t>(config_.target_fpr));
  io::write_u64(out, std::bit_cast<uint64_t>(config_.grow_fill_degree));
  io::write_u64(out, config_.seed);
  int n = num_levels_.load(std::memory_order_acquire);
  io::write_u32(out, static_cast<uint32_t>(n));
  for (int i = 0; i < n; ++i) {
    levels_[i].load(std::memory_order_acquire)->filter.dump(out);
  }
}

ExpandableQF::ExpandableQF(std::istream& in) {
  if (io::read_u32(in) != kDumpMagic) {
    throw std::runtime_error("filter dump: bad magic");
  }
  config_.min_capacity = io::read_u64(in);
  config_.target_fpr = std::bit_cast<double>(io::read_u64(in));
  config_.grow_fill_degree = std::bit_cast<double>(io::read_u64(in));
  config_.seed = io::read_u64(in);
  base_q_ = base_quotient_bits(config_);
  base_r_ = base_remainder_bits(config_);
  for (auto& l : levels_) l.store(nullptr, std::memory_order_relaxed);
  uint32_t n = io::read_u32(in);
  if (n == 0 || n > kMaxLevels) {
    throw std::runtime_error("filter dump: bad level count");
  }
  for (uint32_t i = 0; i < n; ++i) append_level_locked(&in);
}

}  // namespace qf
