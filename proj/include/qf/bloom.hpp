#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <memory>

#include "qf/hash.hpp"

namespace qf {

/// Plain blocked-free Bloom filter used as a benchmark baseline, sized to
/// match a quotient filter's memory: m slots of `bits_per_slot` bits each.
/// k hash positions come from double hashing; inserts are a relaxed
/// fetch_or per bit, queries are wait-free.
class BloomFilter {
 public:
  static constexpr uint32_t kNumHashes = 4;

  BloomFilter(uint64_t num_bits, uint64_t seed = kDefaultSeed)
      : num_bits_(num_bits),
        seed_(seed),
        words_((num_bits + 63) / 64) {
    if (num_bits_ == 0) num_bits_ = 1;
    bits_ = std::make_unique<std::atomic<uint64_t>[]>(words_);
    for (uint64_t i = 0; i < words_; ++i) {
      bits_[i].store(0, std::memory_order_relaxed);
    }
  }

  void insert_key(uint64_t key) { insert_hash(hash_key(key, seed_)); }
  bool contains_key(uint64_t key) const {
    return contains_hash(hash_key(key, seed_));
  }

  void insert_hash(uint64_t hash) {
    uint64_t h1 = hash;
    uint64_t h2 = mix64(hash) | 1;  // odd step so positions stay distinct
    for (uint32_t i = 0; i < kNumHashes; ++i) {
      uint64_t bit = (h1 + i * h2) % num_bits_;
      bits_[bit / 64].fetch_or(uint64_t{1} << (bit % 64),
                               std::memory_order_relaxed);
    }
  }

  bool contains_hash(uint64_t hash) const {
    uint64_t h1 = hash;
    uint64_t h2 = mix64(hash) | 1;
    for (uint32_t i = 0; i < kNumHashes; ++i) {
      uint64_t bit = (h1 + i * h2) % num_bits_;
      if (!(bits_[bit / 64].load(std::memory_order_relaxed) &
            (uint64_t{1} << (bit % 64)))) {
        return false;
      }
    }
    return true;
  }

  /// (1 - e^(-kn/m))^k for n stored elements.
  double expected_fpr(uint64_t n) const {
    double fill = 1.0 - std::exp(-double(kNumHashes) * double(n) /
                                 double(num_bits_));
    return std::pow(fill, double(kNumHashes));
  }

  uint64_t num_bits() const { return num_bits_; }
  uint64_t seed() const { return seed_; }

 private:
  uint64_t num_bits_;
  uint64_t seed_;
  uint64_t words_;
  std::unique_ptr<std::atomic<uint64_t>[]> bits_;
};

}  // namespace qf
