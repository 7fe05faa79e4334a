#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "qf/hash.hpp"

namespace qf {

/// Table geometry and hashing parameters shared by all filter variants.
///
/// q quotient bits address a table of m = 2^q slots, r remainder bits are
/// stored per slot; the fingerprint has k = q + r bits.
struct FilterParams {
  uint32_t quotient_bits = 0;   // q
  uint32_t remainder_bits = 0;  // r
  bool nonzero_remainder = false;
  uint64_t seed = kDefaultSeed;

  constexpr uint32_t fingerprint_bits() const {
    return quotient_bits + remainder_bits;
  }
  constexpr uint64_t num_slots() const { return uint64_t{1} << quotient_bits; }
  constexpr uint64_t remainder_mask() const {
    return (uint64_t{1} << remainder_bits) - 1;
  }

  void validate() const {
    if (quotient_bits < 1 || remainder_bits < 1) {
      throw std::invalid_argument("FilterParams: q and r must be >= 1");
    }
    if (fingerprint_bits() > 64) {
      throw std::invalid_argument("FilterParams: fingerprint exceeds 64 bits");
    }
  }

  friend bool operator==(const FilterParams&, const FilterParams&) = default;
};

/// The only identity a filter ever stores about a key.
struct Fingerprint {
  uint64_t quotient = 0;
  uint64_t remainder = 0;

  friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
  friend auto operator<=>(const Fingerprint&, const Fingerprint&) = default;
};

/// Splits the k bottom bits of a hash value into (top q, bottom r).
inline Fingerprint split_fingerprint(uint64_t hash, const FilterParams& p) {
  uint64_t k_bits =
      p.fingerprint_bits() == 64
          ? hash
          : hash & ((uint64_t{1} << p.fingerprint_bits()) - 1);
  return Fingerprint{k_bits >> p.remainder_bits, k_bits & p.remainder_mask()};
}

/// Reconstructs the k-bit fingerprint value from its split form.
inline uint64_t fingerprint_value(const Fingerprint& fp,
                                  const FilterParams& p) {
  return (fp.quotient << p.remainder_bits) | fp.remainder;
}

inline Fingerprint make_fingerprint(std::span<const std::byte> key,
                                    const FilterParams& p) {
  return split_fingerprint(hash_bytes(key, p.seed), p);
}

inline Fingerprint make_fingerprint(uint64_t key, const FilterParams& p) {
  return split_fingerprint(hash_key(key, p.seed), p);
}

// Rehash with incremented seeds until the remainder is non-zero.  With r >= 1
// each attempt fails with probability at most 1/2, so 64 attempts failing has
// probability <= 2^-64 and is treated as an internal fault.
inline constexpr int kNonzeroRehashCap = 64;

template <class Key>
inline Fingerprint make_nonzero_fingerprint_impl(const Key& key,
                                                 const FilterParams& p) {
  FilterParams attempt = p;
  for (int i = 0; i < kNonzeroRehashCap; ++i) {
    Fingerprint fp = make_fingerprint(key, attempt);
    if (fp.remainder != 0) return fp;
    attempt.seed += 1;
  }
  throw std::logic_error("make_nonzero_fingerprint: rehash cap exceeded");
}

inline Fingerprint make_nonzero_fingerprint(std::span<const std::byte> key,
                                            const FilterParams& p) {
  return make_nonzero_fingerprint_impl(key, p);
}

inline Fingerprint make_nonzero_fingerprint(uint64_t key,
                                            const FilterParams& p) {
  return make_nonzero_fingerprint_impl(key, p);
}

/// Re-splits a stored element under doubled table size: the top bit of the
/// old remainder moves into the quotient.  `slot_index` is the element's
/// canonical slot in the old table (its implicit quotient).
inline Fingerprint rebase_fingerprint(uint64_t slot_index, uint64_t remainder,
                                      const FilterParams& from,
                                      const FilterParams& to) {
  if (to.quotient_bits != from.quotient_bits + 1 ||
      to.remainder_bits + 1 != from.remainder_bits) {
    throw std::invalid_argument(
        "rebase_fingerprint: target must have q+1 quotient and r-1 remainder "
        "bits");
  }
  uint64_t top_bit = remainder >> to.remainder_bits;
  return Fingerprint{(slot_index << 1) | top_bit,
                     remainder & to.remainder_mask()};
}

}  // namespace qf
