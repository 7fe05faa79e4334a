#pragma once

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>

namespace qf {

inline constexpr uint64_t kDefaultSeed = 0x9e3779b97f4a7c15ULL;

/// Seedable 64-bit hash with good avalanche behavior (MurmurHash64A).
inline uint64_t hash_bytes(std::span<const std::byte> data, uint64_t seed) {
  constexpr uint64_t m = 0xc6a4a7935bd1e995ULL;
  constexpr int s = 47;

  const std::byte* p = data.data();
  size_t len = data.size();
  uint64_t h = seed ^ (uint64_t{len} * m);

  while (len >= 8) {
    uint64_t k;
    std::memcpy(&k, p, 8);
    k *= m;
    k ^= k >> s;
    k *= m;
    h ^= k;
    h *= m;
    p += 8;
    len -= 8;
  }

  uint64_t tail = 0;
  std::memcpy(&tail, p, len);
  if (len != 0) {
    h ^= tail;
    h *= m;
  }

  h ^= h >> s;
  h *= m;
  h ^= h >> s;
  return h;
}

/// Integer keys hash via their fixed-width little-endian encoding so results
/// are identical across platforms and runs.
inline uint64_t hash_key(uint64_t key, uint64_t seed) {
  std::byte buf[8];
  for (int i = 0; i < 8; ++i) {
    buf[i] = static_cast<std::byte>(key >> (8 * i));
  }
  return hash_bytes(std::span<const std::byte>(buf, 8), seed);
}

/// splitmix64 finalizer; a bijection on 64-bit values.  Used to derive
/// deterministic, collision-free key streams for benchmarks and tests.
inline constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace qf
