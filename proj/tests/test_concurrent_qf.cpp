#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "qf/concurrent_qf.hpp"
#include "qf/sequential_qf.hpp"

using namespace qf;

namespace {

ConcurrentQFOptions fixed_size(uint32_t q) {
  ConcurrentQFOptions o;
  o.max_quotient_bits = q;  // growth off
  return o;
}

QuotientFilter sequential_build(const FilterParams& p,
                                const std::vector<uint64_t>& keys) {
  QuotientFilter f(p);
  for (uint64_t k : keys) f.insert_key(k);
  return f;
}

std::vector<uint64_t> key_range(uint64_t n, uint64_t base = 0) {
  std::vector<uint64_t> keys(n);
  for (uint64_t i = 0; i < n; ++i) keys[i] = mix64(base + i);
  return keys;
}

// Keys whose fingerprint multiset fits the non-ring table under `p` (a
// layout shifting past the last slot would refuse insertion; such key sets
// are redrawn from the next base).
std::vector<uint64_t> fitting_keys(const FilterParams& p, uint64_t n,
                                   uint64_t base = 0) {
  for (;; base += uint64_t{1} << 32) {
    auto keys = key_range(n, base);
    std::vector<Fingerprint> fps;
    fps.reserve(n);
    for (uint64_t k : keys) fps.push_back(make_fingerprint(k, p));
    try {
      oracle::layout3(fps, p.num_slots());
      return keys;
    } catch (const std::out_of_range&) {
    }
  }
}

}  // namespace

TEST_CASE("single-threaded inserts produce the sequential filter's table") {
  const uint32_t q = 10, r = 10;
  ConcurrentQF c(q, r, fixed_size(q));
  auto keys = key_range(700);
  for (uint64_t k : keys) c.insert_key(k);
  QuotientFilter ref =
      sequential_build(FilterParams{q, r, false, c.seed()}, keys);
  CHECK(c.size() == ref.size());
  CHECK(c.snapshot().table().same_contents(ref.table()));
  CHECK(c.check_consistency());
  for (uint64_t k : keys) CHECK(c.contains_key(k));
}

TEST_CASE("concurrent inserts reach the same canonical table") {
  // Runs are kept sorted, so the table is a pure function of the stored
  // multiset; any interleaving of 4 writers must land on the identical
  // bit pattern.
  const uint32_t q = 12, r = 10;
  const uint64_t n = uint64_t(0.8 * (1 << q));
  auto keys = fitting_keys(FilterParams{q, r, false, kDefaultSeed}, n);
  QuotientFilter ref =
      sequential_build(FilterParams{q, r, false, kDefaultSeed}, keys);

  for (int round = 0; round < 3; ++round) {
    ConcurrentQF c(q, r, fixed_size(q));
    const int threads = 4;
    std::vector<std::thread> ws;
    for (int t = 0; t < threads; ++t) {
      ws.emplace_back([&, t] {
        for (uint64_t i = t; i < n; i += threads) c.insert_key(keys[i]);
      });
    }
    for (auto& w : ws) w.join();
    CHECK(c.size() == n);
    CHECK(c.check_consistency());
    CHECK(c.snapshot().table().same_contents(ref.table()));
  }
}

TEST_CASE("mixed readers and writers: acknowledged keys are always found") {
  const uint32_t q = 13, r = 10;
  const uint64_t n = uint64_t(0.8 * (1 << q));
  auto keys = fitting_keys(FilterParams{q, r, false, kDefaultSeed}, n);
  ConcurrentQF c(q, r, fixed_size(q));
  std::atomic<uint64_t> done{0};
  std::atomic<bool> failed{false};

  std::thread writer([&] {
    for (uint64_t i = 0; i < n; ++i) {
      c.insert_key(keys[i]);
      done.store(i + 1, std::memory_order_release);
    }
  });
  std::vector<std::thread> readers;
  for (int t = 0; t < 3; ++t) {
    readers.emplace_back([&, t] {
      std::mt19937_64 rng(100 + t);
      while (done.load(std::memory_order_acquire) < n) {
        uint64_t upto = done.load(std::memory_order_acquire);
        if (upto == 0) continue;
        uint64_t i = rng() % upto;
        if (!c.contains_key(keys[i])) failed.store(true);
      }
    });
  }
  writer.join();
  for (auto& w : readers) w.join();
  CHECK_FALSE(failed.load());
  CHECK(c.check_consistency());
}

TEST_CASE("fixed-size filter refuses inserts beyond the fill cap") {
  ConcurrentQF c(8, 8, fixed_size(8));
  uint64_t cap = uint64_t(0.95 * 256);
  // Distinct canonical slots so the cap, not table-end shifting, refuses.
  for (uint64_t i = 0; i < cap; ++i) c.insert_hash((i << 8) | 1);
  CHECK_THROWS_AS(c.insert_hash((cap << 8) | 1), FilterFullError);
  CHECK(c.size() == cap);
}

TEST_CASE("manual growth equals the sequential bounded grow") {
  const uint32_t q = 9, r = 11;
  ConcurrentQF c(q, r, fixed_size(q + 1));
  auto keys = fitting_keys(FilterParams{q, r, false, kDefaultSeed}, 300);
  for (uint64_t k : keys) c.insert_key(k);
  QuotientFilter before = c.snapshot();
  c.grow();
  CHECK(c.params().quotient_bits == q + 1);
  CHECK(c.params().remainder_bits == r - 1);
  CHECK(c.size() == keys.size());
  QuotientFilter ref = before.bounded_grow();
  CHECK(c.snapshot().table().same_contents(ref.table()));
  for (uint64_t k : keys) CHECK(c.contains_key(k));
}

TEST_CASE("growth triggers automatically at the grow fill degree") {
  ConcurrentQF c(8, 12);
  uint64_t trigger = uint64_t(std::ceil(0.85 * 256));  // first n >= 0.85 m
  auto keys = fitting_keys(FilterParams{8, 12, false, kDefaultSeed}, trigger);
  for (uint64_t i = 0; i + 1 < trigger; ++i) c.insert_key(keys[i]);
  CHECK(c.params().quotient_bits == 8);
  c.insert_key(keys[trigger - 1]);
  CHECK(c.params().quotient_bits == 9);
  CHECK(c.size() == trigger);
  CHECK(c.check_consistency());
  for (uint64_t k : keys) CHECK(c.contains_key(k));
}

TEST_CASE("multi-step growth under 4 writers keeps every element") {
  const uint32_t q0 = 10, r0 = 12;
  const uint64_t n = uint64_t(0.85 * (1 << 13));  // forces 3 growth steps
  auto keys = key_range(n);
  ConcurrentQF c(q0, r0);
  const int threads = 4;
  std::vector<std::thread> ws;
  for (int t = 0; t < threads; ++t) {
    ws.emplace_back([&, t] {
      for (uint64_t i = t; i < n; i += threads) c.insert_key(keys[i]);
    });
  }
  for (auto& w : ws) w.join();
  CHECK(c.size() == n);
  CHECK(c.params().quotient_bits >= 13);
  CHECK(c.check_consistency());
  for (uint64_t k : keys) CHECK(c.contains_key(k));
  // Canonical layout also survives migration: compare to a fresh build.
  QuotientFilter ref = sequential_build(c.params(), keys);
  CHECK(c.snapshot().table().same_contents(ref.table()));
}

TEST_CASE("queries run during migration without losing elements") {
  const uint32_t q0 = 10, r0 = 12;
  const uint64_t n = uint64_t(0.85 * (1 << 13));
  auto keys = key_range(n);
  ConcurrentQF c(q0, r0);
  std::atomic<uint64_t> done{0};
  std::atomic<bool> failed{false};
  std::thread writer([&] {
    for (uint64_t i = 0; i < n; ++i) {
      c.insert_key(keys[i]);
      done.store(i + 1, std::memory_order_release);
    }
  });
  std::vector<std::thread> readers;
  for (int t = 0; t < 2; ++t) {
    readers.emplace_back([&, t] {
      std::mt19937_64 rng(7 + t);
      while (done.load(std::memory_order_acquire) < n) {
        uint64_t upto = done.load(std::memory_order_acquire);
        if (upto == 0) continue;
        if (!c.contains_key(keys[rng() % upto])) failed.store(true);
      }
    });
  }
  writer.join();
  for (auto& w : readers) w.join();
  CHECK_FALSE(failed.load());
  for (uint64_t k : keys) CHECK(c.contains_key(k));
}

TEST_CASE("no false positives beyond the fingerprint collision rate") {
  const uint32_t q = 13, r = 10;
  ConcurrentQF c(q, r, fixed_size(q));
  const uint64_t n = uint64_t(0.7 * (1 << q));
  auto keys = fitting_keys(FilterParams{q, r, false, kDefaultSeed}, n);
  for (uint64_t k : keys) c.insert_key(k);
  uint64_t false_pos = 0;
  const uint64_t probes = 300000;
  for (uint64_t i = 0; i < probes; ++i) {
    if (c.contains_key(mix64(n + i))) ++false_pos;
  }
  double expect = double(n) * std::pow(2.0, -double(q + r));
  CHECK(oracle::binomial_within(false_pos, probes, expect, 5.0));
}

TEST_CASE("empty-canonical placements and unlocked queries") {
  ConcurrentQF c(8, 10, fixed_size(8));
  uint64_t h1 = hash_key(1, c.seed());
  CHECK(c.try_place_at_empty_canonical(h1));
  CHECK_FALSE(c.try_place_at_empty_canonical(h1));  // slot now taken
  CHECK(c.contains_hash(h1));
  CHECK(c.contains_hash_unlocked(h1));
  CHECK(c.size() == 1);
  CHECK_FALSE(c.contains_hash_unlocked(hash_key(2, c.seed())));
}

TEST_CASE("unlocked queries agree with locked ones on a quiescent table") {
  const uint32_t q = 11, r = 9;
  ConcurrentQF c(q, r, fixed_size(q));
  const uint64_t n = uint64_t(0.6 * (1 << q));
  for (uint64_t i = 0; i < n; ++i) c.insert_key(mix64(i));
  for (uint64_t i = 0; i < 3 * n; ++i) {
    uint64_t h = hash_key(mix64(i), c.seed());
    CAPTURE(i);
    CHECK(c.contains_hash(h) == c.contains_hash_unlocked(h));
  }
}

TEST_CASE("negative fast-path query touches a single table word") {
  ConcurrentQF c(12, 10, fixed_size(12));
  c.insert_key(mix64(1));
  // A probe whose canonical slot is empty is answered from one group load.
  uint64_t h = hash_key(mix64(999), c.seed());
  Fingerprint fp = split_fingerprint(h, c.params());
  bool canonical_empty =
      c.snapshot().table().get_slot(fp.quotient).status == kStatusEmpty;
  REQUIRE(canonical_empty);
  storage_stats::reset();
  CHECK_FALSE(c.contains_hash(h));
  CHECK(storage_stats::accesses() == 1);
  CHECK(storage_stats::distinct_groups() == 1);
}

TEST_CASE("dump/load round-trips through the stream constructor") {
  const uint32_t q = 10, r = 10;
  ConcurrentQF c(q, r, fixed_size(q));
  auto keys = key_range(500);
  for (uint64_t k : keys) c.insert_key(k);
  std::stringstream buf;
  c.dump(buf);
  ConcurrentQF d(buf, fixed_size(q));
  CHECK(d.size() == c.size());
  CHECK(d.snapshot().table().same_contents(c.snapshot().table()));
  for (uint64_t k : keys) CHECK(d.contains_key(k));
}
