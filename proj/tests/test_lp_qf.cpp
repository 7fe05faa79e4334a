#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "qf/lp_qf.hpp"

using namespace qf;

TEST_CASE("slots store r+3 bits and remainders are never zero") {
  LinearProbingQF f(10, 7);
  CHECK(f.params().remainder_bits == 10);
  CHECK(f.table().slot_bits() == 10);
  for (uint64_t key = 0; key < 5000; ++key) {
    CHECK(f.fingerprint(key).remainder != 0);
  }
}

TEST_CASE("placement matches the first-empty-slot oracle") {
  LinearProbingQF f(6, 5);
  std::mt19937_64 rng(31);
  std::vector<Fingerprint> fps;
  for (int i = 0; i < 40; ++i) {
    uint64_t r = rng() & 0xff;
    fps.push_back({rng() % 64, r == 0 ? 1 : r});
    f.insert(fps.back());
  }
  auto expected = oracle::layout_lp(fps, 64);
  for (uint64_t i = 0; i < 64; ++i) {
    CAPTURE(i);
    CHECK(f.table().get_slot(i).remainder == expected[i]);
  }
}

TEST_CASE("queries scan from the canonical slot to the first empty slot") {
  LinearProbingQF f(6, 5);
  f.insert({10, 3});
  f.insert({10, 4});
  f.insert({11, 5});
  CHECK(f.contains({10, 3}));
  CHECK(f.contains({10, 4}));
  CHECK(f.contains({11, 5}));
  // Remainder 5 sits at slot 12 inside 10's probe window: a colliding
  // remainder is a false positive by design.
  CHECK(f.contains({10, 5}));
  CHECK_FALSE(f.contains({10, 6}));
  CHECK_FALSE(f.contains({13, 3}));
}

TEST_CASE("no false negatives under a keyed workload") {
  LinearProbingQF f(13, 10);
  const uint64_t n = uint64_t(0.8 * (1 << 13));
  for (uint64_t i = 0; i < n; ++i) f.insert_key(mix64(i));
  CHECK(f.size() == n);
  for (uint64_t i = 0; i < n; ++i) CHECK(f.contains_key(mix64(i)));
}

TEST_CASE("insert refuses beyond fill degree 0.9") {
  LinearProbingQF f(6, 8);
  uint64_t cap = uint64_t(0.9 * 64);
  std::mt19937_64 rng(32);
  for (uint64_t i = 0; i < cap; ++i) {
    uint64_t r = rng() & 0x7ff;
    f.insert({rng() % 64, r == 0 ? 1 : r});
  }
  CHECK_THROWS_AS(f.insert({0, 1}), FilterFullError);
  CHECK(f.size() == cap);
}

TEST_CASE("closed-form rate decreases with remainder bits, grows with fill") {
  double a = LinearProbingQF::expected_fpr(0.5, 8);
  double b = LinearProbingQF::expected_fpr(0.5, 12);
  double c = LinearProbingQF::expected_fpr(0.8, 8);
  CHECK(a > b);
  CHECK(c > a);
  // delta = 0.5: 1/2 (1 + 4) / (2^11 - 1)
  CHECK(a == doctest::Approx(2.5 / 2047.0));
  CHECK_THROWS_AS(LinearProbingQF::expected_fpr(1.0, 8), std::domain_error);
  // The empirical form drops the terminating empty-slot probe.
  CHECK(LinearProbingQF::expected_fpr_empirical(0.5, 8) ==
        doctest::Approx(1.5 / 2047.0));
}

TEST_CASE("measured FPR tracks the corrected expectation at half fill") {
  LinearProbingQF f(14, 10);
  const uint64_t m = 1 << 14;
  const uint64_t n = m / 2;
  for (uint64_t i = 0; i < n; ++i) f.insert_key(mix64(i));
  uint64_t false_pos = 0;
  const uint64_t probes = 400000;
  for (uint64_t i = 0; i < probes; ++i) {
    if (f.contains_key(mix64(n + i))) ++false_pos;
  }
  double corrected = LinearProbingQF::expected_fpr_empirical(0.5, 10);
  CHECK(oracle::binomial_within(false_pos, probes, corrected, 4.0));
}

TEST_CASE("concurrent inserts lose no elements") {
  LinearProbingQF f(14, 10);
  const uint64_t n = uint64_t(0.8 * (1 << 14));
  const int threads = 4;
  std::vector<std::thread> ws;
  for (int t = 0; t < threads; ++t) {
    ws.emplace_back([&, t] {
      for (uint64_t i = t; i < n; i += threads) f.insert_key(mix64(i));
    });
  }
  for (auto& w : ws) w.join();
  CHECK(f.size() == n);
  for (uint64_t i = 0; i < n; ++i) {
    CAPTURE(i);
    CHECK(f.contains_key(mix64(i)));
  }
}

TEST_CASE("queries run concurrently with inserts") {
  LinearProbingQF f(13, 10);
  const uint64_t n = uint64_t(0.5 * (1 << 13));
  std::atomic<uint64_t> done{0};
  std::thread writer([&] {
    for (uint64_t i = 0; i < n; ++i) {
      f.insert_key(mix64(i));
      done.store(i + 1, std::memory_order_release);
    }
  });
  // Keys already acknowledged as inserted must always be found.
  for (int round = 0; round < 200; ++round) {
    uint64_t upto = done.load(std::memory_order_acquire);
    for (uint64_t i = 0; i < upto; i += 97) {
      CHECK(f.contains_key(mix64(i)));
    }
  }
  writer.join();
}

TEST_CASE("dump/load round-trips") {
  LinearProbingQF f(8, 9);
  for (uint64_t i = 0; i < 150; ++i) f.insert_key(mix64(i));
  std::stringstream buf;
  f.dump(buf);
  LinearProbingQF g = LinearProbingQF::load(buf);
  CHECK(g.size() == f.size());
  CHECK(g.table().same_contents(f.table()));
  for (uint64_t i = 0; i < 150; ++i) CHECK(g.contains_key(mix64(i)));
}
