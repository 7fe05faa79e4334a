#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <random>
#include <thread>
#include <vector>

#include "doctest.h"
#include "qf/slot_storage.hpp"

using namespace qf;

TEST_CASE("slots per group leaves no slot straddling a word") {
  CHECK(PackedTable::slots_per_group(13) == 4);  // 3 + 10
  CHECK(PackedTable::slots_per_group(64) == 1);
  CHECK(PackedTable::slots_per_group(8) == 8);
  CHECK(PackedTable::slots_per_group(1) == 64);
}

TEST_CASE("set_slot/get_slot round-trip across widths") {
  std::mt19937_64 rng(3);
  for (auto [sb, rb] : {std::pair{3u, 10u}, {3u, 1u}, {2u, 12u}, {0u, 13u}}) {
    PackedTable t(sb, rb, 300);
    std::vector<Slot> shadow(300);
    for (int iter = 0; iter < 3000; ++iter) {
      uint64_t i = rng() % 300;
      Slot s{uint8_t(rng() & ((1u << sb) - 1)),
             rng() & ((uint64_t{1} << rb) - 1)};
      t.set_slot(i, s);
      shadow[i] = s;
    }
    for (uint64_t i = 0; i < 300; ++i) {
      CHECK(t.get_slot(i) == shadow[i]);
    }
  }
}

TEST_CASE("writes do not spill into neighboring slots") {
  PackedTable t(3, 10, 64);
  for (uint64_t i = 0; i < 64; ++i) t.set_slot(i, Slot{0b101, 0x3ff});
  t.set_slot(5, Slot{0, 0});
  CHECK(t.get_slot(4) == Slot{0b101, 0x3ff});
  CHECK(t.get_slot(5) == Slot{0, 0});
  CHECK(t.get_slot(6) == Slot{0b101, 0x3ff});
}

TEST_CASE("encode/decode masks the remainder to its width") {
  PackedTable t(3, 6, 10);
  uint64_t v = t.encode(Slot{0b111, 0x3f});
  CHECK(v == ((0b111ull << 6) | 0x3f));
  CHECK(t.decode(v) == Slot{0b111, 0x3f});
}

TEST_CASE("group loads are single-word snapshots") {
  PackedTable t(3, 10, 16);  // 4 slots per 64-bit group
  CHECK(t.group_slots() == 4);
  t.set_slot(0, Slot{0b100, 1});
  t.set_slot(1, Slot{0b011, 2});
  t.set_slot(2, Slot{0b001, 3});
  uint64_t w = t.load_group(0);
  CHECK(t.slot_from_word(w, 0) == Slot{0b100, 1});
  CHECK(t.slot_from_word(w, 1) == Slot{0b011, 2});
  CHECK(t.slot_from_word(w, 2) == Slot{0b001, 3});
  CHECK(t.slot_from_word(w, 3) == Slot{0, 0});
}

TEST_CASE("cas_slot succeeds only against the current value") {
  PackedTable t(3, 10, 8);
  t.set_slot(3, Slot{0b100, 7});
  Slot observed;
  CHECK_FALSE(t.cas_slot(3, Slot{0, 0}, Slot{0b110, 0}, &observed));
  CHECK(observed == Slot{0b100, 7});
  CHECK(t.cas_slot(3, Slot{0b100, 7}, Slot{0b010, 7}));
  CHECK(t.get_slot(3) == Slot{0b010, 7});
}

TEST_CASE("cas_slot tolerates churn in neighboring lanes") {
  PackedTable t(3, 10, 8);
  std::atomic<bool> stop{false};
  std::thread churn([&] {
    uint64_t v = 0;
    while (!stop.load(std::memory_order_relaxed)) {
      t.set_slot(1, Slot{uint8_t(v & 7), v & 0x3ff});
      ++v;
    }
  });
  for (uint64_t i = 0; i < 20000; ++i) {
    Slot cur = t.get_slot(2);
    CHECK(t.cas_slot(2, cur, Slot{uint8_t((i + 1) & 7), i & 0x3ff}));
  }
  stop.store(true);
  churn.join();
}

TEST_CASE("sentinel padding slots read as permanently blocked") {
  // 10 slots, 4 per group: lanes 10 and 11 of the last group are padding.
  PackedTable t3(3, 10, 10);
  uint64_t w = t3.load_group(2);
  CHECK(t3.slot_from_word(w, 2) == Slot{kStatusWriteLock, 0x3ff});
  CHECK(t3.slot_from_word(w, 3) == Slot{kStatusWriteLock, 0x3ff});
  CHECK_THROWS_AS(t3.get_slot(10), std::out_of_range);

  PackedTable t0(0, 16, 6);  // 4 per group, lanes 6..7 padding
  uint64_t w0 = t0.load_group(1);
  CHECK(t0.slot_value(w0, 2) == 0xffff);
  CHECK(t0.slot_value(w0, 3) == 0xffff);
}

TEST_CASE("copies share no storage") {
  PackedTable a(3, 10, 20);
  a.set_slot(7, Slot{0b101, 42});
  PackedTable b(a);
  CHECK(b.same_contents(a));
  b.set_slot(7, Slot{0, 0});
  CHECK(a.get_slot(7) == Slot{0b101, 42});
  CHECK_FALSE(b.same_contents(a));
}

TEST_CASE("access log counts touched groups") {
  PackedTable t(3, 10, 64);
  storage_stats::reset();
  t.get_slot(0);
  CHECK(storage_stats::accesses() == 1);
  CHECK(storage_stats::distinct_groups() == 1);
  t.get_slot(1);  // same group
  CHECK(storage_stats::accesses() == 2);
  CHECK(storage_stats::distinct_groups() == 1);
  t.get_slot(8);  // third group
  CHECK(storage_stats::distinct_groups() == 2);
  storage_stats::reset();
  CHECK(storage_stats::accesses() == 0);
}

TEST_CASE("concurrent single-slot CAS increments never lose updates") {
  PackedTable t(0, 32, 4);
  const int threads = 4, per = 10000;
  std::vector<std::thread> ws;
  for (int w = 0; w < threads; ++w) {
    ws.emplace_back([&] {
      for (int i = 0; i < per; ++i) {
        for (;;) {
          Slot cur = t.get_slot(2);
          if (t.cas_slot(2, cur, Slot{0, cur.remainder + 1})) break;
        }
      }
    });
  }
  for (auto& w : ws) w.join();
  CHECK(t.get_slot(2).remainder == uint64_t(threads) * per);
}
