#include <doctest.h>

#include "support/gen.hpp"
#include "vigil/assembler.hpp"
#include "vigil/history.hpp"

using namespace vigil;
using namespace vigil::testsupport;

namespace {
Program counter_program() {
  return assemble(
      "LOADI r1, 1\n"
      "loop: ADD r0, r1\n"
      "JMP loop\n");
}
}  // namespace

TEST_CASE("record appends and enforces monotone ticks") {
  Program p = counter_program();
  HistoryStore store(p);
  VmState s;
  store.record(s);
  CHECK(store.snapshot_count() == 1);

  s = step(s, p);
  store.record(s);
  CHECK(store.snapshot_count() == 2);

  CHECK_THROWS_AS(store.record(s), HistoryError);  // tick 1 again
}

TEST_CASE("ring buffer evicts the oldest snapshot at capacity") {
  Program p = counter_program();
  HistoryStore store(p, {.capacity = 8, .checkpoint_stride = 4});
  VmState s;
  store.record(s);
  for (int i = 0; i < 20; ++i) {
    s = step(s, p);
    store.record(s);
  }
  CHECK(store.snapshot_count() == 8);
  CHECK(store.query(13, 20).size() == 8);
  CHECK_THROWS_AS(store.query(0, 11), HistoryError);  // evicted
}

TEST_CASE("query returns the inclusive ascending range") {
  Program p = counter_program();
  HistoryStore store(p);
  VmState s;
  store.record(s);
  for (int i = 0; i < 9; ++i) {
    s = step(s, p);
    store.record(s);
  }
  auto snaps = store.query(3, 5);
  REQUIRE(snaps.size() == 3);
  CHECK(snaps[0].tick == 3);
  CHECK(snaps[2].tick == 5);

  CHECK(store.query(0, 0).size() == 1);
  CHECK_THROWS_AS(store.query(100, 200), HistoryError);

  auto empty_kind = [&] {
    try {
      store.query(100, 200);
    } catch (const HistoryError& e) {
      return e.kind;
    }
    return HistoryError::Kind::NonMonotonicTick;
  };
  CHECK(empty_kind() == HistoryError::Kind::EmptyRange);
}

TEST_CASE("reconstruct returns a checkpoint unchanged at its own tick") {
  Program p = counter_program();
  HistoryStore store(p, {.capacity = 1024, .checkpoint_stride = 4});
  VmState s;
  store.record(s);
  for (int i = 0; i < 12; ++i) {
    s = step(s, p);
    store.record(s);
  }
  VmState at8 = store.reconstruct(8);
  CHECK(at8.tick == 8);
  CHECK(state_digest(at8) == store.at(8)->state_digest);
}

TEST_CASE("reconstruct replays between checkpoints and honors the horizon") {
  Program p = counter_program();
  HistoryStore store(p, {.capacity = 6, .checkpoint_stride = 8});
  VmState s;
  store.record(s);
  for (int i = 0; i < 40; ++i) {
    s = step(s, p);
    store.record(s);
  }
  // Retained snapshots are 35..40; checkpoints at 32 and 40 survive.
  for (uint64_t t = 35; t <= 40; ++t) {
    CHECK(state_digest(store.reconstruct(t)) == store.at(t)->state_digest);
  }
  CHECK(store.horizon() == 32);
  CHECK_THROWS_AS(store.reconstruct(7), HistoryError);
  CHECK_THROWS_AS(store.reconstruct(1000), HistoryError);
}

TEST_CASE("replay fidelity holds under random programs and injections") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    Program p = gen_jumpy_program(rng);
    HistoryStore store(p, {.capacity = 4096, .checkpoint_stride = 16});
    std::vector<uint64_t> injections;
    for (int i = 0; i < 4; ++i) injections.push_back(pick(rng, 0, 60));

    VmState s;
    store.record(s);
    for (uint64_t t = 0; t < 64 && s.live(); ++t) {
      for (uint64_t inj : injections) {
        if (inj == t && s.live()) {
          s = inject_interrupt(s, t);
          store.log_event(t, EventKind::InterruptInjected);
        }
      }
      s = step(s, p);
      store.record(s);
    }

    const Snapshot* latest = store.latest();
    REQUIRE(latest != nullptr);
    for (const Snapshot& snap : store.query(0, latest->tick)) {
      CHECK(state_digest(store.reconstruct(snap.tick)) == snap.state_digest);
    }
  }
}

TEST_CASE("flag and kill events replay exactly like live mutation") {
  Program p = counter_program();
  HistoryStore store(p, {.capacity = 1024, .checkpoint_stride = 1024});
  VmState s;
  store.record(s);
  for (uint64_t t = 0; t < 10; ++t) {
    if (t == 4) {
      s.mem[kFlagCell] = 1;
      store.log_event(4, EventKind::FlagSet);
    }
    s = step(s, p);
    store.record(s);
  }
  for (uint64_t t = 0; t <= 10; ++t) {
    CHECK(state_digest(store.reconstruct(t)) == store.at(t)->state_digest);
  }
  CHECK(store.reconstruct(4).mem[kFlagCell] == 0);  // snapshot precedes the event
  CHECK(store.reconstruct(5).mem[kFlagCell] == 1);
}

TEST_CASE("event log rejects decreasing ticks") {
  Program p = counter_program();
  HistoryStore store(p);
  store.log_event(5, EventKind::InterruptInjected);
  CHECK_THROWS_AS(store.log_event(4, EventKind::FlagSet), HistoryError);
}
