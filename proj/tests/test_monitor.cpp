#include <doctest.h>

#include "support/gen.hpp"
#include "vigil/assembler.hpp"
#include "vigil/monitor.hpp"

using namespace vigil;
using namespace vigil::testsupport;

TEST_CASE("a self-jump is certified divergent with evidence (0, 1)") {
  Program p = assemble("loop: JMP loop");
  VmState s;
  CycleDetector det;
  CHECK(!det.observe("p", make_snapshot(s, p)));
  s = step(s, p);
  auto finding = det.observe("p", make_snapshot(s, p));
  REQUIRE(finding.has_value());
  CHECK(finding->kind == FindingKind::CertifiedDivergence);
  CHECK(finding->evidence_a == 0);
  CHECK(finding->evidence_b == 1);
  CHECK(finding->line() == "FINDING tick=1 pid=p kind=CertifiedDivergence evidence=(0,1)");
}

TEST_CASE("a strictly counting program is never certified") {
  Program p = assemble(
      "LOADI r1, 1\n"
      "loop: ADD r0, r1\n"
      "JMP loop\n");
  VmState s;
  CycleDetector det;
  for (int i = 0; i < 2000; ++i) {
    CHECK(!det.observe("p", make_snapshot(s, p)));
    s = step(s, p);
  }
}

TEST_CASE("an intervening event voids the certificate") {
  Program p = assemble("loop: JMP loop");
  VmState s;
  CycleDetector det;
  det.observe("p", make_snapshot(s, p));
  // External event between the two occurrences: closure no longer holds.
  det.reset();
  s = step(s, p);
  CHECK(!det.observe("p", make_snapshot(s, p)));
}

TEST_CASE("certificates replay soundly for 10x their period") {
  std::mt19937_64 rng(31);
  int certified = 0;
  for (int trial = 0; trial < 200; ++trial) {
    Program p = gen_jumpy_program(rng);
    VmState s;
    CycleDetector det;
    det.observe("p", make_snapshot(s, p));
    std::optional<Finding> cert;
    std::vector<VmState> states{s};
    for (int i = 0; i < 600 && s.live() && !cert; ++i) {
      s = step(s, p);
      states.push_back(s);
      cert = det.observe("p", make_snapshot(s, p));
    }
    if (!cert) continue;
    ++certified;

    uint64_t period = cert->evidence_b - cert->evidence_a;
    REQUIRE(period >= 1);
    VmState replay = states[cert->evidence_a];
    Digest anchor = state_digest(replay);
    for (uint64_t step_i = 1; step_i <= 10 * period; ++step_i) {
      replay = step(replay, p);
      REQUIRE(!replay.halted);
      REQUIRE(!replay.faulted);
      if (step_i % period == 0) REQUIRE(state_digest(replay) == anchor);
    }
  }
  CHECK(certified > 10);  // the jump-heavy grammar must actually produce cycles
}

TEST_CASE("suspected loop fires only when watched registers stagnate") {
  MonitorConfig cfg;
  cfg.loop_window = 16;
  cfg.loop_revisit_threshold = 4;
  cfg.watch_set = {0};

  Program stuck = assemble(
      "loop: ADD r0, r1\n"
      "JMP loop\n");

  auto run_window = [&](uint64_t r1) {
    HistoryStore store(stuck);
    VmState s;
    s.regs[1] = r1;
    store.record(s);
    std::optional<Finding> finding;
    for (int i = 0; i < 40 && !finding; ++i) {
      s = step(s, stuck);
      store.record(s);
      finding = detect_suspected_loop("p", store, cfg);
    }
    return finding;
  };

  auto finding = run_window(0);  // r0 never changes
  REQUIRE(finding.has_value());
  CHECK(finding->kind == FindingKind::SuspectedLoop);

  CHECK(!run_window(1));  // r0 keeps growing
}

TEST_CASE("suspected loop needs a full window") {
  MonitorConfig cfg;
  cfg.loop_window = 64;
  cfg.loop_revisit_threshold = 4;

  Program p = assemble("NOP\nNOP\nHALT");
  HistoryStore store(p);
  VmState s;
  store.record(s);
  while (s.live()) {
    s = step(s, p);
    store.record(s);
    CHECK(!detect_suspected_loop("p", store, cfg));
  }
}

TEST_CASE("straight-line halting programs raise no loop suspicion") {
  std::mt19937_64 rng(32);
  MonitorConfig cfg;  // defaults: W=256, M=8, empty watch set
  for (int trial = 0; trial < 60; ++trial) {
    Program p = gen_halting_program(rng);
    HistoryStore store(p);
    VmState s;
    store.record(s);
    for (int i = 0; i < 400 && s.live(); ++i) {
      s = step(s, p);
      store.record(s);
      if (s.live()) {
        CHECK(!detect_suspected_loop("p", store, cfg));
      }
    }
    CHECK(!s.live());  // forward-only flow must have halted or faulted
  }
}

TEST_CASE("interrupt latency deadline is inclusive") {
  MonitorConfig cfg;  // K = 64
  VmState s = inject_interrupt(VmState{}, 10);
  CHECK(!check_interrupt_latency("p", s, cfg, 74));  // exactly at deadline
  auto finding = check_interrupt_latency("p", s, cfg, 75);
  REQUIRE(finding.has_value());
  CHECK(finding->kind == FindingKind::NonResponsive);
  CHECK(finding->evidence_a == 10);
  CHECK(finding->evidence_b == 75);
}

TEST_CASE("acknowledged interrupts never go non-responsive") {
  MonitorConfig cfg;
  Program p = assemble("loop: ACK\nJMP loop");
  VmState s = inject_interrupt(VmState{}, 0);
  for (uint64_t now = 1; now < 200; ++now) {
    s = step(s, p);
    CHECK(!check_interrupt_latency("p", s, cfg, now));
  }
}

TEST_CASE("resource budget checks") {
  MonitorConfig cfg;
  VmState s;
  s.tick = 1001;
  CHECK(!check_resources("p", s, cfg));  // no budget configured

  cfg.step_budget = 1000;
  s.tick = 900;
  s.halted = true;
  CHECK(!check_resources("p", s, cfg));  // halted before the budget

  s.halted = false;
  s.tick = 1000;
  CHECK(!check_resources("p", s, cfg));
  s.tick = 1001;
  auto finding = check_resources("p", s, cfg);
  REQUIRE(finding.has_value());
  CHECK(finding->kind == FindingKind::ResourceBudgetExceeded);
}

TEST_CASE("set_flag touches exactly the flag cell") {
  std::mt19937_64 rng(33);
  VmState s = gen_state(rng);
  s.halted = false;
  s.faulted = false;
  VmState flagged = set_flag(s);
  CHECK(flagged.mem[kFlagCell] == 1);

  VmState again = set_flag(flagged);
  CHECK(state_digest(again) == state_digest(flagged));  // idempotent

  flagged.mem[kFlagCell] = s.mem[kFlagCell];
  CHECK(state_digest(flagged) == state_digest(s));  // nothing else moved

  VmState dead;
  dead.halted = true;
  CHECK_THROWS_AS(set_flag(dead), VmError);
}

TEST_CASE("finding kinds claim divergence or suspicion, never termination") {
  // The detector vocabulary is the whole monitor surface: there is no kind
  // that asserts a program will halt.
  for (FindingKind k : {FindingKind::CertifiedDivergence, FindingKind::SuspectedLoop,
                        FindingKind::NonResponsive, FindingKind::ResourceBudgetExceeded}) {
    std::string name = finding_kind_name(k);
    CHECK(name.find("Halt") == std::string::npos);
    CHECK(name.find("Terminat") == std::string::npos);
  }
}
