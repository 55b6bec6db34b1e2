#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "vigil/history.hpp"
#include "vigil/vm.hpp"

namespace vigil {

enum class FindingKind : uint8_t {
  CertifiedDivergence,
  SuspectedLoop,
  NonResponsive,
  ResourceBudgetExceeded,
};

const char* finding_kind_name(FindingKind k);

struct Finding {
  uint64_t tick = 0;
  std::string pid;
  FindingKind kind = FindingKind::SuspectedLoop;
  uint64_t evidence_a = 0;
  uint64_t evidence_b = 0;
  std::string message;

  // `FINDING tick=<t> pid=<p> kind=<k> evidence=(<a>,<b>)`
  std::string line() const;
};

struct MonitorConfig {
  uint64_t interrupt_deadline = 64;     // K: ticks an interrupt may stay pending
  uint64_t loop_window = 256;           // W: snapshots examined by the loop heuristic
  uint64_t loop_revisit_threshold = 8;  // M: pc recurrences that raise suspicion
  std::vector<uint8_t> watch_set;       // registers treated as loop-condition variables
  std::optional<uint64_t> step_budget;
};

// Tracks full-state digests seen since the last external event. A digest
// recurrence with no intervening event certifies non-termination: the
// transition is deterministic and closed, so the execution must cycle.
class CycleDetector {
 public:
  std::optional<Finding> observe(const std::string& pid, const Snapshot& snapshot);
  // Call whenever an external event (interrupt, flag write, kill) touches the
  // process; digests gathered before it no longer certify anything.
  void reset();

 private:
  std::unordered_map<Digest, uint64_t, DigestHash> first_seen_;
};

// Heuristic: some pc recurs >= M times within the last W snapshots while every
// watched register stays unchanged across those recurrences. Requires a full
// window; never a proof, never kills anything by itself.
std::optional<Finding> detect_suspected_loop(const std::string& pid,
                                             const HistoryStore& history,
                                             const MonitorConfig& config);

// NonResponsive once an interrupt has been pending for more than K ticks.
std::optional<Finding> check_interrupt_latency(const std::string& pid,
                                               const VmState& state,
                                               const MonitorConfig& config,
                                               uint64_t now);

// ResourceBudgetExceeded once a live process outruns its step budget.
std::optional<Finding> check_resources(const std::string& pid, const VmState& state,
                                       const MonitorConfig& config);

// Writes 1 into the reserved flag cell (mem[255]); the monitored program can
// observe it with LOAD. Touches nothing else.
VmState set_flag(const VmState& state);

}  // namespace vigil
