#include "vigil/monitor.hpp"

#include <algorithm>
#include <map>

namespace vigil {

const char* finding_kind_name(FindingKind k) {
  switch (k) {
    case FindingKind::CertifiedDivergence: return "CertifiedDivergence";
    case FindingKind::SuspectedLoop: return "SuspectedLoop";
    case FindingKind::NonResponsive: return "NonResponsive";
    case FindingKind::ResourceBudgetExceeded: return "ResourceBudgetExceeded";
  }
  return "?";
}

std::string Finding::line() const {
  return "FINDING tick=" + std::to_string(tick) + " pid=" + pid +
         " kind=" + finding_kind_name(kind) + " evidence=(" +
         std::to_string(evidence_a) + "," + std::to_string(evidence_b) + ")";
}

std::optional<Finding> CycleDetector::observe(const std::string& pid,
                                              const Snapshot& snapshot) {
  // Dead states are out of scope: HALT and fault steps leave pc and data
  // untouched, so a terminal snapshot digests like its predecessor without
  // implying any recurrence of a live configuration.
  if (snapshot.halted || snapshot.faulted) return std::nullopt;
  auto [it, inserted] = first_seen_.try_emplace(snapshot.state_digest, snapshot.tick);
  if (inserted) return std::nullopt;

  Finding f;
  f.tick = snapshot.tick;
  f.pid = pid;
  f.kind = FindingKind::CertifiedDivergence;
  f.evidence_a = it->second;
  f.evidence_b = snapshot.tick;
  f.message = "state at tick " + std::to_string(snapshot.tick) +
              " recurs from tick " + std::to_string(it->second) +
              " with no intervening event";
  return f;
}

void CycleDetector::reset() { first_seen_.clear(); }

std::optional<Finding> detect_suspected_loop(const std::string& pid,
                                             const HistoryStore& history,
                                             const MonitorConfig& config) {
  const size_t window = size_t(config.loop_window);
  if (history.snapshot_count() < window) return std::nullopt;

  auto recent = history.recent(window);
  // pc -> snapshots at that pc, in tick order.
  std::map<uint16_t, std::vector<const Snapshot*>> by_pc;
  for (const Snapshot* s : recent) {
    by_pc[s->pc].push_back(s);
  }
  for (const auto& [pc, hits] : by_pc) {
    if (hits.size() < config.loop_revisit_threshold) continue;
    bool watched_unchanged = true;
    for (uint8_t r : config.watch_set) {
      for (size_t i = 1; i < hits.size() && watched_unchanged; ++i) {
        if (hits[i]->regs[r & 7] != hits[0]->regs[r & 7]) watched_unchanged = false;
      }
      if (!watched_unchanged) break;
    }
    if (!watched_unchanged) continue;

    Finding f;
    f.tick = recent.back()->tick;
    f.pid = pid;
    f.kind = FindingKind::SuspectedLoop;
    f.evidence_a = pc;
    f.evidence_b = hits.size();
    f.message = "pc " + std::to_string(pc) + " revisited " +
                std::to_string(hits.size()) + " times in last " +
                std::to_string(window) + " snapshots with watched registers unchanged";
    return f;
  }
  return std::nullopt;
}

std::optional<Finding> check_interrupt_latency(const std::string& pid,
                                               const VmState& state,
                                               const MonitorConfig& config,
                                               uint64_t now) {
  if (!state.pending_interrupt || !state.interrupt_since) return std::nullopt;
  uint64_t since = *state.interrupt_since;
  if (now < since || now - since <= config.interrupt_deadline) return std::nullopt;

  Finding f;
  f.tick = now;
  f.pid = pid;
  f.kind = FindingKind::NonResponsive;
  f.evidence_a = since;
  f.evidence_b = now;
  f.message = "interrupt pending since tick " + std::to_string(since) +
              " unacknowledged past deadline " +
              std::to_string(config.interrupt_deadline);
  return f;
}

std::optional<Finding> check_resources(const std::string& pid, const VmState& state,
                                       const MonitorConfig& config) {
  if (!config.step_budget || !state.live()) return std::nullopt;
  if (state.tick <= *config.step_budget) return std::nullopt;

  Finding f;
  f.tick = state.tick;
  f.pid = pid;
  f.kind = FindingKind::ResourceBudgetExceeded;
  f.evidence_a = *config.step_budget;
  f.evidence_b = state.tick;
  f.message = "live at tick " + std::to_string(state.tick) + " past step budget " +
              std::to_string(*config.step_budget);
  return f;
}

VmState set_flag(const VmState& state) {
  if (!state.live()) {
    throw VmError(VmError::Kind::FlagOnDead, "cannot flag a dead process");
  }
  VmState next = state;
  next.mem[kFlagCell] = 1;
  return next;
}

}  // namespace vigil
