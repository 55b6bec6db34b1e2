#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vigil/vm.hpp"

namespace vigil {

struct Snapshot {
  uint64_t tick = 0;
  uint16_t pc = 0;
  std::string current_instruction;
  std::array<uint64_t, kRegCount> regs{};
  Digest mem_digest{};
  bool pending_interrupt = false;
  bool halted = false;
  bool faulted = false;
  Digest state_digest{};
};

Snapshot make_snapshot(const VmState& state, const Program& program);

// `tick pc instr regs... flags state_digest_hex`, tab-separated.
std::string snapshot_line(const Snapshot& s);

enum class EventKind : uint8_t {
  InterruptInjected,
  FlagSet,
  ProcessStarted,
  ProcessKilled,
};

const char* event_kind_name(EventKind k);

struct EventLogEntry {
  uint64_t tick = 0;
  EventKind kind = EventKind::ProcessStarted;
};

struct HistoryError : std::runtime_error {
  enum class Kind { NonMonotonicTick, EmptyRange, TickBeforeHorizon, UnreachableTick };
  HistoryError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
  Kind kind;
};

struct HistoryConfig {
  size_t capacity = 65536;          // snapshot ring size
  uint64_t checkpoint_stride = 1024;  // full VmState every Q ticks
};

// Time-indexed archive of one process: snapshot ring, periodic full-state
// checkpoints, and the external-event log that replay depends on.
//
// Snapshots and checkpoints hold the state as stepped into a tick, before any
// boundary events at that tick; reconstruct() applies each logged event at
// its tick after that point, so replay mirrors the supervisor loop exactly.
class HistoryStore {
 public:
  explicit HistoryStore(Program program, HistoryConfig config = {});

  // Records a snapshot (strictly increasing ticks) and a checkpoint when
  // tick % checkpoint_stride == 0. `snapshot_due` false checkpoints only.
  void record(const VmState& state, bool snapshot_due = true);

  void log_event(uint64_t tick, EventKind kind);

  // Retained snapshots with from <= tick <= to, ascending. Throws EmptyRange
  // when nothing in range is retained.
  std::vector<Snapshot> query(uint64_t from_tick, uint64_t to_tick) const;

  // Replays from the nearest checkpoint <= tick, re-applying logged events.
  VmState reconstruct(uint64_t tick) const;

  const Snapshot* latest() const;
  const Snapshot* at(uint64_t tick) const;
  // Up to `count` most recently recorded snapshots, oldest first.
  std::vector<const Snapshot*> recent(size_t count) const;

  size_t snapshot_count() const { return snapshots_.size(); }
  std::optional<uint64_t> horizon() const;  // oldest reconstructible tick
  const std::deque<EventLogEntry>& events() const { return events_; }
  const Program& program() const { return program_; }

 private:
  Program program_;
  HistoryConfig config_;
  std::deque<Snapshot> snapshots_;
  std::deque<VmState> checkpoints_;
  std::deque<EventLogEntry> events_;
  std::optional<uint64_t> last_tick_;
};

}  // namespace vigil
