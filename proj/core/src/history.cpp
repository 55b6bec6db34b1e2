#include "vigil/history.hpp"

#include <algorithm>

namespace vigil {

Snapshot make_snapshot(const VmState& state, const Program& program) {
  Snapshot s;
  s.tick = state.tick;
  s.pc = state.pc;
  s.current_instruction = state.pc < program.size()
                              ? program.code[state.pc].text()
                              : std::string("<invalid>");
  s.regs = state.regs;
  s.mem_digest = memory_digest(state);
  s.pending_interrupt = state.pending_interrupt;
  s.halted = state.halted;
  s.faulted = state.faulted;
  s.state_digest = state_digest(state);
  return s;
}

std::string snapshot_line(const Snapshot& s) {
  std::string line = std::to_string(s.tick);
  line += '\t';
  line += std::to_string(s.pc);
  line += '\t';
  line += s.current_instruction;
  for (uint64_t r : s.regs) {
    line += '\t';
    line += std::to_string(r);
  }
  line += '\t';
  std::string flags;
  if (s.pending_interrupt) flags += 'i';
  if (s.halted) flags += 'h';
  if (s.faulted) flags += 'f';
  if (flags.empty()) flags = "-";
  line += flags;
  line += '\t';
  line += to_hex(s.state_digest);
  return line;
}

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::InterruptInjected: return "InterruptInjected";
    case EventKind::FlagSet: return "FlagSet";
    case EventKind::ProcessStarted: return "ProcessStarted";
    case EventKind::ProcessKilled: return "ProcessKilled";
  }
  return "?";
}

HistoryStore::HistoryStore(Program program, HistoryConfig config)
    : program_(std::move(program)), config_(config) {
  if (config_.capacity == 0) config_.capacity = 1;
  if (config_.checkpoint_stride == 0) config_.checkpoint_stride = 1;
}

void HistoryStore::record(const VmState& state, bool snapshot_due) {
  if (last_tick_ && state.tick <= *last_tick_) {
    throw HistoryError(HistoryError::Kind::NonMonotonicTick,
                       "tick " + std::to_string(state.tick) +
                           " not after " + std::to_string(*last_tick_));
  }
  last_tick_ = state.tick;

  if (state.tick % config_.checkpoint_stride == 0) {
    checkpoints_.push_back(state);
  }
  if (!snapshot_due) return;

  snapshots_.push_back(make_snapshot(state, program_));
  if (snapshots_.size() > config_.capacity) {
    snapshots_.pop_front();
    // Drop checkpoints no longer needed for the retained window: keep the
    // newest checkpoint at or before the oldest retained snapshot.
    uint64_t oldest = snapshots_.front().tick;
    while (checkpoints_.size() >= 2 && checkpoints_[1].tick <= oldest) {
      checkpoints_.pop_front();
    }
  }
}

void HistoryStore::log_event(uint64_t tick, EventKind kind) {
  if (!events_.empty() && tick < events_.back().tick) {
    throw HistoryError(HistoryError::Kind::NonMonotonicTick,
                       "event tick " + std::to_string(tick) + " before " +
                           std::to_string(events_.back().tick));
  }
  events_.push_back({tick, kind});
}

std::vector<Snapshot> HistoryStore::query(uint64_t from_tick, uint64_t to_tick) const {
  std::vector<Snapshot> out;
  if (from_tick <= to_tick) {
    auto lo = std::lower_bound(snapshots_.begin(), snapshots_.end(), from_tick,
                               [](const Snapshot& s, uint64_t t) { return s.tick < t; });
    for (auto it = lo; it != snapshots_.end() && it->tick <= to_tick; ++it) {
      out.push_back(*it);
    }
  }
  if (out.empty()) {
    throw HistoryError(HistoryError::Kind::EmptyRange,
                       "no retained snapshots in [" + std::to_string(from_tick) +
                           ", " + std::to_string(to_tick) + "]");
  }
  return out;
}

VmState HistoryStore::reconstruct(uint64_t tick) const {
  auto cp = std::upper_bound(
      checkpoints_.begin(), checkpoints_.end(), tick,
      [](uint64_t t, const VmState& s) { return t < s.tick; });
  if (cp == checkpoints_.begin()) {
    throw HistoryError(HistoryError::Kind::TickBeforeHorizon,
                       "tick " + std::to_string(tick) + " precedes oldest checkpoint");
  }
  --cp;
  if (last_tick_ && tick > *last_tick_) {
    throw HistoryError(HistoryError::Kind::UnreachableTick,
                       "tick " + std::to_string(tick) + " beyond recorded history");
  }

  VmState cur = *cp;
  auto ev = std::lower_bound(
      events_.begin(), events_.end(), cur.tick,
      [](const EventLogEntry& e, uint64_t t) { return e.tick < t; });
  while (cur.tick < tick) {
    for (; ev != events_.end() && ev->tick == cur.tick; ++ev) {
      switch (ev->kind) {
        case EventKind::InterruptInjected:
          cur = inject_interrupt(cur, ev->tick);
          break;
        case EventKind::FlagSet:
          cur.mem[kFlagCell] = 1;
          break;
        case EventKind::ProcessKilled:
          cur.halted = true;
          break;
        case EventKind::ProcessStarted:
          break;
      }
    }
    if (!cur.live()) {
      throw HistoryError(HistoryError::Kind::UnreachableTick,
                         "process dead at tick " + std::to_string(cur.tick) +
                             ", cannot replay to " + std::to_string(tick));
    }
    cur = step(cur, program_);
  }
  return cur;
}

const Snapshot* HistoryStore::latest() const {
  return snapshots_.empty() ? nullptr : &snapshots_.back();
}

const Snapshot* HistoryStore::at(uint64_t tick) const {
  auto it = std::lower_bound(snapshots_.begin(), snapshots_.end(), tick,
                             [](const Snapshot& s, uint64_t t) { return s.tick < t; });
  if (it == snapshots_.end() || it->tick != tick) return nullptr;
  return &*it;
}

std::vector<const Snapshot*> HistoryStore::recent(size_t count) const {
  size_t n = std::min(count, snapshots_.size());
  std::vector<const Snapshot*> out;
  out.reserve(n);
  for (size_t i = snapshots_.size() - n; i < snapshots_.size(); ++i) {
    out.push_back(&snapshots_[i]);
  }
  return out;
}

std::optional<uint64_t> HistoryStore::horizon() const {
  if (checkpoints_.empty()) return std::nullopt;
  return checkpoints_.front().tick;
}

}  // namespace vigil
