#include "vigil/judgement.hpp"

#include <charconv>
#include <cstring>

namespace vigil {

const char* category_name(JudgementCategory c) {
  switch (c) {
    case JudgementCategory::Health: return "health";
    case JudgementCategory::Security: return "security";
    case JudgementCategory::Safety: return "safety";
  }
  return "?";
}

std::optional<JudgementCategory> category_from_name(std::string_view name) {
  if (name == "health") return JudgementCategory::Health;
  if (name == "security") return JudgementCategory::Security;
  if (name == "safety") return JudgementCategory::Safety;
  return std::nullopt;
}

std::string JudgementRecord::canonical_prefix() const {
  std::string s = std::to_string(id);
  s += '\t';
  s += std::to_string(tick);
  s += '\t';
  s += pid;
  s += '\t';
  s += prop_code_hex;
  s += '\t';
  s += result ? "yes" : "no";
  s += '\t';
  s += to_hex(snapshot_digest);
  return s;
}

std::string JudgementRecord::line() const {
  return canonical_prefix() + '\t' + to_hex(prev_hash) + '\t' + to_hex(entry_hash);
}

Digest JudgementLog::chain_hash(const Digest& prev, const std::string& prefix) {
  Sha256 h;
  h.update(prev);
  h.update(prefix);
  return h.finish();
}

const JudgementRecord& JudgementLog::append(uint64_t tick, const std::string& pid,
                                            const Prop& prop, bool result,
                                            const Digest& snapshot_digest) {
  JudgementRecord rec;
  rec.id = records_.size() + 1;
  rec.tick = tick;
  rec.pid = pid;
  rec.prop_code_hex = encode(prop).hex();
  rec.result = result;
  rec.snapshot_digest = snapshot_digest;
  rec.prev_hash = records_.empty() ? Digest{} : records_.back().entry_hash;
  rec.entry_hash = chain_hash(rec.prev_hash, rec.canonical_prefix());
  records_.push_back(std::move(rec));
  return records_.back();
}

const JudgementRecord& judge(JudgementLog& log, uint64_t tick,
                             const std::string& pid, const Prop& prop,
                             const VmState& state) {
  bool verdict = evaluate(prop, state);
  return log.append(tick, pid, prop, verdict, state_digest(state));
}

std::vector<JudgementRecord> run_schedule(
    const JudgementSchedule& schedule, uint64_t now, JudgementLog& log,
    const std::vector<std::pair<std::string, const VmState*>>& targets,
    const RefusalHandler& on_refusal) {
  std::vector<JudgementRecord> out;
  for (const ScheduleEntry& entry : schedule) {
    if (now % entry.period != 0) continue;
    for (const auto& [pid, state] : targets) {
      try {
        out.push_back(judge(log, now, pid, entry.prop, *state));
      } catch (const PropError& e) {
        if (on_refusal) on_refusal(entry, pid, e);
      }
    }
  }
  return out;
}

ChainVerdict JudgementLog::verify() const {
  return verify_lines(export_lines());
}

std::vector<std::string> JudgementLog::export_lines() const {
  std::vector<std::string> lines;
  lines.reserve(records_.size());
  for (const auto& r : records_) lines.push_back(r.line());
  return lines;
}

ChainVerdict JudgementLog::verify_lines(const std::vector<std::string>& lines) {
  Digest prev{};
  uint64_t expect_id = 1;
  for (const std::string& line : lines) {
    // Split off the last two tab-separated fields (prev_hash, entry_hash).
    size_t last_tab = line.rfind('\t');
    if (last_tab == std::string::npos) {
      return {false, expect_id, "malformed line"};
    }
    size_t prev_tab = line.rfind('\t', last_tab - 1);
    if (prev_tab == std::string::npos) {
      return {false, expect_id, "malformed line"};
    }
    std::string prefix = line.substr(0, prev_tab);
    auto prev_hash = digest_from_hex(line.substr(prev_tab + 1, last_tab - prev_tab - 1));
    auto entry_hash = digest_from_hex(line.substr(last_tab + 1));
    if (!prev_hash || !entry_hash) {
      return {false, expect_id, "bad hash field"};
    }

    size_t first_tab = prefix.find('\t');
    uint64_t id = 0;
    if (first_tab == std::string::npos ||
        std::from_chars(prefix.data(), prefix.data() + first_tab, id).ec !=
            std::errc() ||
        id != expect_id) {
      return {false, expect_id, "bad or out-of-sequence id"};
    }
    if (*prev_hash != prev) {
      return {false, id, "prev_hash does not match previous entry"};
    }
    Digest recomputed = chain_hash(prev, prefix);
    if (recomputed != *entry_hash) {
      return {false, id, "entry hash mismatch"};
    }
    // yes/no is the only verdict alphabet the chain accepts.
    size_t field = 0;
    size_t pos = 0;
    std::string result_field;
    while (field < 5 && pos != std::string::npos) {
      size_t next = prefix.find('\t', pos);
      if (field == 4) {
        result_field = prefix.substr(pos, next == std::string::npos
                                              ? std::string::npos
                                              : next - pos);
      }
      pos = next == std::string::npos ? std::string::npos : next + 1;
      ++field;
    }
    if (result_field != "yes" && result_field != "no") {
      return {false, id, "result is not yes/no"};
    }

    prev = *entry_hash;
    ++expect_id;
  }
  return {};
}

}  // namespace vigil
