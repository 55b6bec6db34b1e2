#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vigil/digest.hpp"
#include "vigil/prop.hpp"
#include "vigil/prop_code.hpp"

namespace vigil {

enum class JudgementCategory : uint8_t { Health, Security, Safety };

const char* category_name(JudgementCategory c);
std::optional<JudgementCategory> category_from_name(std::string_view name);

struct JudgementRecord {
  uint64_t id = 0;  // sequential from 1
  uint64_t tick = 0;
  std::string pid;
  std::string prop_code_hex;
  bool result = false;  // yes|no, nothing else
  Digest snapshot_digest{};
  Digest prev_hash{};
  Digest entry_hash{};

  // Chained bytes: the tab-separated prefix id..snapshot_digest_hex.
  std::string canonical_prefix() const;
  // Full export line: prefix + prev_hash + entry_hash, tab-separated.
  std::string line() const;
};

struct ScheduleEntry {
  std::string name;
  Prop prop;
  uint64_t period = 1;  // >= 1
  JudgementCategory category = JudgementCategory::Health;
};

using JudgementSchedule = std::vector<ScheduleEntry>;

struct ChainVerdict {
  bool ok = true;
  uint64_t bad_entry_id = 0;  // first entry whose hash or link fails
  std::string detail;
};

class JudgementLog;

// Evaluates `prop` against `state` and appends the hash-chained record.
// Evaluation errors propagate without touching the log: a judgement is
// yes or no, never fabricated.
const JudgementRecord& judge(JudgementLog& log, uint64_t tick,
                             const std::string& pid, const Prop& prop,
                             const VmState& state);

// Runs every schedule entry whose period divides `now` against each target,
// in schedule order. Evaluation errors are routed to `on_refusal`.
using RefusalHandler =
    std::function<void(const ScheduleEntry&, const std::string& pid,
                       const PropError&)>;
std::vector<JudgementRecord> run_schedule(
    const JudgementSchedule& schedule, uint64_t now, JudgementLog& log,
    const std::vector<std::pair<std::string, const VmState*>>& targets,
    const RefusalHandler& on_refusal = {});

// Append-only, hash-chained judgement log. entry_hash = H(prev_hash ||
// canonical entry bytes); genesis prev_hash is 32 zero bytes.
class JudgementLog {
 public:
  const JudgementRecord& append(uint64_t tick, const std::string& pid,
                                const Prop& prop, bool result,
                                const Digest& snapshot_digest);

  ChainVerdict verify() const;

  const std::vector<JudgementRecord>& records() const { return records_; }
  std::vector<std::string> export_lines() const;

  static Digest chain_hash(const Digest& prev, const std::string& canonical_prefix);
  // Recomputes the chain from exported lines.
  static ChainVerdict verify_lines(const std::vector<std::string>& lines);

 private:
  std::vector<JudgementRecord> records_;
};

}  // namespace vigil
